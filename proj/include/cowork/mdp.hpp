#pragma once
// Finite-horizon, time-expanded MDP over grid cells. States are
// (cell, τ) with τ in 1..N; transitions are deterministic; cost is rebuilt
// each tick from the current human estimates and solved by backward
// induction.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "cowork/errors.hpp"
#include "cowork/grid.hpp"
#include "cowork/human_sim.hpp"
#include "cowork/perception.hpp"

namespace cowork {

/// UAS actions; the enumerator order is also the argmin tie-break order.
enum class Action : std::uint8_t { E = 0, NE, N, NW, W, SW, S, SE, O };

inline constexpr int kActionCount = 9;

inline constexpr std::array<Action, kActionCount> kActions{
    Action::E, Action::NE, Action::N, Action::NW, Action::W,
    Action::SW, Action::S, Action::SE, Action::O};

/// 1-based index used in traces: 1..9 = E, NE, N, NW, W, SW, S, SE, O.
constexpr int action_index(Action a) noexcept { return static_cast<int>(a) + 1; }

inline std::string_view to_string(Action a) {
    static constexpr std::array<std::string_view, kActionCount> names{
        "E", "NE", "N", "NW", "W", "SW", "S", "SE", "O"};
    return names[static_cast<std::size_t>(a)];
}

constexpr Cell action_delta(Action a) noexcept {
    switch (a) {
        case Action::E: return {1, 0};
        case Action::NE: return {1, 1};
        case Action::N: return {0, 1};
        case Action::NW: return {-1, 1};
        case Action::W: return {-1, 0};
        case Action::SW: return {-1, -1};
        case Action::S: return {0, -1};
        case Action::SE: return {1, -1};
        case Action::O: return {0, 0};
    }
    return {0, 0};
}

struct TimeState {
    Cell r;
    int tau = 1;

    friend bool operator==(const TimeState&, const TimeState&) = default;
};

/// Deterministic successor function over (cell, τ). Each coordinate moves
/// independently and clamps at the grid border; τ advances and saturates
/// at the last layer. Obstacles do not block motion; the cost does.
class Transitions {
public:
    Transitions(int nx, int ny, int horizon) : nx_(nx), ny_(ny), horizon_(horizon) {
        if (horizon < 1) throw ValidationError("planning horizon must be at least 1");
        const std::size_t cells = static_cast<std::size_t>(nx) * ny;
        next_cell_.resize(cells * kActionCount);
        for (std::size_t i = 0; i < cells; ++i) {
            const Cell c{static_cast<int>(i % nx) + 1, static_cast<int>(i / nx) + 1};
            for (Action a : kActions) {
                const Cell n = step(c, a);
                next_cell_[i * kActionCount + static_cast<std::size_t>(a)] =
                    static_cast<std::uint32_t>((n.y - 1) * nx + (n.x - 1));
            }
        }
    }

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    int horizon() const noexcept { return horizon_; }
    std::size_t cell_count() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
    std::size_t state_count() const noexcept { return cell_count() * horizon_; }

    Cell step(Cell c, Action a) const noexcept {
        const Cell d = action_delta(a);
        Cell n = c;
        if (d.x > 0 && c.x < nx_) n.x = c.x + 1;
        if (d.x < 0 && c.x > 1) n.x = c.x - 1;
        if (d.y > 0 && c.y < ny_) n.y = c.y + 1;
        if (d.y < 0 && c.y > 1) n.y = c.y - 1;
        return n;
    }

    TimeState successor(const TimeState& s, Action a) const noexcept {
        return {step(s.r, a), std::min(s.tau + 1, horizon_)};
    }

    std::uint32_t next_cell_index(std::size_t cell, Action a) const noexcept {
        return next_cell_[cell * kActionCount + static_cast<std::size_t>(a)];
    }

private:
    int nx_;
    int ny_;
    int horizon_;
    std::vector<std::uint32_t> next_cell_;
};

inline Transitions build_transitions(const GridWorkplace& world, int horizon) {
    return Transitions(world.nx(), world.ny(), horizon);
}

/// Values laid out as [τ-1][row-major cell], shared by cost and value fields.
class LayeredField {
public:
    LayeredField() = default;
    LayeredField(int nx, int ny, int horizon, double fill = 0.0)
        : nx_(nx), ny_(ny), horizon_(horizon),
          data_(static_cast<std::size_t>(nx) * ny * horizon, fill) {}

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    int horizon() const noexcept { return horizon_; }
    std::size_t layer_size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }

    double& at(Cell r, int tau) { return data_[offset(r, tau)]; }
    double at(Cell r, int tau) const { return data_[offset(r, tau)]; }
    double& at(std::size_t cell, int tau) { return data_[(tau - 1) * layer_size() + cell]; }
    double at(std::size_t cell, int tau) const { return data_[(tau - 1) * layer_size() + cell]; }

    const std::vector<double>& raw() const noexcept { return data_; }

private:
    std::size_t offset(Cell r, int tau) const {
        return static_cast<std::size_t>(tau - 1) * layer_size() +
               static_cast<std::size_t>(r.y - 1) * nx_ + static_cast<std::size_t>(r.x - 1);
    }

    int nx_ = 0;
    int ny_ = 0;
    int horizon_ = 0;
    std::vector<double> data_;
};

struct CostParams {
    double c0 = 100.0;
    double c_goal = -1e4;
    double c_obs = 1e4;
    /// Debug: sum the human term over every horizon layer instead of using
    /// the layer's own projection, making it τ-independent.
    bool sum_over_horizon = false;
};

/// Where one candidate trajectory puts the human at each future layer.
struct CandidateForecast {
    PlaceId candidate = 0;
    double prob = 0.0;
    std::vector<DesiredState> projection;  // index τ-1
};

struct HumanForecast {
    int human = 0;
    std::vector<CandidateForecast> candidates;
};

struct CostField {
    Cell goal;
    CostParams params;
    long k = 0;
    LayeredField values;
    LayeredField human_term;  // c0-weighted occupancy only, for diagnostics

    double at(Cell r, int tau) const { return values.at(r, tau); }
    int horizon() const noexcept { return values.horizon(); }
};

/// Forecast each candidate `ahead + τ` steps past current progress, with the
/// intention probabilities held fixed across the horizon.
inline HumanForecast forecast(const HumanTrack& track, const std::map<PlaceId, double>& probs,
                              int horizon) {
    HumanForecast out{track.id, {}};
    for (PlaceId c : track.candidates) {
        CandidateForecast cf;
        cf.candidate = c;
        auto it = probs.find(c);
        cf.prob = it == probs.end() ? 0.0 : it->second;
        for (int tau = 1; tau <= horizon; ++tau)
            cf.projection.push_back(desired_state(track, c, static_cast<std::size_t>(tau)));
        out.candidates.push_back(std::move(cf));
    }
    return out;
}

/// C(r,τ): c_goal at the goal, c_obs on obstacles, otherwise the distance to
/// the goal plus c0 times the expected distraction mass of every human at
/// its projected desired cell for layer τ.
inline CostField build_cost(const GridWorkplace& world, Cell goal,
                            const std::vector<HumanForecast>& humans,
                            const DistractionModel& distraction, const CostParams& params,
                            int horizon, long k = 0) {
    if (!world.is_free(goal)) throw InvalidCell("goal " + to_string(goal) + " is not a free cell");
    CostField field{goal, params, k, LayeredField(world.nx(), world.ny(), horizon),
                    LayeredField(world.nx(), world.ny(), horizon)};

    for (const HumanForecast& hf : humans) {
        for (const CandidateForecast& cf : hf.candidates) {
            if (static_cast<int>(cf.projection.size()) < horizon)
                throw MissingProjection("human " + std::to_string(hf.human) + " candidate " +
                                        std::to_string(cf.candidate) + " has " +
                                        std::to_string(cf.projection.size()) +
                                        " projected states, need " + std::to_string(horizon));
            if (cf.prob == 0.0) continue;
            for (int tau = 1; tau <= horizon; ++tau) {
                const DesiredState& ds = cf.projection[tau - 1];
                for (const auto& [cell, alpha] :
                     distraction.distribution(hf.human, ds.current, ds.velocity.speed_class, world)) {
                    const double add = params.c0 * cf.prob * alpha;
                    if (params.sum_over_horizon) {
                        for (int t2 = 1; t2 <= horizon; ++t2) field.human_term.at(cell, t2) += add;
                    } else {
                        field.human_term.at(cell, tau) += add;
                    }
                }
            }
        }
    }

    for (int tau = 1; tau <= horizon; ++tau) {
        for (std::size_t i = 0; i < field.values.layer_size(); ++i) {
            const Cell r = world.cell_at(i);
            double v;
            if (r == goal)
                v = params.c_goal;
            else if (world.is_obstacle(r))
                v = params.c_obs;
            else
                v = euclidean(r, goal) + field.human_term.at(i, tau);
            field.values.at(i, tau) = v;
        }
    }
    return field;
}

struct PlanResult {
    LayeredField value;
    std::vector<Action> policy;  // [τ-1][cell]
    std::optional<Action> first_action;

    Action action_at(std::size_t cell, int tau) const {
        return policy[(tau - 1) * value.layer_size() + cell];
    }
    Action action_at(Cell r, int tau) const {
        return action_at(static_cast<std::size_t>(r.y - 1) * value.nx() + (r.x - 1), tau);
    }
};

/// Backward induction: V(·,N) = C(·,N); V(r,τ) = C(r,τ) + γ·min_a V(f(r,a),τ+1).
/// The first action in E..O order attaining the minimum is kept. When
/// `start` is given, first_action is the policy at (start, 1).
inline PlanResult solve(const CostField& cost, const Transitions& f, double gamma,
                        std::optional<Cell> start = std::nullopt) {
    if (gamma < 0.0 || gamma > 1.0) throw ValidationError("discount must lie in [0, 1]");
    const int horizon = cost.horizon();
    if (horizon != f.horizon() || cost.values.nx() != f.nx() || cost.values.ny() != f.ny())
        throw ValidationError("cost field and transition model disagree on dimensions");

    const std::size_t n = f.cell_count();
    PlanResult out{LayeredField(f.nx(), f.ny(), horizon),
                   std::vector<Action>(n * horizon, Action::O), std::nullopt};

    for (std::size_t i = 0; i < n; ++i) out.value.at(i, horizon) = cost.values.at(i, horizon);
    for (int tau = horizon - 1; tau >= 1; --tau) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            Action arg = Action::O;
            for (Action a : kActions) {
                const double v = out.value.at(f.next_cell_index(i, a), tau + 1);
                if (v < best) {
                    best = v;
                    arg = a;
                }
            }
            out.value.at(i, tau) = cost.values.at(i, tau) + gamma * best;
            out.policy[(tau - 1) * n + i] = arg;
        }
    }
    if (start) out.first_action = out.action_at(*start, 1);
    return out;
}

}  // namespace cowork
