// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "cowork/cowork.hpp"
#include "oracles.hpp"

using namespace cowork;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Scenario golden() { return load_scenario(COWORK_SCENARIO_DIR "/workshop.yaml"); }

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::printf("criterion %d: %s  %s  [%s]\n", id, ok ? "PASS" : "FAIL", what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 1. Every intention vector and every distraction distribution the planner
//    consumes sums to one, on full runs over 10 seeds.
void normalization() {
    long vectors = 0, dists = 0;
    double worst = 0.0, slowest = 0.0;
    Scenario s = golden();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        s.seed = seed;
        const auto t0 = Clock::now();
        Simulation sim(s);
        while (!sim.done()) {
            sim.perceive();
            for (std::size_t h = 0; h < sim.tracks().size(); ++h) {
                const HumanTrack& track = sim.tracks()[h];
                double sum = 0.0;
                for (const auto& [c, p] : sim.estimates()[h].probs()) sum += p;
                worst = std::max(worst, std::abs(sum - 1.0));
                ++vectors;
                for (PlaceId c : track.candidates)
                    for (int tau = 0; tau <= s.planner.horizon; ++tau)
                        for (int sc = 0; sc < kSpeedClassCount; ++sc) {
                            const Cell at = desired_state(track, c, std::size_t(tau)).current;
                            const auto d = sim.distraction().distribution(
                                track.id, at, static_cast<SpeedClass>(sc), s.world);
                            if (d.empty()) continue;
                            double z = 0.0;
                            for (const auto& [cell, a] : d) z += a;
                            worst = std::max(worst, std::abs(z - 1.0));
                            ++dists;
                        }
            }
            sim.advance(*sim.plan(sim.cost()).first_action);
        }
        slowest = std::max(slowest, seconds_since(t0));
    }
    report(1, worst <= 1e-9 && slowest < 60.0, "intention and distraction normalization",
           fmt("%ld intention vectors, %ld distributions, max |sum-1| %.2e, slowest seed %.2fs",
               vectors, dists, worst, slowest));
}

// 2. Backward induction against exhaustive 9^3 enumeration from every start.
void planner_oracle() {
    const auto t0 = Clock::now();
    const GridWorkplace w(5, 5, {{2, 3}, {3, 3}, {4, 2}});
    const Cell goal{5, 5};
    const int N = 3;
    const Transitions f = build_transitions(w, N);
    DistractionModel dm(MnsSpec(1, MnsMode::Symmetric), 1.0);
    CandidateForecast walker{1, 1.0, {}};
    for (int tau = 1; tau <= N; ++tau)
        walker.projection.push_back({{1 + tau, 5}, {2 + tau, 5}, {1, 0, SpeedClass::Straight}});

    double worst = 0.0;
    long states = 0;
    for (const auto& humans :
         {std::vector<HumanForecast>{}, std::vector<HumanForecast>{{1, {walker}}}}) {
        const CostField c = build_cost(w, goal, humans, dm, CostParams{}, N);
        for (double gamma : {0.9, 1.0}) {
            const PlanResult r = solve(c, f, gamma);
            for (int x = 1; x <= 5; ++x)
                for (int y = 1; y <= 5; ++y) {
                    const auto ref = oracle::brute_force(
                        5, 5, N, gamma, {x, y}, [&](Cell q, int tau) { return c.at(q, tau); });
                    worst = std::max(worst, std::abs(r.value.at(Cell{x, y}, 1) - ref.best));
                    ++states;
                }
        }
    }
    const double secs = seconds_since(t0);
    report(2, worst <= 1e-9 && secs < 10.0, "value iteration equals brute-force enumeration",
           fmt("%ld start states x 729 sequences, max |dV| %.2e, %.3fs", states, worst, secs));
}

// 3. Exactly one in-grid successor per (state, action) at 5x5x3.
void transition_soundness() {
    const auto t0 = Clock::now();
    const int nx = 5, ny = 5, N = 3;
    const Transitions f(nx, ny, N);
    long bad = 0, pairs = 0;
    for (int x = 1; x <= nx; ++x)
        for (int y = 1; y <= ny; ++y)
            for (int tau = 1; tau <= N; ++tau)
                for (int ai = 0; ai < kActionCount; ++ai) {
                    const TimeState s{{x, y}, tau};
                    const TimeState n = f.successor(s, kActions[ai]);
                    int hits = 0;
                    for (int x2 = 1; x2 <= nx; ++x2)
                        for (int y2 = 1; y2 <= ny; ++y2)
                            for (int t2 = 1; t2 <= N; ++t2)
                                hits += f.successor(s, kActions[ai]) == TimeState{{x2, y2}, t2};
                    const bool inside = n.r.x >= 1 && n.r.x <= nx && n.r.y >= 1 && n.r.y <= ny;
                    const bool expected = n.r == oracle::clamp_move(nx, ny, s.r, ai) &&
                                          n.tau == std::min(tau + 1, N);
                    bad += hits != 1 || !inside || !expected;
                    ++pairs;
                }
    const double secs = seconds_since(t0);
    report(3, bad == 0 && secs < 1.0, "deterministic clamped transitions",
           fmt("%ld (state, action) pairs, %ld unsound, %.4fs", pairs, bad, secs));
}

// 4. A* cost equals Dijkstra cost on 25 random 10x10 grids at 20% density.
void search_optimality() {
    const auto t0 = Clock::now();
    Rng rng(4242);
    int grids = 0, mismatches = 0;
    while (grids < 25) {
        const auto obs = oracle::random_obstacles(rng, 10, 10, 0.2);
        const GridWorkplace w(10, 10, obs);
        const Cell a{1 + int(rng.below(10)), 1 + int(rng.below(10))};
        const Cell b{1 + int(rng.below(10)), 1 + int(rng.below(10))};
        if (!w.is_free(a) || !w.is_free(b)) continue;
        const auto ref = oracle::dijkstra_cost(10, 10, obs, a, b);
        if (!ref) continue;
        mismatches += astar_path(w, a, b).cost != *ref;
        ++grids;
    }
    const double secs = seconds_since(t0);
    report(4, mismatches == 0 && secs < 5.0, "A* cost equals Dijkstra cost",
           fmt("%d grids, %d mismatches, %.4fs", grids, mismatches, secs));
}

// 5. Co-presence rule against the direct truth table.
void rule4_table() {
    int mismatches = 0;
    for (int u = 0; u <= 3; ++u)
        for (int h = 0; h <= 3; ++h) {
            Marking m;
            m.tokens_u[1] = u;
            m.tokens_h[1] = h;
            const bool want = u > 0 && u + h > 2;
            mismatches += (!check_rule4(m).empty()) != want;
        }
    report(5, mismatches == 0, "Rule-4 truth table", fmt("16 cases, %d mismatches", mismatches));
}

struct SweepStats {
    int reached = 0, with_collision = 0, rule4_dirty_clean_runs = 0;
    long obstacle_entries = 0;
    double mean_min_distance = 0.0;
    double seconds = 0.0;
};

SweepStats sweep(Scenario s, int seeds) {
    SweepStats out;
    const auto t0 = Clock::now();
    for (int i = 1; i <= seeds; ++i) {
        s.seed = std::uint64_t(i);
        const RunSummary r = run(s).summary;
        out.reached += r.reached_goal && r.steps <= 200;
        out.with_collision += r.collisions > 0;
        out.obstacle_entries += r.obstacle_entries;
        out.mean_min_distance += r.min_distance;
        out.rule4_dirty_clean_runs += r.collisions == 0 && r.rule4_ticks > 0;
    }
    out.mean_min_distance /= seeds;
    out.seconds = seconds_since(t0);
    return out;
}

// 6. Golden scenario over 100 seeds against a paired c0 = 0 baseline.
void scenario_reproduction() {
    Scenario s = golden();
    const SweepStats on = sweep(s, 100);
    Scenario base = s;
    base.planner.cost.c0 = 0.0;
    const SweepStats off = sweep(base, 100);
    const double secs = on.seconds + off.seconds;
    const bool a = on.reached >= 99, b = on.obstacle_entries == 0, c = on.with_collision <= 5,
               d = on.mean_min_distance > off.mean_min_distance;
    report(6, a && b && c && d && secs < 600.0, "golden scenario over 100 seeds",
           fmt("(a) reached %d/100 %s; (b) obstacle entries %ld %s; (c) runs with collision %d "
               "%s; (d) mean min distance %.4f vs c0=0 %.4f %s; %.1fs",
               on.reached, a ? "ok" : "FAIL", on.obstacle_entries, b ? "ok" : "FAIL",
               on.with_collision, c ? "ok" : "FAIL", on.mean_min_distance, off.mean_min_distance,
               d ? "ok" : "FAIL", secs));
    std::printf("  info: c0=0 baseline reached %d, runs with collision %d; collision-free runs "
                "with a Rule-4 occupancy flag: %d\n",
                off.reached, off.with_collision, on.rule4_dirty_clean_runs);

    // The non-negative-offset neighborhood, for comparison only.
    Scenario lit = s;
    lit.planner.mns_mode = MnsMode::Literal;
    const SweepStats l = sweep(lit, 100);
    std::printf("  info: literal MNS: reached %d, runs with collision %d, mean min distance "
                "%.4f (not scored)\n",
                l.reached, l.with_collision, l.mean_min_distance);
}

// 7. Noise-free humans with scripted destinations: once the candidate paths
//    (compared cell by cell at equal time since the leg began) have been at
//    least 2 cells apart for a full window, the estimate's strict argmax is
//    the true destination. Observation continues for 200 ticks; the UAS
//    holds position after reaching its goal. A leg that ends before its paths
//    separate for a full window has nothing to check and is counted as such.
struct ConvergenceRun {
    long checks = 0, wrong = 0;
    int legs = 0, vacuous = 0;
};

ConvergenceRun convergence_run(Scenario s) {
    for (HumanSpec& h : s.humans) h.epsilon = 0.0;
    const long window = s.planner.window;
    const std::size_t nh = s.humans.size();
    std::vector<long> streak(nh, 0), seen(nh, 0), leg_start(nh, 0);
    std::vector<PlaceId> leg(nh, -1);
    ConvergenceRun out;
    auto close_leg = [&](std::size_t h) {
        if (leg[h] < 0) return;
        ++out.legs;
        out.vacuous += seen[h] == 0;
    };
    Simulation sim(s);
    for (long k = 0; k < 200; ++k) {
        sim.perceive();
        for (std::size_t h = 0; h < nh; ++h) {
            const HumanTrack& t = sim.tracks()[h];
            if (t.origin != leg[h]) {
                close_leg(h);
                leg[h] = t.origin;
                leg_start[h] = k;
                streak[h] = seen[h] = 0;
            }
            if (t.candidates.size() < 2) {
                leg[h] = -1;  // stationary, not a leg
                continue;
            }
            const auto at = [&](PlaceId c) {
                const auto& cells = t.path_to(c).cells;
                return cells[std::min<std::size_t>(std::size_t(k - leg_start[h]), cells.size() - 1)];
            };
            double gap = std::numeric_limits<double>::infinity();
            for (PlaceId c : t.candidates)
                if (c != t.true_destination) gap = std::min(gap, euclidean(at(t.true_destination), at(c)));
            streak[h] = gap >= 2.0 ? streak[h] + 1 : 0;
            if (streak[h] < window) continue;
            ++seen[h];
            ++out.checks;
            const auto& probs = sim.estimates()[h].probs();
            const double pt = probs.at(t.true_destination);
            for (const auto& [c, p] : probs)
                if (c != t.true_destination && p >= pt) {
                    ++out.wrong;
                    break;
                }
        }
        sim.advance(sim.uas() == sim.goal() ? Action::O : *sim.plan(sim.cost()).first_action);
    }
    for (std::size_t h = 0; h < nh; ++h) close_leg(h);
    return out;
}

void intention_convergence() {
    const Scenario base = golden();
    auto candidates = [&](const HumanSpec& h) {
        const auto next = next_stations(base.net, h.origin, Agent::Human);
        return std::vector<PlaceId>(next.begin(), next.end());
    };
    ConvergenceRun total;
    int runs = 0, runs_checked = 0;
    auto tally = [&](const ConvergenceRun& r) {
        total.checks += r.checks;
        total.wrong += r.wrong;
        total.legs += r.legs;
        total.vacuous += r.vacuous;
        ++runs;
        runs_checked += r.checks > 0;
    };
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Scenario s = base;
        s.seed = seed;
        Rng pick(seed * 7919);
        for (HumanSpec& h : s.humans) {
            const auto c = candidates(h);
            h.destinations = {c[pick.below(c.size())]};
        }
        tally(convergence_run(s));
    }
    // Cover every (human, destination) pair once.
    for (std::size_t j = 0; j < 3; ++j) {
        Scenario s = base;
        for (HumanSpec& h : s.humans) {
            const auto c = candidates(h);
            h.destinations = {c[j % c.size()]};
        }
        tally(convergence_run(s));
    }
    report(7, total.wrong == 0 && total.checks > 0, "intention converges to the true destination",
           fmt("%d/%d runs had qualifying ticks, %ld post-divergence ticks checked, %ld wrong; %d legs, %d never "
               "diverged for a full window",
               runs_checked, runs, total.checks, total.wrong, total.legs, total.vacuous));
}

// 8. Two runs with one seed write byte-identical trace files.
void determinism() {
    const fs::path base = fs::temp_directory_path() / "cowork_acceptance_determinism";
    fs::remove_all(base);
    Scenario s = golden();
    s.seed = 1;
    const Manifest a = emit_trace(run(s, {.keep_matrices = true}), base / "a");
    const Manifest b = emit_trace(run(s, {.keep_matrices = true}), base / "b");
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::size_t files = 0, differing = 0;
    const bool same_count =
        a.mandatory.size() == b.mandatory.size() && a.optional.size() == b.optional.size();
    for (const auto* list : {&a.mandatory, &a.optional})
        for (const fs::path& p : *list) {
            ++files;
            differing += slurp(p) != slurp(base / "b" / fs::relative(p, base / "a"));
        }
    fs::remove_all(base);
    report(8, same_count && differing == 0, "byte-identical traces for one seed",
           fmt("%zu files compared, %zu differ", files, differing));
}

}  // namespace

int main() {
    try {
        normalization();
        planner_oracle();
        transition_soundness();
        search_optimality();
        rule4_table();
        scenario_reproduction();
        intention_convergence();
        determinism();
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%s: %d criterion failure(s)\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
