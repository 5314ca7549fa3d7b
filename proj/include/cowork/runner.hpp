#pragma once
// Closed replanning loop: each tick the humans' positions are observed,
// the estimators are updated, the cost field is rebuilt, the MDP is solved
// and the UAS executes the first action of the resulting policy.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "cowork/grid.hpp"
#include "cowork/human_sim.hpp"
#include "cowork/mdp.hpp"
#include "cowork/perception.hpp"
#include "cowork/petri.hpp"
#include "cowork/rng.hpp"
#include "cowork/scenario.hpp"

namespace cowork {

struct HumanTick {
    Cell actual;
    PlaceId origin = 0;
    PlaceId destination = 0;                // ground truth, never shown to the planner
    std::map<PlaceId, Cell> desired;        // r̄ per candidate
    std::map<PlaceId, double> intention;    // Pr(candidate | origin)
    std::vector<std::vector<double>> mns;   // visit counts [speed class][offset]
};

struct TickRecord {
    long k = 0;
    Cell uas;
    Action action = Action::O;
    std::vector<HumanTick> humans;
    std::vector<PlaceId> rule4_occupancy;  // stations violating Rule 4 from positions
    std::vector<PlaceId> rule4_marking;    // stations violating Rule 4 in the net marking
};

struct RunSummary {
    bool reached_goal = false;
    long steps = 0;
    double min_distance = std::numeric_limits<double>::infinity();
    long collisions = 0;        // (tick, human) pairs sharing the UAS cell
    long obstacle_entries = 0;  // ticks with the UAS on an obstacle
    long rule4_ticks = 0;       // ticks with any occupancy Rule-4 violation
};

struct MatrixDump {
    long k = 0;
    LayeredField cost;
    LayeredField value;
};

struct RunTrace {
    std::string scenario;
    std::uint64_t seed = 0;
    int nx = 0;
    int ny = 0;
    std::vector<Cell> mns_offsets;
    std::vector<TickRecord> ticks;
    std::vector<Cell> uas_positions;                 // times 0..steps
    std::vector<std::vector<Cell>> human_positions;  // [human][time 0..steps]
    std::vector<std::vector<PlaceId>> intent_columns;  // every candidate seen, per human
    std::vector<MatrixDump> matrices;
    RunSummary summary;
};

struct RunOptions {
    bool keep_matrices = false;
};

/// Stations whose Rule-4 bound is broken when co-workers within distance 1
/// of a station cell count as present there.
inline std::vector<PlaceId> occupancy_rule4(const GridWorkplace& world, Cell uas,
                                            const std::vector<Cell>& humans) {
    Marking m;
    for (const auto& [p, c] : world.stations()) {
        if (euclidean(uas, c) <= 1.0) m.tokens_u[p] += 1;
        for (const Cell& h : humans)
            if (euclidean(h, c) <= 1.0) m.tokens_h[p] += 1;
    }
    return check_rule4(m);
}

/// Mutable state of one scenario run. The public steps mirror the loop so
/// callers (the CLI's single-plan mode, tests) can stop between them.
class Simulation {
public:
    explicit Simulation(const Scenario& scn)
        : scn_(scn),
          transitions_(build_transitions(scn.world, scn.planner.horizon)),
          distraction_(MnsSpec(scn.planner.mns_degree, scn.planner.mns_mode),
                       scn.planner.pseudo_count),
          marking_(scn.initial),
          uas_(scn.world.station(scn.uas_origin)),
          goal_(scn.world.station(scn.uas_goal)) {
        for (std::size_t i = 0; i < scn.humans.size(); ++i) {
            const HumanSpec& h = scn.humans[i];
            const int id = static_cast<int>(i) + 1;
            rngs_.emplace_back(h.seed ? *h.seed : Rng::derive(scn.seed, static_cast<std::uint64_t>(id)));
            std::deque<PlaceId> scripted(h.destinations.begin(), h.destinations.end());
            tracks_.push_back(start_track(id, h.origin, scn.net, scn.world, rngs_.back(),
                                          std::move(scripted), scn.stray_limit, 0, h.stationary));
            estimates_.emplace_back(static_cast<std::size_t>(scn.planner.window));
        }
    }

    long k() const noexcept { return k_; }
    Cell uas() const noexcept { return uas_; }
    Cell goal() const noexcept { return goal_; }
    const Marking& marking() const noexcept { return marking_; }
    const std::vector<HumanTrack>& tracks() const noexcept { return tracks_; }
    const std::vector<IntentionEstimate>& estimates() const noexcept { return estimates_; }
    const DistractionModel& distraction() const noexcept { return distraction_; }
    const Transitions& transitions() const noexcept { return transitions_; }

    bool done() const noexcept { return uas_ == goal_ || k_ >= scn_.k_max; }

    /// Retarget arrived humans and feed the current positions to both estimators.
    void perceive() {
        for (std::size_t i = 0; i < tracks_.size(); ++i) {
            HumanTrack& track = tracks_[i];
            IntentionEstimate& est = estimates_[i];
            if (arrived(track, scn_.world)) {
                if (auto t = route_transition(scn_.net, track.origin, track.true_destination,
                                              Agent::Human);
                    t && can_fire(scn_.net, marking_, *t, Agent::Human))
                    marking_ = fire(scn_.net, marking_, *t, Agent::Human);
                track = retarget(std::move(track), scn_.net, scn_.world, rngs_[i]);
                est.reset();
            }
            // Distraction is scored against the currently most likely candidate.
            PlaceId ref = track.candidates.front();
            if (auto best = est.argmax(); best && track.has_candidate(*best)) ref = *best;
            const DesiredState ds = desired_state(track, ref);
            distraction_.observe(track.id, track.position(), ds.current, ds.velocity);

            IntentionEstimate::Record rec{k_, track.position(), {}};
            for (PlaceId c : track.candidates) rec.desired[c] = desired_state(track, c).current;
            est.push(std::move(rec));
            est.update(k_ + 1);
        }
    }

    CostField cost() const {
        std::vector<HumanForecast> forecasts;
        for (std::size_t i = 0; i < tracks_.size(); ++i)
            forecasts.push_back(forecast(tracks_[i], estimates_[i].probs(), scn_.planner.horizon));
        return build_cost(scn_.world, goal_, forecasts, distraction_, scn_.planner.cost,
                          scn_.planner.horizon, k_);
    }

    PlanResult plan(const CostField& c) const {
        return solve(c, transitions_, scn_.planner.gamma, uas_);
    }

    /// Apply the UAS action and one step of every human, then advance k.
    void advance(Action a) {
        uas_ = transitions_.step(uas_, a);
        for (std::size_t i = 0; i < tracks_.size(); ++i)
            step_actual(tracks_[i], rngs_[i], scn_.humans[i].epsilon, scn_.world);
        ++k_;
        if (uas_ == goal_) {
            if (auto t = route_transition(scn_.net, scn_.uas_origin, scn_.uas_goal, Agent::Uas);
                t && can_fire(scn_.net, marking_, *t, Agent::Uas))
                marking_ = fire(scn_.net, marking_, *t, Agent::Uas);
        }
    }

    std::vector<Cell> human_cells() const {
        std::vector<Cell> out;
        for (const auto& t : tracks_) out.push_back(t.position());
        return out;
    }

private:
    Scenario scn_;
    Transitions transitions_;
    DistractionModel distraction_;
    Marking marking_;
    std::vector<Rng> rngs_;
    std::vector<HumanTrack> tracks_;
    std::vector<IntentionEstimate> estimates_;
    Cell uas_;
    Cell goal_;
    long k_ = 0;
};

inline RunTrace run(const Scenario& scn, const RunOptions& opts = {}) {
    Simulation sim(scn);
    RunTrace trace;
    trace.scenario = scn.name;
    trace.seed = scn.seed;
    trace.nx = scn.world.nx();
    trace.ny = scn.world.ny();
    trace.mns_offsets = sim.distraction().spec().offsets();
    trace.human_positions.resize(scn.humans.size());
    trace.intent_columns.resize(scn.humans.size());

    auto sample_positions = [&] {
        trace.uas_positions.push_back(sim.uas());
        const auto hs = sim.human_cells();
        for (std::size_t i = 0; i < hs.size(); ++i) trace.human_positions[i].push_back(hs[i]);
        auto& s = trace.summary;
        if (scn.world.is_obstacle(sim.uas())) ++s.obstacle_entries;
        for (const Cell& h : hs) {
            const double d = euclidean(sim.uas(), h);
            s.min_distance = std::min(s.min_distance, d);
            if (h == sim.uas()) ++s.collisions;
        }
    };

    sample_positions();
    while (!sim.done()) {
        sim.perceive();
        const CostField cost = sim.cost();
        const PlanResult plan = sim.plan(cost);
        const Action a = *plan.first_action;

        TickRecord rec;
        rec.k = sim.k();
        rec.uas = sim.uas();
        rec.action = a;
        for (std::size_t i = 0; i < sim.tracks().size(); ++i) {
            const HumanTrack& t = sim.tracks()[i];
            HumanTick ht;
            ht.actual = t.position();
            ht.origin = t.origin;
            ht.destination = t.true_destination;
            for (PlaceId c : t.candidates) ht.desired[c] = desired_state(t, c).current;
            ht.intention = sim.estimates()[i].probs();
            for (int s = 0; s < kSpeedClassCount; ++s)
                ht.mns.push_back(sim.distraction().counts(t.id, static_cast<SpeedClass>(s)));
            auto& cols = trace.intent_columns[i];
            for (PlaceId c : t.candidates)
                if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
            rec.humans.push_back(std::move(ht));
        }
        rec.rule4_occupancy = occupancy_rule4(scn.world, sim.uas(), sim.human_cells());
        rec.rule4_marking = check_rule4(sim.marking());
        if (!rec.rule4_occupancy.empty()) ++trace.summary.rule4_ticks;
        trace.ticks.push_back(std::move(rec));
        if (opts.keep_matrices) trace.matrices.push_back({sim.k(), cost.values, plan.value});

        sim.advance(a);
        sample_positions();
    }
    trace.summary.reached_goal = sim.uas() == sim.goal();
    trace.summary.steps = sim.k();
    return trace;
}

}  // namespace cowork
