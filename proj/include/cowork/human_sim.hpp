#pragma once
// Simulated human co-workers: hidden destination choice, desired A*
// trajectories toward every candidate station, and noisy actual motion.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <string_view>
#include <vector>

#include "cowork/errors.hpp"
#include "cowork/grid.hpp"
#include "cowork/petri.hpp"
#include "cowork/rng.hpp"

namespace cowork {

enum class SpeedClass { Stay = 0, Straight = 1, Diagonal = 2 };

inline constexpr int kSpeedClassCount = 3;

inline std::string_view to_string(SpeedClass s) {
    switch (s) {
        case SpeedClass::Stay: return "stay";
        case SpeedClass::Straight: return "straight";
        case SpeedClass::Diagonal: return "diagonal";
    }
    return "?";
}

struct DesiredVelocity {
    int dx = 0;
    int dy = 0;
    SpeedClass speed_class = SpeedClass::Stay;

    static DesiredVelocity between(Cell from, Cell to) {
        const Cell d = to - from;
        SpeedClass s = SpeedClass::Stay;
        if (d.x != 0 && d.y != 0)
            s = SpeedClass::Diagonal;
        else if (d.x != 0 || d.y != 0)
            s = SpeedClass::Straight;
        return {d.x, d.y, s};
    }

    friend bool operator==(const DesiredVelocity&, const DesiredVelocity&) = default;
};

struct DesiredState {
    Cell current;  // r̄
    Cell next;     // r̄⁺
    DesiredVelocity velocity;
};

struct TimedCell {
    long k;
    Cell cell;
};

struct HumanTrack {
    int id = 0;
    PlaceId origin = 0;
    std::vector<PlaceId> candidates;  // ascending
    PlaceId true_destination = 0;
    bool stationary = false;  // no next station: holds position at `origin`
    bool pinned = false;      // configured to stay at its origin regardless of the net
    std::map<PlaceId, Path> desired_paths;
    std::map<PlaceId, std::size_t> progress;
    std::map<PlaceId, int> stray_ticks;
    std::vector<TimedCell> actual_history;
    std::deque<PlaceId> scripted;  // pending fixed destination choices
    int stray_limit = 5;

    Cell position() const { return actual_history.back().cell; }
    long now() const { return actual_history.back().k; }

    bool has_candidate(PlaceId c) const {
        return std::find(candidates.begin(), candidates.end(), c) != candidates.end();
    }

    const Path& path_to(PlaceId c) const {
        auto it = desired_paths.find(c);
        if (it == desired_paths.end())
            throw UnknownCandidate("human " + std::to_string(id) + " has no candidate " +
                                   std::to_string(c));
        return it->second;
    }
};

/// Desired state along candidate `c`, `ahead` steps past the current
/// progress. Past the path end the human desires to stay.
inline DesiredState desired_state(const HumanTrack& track, PlaceId candidate,
                                  std::size_t ahead = 0) {
    const Path& path = track.path_to(candidate);
    const std::size_t last = path.cells.size() - 1;
    const std::size_t i = std::min(track.progress.at(candidate) + ahead, last);
    const std::size_t j = std::min(i + 1, last);
    return {path.cells[i], path.cells[j], DesiredVelocity::between(path.cells[i], path.cells[j])};
}

namespace detail {

inline void assign_destinations(HumanTrack& track, const PetriNet& net, const GridWorkplace& world,
                                Rng& rng) {
    const auto next = next_stations(net, track.origin, Agent::Human);
    track.desired_paths.clear();
    track.progress.clear();
    track.stray_ticks.clear();
    const Cell here = world.station(track.origin);
    if (next.empty() || track.pinned) {
        track.stationary = true;
        track.candidates = {track.origin};
        track.true_destination = track.origin;
        track.desired_paths[track.origin] = Path{{here}, 0.0};
    } else {
        track.stationary = false;
        track.candidates.assign(next.begin(), next.end());
        if (!track.scripted.empty()) {
            const PlaceId want = track.scripted.front();
            track.scripted.pop_front();
            if (!track.has_candidate(want))
                throw ValidationError("scripted destination " + std::to_string(want) +
                                      " is not a next station of " + std::to_string(track.origin));
            track.true_destination = want;
        } else {
            track.true_destination = track.candidates[rng.below(track.candidates.size())];
        }
        for (PlaceId c : track.candidates)
            track.desired_paths[c] = astar_path(world, here, world.station(c));
    }
    for (PlaceId c : track.candidates) {
        track.progress[c] = 0;
        track.stray_ticks[c] = 0;
    }
}

/// Advance or re-anchor each candidate's progress after a move.
inline void update_progress(HumanTrack& track) {
    const Cell at = track.position();
    for (PlaceId c : track.candidates) {
        const auto& cells = track.desired_paths.at(c).cells;
        std::size_t& i = track.progress.at(c);
        int& stray = track.stray_ticks.at(c);
        if (i + 1 < cells.size() && at == cells[i + 1]) {
            ++i;
            stray = 0;
        } else if (at == cells[i]) {
            stray = 0;
        } else if (++stray > track.stray_limit) {
            double best = euclidean(at, cells[0]);
            std::size_t best_i = 0;
            for (std::size_t j = 1; j < cells.size(); ++j) {
                const double d = euclidean(at, cells[j]);
                if (d <= best) {
                    best = d;
                    best_i = j;
                }
            }
            i = best_i;
            stray = 0;
        }
    }
}

}  // namespace detail

/// New track at `origin` at time `k0`, with candidates and desired paths drawn
/// from the net's human layer.
inline HumanTrack start_track(int id, PlaceId origin, const PetriNet& net,
                              const GridWorkplace& world, Rng& rng,
                              std::deque<PlaceId> scripted = {}, int stray_limit = 5, long k0 = 0,
                              bool pinned = false) {
    HumanTrack track;
    track.id = id;
    track.pinned = pinned;
    track.origin = origin;
    track.scripted = std::move(scripted);
    track.stray_limit = stray_limit;
    track.actual_history.push_back({k0, world.station(origin)});
    detail::assign_destinations(track, net, world, rng);
    return track;
}

inline bool arrived(const HumanTrack& track, const GridWorkplace& world) {
    return !track.stationary && track.position() == world.station(track.true_destination);
}

/// Called on arrival: the reached station becomes the new origin and a
/// fresh destination is drawn from its next stations.
inline HumanTrack retarget(HumanTrack track, const PetriNet& net, const GridWorkplace& world,
                           Rng& rng) {
    track.origin = track.true_destination;
    detail::assign_destinations(track, net, world, rng);
    return track;
}

/// One tick of actual motion. With probability 1 - epsilon the human takes
/// the 8-connected step that best closes on the next desired cell of its
/// true path; otherwise it stays or moves to a uniformly chosen legal
/// neighbor. Returns the new cell, which is also appended to the history.
inline Cell step_actual(HumanTrack& track, Rng& rng, double epsilon, const GridWorkplace& world) {
    const Cell at = track.position();
    Cell to = at;
    if (rng.bernoulli(epsilon)) {
        std::vector<Cell> options{at};
        for (const Cell& off : kNeighborOffsets)
            if (world.step_allowed(at, off)) options.push_back(at + off);
        to = options[rng.below(options.size())];
    } else {
        const Cell target = desired_state(track, track.true_destination).next;
        double best = euclidean(at, target);
        for (const Cell& off : kNeighborOffsets) {
            if (!world.step_allowed(at, off)) continue;
            const double d = euclidean(at + off, target);
            if (d < best) {
                best = d;
                to = at + off;
            }
        }
    }
    track.actual_history.push_back({track.now() + 1, to});
    detail::update_progress(track);
    return to;
}

}  // namespace cowork
