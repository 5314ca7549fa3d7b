#pragma once
// Two-layer Petri net (human arcs and UAS arcs over one set of places and
// transitions) with construct classification and the co-presence safety rule.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cowork/errors.hpp"
#include "cowork/grid.hpp"

namespace cowork {

using TransitionId = std::string;

enum class Agent { Human, Uas };

inline std::string_view to_string(Agent a) { return a == Agent::Human ? "human" : "uas"; }

/// A directed arc, either place → transition or transition → place.
struct Arc {
    enum class Dir { PlaceToTransition, TransitionToPlace };
    Dir dir;
    PlaceId place;
    TransitionId transition;

    static Arc input(PlaceId p, TransitionId t) { return {Dir::PlaceToTransition, p, std::move(t)}; }
    static Arc output(TransitionId t, PlaceId p) { return {Dir::TransitionToPlace, p, std::move(t)}; }

    Arc reversed() const {
        return {dir == Dir::PlaceToTransition ? Dir::TransitionToPlace : Dir::PlaceToTransition,
                place, transition};
    }

    friend bool operator==(const Arc&, const Arc&) = default;
    friend auto operator<=>(const Arc&, const Arc&) = default;
};

inline std::string to_string(const Arc& a) {
    return a.dir == Arc::Dir::PlaceToTransition
               ? std::to_string(a.place) + " -> " + a.transition
               : a.transition + " -> " + std::to_string(a.place);
}

using ArcSet = std::set<Arc>;

enum class ConstructKind { Cyclic, Sequential, Conflict, Dependency, Concurrency };

inline std::string_view to_string(ConstructKind k) {
    switch (k) {
        case ConstructKind::Cyclic: return "cyclic";
        case ConstructKind::Sequential: return "sequential";
        case ConstructKind::Conflict: return "conflict";
        case ConstructKind::Dependency: return "dependency";
        case ConstructKind::Concurrency: return "concurrency";
    }
    return "?";
}

/// Arc pairs (p,t),(t,p) that both appear in `arcs`.
inline ArcSet cyclic_arcs(const ArcSet& arcs) {
    ArcSet out;
    for (const Arc& a : arcs)
        if (arcs.count(a.reversed())) out.insert(a);
    return out;
}

class PetriNet {
public:
    PetriNet() = default;

    PetriNet(std::set<PlaceId> places, std::set<TransitionId> transitions, ArcSet arcs_h,
             ArcSet arcs_u)
        : places_(std::move(places)),
          transitions_(std::move(transitions)),
          arcs_h_(std::move(arcs_h)),
          arcs_u_(std::move(arcs_u)) {
        for (const ArcSet* arcs : {&arcs_h_, &arcs_u_}) {
            for (const Arc& a : *arcs) {
                if (!places_.count(a.place))
                    throw ValidationError("arc " + to_string(a) + " references undeclared place " +
                                          std::to_string(a.place));
                if (!transitions_.count(a.transition))
                    throw ValidationError("arc " + to_string(a) +
                                          " references undeclared transition " + a.transition);
            }
        }
        cyclic_h_ = cyclic_arcs(arcs_h_);
        cyclic_u_ = cyclic_arcs(arcs_u_);
    }

    const std::set<PlaceId>& places() const noexcept { return places_; }
    const std::set<TransitionId>& transitions() const noexcept { return transitions_; }
    const ArcSet& arcs(Agent who) const noexcept { return who == Agent::Human ? arcs_h_ : arcs_u_; }
    const ArcSet& cyclic(Agent who) const noexcept {
        return who == Agent::Human ? cyclic_h_ : cyclic_u_;
    }

    /// Arc weights are fixed at 1 for both layers.
    int weight(const Arc&, Agent) const noexcept { return 1; }

    bool has_place(PlaceId p) const { return places_.count(p) != 0; }
    bool has_transition(const TransitionId& t) const { return transitions_.count(t) != 0; }

    void require_place(PlaceId p) const {
        if (!has_place(p)) throw UnknownPlace("unknown place " + std::to_string(p));
    }
    void require_transition(const TransitionId& t) const {
        if (!has_transition(t)) throw UnknownTransition("unknown transition " + t);
    }

    std::vector<PlaceId> inputs(const TransitionId& t, Agent who) const {
        std::vector<PlaceId> out;
        for (const Arc& a : arcs(who))
            if (a.transition == t && a.dir == Arc::Dir::PlaceToTransition) out.push_back(a.place);
        return out;
    }

    std::vector<PlaceId> outputs(const TransitionId& t, Agent who) const {
        std::vector<PlaceId> out;
        for (const Arc& a : arcs(who))
            if (a.transition == t && a.dir == Arc::Dir::TransitionToPlace) out.push_back(a.place);
        return out;
    }

private:
    std::set<PlaceId> places_;
    std::set<TransitionId> transitions_;
    ArcSet arcs_h_;
    ArcSet arcs_u_;
    ArcSet cyclic_h_;
    ArcSet cyclic_u_;
};

/// Union of the cyclic arcs of both layers.
inline ArcSet cyclic_arcs(const PetriNet& net) {
    ArcSet out = net.cyclic(Agent::Human);
    out.insert(net.cyclic(Agent::Uas).begin(), net.cyclic(Agent::Uas).end());
    return out;
}

/// Token counts per place for both co-worker classes. Absent places hold 0.
struct Marking {
    std::map<PlaceId, int> tokens_h;
    std::map<PlaceId, int> tokens_u;

    std::map<PlaceId, int>& layer(Agent who) { return who == Agent::Human ? tokens_h : tokens_u; }
    const std::map<PlaceId, int>& layer(Agent who) const {
        return who == Agent::Human ? tokens_h : tokens_u;
    }

    int get(PlaceId p, Agent who) const {
        const auto& m = layer(who);
        auto it = m.find(p);
        return it == m.end() ? 0 : it->second;
    }

    friend bool operator==(const Marking&, const Marking&) = default;
};

inline std::set<TransitionId> out_transitions(const PetriNet& net, PlaceId p, Agent who) {
    net.require_place(p);
    std::set<TransitionId> out;
    for (const Arc& a : net.arcs(who))
        if (a.place == p && a.dir == Arc::Dir::PlaceToTransition) out.insert(a.transition);
    return out;
}

/// Non-cyclic (transition, next place) routes leaving p.
inline std::vector<std::pair<TransitionId, PlaceId>> routes(const PetriNet& net, PlaceId p,
                                                            Agent who) {
    const auto ts = out_transitions(net, p, who);
    const ArcSet& cyc = net.cyclic(who);
    std::vector<std::pair<TransitionId, PlaceId>> out;
    for (const Arc& a : net.arcs(who)) {
        if (a.dir != Arc::Dir::TransitionToPlace || !ts.count(a.transition) || cyc.count(a))
            continue;
        out.emplace_back(a.transition, a.place);
    }
    return out;
}

inline std::set<PlaceId> next_stations(const PetriNet& net, PlaceId p, Agent who) {
    std::set<PlaceId> out;
    for (const auto& [t, q] : routes(net, p, who)) out.insert(q);
    return out;
}

/// Transition that carries a co-worker from `from` to `to`, if any.
inline std::optional<TransitionId> route_transition(const PetriNet& net, PlaceId from, PlaceId to,
                                                    Agent who) {
    for (const auto& [t, q] : routes(net, from, who))
        if (q == to) return t;
    return std::nullopt;
}

inline std::set<ConstructKind> classify_place(const PetriNet& net, PlaceId p, Agent who) {
    std::set<ConstructKind> kinds;
    const auto r = routes(net, p, who);
    std::set<PlaceId> next;
    for (const auto& route : r) next.insert(route.second);

    if (next.size() > 1) kinds.insert(ConstructKind::Conflict);
    if (r.size() == 1) kinds.insert(ConstructKind::Sequential);
    for (const Arc& a : net.cyclic(who))
        if (a.place == p) kinds.insert(ConstructKind::Cyclic);
    for (const TransitionId& t : out_transitions(net, p, who)) {
        if (net.inputs(t, who).size() >= 2) kinds.insert(ConstructKind::Dependency);
        if (net.outputs(t, who).size() >= 2) kinds.insert(ConstructKind::Concurrency);
    }
    return kinds;
}

inline bool can_fire(const PetriNet& net, const Marking& m, const TransitionId& t, Agent who) {
    net.require_transition(t);
    for (const Arc& a : net.arcs(who)) {
        if (a.transition != t || a.dir != Arc::Dir::PlaceToTransition) continue;
        if (m.get(a.place, who) - net.weight(a, who) < 0) return false;
    }
    return true;
}

/// Consume from every input place and produce into every output place of
/// `t` in the `who` layer; the other layer is untouched.
inline Marking fire(const PetriNet& net, const Marking& m, const TransitionId& t, Agent who) {
    if (!can_fire(net, m, t, who))
        throw NotEnabled("transition " + t + " is not enabled for " + std::string(to_string(who)));
    Marking next = m;
    auto& tokens = next.layer(who);
    for (const Arc& a : net.arcs(who)) {
        if (a.transition != t) continue;
        const int w = net.weight(a, who);
        tokens[a.place] += a.dir == Arc::Dir::PlaceToTransition ? -w : w;
    }
    return next;
}

/// Rule-4 predicate at one place: a UAS may share a station only while the
/// combined head count stays at or below two.
constexpr bool rule4_violated(int uas, int humans) noexcept { return uas > 0 && uas + humans > 2; }

inline std::vector<PlaceId> check_rule4(const Marking& m) {
    std::set<PlaceId> places;
    for (const auto& [p, n] : m.tokens_h) places.insert(p);
    for (const auto& [p, n] : m.tokens_u) places.insert(p);
    std::vector<PlaceId> bad;
    for (PlaceId p : places)
        if (rule4_violated(m.get(p, Agent::Uas), m.get(p, Agent::Human))) bad.push_back(p);
    return bad;
}

}  // namespace cowork
