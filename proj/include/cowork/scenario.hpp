#pragma once
// Scenario description and its YAML loader.
//
// A scenario file has five top-level sections:
//
//   world:    size, corner_cutting, obstacles, obstacle_rects, obstacle_discs, stations
//   net:      places, transitions, human_arcs, uas_arcs, initial_marking
//   humans:   epsilon, stray_limit, agents (origin, destinations, epsilon, seed, stationary)
//   uas:      origin, goal
//   planner:  horizon, gamma, c0, c_goal, c_obs, mns_degree, mns_mode, window,
//             pseudo_count, k_max, seed, sum_over_horizon
//
// Arcs are written "3 -> t3_8" (place to transition) or "t3_8 -> 8"
// (transition to place); transition names must not be plain integers.
// Unknown keys are rejected. See scenarios/workshop.yaml for a full example.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "cowork/errors.hpp"
#include "cowork/grid.hpp"
#include "cowork/mdp.hpp"
#include "cowork/perception.hpp"
#include "cowork/petri.hpp"

namespace cowork {

struct HumanSpec {
    PlaceId origin = 0;
    double epsilon = 0.2;
    std::vector<PlaceId> destinations;  // scripted choices, consumed in order
    std::optional<std::uint64_t> seed;  // derived from the master seed when absent
    bool stationary = false;
};

struct PlannerParams {
    int horizon = 10;
    double gamma = 1.0;
    CostParams cost;
    int mns_degree = 2;
    MnsMode mns_mode = MnsMode::Symmetric;
    int window = 10;
    double pseudo_count = 1.0;
};

struct Scenario {
    std::string name;
    GridWorkplace world;
    PetriNet net;
    Marking initial;
    std::vector<HumanSpec> humans;
    int stray_limit = 5;
    PlaceId uas_origin = 0;
    PlaceId uas_goal = 0;
    PlannerParams planner;
    long k_max = 200;
    std::uint64_t seed = 1;
};

/// Checks the cross-section invariants; throws ValidationError naming the
/// first one violated.
inline void validate(const Scenario& s) {
    for (PlaceId p : s.net.places())
        if (!s.world.has_station(p))
            throw ValidationError("place " + std::to_string(p) + " has no station cell");
    for (const auto& [p, c] : s.world.stations())
        if (!s.net.has_place(p))
            throw ValidationError("station " + std::to_string(p) + " is not a net place");
    for (const auto* layer : {&s.initial.tokens_h, &s.initial.tokens_u})
        for (const auto& [p, n] : *layer) {
            if (!s.net.has_place(p))
                throw ValidationError("initial marking references unknown place " +
                                      std::to_string(p));
            if (n < 0)
                throw ValidationError("initial marking is negative at place " + std::to_string(p));
        }
    if (!s.net.has_place(s.uas_origin))
        throw ValidationError("uas origin " + std::to_string(s.uas_origin) + " is not a place");
    if (!next_stations(s.net, s.uas_origin, Agent::Uas).count(s.uas_goal))
        throw ValidationError("uas goal " + std::to_string(s.uas_goal) +
                              " is not a next station of uas origin " +
                              std::to_string(s.uas_origin));
    for (std::size_t i = 0; i < s.humans.size(); ++i) {
        const HumanSpec& h = s.humans[i];
        const std::string who = "human " + std::to_string(i + 1);
        if (!s.net.has_place(h.origin))
            throw ValidationError(who + " origin " + std::to_string(h.origin) + " is not a place");
        if (h.epsilon < 0.0 || h.epsilon > 1.0)
            throw ValidationError(who + " epsilon must lie in [0, 1]");
        const auto next = next_stations(s.net, h.origin, Agent::Human);
        if (next.empty() && !h.stationary)
            throw ValidationError(who + " origin " + std::to_string(h.origin) +
                                  " has no next station and is not marked stationary");
        if (!h.destinations.empty() && !h.stationary && !next.count(h.destinations.front()))
            throw ValidationError(who + " scripted destination " +
                                  std::to_string(h.destinations.front()) +
                                  " is not a next station of " + std::to_string(h.origin));
    }
    const auto& p = s.planner;
    if (p.horizon < 1) throw ValidationError("planner.horizon must be at least 1");
    if (p.gamma < 0.0 || p.gamma > 1.0) throw ValidationError("planner.gamma must lie in [0, 1]");
    if (p.cost.c0 < 0.0) throw ValidationError("planner.c0 must be nonnegative");
    if (p.mns_degree < 1) throw ValidationError("planner.mns_degree must be at least 1");
    if (p.window < 1) throw ValidationError("planner.window must be at least 1");
    if (p.pseudo_count < 0.0) throw ValidationError("planner.pseudo_count must be nonnegative");
    if (s.k_max < 0) throw ValidationError("planner.k_max must be nonnegative");
    if (s.stray_limit < 0) throw ValidationError("humans.stray_limit must be nonnegative");
}

namespace detail {

class YamlReader {
public:
    [[noreturn]] static void fail(const YAML::Node& n, const std::string& field,
                                  const std::string& what) {
        const YAML::Mark m = n.Mark();
        throw ParseError(field, m.is_null() ? 0 : m.line + 1, what);
    }

    static void allow_keys(const YAML::Node& map, const std::string& field,
                           std::initializer_list<const char*> keys) {
        if (!map.IsMap()) fail(map, field, "expected a mapping");
        for (const auto& kv : map) {
            const std::string key = kv.first.as<std::string>();
            bool ok = false;
            for (const char* k : keys) ok = ok || key == k;
            if (!ok) fail(kv.first, field.empty() ? key : field + "." + key, "unknown key");
        }
    }

    template <typename T>
    static T get(const YAML::Node& n, const std::string& field) {
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, field, "value has the wrong type");
        }
    }

    template <typename T>
    static T get_or(const YAML::Node& map, const char* key, const std::string& section, T fallback) {
        const YAML::Node n = map[key];
        if (!n) return fallback;
        return get<T>(n, section + "." + key);
    }

    static YAML::Node require(const YAML::Node& map, const char* key, const std::string& section) {
        const YAML::Node n = map[key];
        if (!n) fail(map, section.empty() ? key : section + "." + key, "missing required key");
        return n;
    }

    static Cell cell(const YAML::Node& n, const std::string& field) {
        if (!n.IsSequence() || n.size() != 2) fail(n, field, "expected [x, y]");
        return {get<int>(n[0], field), get<int>(n[1], field)};
    }

    static std::vector<int> ints(const YAML::Node& n, const std::string& field, std::size_t arity) {
        if (!n.IsSequence() || n.size() != arity)
            fail(n, field, "expected a list of " + std::to_string(arity) + " integers");
        std::vector<int> out;
        for (const auto& v : n) out.push_back(get<int>(v, field));
        return out;
    }
};

inline bool is_integer(const std::string& s) {
    static const std::regex re("^-?[0-9]+$");
    return std::regex_match(s, re);
}

}  // namespace detail

/// Parses a scenario from YAML text. `source` names the input in messages.
inline Scenario parse_scenario(const std::string& text, const std::string& source = "<string>") {
    using R = detail::YamlReader;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError(source, e.mark.line + 1, e.msg);
    }
    if (!root || !root.IsMap()) throw ParseError(source, 0, "top level must be a mapping");
    R::allow_keys(root, "", {"name", "world", "net", "humans", "uas", "planner"});

    Scenario s;
    s.name = R::get_or<std::string>(root, "name", "", "scenario");

    // world
    const YAML::Node w = R::require(root, "world", "");
    R::allow_keys(w, "world",
                  {"size", "corner_cutting", "obstacles", "obstacle_rects", "obstacle_discs",
                   "stations"});
    const auto size = R::ints(R::require(w, "size", "world"), "world.size", 2);
    const bool corner = R::get_or<bool>(w, "corner_cutting", "world", true);
    // Rectangles and discs are clipped to the grid; listed cells are not.
    auto in_grid = [&](Cell c) { return c.x >= 1 && c.x <= size[0] && c.y >= 1 && c.y <= size[1]; };
    std::set<Cell> obstacles;
    if (const auto n = w["obstacles"]) {
        if (!n.IsSequence()) R::fail(n, "world.obstacles", "expected a list of [x, y]");
        for (const auto& c : n) obstacles.insert(R::cell(c, "world.obstacles"));
    }
    if (const auto n = w["obstacle_rects"]) {
        if (!n.IsSequence()) R::fail(n, "world.obstacle_rects", "expected a list");
        for (const auto& r : n) {
            const auto v = R::ints(r, "world.obstacle_rects", 4);
            for (int x = std::min(v[0], v[2]); x <= std::max(v[0], v[2]); ++x)
                for (int y = std::min(v[1], v[3]); y <= std::max(v[1], v[3]); ++y)
                    if (in_grid({x, y})) obstacles.insert({x, y});
        }
    }
    if (const auto n = w["obstacle_discs"]) {
        if (!n.IsSequence()) R::fail(n, "world.obstacle_discs", "expected a list");
        for (const auto& d : n) {
            const auto v = R::ints(d, "world.obstacle_discs", 3);
            for (int x = v[0] - v[2]; x <= v[0] + v[2]; ++x)
                for (int y = v[1] - v[2]; y <= v[1] + v[2]; ++y)
                    if ((x - v[0]) * (x - v[0]) + (y - v[1]) * (y - v[1]) <= v[2] * v[2] &&
                        in_grid({x, y}))
                        obstacles.insert({x, y});
        }
    }
    std::map<PlaceId, Cell> stations;
    const YAML::Node st = R::require(w, "stations", "world");
    if (!st.IsMap()) R::fail(st, "world.stations", "expected a mapping place -> [x, y]");
    for (const auto& kv : st) {
        const int id = R::get<int>(kv.first, "world.stations");
        const std::string field = "world.stations." + std::to_string(id);
        if (!stations.emplace(id, R::cell(kv.second, field)).second)
            R::fail(kv.first, field, "duplicate station");
    }
    s.world = GridWorkplace(size[0], size[1], obstacles, stations, corner);

    // net
    const YAML::Node nn = R::require(root, "net", "");
    R::allow_keys(nn, "net", {"places", "transitions", "human_arcs", "uas_arcs", "initial_marking"});
    std::set<PlaceId> places;
    if (const auto n = nn["places"]) {
        if (!n.IsSequence()) R::fail(n, "net.places", "expected a list of integers");
        for (const auto& p : n) places.insert(R::get<int>(p, "net.places"));
    } else {
        for (const auto& [id, c] : stations) places.insert(id);
    }
    std::set<TransitionId> transitions;
    const YAML::Node tn = R::require(nn, "transitions", "net");
    if (!tn.IsSequence()) R::fail(tn, "net.transitions", "expected a list of names");
    for (const auto& t : tn) {
        const auto name = R::get<std::string>(t, "net.transitions");
        if (detail::is_integer(name))
            R::fail(t, "net.transitions", "transition name '" + name + "' must not be an integer");
        transitions.insert(name);
    }
    auto read_arcs = [&](const char* key) {
        ArcSet arcs;
        const std::string field = std::string("net.") + key;
        const YAML::Node an = nn[key];
        if (!an) return arcs;
        if (!an.IsSequence()) R::fail(an, field, "expected a list of \"a -> b\" strings");
        static const std::regex arc_re(R"(^\s*([^\s>-][^\s>]*)\s*->\s*([^\s>]+)\s*$)");
        for (const auto& a : an) {
            const auto text = R::get<std::string>(a, field);
            std::smatch m;
            if (!std::regex_match(text, m, arc_re)) R::fail(a, field, "malformed arc '" + text + "'");
            const std::string lhs = m[1], rhs = m[2];
            const bool lp = detail::is_integer(lhs), rp = detail::is_integer(rhs);
            if (lp == rp) R::fail(a, field, "arc '" + text + "' must join a place and a transition");
            arcs.insert(lp ? Arc::input(std::stoi(lhs), rhs) : Arc::output(lhs, std::stoi(rhs)));
        }
        return arcs;
    };
    s.net = PetriNet(places, transitions, read_arcs("human_arcs"), read_arcs("uas_arcs"));
    if (const auto im = nn["initial_marking"]) {
        R::allow_keys(im, "net.initial_marking", {"human", "uas"});
        for (const char* layer : {"human", "uas"}) {
            const auto n = im[layer];
            if (!n) continue;
            const std::string field = std::string("net.initial_marking.") + layer;
            if (!n.IsMap()) R::fail(n, field, "expected a mapping place -> tokens");
            auto& tokens = std::string(layer) == "human" ? s.initial.tokens_h : s.initial.tokens_u;
            for (const auto& kv : n) tokens[R::get<int>(kv.first, field)] = R::get<int>(kv.second, field);
        }
    }

    // humans
    double default_eps = 0.2;
    if (const auto hn = root["humans"]) {
        R::allow_keys(hn, "humans", {"epsilon", "stray_limit", "agents"});
        default_eps = R::get_or<double>(hn, "epsilon", "humans", 0.2);
        s.stray_limit = R::get_or<int>(hn, "stray_limit", "humans", 5);
        if (const auto agents = hn["agents"]) {
            if (!agents.IsSequence()) R::fail(agents, "humans.agents", "expected a list");
            for (std::size_t i = 0; i < agents.size(); ++i) {
                const auto a = agents[i];
                const std::string field = "humans.agents[" + std::to_string(i) + "]";
                R::allow_keys(a, field, {"origin", "destinations", "epsilon", "seed", "stationary"});
                HumanSpec h;
                h.origin = R::get<int>(R::require(a, "origin", field), field + ".origin");
                h.epsilon = R::get_or<double>(a, "epsilon", field, default_eps);
                h.stationary = R::get_or<bool>(a, "stationary", field, false);
                if (const auto sd = a["seed"]) h.seed = R::get<std::uint64_t>(sd, field + ".seed");
                if (const auto d = a["destinations"]) {
                    if (!d.IsSequence()) R::fail(d, field + ".destinations", "expected a list");
                    for (const auto& p : d) h.destinations.push_back(R::get<int>(p, field + ".destinations"));
                }
                s.humans.push_back(std::move(h));
            }
        }
    }

    // uas
    const YAML::Node un = R::require(root, "uas", "");
    R::allow_keys(un, "uas", {"origin", "goal"});
    s.uas_origin = R::get<int>(R::require(un, "origin", "uas"), "uas.origin");
    s.uas_goal = R::get<int>(R::require(un, "goal", "uas"), "uas.goal");

    // planner
    if (const auto pn = root["planner"]) {
        R::allow_keys(pn, "planner",
                      {"horizon", "gamma", "c0", "c_goal", "c_obs", "mns_degree", "mns_mode",
                       "window", "pseudo_count", "k_max", "seed", "sum_over_horizon"});
        auto& p = s.planner;
        p.horizon = R::get_or<int>(pn, "horizon", "planner", p.horizon);
        p.gamma = R::get_or<double>(pn, "gamma", "planner", p.gamma);
        p.cost.c0 = R::get_or<double>(pn, "c0", "planner", p.cost.c0);
        p.cost.c_goal = R::get_or<double>(pn, "c_goal", "planner", p.cost.c_goal);
        p.cost.c_obs = R::get_or<double>(pn, "c_obs", "planner", p.cost.c_obs);
        p.cost.sum_over_horizon =
            R::get_or<bool>(pn, "sum_over_horizon", "planner", p.cost.sum_over_horizon);
        p.mns_degree = R::get_or<int>(pn, "mns_degree", "planner", p.mns_degree);
        p.window = R::get_or<int>(pn, "window", "planner", p.window);
        p.pseudo_count = R::get_or<double>(pn, "pseudo_count", "planner", p.pseudo_count);
        if (const auto m = pn["mns_mode"]) {
            const auto mode = R::get<std::string>(m, "planner.mns_mode");
            if (mode == "literal")
                p.mns_mode = MnsMode::Literal;
            else if (mode == "symmetric")
                p.mns_mode = MnsMode::Symmetric;
            else
                R::fail(m, "planner.mns_mode", "expected 'literal' or 'symmetric'");
        }
        s.k_max = R::get_or<long>(pn, "k_max", "planner", s.k_max);
        s.seed = R::get_or<std::uint64_t>(pn, "seed", "planner", s.seed);
    }

    validate(s);
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

}  // namespace cowork
