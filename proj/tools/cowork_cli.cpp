// cowork: run, sweep and inspect shared-workplace UAS planning scenarios.
//
// Exit codes: 0 goal reached (or command succeeded), 2 tick budget
// exhausted, 1 configuration or I/O error.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cowork/cowork.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitBudget = 2;

std::string kinds_string(const std::set<cowork::ConstructKind>& kinds) {
    std::string out;
    for (auto k : kinds) {
        if (!out.empty()) out += ",";
        out += cowork::to_string(k);
    }
    return out.empty() ? "-" : out;
}

std::string places_string(const std::set<cowork::PlaceId>& ps) {
    std::string out = "{";
    for (auto p : ps) out += (out.size() > 1 ? "," : "") + std::to_string(p);
    return out + "}";
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed,
            std::optional<long> k_max, const std::string& out, bool dump, bool tick_json) {
    cowork::Scenario scn = cowork::load_scenario(config);
    if (seed) scn.seed = *seed;
    if (k_max) scn.k_max = *k_max;
    const cowork::RunTrace trace = cowork::run(scn, {.keep_matrices = dump});
    const auto manifest =
        cowork::emit_trace(trace, out, {.tick_json = tick_json, .matrices = dump});
    const auto& s = trace.summary;
    std::printf("scenario %s seed %llu: %s after %ld ticks, min distance %.3f, collisions %ld, "
                "obstacle entries %ld\n",
                scn.name.c_str(), static_cast<unsigned long long>(scn.seed),
                s.reached_goal ? "goal reached" : "budget exhausted", s.steps, s.min_distance,
                s.collisions, s.obstacle_entries);
    std::printf("wrote %zu files to %s\n", manifest.mandatory.size() + manifest.optional.size(),
                out.c_str());
    return s.reached_goal ? kExitOk : kExitBudget;
}

int cmd_sweep(const std::string& config, int seeds, std::uint64_t first, std::optional<double> c0,
              std::optional<long> k_max) {
    cowork::Scenario scn = cowork::load_scenario(config);
    if (c0) scn.planner.cost.c0 = *c0;
    if (k_max) scn.k_max = *k_max;
    int reached = 0, with_collision = 0;
    long obstacle = 0;
    double min_dist_sum = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < seeds; ++i) {
        scn.seed = first + static_cast<std::uint64_t>(i);
        const auto s = cowork::run(scn).summary;
        reached += s.reached_goal;
        with_collision += s.collisions > 0;
        obstacle += s.obstacle_entries;
        min_dist_sum += s.min_distance;
        std::printf("seed %llu: %s steps=%ld min_distance=%.3f collisions=%ld\n",
                    static_cast<unsigned long long>(scn.seed), s.reached_goal ? "reached" : "budget",
                    s.steps, s.min_distance, s.collisions);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("runs %d  reached %d  runs_with_collision %d  obstacle_entries %ld  "
                "mean_min_distance %.4f  c0 %g  (%.1fs)\n",
                seeds, reached, with_collision, obstacle, seeds ? min_dist_sum / seeds : 0.0,
                scn.planner.cost.c0, secs);
    return reached * 100 >= 99 * seeds ? kExitOk : kExitBudget;
}

int cmd_verify_net(const std::string& config) {
    const cowork::Scenario scn = cowork::load_scenario(config);
    using cowork::Agent;
    std::printf("%-6s %-30s %-14s %-30s %s\n", "place", "human constructs", "human next",
                "uas constructs", "uas next");
    for (cowork::PlaceId p : scn.net.places()) {
        std::printf("%-6d %-30s %-14s %-30s %s\n", p,
                    kinds_string(cowork::classify_place(scn.net, p, Agent::Human)).c_str(),
                    places_string(cowork::next_stations(scn.net, p, Agent::Human)).c_str(),
                    kinds_string(cowork::classify_place(scn.net, p, Agent::Uas)).c_str(),
                    places_string(cowork::next_stations(scn.net, p, Agent::Uas)).c_str());
    }
    std::printf("\nRule 4 truth table (uas, humans -> violated):\n");
    int mismatches = 0;
    for (int u = 0; u <= 3; ++u) {
        for (int h = 0; h <= 3; ++h) {
            cowork::Marking m;
            m.tokens_u[1] = u;
            m.tokens_h[1] = h;
            const bool got = !cowork::check_rule4(m).empty();
            const bool want = u > 0 ? (u + h > 2) : false;
            mismatches += got != want;
            std::printf("  M_U=%d M_H=%d -> %s%s\n", u, h, got ? "violated" : "ok",
                        got != want ? "  MISMATCH" : "");
        }
    }
    const auto bad = cowork::check_rule4(scn.initial);
    std::printf("initial marking: %s\n",
                bad.empty() ? "safe" : ("violations at " + std::to_string(bad.size()) + " places").c_str());
    return mismatches == 0 ? kExitOk : kExitConfig;
}

int cmd_plan(const std::string& config, std::optional<std::uint64_t> seed, bool tick_dump,
             const std::string& out) {
    cowork::Scenario scn = cowork::load_scenario(config);
    if (seed) scn.seed = *seed;
    cowork::Simulation sim(scn);
    sim.perceive();
    const cowork::CostField cost = sim.cost();
    const cowork::PlanResult plan = sim.plan(cost);
    const cowork::Cell r = sim.uas();
    std::printf("uas at (%d,%d): first action %s (index %d), V = %.6g\n", r.x, r.y,
                std::string(cowork::to_string(*plan.first_action)).c_str(),
                cowork::action_index(*plan.first_action), plan.value.at(r, 1));
    if (tick_dump) {
        cowork::RunTrace t;
        t.matrices.push_back({0, cost.values, plan.value});
        const auto m = cowork::emit_trace(t, out, {.tick_json = false, .matrices = true});
        std::printf("wrote %zu matrices to %s\n", m.optional.size(), out.c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Human-aware UAS planning in a shared gridded workplace"};
    app.require_subcommand(1);

    std::string config, out = "run_out";
    std::optional<std::uint64_t> seed;
    bool dump = false, no_json = false, tick_dump = false;
    int seeds = 100;
    std::uint64_t first_seed = 1;
    std::optional<double> c0;
    std::optional<long> k_max;

    auto* run = app.add_subcommand("run", "Run the closed planning loop and write a trace");
    run->add_option("config", config, "Scenario YAML")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Master seed (overrides the config)");
    run->add_option("--k-max", k_max, "Tick budget (overrides the config)")->check(CLI::NonNegativeNumber);
    run->add_option("--out", out, "Output directory");
    run->add_flag("--dump-matrices", dump, "Also write per-tick cost and value layers");
    run->add_flag("--no-trace-json", no_json, "Skip the per-tick trace.json");

    auto* sweep = app.add_subcommand("sweep", "Run many seeds and report aggregate statistics");
    sweep->add_option("config", config, "Scenario YAML")->required()->check(CLI::ExistingFile);
    sweep->add_option("--seeds", seeds, "Number of seeds")->check(CLI::PositiveNumber);
    sweep->add_option("--first-seed", first_seed, "First master seed");
    sweep->add_option("--c0", c0, "Override the human penalty weight");
    sweep->add_option("--k-max", k_max, "Tick budget (overrides the config)")->check(CLI::NonNegativeNumber);

    auto* verify = app.add_subcommand("verify-net", "Classify net constructs and audit Rule 4");
    verify->add_option("config", config, "Scenario YAML")->required()->check(CLI::ExistingFile);

    auto* plan = app.add_subcommand("plan", "Solve once at tick 0");
    plan->add_option("config", config, "Scenario YAML")->required()->check(CLI::ExistingFile);
    plan->add_option("--seed", seed, "Master seed (overrides the config)");
    plan->add_flag("--tick-dump", tick_dump, "Write cost and value layers as CSV");
    plan->add_option("--out", out, "Output directory for --tick-dump");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(config, seed, k_max, out, dump, !no_json);
        if (*sweep) return cmd_sweep(config, seeds, first_seed, c0, k_max);
        if (*verify) return cmd_verify_net(config);
        if (*plan) return cmd_plan(config, seed, tick_dump, out);
    } catch (const cowork::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
