#pragma once
// Writes a RunTrace to a directory:
//
//   uas_path.csv          k,x,y,action_index   (1..9 = E,NE,N,NW,W,SW,S,SE,O;
//                                              the terminal row carries 0)
//   human<N>_path.csv     k,x,y
//   human<N>_intent.csv   k,ws<a>,ws<b>,...    (one column per candidate seen)
//   run_summary.json
//   trace.json            optional per-tick estimator state
//   matrices/k<k>/{cost,value}_tau<τ>.csv      optional, rows y ascending

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cowork/errors.hpp"
#include "cowork/runner.hpp"

namespace cowork {

struct TraceOptions {
    bool tick_json = true;
    bool matrices = true;  // written only when the trace holds them
};

struct Manifest {
    std::vector<std::filesystem::path> mandatory;
    std::vector<std::filesystem::path> optional;
};

namespace detail {

inline std::string fmt_double(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

class FileWriter {
public:
    explicit FileWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    }
    ~FileWriter() = default;

    template <typename T>
    FileWriter& operator<<(const T& v) {
        out_ << v;
        return *this;
    }

    void close() {
        out_.close();
        if (!out_) throw IoError("failed writing " + path_.string());
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

inline void write_layer(const std::filesystem::path& path, const LayeredField& f, int tau) {
    FileWriter out(path);
    for (int y = 1; y <= f.ny(); ++y) {
        for (int x = 1; x <= f.nx(); ++x) {
            if (x > 1) out << ',';
            out << fmt_double(f.at(Cell{x, y}, tau), 6);
        }
        out << '\n';
    }
    out.close();
}

inline nlohmann::json cell_json(Cell c) { return nlohmann::json::array({c.x, c.y}); }

}  // namespace detail

inline nlohmann::json summary_json(const RunTrace& trace) {
    const auto& s = trace.summary;
    nlohmann::json j;
    j["scenario"] = trace.scenario;
    j["seed"] = trace.seed;
    j["reached_goal"] = s.reached_goal;
    j["steps"] = s.steps;
    j["min_distance"] = std::isfinite(s.min_distance) ? nlohmann::json(s.min_distance) : nlohmann::json();
    j["collisions"] = s.collisions;
    j["obstacle_entries"] = s.obstacle_entries;
    j["rule4_ticks"] = s.rule4_ticks;
    j["humans"] = trace.human_positions.size();
    return j;
}

inline Manifest emit_trace(const RunTrace& trace, const std::filesystem::path& dir,
                           const TraceOptions& opts = {}) {
    namespace fs = std::filesystem;
    using detail::FileWriter;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    Manifest m;

    {
        const fs::path p = dir / "uas_path.csv";
        FileWriter out(p);
        out << "k,x,y,action_index\n";
        for (std::size_t t = 0; t < trace.uas_positions.size(); ++t) {
            const Cell c = trace.uas_positions[t];
            const int a = t < trace.ticks.size() ? action_index(trace.ticks[t].action) : 0;
            out << t << ',' << c.x << ',' << c.y << ',' << a << '\n';
        }
        out.close();
        m.mandatory.push_back(p);
    }

    for (std::size_t h = 0; h < trace.human_positions.size(); ++h) {
        const std::string stem = "human" + std::to_string(h + 1);
        const fs::path pp = dir / (stem + "_path.csv");
        FileWriter path(pp);
        path << "k,x,y\n";
        for (std::size_t t = 0; t < trace.human_positions[h].size(); ++t) {
            const Cell c = trace.human_positions[h][t];
            path << t << ',' << c.x << ',' << c.y << '\n';
        }
        path.close();
        m.mandatory.push_back(pp);

        const fs::path ip = dir / (stem + "_intent.csv");
        FileWriter intent(ip);
        const auto& cols = trace.intent_columns[h];
        intent << 'k';
        for (PlaceId c : cols) intent << ",ws" << c;
        intent << '\n';
        for (const TickRecord& rec : trace.ticks) {
            intent << rec.k;
            const auto& probs = rec.humans[h].intention;
            for (PlaceId c : cols) {
                auto it = probs.find(c);
                intent << ',' << detail::fmt_double(it == probs.end() ? 0.0 : it->second, 15);
            }
            intent << '\n';
        }
        intent.close();
        m.mandatory.push_back(ip);
    }

    {
        const fs::path p = dir / "run_summary.json";
        FileWriter out(p);
        out << summary_json(trace).dump(2) << '\n';
        out.close();
        m.mandatory.push_back(p);
    }

    if (opts.tick_json) {
        nlohmann::json j;
        j["scenario"] = trace.scenario;
        j["seed"] = trace.seed;
        j["grid"] = {trace.nx, trace.ny};
        nlohmann::json offs = nlohmann::json::array();
        for (const Cell& o : trace.mns_offsets) offs.push_back(detail::cell_json(o));
        j["mns_offsets"] = offs;
        nlohmann::json ticks = nlohmann::json::array();
        for (const TickRecord& rec : trace.ticks) {
            nlohmann::json t;
            t["k"] = rec.k;
            t["uas"] = detail::cell_json(rec.uas);
            t["action"] = action_index(rec.action);
            t["rule4_occupancy"] = rec.rule4_occupancy;
            t["rule4_marking"] = rec.rule4_marking;
            nlohmann::json hs = nlohmann::json::array();
            for (const HumanTick& ht : rec.humans) {
                nlohmann::json h;
                h["actual"] = detail::cell_json(ht.actual);
                h["origin"] = ht.origin;
                h["true_destination"] = ht.destination;
                nlohmann::json desired = nlohmann::json::object();
                for (const auto& [c, r] : ht.desired) desired[std::to_string(c)] = detail::cell_json(r);
                h["desired"] = desired;
                nlohmann::json intent = nlohmann::json::object();
                for (const auto& [c, p] : ht.intention) intent[std::to_string(c)] = p;
                h["intention"] = intent;
                h["mns_counts"] = {{"stay", ht.mns[0]}, {"straight", ht.mns[1]}, {"diagonal", ht.mns[2]}};
                hs.push_back(h);
            }
            t["humans"] = hs;
            ticks.push_back(t);
        }
        j["ticks"] = ticks;
        j["summary"] = summary_json(trace);
        const fs::path p = dir / "trace.json";
        FileWriter out(p);
        out << j.dump() << '\n';
        out.close();
        m.optional.push_back(p);
    }

    if (opts.matrices) {
        for (const MatrixDump& md : trace.matrices) {
            char name[32];
            std::snprintf(name, sizeof name, "k%04ld", md.k);
            const fs::path sub = dir / "matrices" / name;
            fs::create_directories(sub, ec);
            if (ec) throw IoError("cannot create " + sub.string() + ": " + ec.message());
            for (int tau = 1; tau <= md.cost.horizon(); ++tau) {
                char file[32];
                std::snprintf(file, sizeof file, "cost_tau%02d.csv", tau);
                detail::write_layer(sub / file, md.cost, tau);
                m.optional.push_back(sub / file);
                std::snprintf(file, sizeof file, "value_tau%02d.csv", tau);
                detail::write_layer(sub / file, md.value, tau);
                m.optional.push_back(sub / file);
            }
        }
    }
    return m;
}

}  // namespace cowork
