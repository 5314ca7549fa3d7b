#pragma once
// Online estimators over observed human motion: distraction (where around
// its desired cell a human tends to drift) and intention (which candidate
// station the human is heading to).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "cowork/errors.hpp"
#include "cowork/grid.hpp"
#include "cowork/human_sim.hpp"

namespace cowork {

enum class MnsMode {
    Literal,    // offsets in {0..d}² \ {(0,0)}
    Symmetric,  // offsets in {-d..d}² \ {(0,0)}
};

inline std::string_view to_string(MnsMode m) {
    return m == MnsMode::Literal ? "literal" : "symmetric";
}

/// Moving neighboring set: a rigid window of offsets around a desired cell.
class MnsSpec {
public:
    MnsSpec() : MnsSpec(2, MnsMode::Symmetric) {}

    MnsSpec(int degree, MnsMode mode) : degree_(degree), mode_(mode) {
        if (degree < 1) throw ValidationError("MNS degree must be positive");
        const int lo = mode == MnsMode::Literal ? 0 : -degree;
        for (int i = lo; i <= degree; ++i)
            for (int j = lo; j <= degree; ++j)
                if (i != 0 || j != 0) offsets_.push_back({i, j});
    }

    int degree() const noexcept { return degree_; }
    MnsMode mode() const noexcept { return mode_; }
    const std::vector<Cell>& offsets() const noexcept { return offsets_; }
    std::size_t size() const noexcept { return offsets_.size(); }

    std::optional<std::size_t> offset_index(Cell off) const {
        auto it = std::lower_bound(offsets_.begin(), offsets_.end(), off);
        if (it == offsets_.end() || *it != off) return std::nullopt;
        return static_cast<std::size_t>(it - offsets_.begin());
    }

private:
    int degree_;
    MnsMode mode_;
    std::vector<Cell> offsets_;  // sorted by (x, y)
};

/// MNS cells around `center` that lie inside the grid. Obstacles are kept.
inline std::vector<Cell> mns_cells(const MnsSpec& spec, Cell center, const GridWorkplace& world) {
    std::vector<Cell> out;
    for (const Cell& off : spec.offsets())
        if (world.contains(center + off)) out.push_back(center + off);
    return out;
}

/// Visit counts per (human, speed class, MNS offset), normalized on demand.
class DistractionModel {
public:
    using Table = std::array<std::vector<double>, kSpeedClassCount>;

    DistractionModel() = default;
    DistractionModel(MnsSpec spec, double pseudo_count)
        : spec_(std::move(spec)), pseudo_count_(pseudo_count) {
        if (pseudo_count < 0) throw ValidationError("pseudo_count must be nonnegative");
    }

    const MnsSpec& spec() const noexcept { return spec_; }
    double pseudo_count() const noexcept { return pseudo_count_; }

    /// Records that human `h`, desiring `desired` with velocity `v`, was seen
    /// at `actual`. Returns false when the deviation lies outside the MNS.
    bool observe(int h, Cell actual, Cell desired, const DesiredVelocity& v, double weight = 1.0) {
        const auto idx = spec_.offset_index(actual - desired);
        if (!idx) return false;
        table(h)[static_cast<std::size_t>(v.speed_class)][*idx] += weight;
        return true;
    }

    double count(int h, SpeedClass s, Cell offset) const {
        const auto idx = spec_.offset_index(offset);
        auto it = counts_.find(h);
        if (!idx || it == counts_.end()) return 0.0;
        return it->second[static_cast<std::size_t>(s)][*idx];
    }

    /// Raw counts for one human and speed class, aligned with spec().offsets().
    std::vector<double> counts(int h, SpeedClass s) const {
        auto it = counts_.find(h);
        if (it == counts_.end()) return std::vector<double>(spec_.size(), 0.0);
        return it->second[static_cast<std::size_t>(s)];
    }

    /// Normalized mass over the in-grid MNS around `desired`, as (cell, α) pairs.
    std::vector<std::pair<Cell, double>> distribution(int h, Cell desired, SpeedClass s,
                                                      const GridWorkplace& world) const {
        std::vector<std::pair<Cell, double>> out;
        const std::vector<double>* row = nullptr;
        if (auto it = counts_.find(h); it != counts_.end())
            row = &it->second[static_cast<std::size_t>(s)];
        double total = 0.0;
        const auto& offs = spec_.offsets();
        for (std::size_t i = 0; i < offs.size(); ++i) {
            const Cell c = desired + offs[i];
            if (!world.contains(c)) continue;
            const double mass = (row ? (*row)[i] : 0.0) + pseudo_count_;
            out.emplace_back(c, mass);
            total += mass;
        }
        if (total <= 0.0) {
            out.clear();
            return out;
        }
        for (auto& [c, m] : out) m /= total;
        return out;
    }

    /// α_h(r | r̄, speed): normalized visit frequency of the offset r - r̄.
    double distraction(int h, Cell r, Cell desired, SpeedClass s,
                       const GridWorkplace& world) const {
        if (!world.contains(r) || !spec_.offset_index(r - desired)) return 0.0;
        for (const auto& [c, a] : distribution(h, desired, s, world))
            if (c == r) return a;
        return 0.0;
    }

    std::vector<int> humans() const {
        std::vector<int> out;
        for (const auto& [h, t] : counts_) out.push_back(h);
        return out;
    }

private:
    Table& table(int h) {
        auto [it, inserted] = counts_.try_emplace(h);
        if (inserted)
            for (auto& row : it->second) row.assign(spec_.size(), 0.0);
        return it->second;
    }

    MnsSpec spec_;
    double pseudo_count_ = 1.0;
    std::map<int, Table> counts_;
};

/// δ = exp(-‖actual - desired‖).
inline double deviation_reward(Cell actual, Cell desired) {
    return std::exp(-euclidean(actual, desired));
}

/// Sliding window of observations scored against every candidate's desired cell.
class IntentionEstimate {
public:
    struct Record {
        long k;
        Cell actual;
        std::map<PlaceId, Cell> desired;  // per candidate
    };

    explicit IntentionEstimate(std::size_t window = 10) : window_(window) {
        if (window == 0) throw ValidationError("intention window must be at least 1");
    }

    std::size_t window() const noexcept { return window_; }
    const std::deque<Record>& records() const noexcept { return records_; }
    const std::map<PlaceId, double>& probs() const noexcept { return probs_; }

    void reset() {
        records_.clear();
        probs_.clear();
    }

    void push(Record r) {
        records_.push_back(std::move(r));
        while (records_.size() > window_) records_.pop_front();
    }

    /// Probability per candidate at time k, using records from
    /// [k - window, k - 1]. Throws EmptyWindow if none fall in range.
    const std::map<PlaceId, double>& update(long k) {
        std::map<PlaceId, double> score;
        std::size_t used = 0;
        for (const Record& r : records_) {
            if (r.k < k - static_cast<long>(window_) || r.k > k - 1) continue;
            ++used;
            for (const auto& [c, d] : r.desired) score[c] += deviation_reward(r.actual, d);
        }
        if (used == 0) throw EmptyWindow("no observations in the intention window");
        double total = 0.0;
        for (const auto& [c, s] : score) total += s;
        for (auto& [c, s] : score) s /= total;
        probs_ = std::move(score);
        return probs_;
    }

    /// Candidate with the highest probability; ties go to the smaller id.
    std::optional<PlaceId> argmax() const {
        std::optional<PlaceId> best;
        double bp = -1.0;
        for (const auto& [c, p] : probs_)
            if (p > bp) {
                bp = p;
                best = c;
            }
        return best;
    }

private:
    std::size_t window_;
    std::deque<Record> records_;
    std::map<PlaceId, double> probs_;
};

}  // namespace cowork
