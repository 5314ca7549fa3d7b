#pragma once
// Discretized workplace and 8-connected shortest-path search.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "cowork/errors.hpp"

namespace cowork {

using PlaceId = int;

/// Grid coordinate, 1-based in both axes.
struct Cell {
    int x = 0;
    int y = 0;

    friend constexpr bool operator==(const Cell&, const Cell&) = default;
    friend constexpr auto operator<=>(const Cell&, const Cell&) = default;

    friend constexpr Cell operator+(Cell a, Cell b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Cell operator-(Cell a, Cell b) { return {a.x - b.x, a.y - b.y}; }
};

inline std::string to_string(Cell c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

inline double euclidean(Cell a, Cell b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Unit moves in the fixed expansion order E, NE, N, NW, W, SW, S, SE.
inline constexpr std::array<Cell, 8> kNeighborOffsets{{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1},
}};

class GridWorkplace {
public:
    GridWorkplace() = default;

    GridWorkplace(int nx, int ny, const std::set<Cell>& obstacles = {},
                  std::map<PlaceId, Cell> stations = {}, bool corner_cutting = true)
        : nx_(nx), ny_(ny), corner_cutting_(corner_cutting), stations_(std::move(stations)) {
        if (nx < 1 || ny < 1)
            throw ValidationError("grid dimensions must be positive, got " + std::to_string(nx) +
                                  "x" + std::to_string(ny));
        blocked_.assign(static_cast<std::size_t>(nx) * ny, 0);
        for (const Cell& c : obstacles) {
            if (!contains(c)) throw ValidationError("obstacle " + to_string(c) + " outside grid");
            blocked_[index(c)] = 1;
        }
        obstacle_count_ = obstacles.size();
        std::set<Cell> seen;
        for (const auto& [id, c] : stations_) {
            if (!contains(c))
                throw ValidationError("station " + std::to_string(id) + " at " + to_string(c) +
                                      " outside grid");
            if (is_obstacle(c))
                throw ValidationError("station " + std::to_string(id) + " at " + to_string(c) +
                                      " lies on an obstacle");
            if (!seen.insert(c).second)
                throw ValidationError("station " + std::to_string(id) + " shares cell " +
                                      to_string(c) + " with another station");
        }
    }

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    bool corner_cutting() const noexcept { return corner_cutting_; }
    std::size_t cell_count() const noexcept { return blocked_.size(); }
    std::size_t obstacle_count() const noexcept { return obstacle_count_; }

    bool contains(Cell c) const noexcept {
        return c.x >= 1 && c.x <= nx_ && c.y >= 1 && c.y <= ny_;
    }

    /// Row-major (y rows, x columns) linear index; requires contains(c).
    std::size_t index(Cell c) const noexcept {
        return static_cast<std::size_t>(c.y - 1) * nx_ + static_cast<std::size_t>(c.x - 1);
    }

    Cell cell_at(std::size_t idx) const noexcept {
        return {static_cast<int>(idx % nx_) + 1, static_cast<int>(idx / nx_) + 1};
    }

    bool is_obstacle(Cell c) const noexcept { return contains(c) && blocked_[index(c)] != 0; }
    bool is_free(Cell c) const noexcept { return contains(c) && blocked_[index(c)] == 0; }

    std::set<Cell> obstacles() const {
        std::set<Cell> out;
        for (std::size_t i = 0; i < blocked_.size(); ++i)
            if (blocked_[i]) out.insert(cell_at(i));
        return out;
    }

    const std::map<PlaceId, Cell>& stations() const noexcept { return stations_; }

    bool has_station(PlaceId p) const { return stations_.count(p) != 0; }

    Cell station(PlaceId p) const {
        auto it = stations_.find(p);
        if (it == stations_.end()) throw UnknownPlace("no station for place " + std::to_string(p));
        return it->second;
    }

    /// Whether a single 8-connected step from `from` by `offset` is legal.
    bool step_allowed(Cell from, Cell offset) const noexcept {
        const Cell to = from + offset;
        if (!is_free(to)) return false;
        if (!corner_cutting_ && offset.x != 0 && offset.y != 0) {
            if (is_obstacle({from.x + offset.x, from.y}) || is_obstacle({from.x, from.y + offset.y}))
                return false;
        }
        return true;
    }

private:
    int nx_ = 0;
    int ny_ = 0;
    bool corner_cutting_ = true;
    std::vector<std::uint8_t> blocked_;
    std::size_t obstacle_count_ = 0;
    std::map<PlaceId, Cell> stations_;
};

struct Path {
    std::vector<Cell> cells;
    double cost = 0.0;

    std::size_t steps() const noexcept { return cells.empty() ? 0 : cells.size() - 1; }
};

/// Cost of a cell sequence as (#straight) + (#diagonal)·√2. Computing it
/// from the counts keeps equal-length paths bit-identical regardless of
/// the order in which the steps occur.
inline double path_cost(const std::vector<Cell>& cells) {
    long straight = 0;
    long diagonal = 0;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        const Cell d = cells[i] - cells[i - 1];
        if (d.x != 0 && d.y != 0)
            ++diagonal;
        else if (d.x != 0 || d.y != 0)
            ++straight;
    }
    return static_cast<double>(straight) + static_cast<double>(diagonal) * std::numbers::sqrt2;
}

/// Minimum-cost 8-connected path with straight steps of 1 and diagonal
/// steps of √2. Neighbors expand in E, NE, N, NW, W, SW, S, SE order and
/// equal queue keys pop in insertion order, so results are reproducible.
inline Path astar_path(const GridWorkplace& world, Cell start, Cell goal) {
    if (!world.is_free(start))
        throw InvalidCell("start " + to_string(start) + " is outside the grid or an obstacle");
    if (!world.is_free(goal))
        throw InvalidCell("goal " + to_string(goal) + " is outside the grid or an obstacle");
    if (start == goal) return Path{{start}, 0.0};

    constexpr double kInf = std::numeric_limits<double>::infinity();
    const std::size_t n = world.cell_count();
    std::vector<double> g(n, kInf);
    std::vector<std::int64_t> parent(n, -1);
    std::vector<std::uint8_t> closed(n, 0);

    struct Entry {
        double f;
        std::uint64_t seq;
        std::size_t idx;
    };
    auto later = [](const Entry& a, const Entry& b) {
        if (a.f != b.f) return a.f > b.f;
        return a.seq > b.seq;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(later)> open(later);
    std::uint64_t seq = 0;

    const std::size_t start_idx = world.index(start);
    const std::size_t goal_idx = world.index(goal);
    g[start_idx] = 0.0;
    open.push({euclidean(start, goal), seq++, start_idx});

    while (!open.empty()) {
        const Entry top = open.top();
        open.pop();
        if (closed[top.idx]) continue;
        closed[top.idx] = 1;
        if (top.idx == goal_idx) break;

        const Cell cur = world.cell_at(top.idx);
        for (const Cell& off : kNeighborOffsets) {
            if (!world.step_allowed(cur, off)) continue;
            const Cell nb = cur + off;
            const std::size_t ni = world.index(nb);
            if (closed[ni]) continue;
            const double step = (off.x != 0 && off.y != 0) ? std::numbers::sqrt2 : 1.0;
            const double cand = g[top.idx] + step;
            if (cand < g[ni]) {
                g[ni] = cand;
                parent[ni] = static_cast<std::int64_t>(top.idx);
                open.push({cand + euclidean(nb, goal), seq++, ni});
            }
        }
    }

    if (!closed[goal_idx])
        throw NoPath("no path from " + to_string(start) + " to " + to_string(goal));

    Path path;
    for (std::int64_t i = static_cast<std::int64_t>(goal_idx); i >= 0; i = parent[i])
        path.cells.push_back(world.cell_at(static_cast<std::size_t>(i)));
    std::reverse(path.cells.begin(), path.cells.end());
    path.cost = path_cost(path.cells);
    return path;
}

}  // namespace cowork

template <>
struct std::hash<cowork::Cell> {
    std::size_t operator()(const cowork::Cell& c) const noexcept {
        return std::hash<long long>{}((static_cast<long long>(c.x) << 32) ^
                                      static_cast<unsigned int>(c.y));
    }
};
