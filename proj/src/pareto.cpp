#include "duelbench/pareto.hpp"

#include <algorithm>
#include <limits>

namespace duelbench {

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
    return a.gap >= b.gap && a.spread >= b.spread && (a.gap > b.gap || a.spread > b.spread);
}

std::vector<double> crowding_distances(const std::vector<ObjectivePoint>& points,
                                       const std::vector<int>& front) {
    const std::size_t m = front.size();
    std::vector<double> distance(m, 0.0);
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;

    const auto accumulate = [&](auto value_of) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = value_of(points[static_cast<std::size_t>(front[a])]);
            const double vb = value_of(points[static_cast<std::size_t>(front[b])]);
            return va < vb || (va == vb && front[a] < front[b]);
        });
        const double lo = value_of(points[static_cast<std::size_t>(front[order.front()])]);
        const double hi = value_of(points[static_cast<std::size_t>(front[order.back()])]);
        distance[order.front()] = std::numeric_limits<double>::infinity();
        distance[order.back()] = std::numeric_limits<double>::infinity();
        if (hi <= lo) return;  // degenerate objective: no interior contribution
        for (std::size_t i = 1; i + 1 < m; ++i) {
            const double prev = value_of(points[static_cast<std::size_t>(front[order[i - 1]])]);
            const double next = value_of(points[static_cast<std::size_t>(front[order[i + 1]])]);
            distance[order[i]] += (next - prev) / (hi - lo);
        }
    };
    if (m > 0) {
        accumulate([](const ObjectivePoint& p) { return p.gap; });
        accumulate([](const ObjectivePoint& p) { return p.spread; });
    }
    return distance;
}

std::vector<std::vector<int>> non_dominated_sort(const std::vector<ObjectivePoint>& points) {
    const std::size_t n = points.size();
    std::vector<std::vector<int>> dominated(n);
    std::vector<int> dominators(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(points[i], points[j])) {
                dominated[i].push_back(static_cast<int>(j));
                ++dominators[j];
            } else if (dominates(points[j], points[i])) {
                dominated[j].push_back(static_cast<int>(i));
                ++dominators[i];
            }
        }
    }
    std::vector<std::vector<int>> fronts;
    std::vector<int> current;
    for (std::size_t i = 0; i < n; ++i)
        if (dominators[i] == 0) current.push_back(static_cast<int>(i));
    while (!current.empty()) {
        // Order within the front by descending crowding, ties by index.
        const auto crowd = crowding_distances(points, current);
        std::vector<std::size_t> order(current.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return crowd[a] > crowd[b] || (crowd[a] == crowd[b] && current[a] < current[b]);
        });
        std::vector<int> sorted_front;
        sorted_front.reserve(current.size());
        for (std::size_t i : order) sorted_front.push_back(current[i]);

        std::vector<int> next;
        for (int i : current)
            for (int j : dominated[static_cast<std::size_t>(i)])
                if (--dominators[static_cast<std::size_t>(j)] == 0) next.push_back(j);
        fronts.push_back(std::move(sorted_front));
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

std::vector<RankedPoint> rank_population(const std::vector<ObjectivePoint>& points) {
    std::vector<RankedPoint> ranked(points.size());
    const auto fronts = non_dominated_sort(points);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        const auto crowd = crowding_distances(points, fronts[r]);
        for (std::size_t i = 0; i < fronts[r].size(); ++i) {
            ranked[static_cast<std::size_t>(fronts[r][i])] = {static_cast<int>(r), crowd[i]};
        }
    }
    return ranked;
}

}  // namespace duelbench
