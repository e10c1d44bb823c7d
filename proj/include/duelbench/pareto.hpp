#pragma once

#include <vector>

namespace duelbench {

/// One candidate's objectives; both are maximized.
struct ObjectivePoint {
    double gap = 0.0;
    double spread = 0.0;
};

/// True when a is at least as good in both objectives and better in one.
bool dominates(const ObjectivePoint& a, const ObjectivePoint& b);

/// Fast non-dominated sort. Front 0 is the maximal non-dominated set; each
/// later front is non-dominated once earlier fronts are removed. Fronts list
/// input indices ordered by descending crowding distance, ties by index.
std::vector<std::vector<int>> non_dominated_sort(const std::vector<ObjectivePoint>& points);

/// NSGA-II crowding distance for the members of one front (boundary = +inf).
/// Returned in the same order as `front`.
std::vector<double> crowding_distances(const std::vector<ObjectivePoint>& points,
                                       const std::vector<int>& front);

/// Per-point (front rank, crowding distance) for tournament selection.
struct RankedPoint {
    int rank = 0;
    double crowding = 0.0;
};
std::vector<RankedPoint> rank_population(const std::vector<ObjectivePoint>& points);

}  // namespace duelbench
