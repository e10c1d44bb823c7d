#pragma once

#include <Eigen/Dense>
#include <vector>

namespace duelbench {

struct RocPoint {
    double threshold;
    double fpr;
    double tpr;
};

struct PrcPoint {
    double threshold;
    double recall;
    double precision;
};

struct EvaluationResult {
    double auroc = 0.0;
    double average_precision = 0.0;
    std::vector<RocPoint> roc_points;  // (0,0) .. (1,1), both coordinates non-decreasing
    std::vector<PrcPoint> prc_points;  // one point per distinct score, descending threshold
};

/// Probability a random positive is scored above a random negative, ties
/// counted 1/2. Computed by the tie-aware average-rank formula in O(n log n).
/// Throws UndefinedMetricError unless both classes are present.
double auroc(const Eigen::Ref<const Eigen::VectorXd>& scores,
             const Eigen::Ref<const Eigen::VectorXi>& labels);

std::vector<RocPoint> roc_curve(const Eigen::Ref<const Eigen::VectorXd>& scores,
                                const Eigen::Ref<const Eigen::VectorXi>& labels);

std::vector<PrcPoint> prc_curve(const Eigen::Ref<const Eigen::VectorXd>& scores,
                                const Eigen::Ref<const Eigen::VectorXi>& labels);

/// Step-wise area under the precision-recall curve: sum of (R_i - R_{i-1}) * P_i.
double average_precision(const Eigen::Ref<const Eigen::VectorXd>& scores,
                         const Eigen::Ref<const Eigen::VectorXi>& labels);

EvaluationResult evaluate_scores(const Eigen::Ref<const Eigen::VectorXd>& scores,
                                 const Eigen::Ref<const Eigen::VectorXi>& labels);

}  // namespace duelbench
