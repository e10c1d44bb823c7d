#pragma once

#include <Eigen/Dense>
#include <vector>

#include "duelbench/rng.hpp"

namespace duelbench {

struct TreeNode {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0.0; // rows with x[feature] <= threshold go left
    int left = -1;
    int right = -1;
    double value = 0.0;     // leaf payload
};

/// One fitted binary tree. Shared by the axis-aligned learners: the payload is
/// a class fraction for gini trees and a Newton step for boosted trees.
struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict_row(const Eigen::Ref<const Eigen::VectorXd>& row) const;
    Eigen::VectorXd predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
    int n_leaves() const;
    int depth() const;
};

struct TreeBuildConfig {
    /// Split levels below the root; 0 grows a single leaf. Ignored when
    /// max_leaves is set.
    int max_depth = 10;
    /// When > 0, grow best-first by split gain until this many leaves.
    int max_leaves = 0;
    /// Features considered per split; 0 means all. Needs an rng when set.
    int feature_subsample = 0;
};

/// Candidate thresholds are midpoints between consecutive distinct sorted
/// values; gain ties keep the first candidate in (feature, threshold)
/// ascending order. `slots` are row indices into X and may repeat (bagging).

/// Gini-impurity classification tree; leaf value = class-1 fraction.
Tree build_gini_tree(const Eigen::Ref<const Eigen::MatrixXd>& X,
                     const Eigen::Ref<const Eigen::VectorXi>& y, const std::vector<int>& slots,
                     const TreeBuildConfig& config, CounterRng* rng = nullptr);

/// Second-order regression tree on per-row gradients and hessians;
/// leaf value = sum(grad) / (sum(hess) + ridge).
Tree build_newton_tree(const Eigen::Ref<const Eigen::MatrixXd>& X,
                       const Eigen::Ref<const Eigen::VectorXd>& grad,
                       const Eigen::Ref<const Eigen::VectorXd>& hess, const std::vector<int>& slots,
                       const TreeBuildConfig& config, CounterRng* rng = nullptr);

constexpr double kLeafRidge = 1.0;
constexpr double kMinSplitGain = 1e-12;

}  // namespace duelbench
