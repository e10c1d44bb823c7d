#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "duelbench/classifiers.hpp"
#include "duelbench/dataset.hpp"

namespace duelbench {

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> test;
};

/// Class-proportional split; exact when the per-class counts divide evenly.
/// Throws DegenerateDataError if either side would miss a class.
SplitIndices stratified_split(const Eigen::Ref<const Eigen::VectorXi>& labels,
                              double train_fraction, std::uint64_t seed);

/// k disjoint stratified test folds covering all rows, each class within +-1
/// per fold. Throws DegenerateDataError when a class count is below k.
std::vector<std::vector<int>> stratified_kfold(const Eigen::Ref<const Eigen::VectorXi>& labels,
                                               int k, std::uint64_t seed);

Eigen::MatrixXd take_rows(const Eigen::Ref<const Eigen::MatrixXd>& X,
                          const std::vector<int>& rows);
Eigen::VectorXi take_labels(const Eigen::Ref<const Eigen::VectorXi>& y,
                            const std::vector<int>& rows);

/// Mean held-out-fold AUROC over a stratified k-fold partition.
double cross_val_auroc(const ClassifierSpec& spec, const ParamMap& params,
                       const Eigen::Ref<const Eigen::MatrixXd>& X,
                       const Eigen::Ref<const Eigen::VectorXi>& y, int k, std::uint64_t seed);

struct TunedResult {
    ParamMap best_params;
    double best_cv_auroc = 0.0;
    double test_auroc = 0.0;
    int n_trials = 0;
    std::vector<std::pair<ParamMap, double>> trial_log;  // (params, cv auroc) per trial
    Eigen::VectorXd test_scores;  // refit-model scores on the held-out rows
    Eigen::VectorXi test_labels;
};

struct TuneConfig {
    int budget = 200;
    int folds = 10;
    std::uint64_t seed = 0;
};

/// Seeded uniform random search (log-uniform on log ranges). The parameter
/// stream is pre-generated sequentially, cv ties keep the earlier trial, and
/// the single refit is scored once on the held-out matrices.
TunedResult tune(const ClassifierSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X_train,
                 const Eigen::Ref<const Eigen::VectorXi>& y_train,
                 const Eigen::Ref<const Eigen::MatrixXd>& X_test,
                 const Eigen::Ref<const Eigen::VectorXi>& y_test, const TuneConfig& config);

struct ProtocolConfig {
    double train_fraction = 0.8;
    int budget = 200;
    int folds = 10;
    std::uint64_t seed = 0;
};

/// Full per-dataset protocol: stratified split, tune on the training side,
/// report the held-out test AUROC.
TunedResult evaluate_on_dataset(const ClassifierSpec& spec, const Dataset& dataset,
                                const ProtocolConfig& config);

}  // namespace duelbench
