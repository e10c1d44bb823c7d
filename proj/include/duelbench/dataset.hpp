#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "duelbench/expr.hpp"

namespace duelbench {

struct DatasetConfig {
    Eigen::Index n_samples = 1000;
    Eigen::Index n_features = 10;
    std::uint64_t seed = 0;
};

/// A synthesized binary-classification problem. Regenerating with the same
/// (function, config) reproduces features and target bit for bit.
struct Dataset {
    Eigen::MatrixXd features;  // n_samples x n_features
    Eigen::VectorXi target;    // exactly n/2 zeros and n/2 ones
    DatasetConfig config;
    std::string function_text;
};

/// Standard-normal feature matrix drawn from CounterRng(seed, stream 0) in
/// row-major order: row 0 column 0 first.
Eigen::MatrixXd sample_features(const DatasetConfig& config);

/// Sorts samples by (raw value, row index) ascending; the lower half gets
/// label 0, the upper half label 1. Exact n/2 balance for even n.
Eigen::VectorXi rank_median_labels(const Eigen::Ref<const Eigen::VectorXd>& raw);

Dataset synthesize(const Expr& f, const DatasetConfig& config);

/// Replicate k uses seed base_seed + k, k = 0..n_replicates-1.
std::vector<Dataset> replicate(const Expr& f, const DatasetConfig& base_config, int n_replicates);

/// CSV with header feature_0,...,feature_<d-1>,target and shortest
/// round-trip-exact float formatting.
void write_csv(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_csv(const std::filesystem::path& path);

/// JSON sidecar carrying function text, seed, shape, and the operator set.
void write_sidecar(const Dataset& dataset, const std::filesystem::path& path,
                   const std::string& manifest_hash = "");

}  // namespace duelbench
