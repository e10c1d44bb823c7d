#include "duelbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "duelbench/errors.hpp"
#include "duelbench/rng.hpp"

namespace duelbench {

namespace {

void validate_config(const DatasetConfig& config) {
    if (config.n_samples < 4) throw ConfigError("dataset config: n_samples must be >= 4");
    if (config.n_samples % 2 != 0)
        throw ConfigError("dataset config: n_samples must be even for an exactly balanced target");
    if (config.n_features < 1) throw ConfigError("dataset config: n_features must be >= 1");
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

Eigen::MatrixXd sample_features(const DatasetConfig& config) {
    validate_config(config);
    CounterRng rng(config.seed, 0);
    Eigen::MatrixXd X(config.n_samples, config.n_features);
    for (Eigen::Index i = 0; i < config.n_samples; ++i)
        for (Eigen::Index j = 0; j < config.n_features; ++j) X(i, j) = rng.normal();
    return X;
}

Eigen::VectorXi rank_median_labels(const Eigen::Ref<const Eigen::VectorXd>& raw) {
    const Eigen::Index n = raw.size();
    if (n < 2 || n % 2 != 0) throw ConfigError("rank-median labels need an even sample count");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (raw[a] != raw[b]) return raw[a] < raw[b];
        return a < b;
    });
    Eigen::VectorXi target = Eigen::VectorXi::Zero(n);
    for (Eigen::Index r = n / 2; r < n; ++r) target[order[static_cast<std::size_t>(r)]] = 1;
    return target;
}

Dataset synthesize(const Expr& f, const DatasetConfig& config) {
    validate_config(config);
    if (f.max_feature() >= config.n_features)
        throw ConfigError("function references feature " + std::to_string(f.max_feature()) +
                          " but the dataset has only " + std::to_string(config.n_features) +
                          " features");
    Dataset dataset;
    dataset.features = sample_features(config);
    const Eigen::VectorXd raw = evaluate_rows(f, dataset.features);
    dataset.target = rank_median_labels(raw);
    dataset.config = config;
    dataset.function_text = to_string(f);
    return dataset;
}

std::vector<Dataset> replicate(const Expr& f, const DatasetConfig& base_config, int n_replicates) {
    if (n_replicates < 1) throw ConfigError("replicate: n_replicates must be >= 1");
    std::vector<Dataset> out;
    out.reserve(static_cast<std::size_t>(n_replicates));
    for (int k = 0; k < n_replicates; ++k) {
        DatasetConfig config = base_config;
        config.seed = base_config.seed + static_cast<std::uint64_t>(k);
        out.push_back(synthesize(f, config));
    }
    return out;
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    for (Eigen::Index j = 0; j < dataset.features.cols(); ++j) out << "feature_" << j << ",";
    out << "target\n";
    for (Eigen::Index i = 0; i < dataset.features.rows(); ++i) {
        for (Eigen::Index j = 0; j < dataset.features.cols(); ++j)
            out << format_double(dataset.features(i, j)) << ",";
        out << dataset.target[i] << "\n";
    }
}

Dataset read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty dataset file");
    const auto n_cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
    if (n_cols < 2) throw ConfigError(path.string() + ": expected feature columns and a target");
    const Eigen::Index n_features = n_cols - 1;

    std::vector<double> values;
    std::vector<int> targets;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (Eigen::Index j = 0; j < n_cols; ++j) {
            if (j > 0) {
                if (p >= end || *p != ',')
                    throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                                      ": expected " + std::to_string(n_cols) + " columns");
                ++p;
            }
            if (j < n_features) {
                double v = 0.0;
                const auto res = std::from_chars(p, end, v);
                if (res.ec != std::errc{})
                    throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                                      ": invalid number");
                p = res.ptr;
                values.push_back(v);
            } else {
                int t = 0;
                const auto res = std::from_chars(p, end, t);
                if (res.ec != std::errc{} || (t != 0 && t != 1))
                    throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                                      ": target must be 0 or 1");
                p = res.ptr;
                targets.push_back(t);
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(targets.size());
    if (n == 0) throw ConfigError(path.string() + ": no data rows");
    Dataset dataset;
    dataset.features.resize(n, n_features);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n_features; ++j)
            dataset.features(i, j) = values[static_cast<std::size_t>(i * n_features + j)];
    dataset.target.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) dataset.target[i] = targets[static_cast<std::size_t>(i)];
    dataset.config.n_samples = n;
    dataset.config.n_features = n_features;
    return dataset;
}

void write_sidecar(const Dataset& dataset, const std::filesystem::path& path,
                   const std::string& manifest_hash) {
    nlohmann::json meta;
    meta["function"] = dataset.function_text;
    meta["seed"] = dataset.config.seed;
    meta["n_samples"] = dataset.config.n_samples;
    meta["n_features"] = dataset.config.n_features;
    std::vector<std::string> ops;
    for (Op op : all_ops()) ops.emplace_back(op_name(op));
    meta["operator_set"] = ops;
    if (!manifest_hash.empty()) meta["manifest_hash"] = manifest_hash;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out << meta.dump(2) << "\n";
}

}  // namespace duelbench
