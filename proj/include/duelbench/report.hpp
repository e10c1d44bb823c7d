#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "duelbench/evolution.hpp"
#include "duelbench/metrics.hpp"

namespace duelbench {

/// Everything needed to reproduce a run bit for bit. The timestamp stays
/// empty by default so reruns emit byte-identical artifacts; it never enters
/// the hash.
struct RunManifest {
    std::string version;
    std::string command;
    std::string config_json;  // canonical resolved configuration
    std::uint64_t base_seed = 0;
    std::vector<std::string> operator_names;
    std::vector<std::string> registry_names;
    std::string timestamp;
};

RunManifest make_manifest(std::string command, std::string config_json, std::uint64_t base_seed,
                          std::vector<std::string> registry_names);

/// 16-hex-digit FNV-1a over the reproducibility-relevant fields.
std::string manifest_hash(const RunManifest& manifest);

void write_manifest_json(const RunManifest& manifest, const std::filesystem::path& path);

/// One JSON object per line: function, gap, spread, per-method AUROCs.
/// Entries ordered by (gap desc, spread desc, text asc).
void write_archive_jsonl(const ParetoArchive& archive, const std::filesystem::path& path,
                         const std::string& hash);

void write_history_csv(const std::vector<GenerationStats>& history,
                       const std::filesystem::path& path, const std::string& hash);

struct BoxplotSummary {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// Quantile with linear interpolation at rank (n-1)*p over the sorted values.
double interpolated_quantile(std::vector<double> values, double p);
BoxplotSummary summarize_replicates(const std::vector<double>& values);

/// rows = datasets, columns = methods, cells = test AUROC.
void write_heatmap_csv(const std::vector<std::string>& dataset_ids,
                       const std::vector<std::string>& methods, const Eigen::MatrixXd& aurocs,
                       const std::filesystem::path& path, const std::string& hash);

void write_boxplot_csv(const std::vector<std::string>& methods,
                       const std::vector<BoxplotSummary>& summaries,
                       const std::filesystem::path& path, const std::string& hash);

/// Per-cell deviation from the row (dataset) mean; every row sums to zero.
Eigen::MatrixXd deviation_table(const Eigen::MatrixXd& aurocs);

void write_deviation_csv(const std::vector<std::string>& dataset_ids,
                         const std::vector<std::string>& methods, const Eigen::MatrixXd& aurocs,
                         const std::filesystem::path& path, const std::string& hash);

void write_roc_csv(const std::vector<RocPoint>& points, const std::filesystem::path& path,
                   const std::string& hash);
void write_prc_csv(const std::vector<PrcPoint>& points, const std::filesystem::path& path,
                   const std::string& hash);

/// Minimal SVG polyline rendering of a unit-square curve.
void write_curve_svg(const std::vector<std::pair<double, double>>& xy, const std::string& x_label,
                     const std::string& y_label, const std::filesystem::path& path);

}  // namespace duelbench
