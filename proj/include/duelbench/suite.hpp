#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "duelbench/expr.hpp"

namespace duelbench {

/// One benchmark candidate: a generative function plus its full-protocol
/// per-method results. The bigram histogram and the ranking are derived.
struct BenchmarkEntry {
    std::string function_text;
    std::uint64_t seed = 0;
    double gap = 0.0;
    double spread = 0.0;
    std::map<std::string, double> per_method_auroc;
    BigramHistogram bigrams;
    std::vector<std::string> method_ranking;  // descending AUROC, ties alphabetical
};

/// Parses the function, fills the histogram, and ranks the methods.
BenchmarkEntry make_benchmark_entry(std::string function_text, std::uint64_t seed, double gap,
                                    double spread, std::map<std::string, double> per_method_auroc);

/// Weighted-Jaccard similarity: sum of coordinate-wise minima over maxima,
/// keys unioned; two empty histograms count as identical (1.0).
double ruzicka(const BigramHistogram& x, const BigramHistogram& y);

Eigen::MatrixXd similarity_matrix(const std::vector<BenchmarkEntry>& entries);

/// Greedy diverse selection. Candidates are considered best-first by (ranking
/// not yet represented, spread, gap, text); one is admitted iff its Ruzicka
/// similarity to every admitted entry stays below tau. The result preserves
/// input order and re-selecting a selected suite returns it unchanged.
std::vector<BenchmarkEntry> select_suite(const std::vector<BenchmarkEntry>& candidates,
                                         int max_size, double tau);

void write_suite_manifest(const std::vector<BenchmarkEntry>& entries,
                          const std::filesystem::path& path, const std::string& manifest_hash);
std::vector<BenchmarkEntry> read_suite_manifest(const std::filesystem::path& path);

/// Square CSV with `f<i>` candidate ids on both axes.
void write_similarity_csv(const std::vector<BenchmarkEntry>& entries,
                          const std::filesystem::path& path, const std::string& manifest_hash);

}  // namespace duelbench
