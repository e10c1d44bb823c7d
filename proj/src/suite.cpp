#include "duelbench/suite.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include <json.hpp>

#include "duelbench/errors.hpp"

namespace duelbench {

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> ranking_of(const std::map<std::string, double>& per_method) {
    std::vector<std::string> names;
    names.reserve(per_method.size());
    for (const auto& [name, score] : per_method) names.push_back(name);
    std::sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
        const double sa = per_method.at(a), sb = per_method.at(b);
        return sa > sb || (sa == sb && a < b);
    });
    return names;
}

}  // namespace

BenchmarkEntry make_benchmark_entry(std::string function_text, std::uint64_t seed, double gap,
                                    double spread,
                                    std::map<std::string, double> per_method_auroc) {
    BenchmarkEntry entry;
    entry.bigrams = bigram_histogram(parse_expr(function_text));
    entry.function_text = std::move(function_text);
    entry.seed = seed;
    entry.gap = gap;
    entry.spread = spread;
    entry.method_ranking = ranking_of(per_method_auroc);
    entry.per_method_auroc = std::move(per_method_auroc);
    return entry;
}

double ruzicka(const BigramHistogram& x, const BigramHistogram& y) {
    double min_sum = 0.0, max_sum = 0.0;
    auto ix = x.begin();
    auto iy = y.begin();
    while (ix != x.end() || iy != y.end()) {
        if (iy == y.end() || (ix != x.end() && ix->first < iy->first)) {
            max_sum += static_cast<double>(ix->second);
            ++ix;
        } else if (ix == x.end() || iy->first < ix->first) {
            max_sum += static_cast<double>(iy->second);
            ++iy;
        } else {
            min_sum += static_cast<double>(std::min(ix->second, iy->second));
            max_sum += static_cast<double>(std::max(ix->second, iy->second));
            ++ix;
            ++iy;
        }
    }
    if (max_sum == 0.0) return 1.0;  // two empty histograms are identical
    return min_sum / max_sum;
}

Eigen::MatrixXd similarity_matrix(const std::vector<BenchmarkEntry>& entries) {
    if (entries.empty()) throw ConfigError("similarity matrix needs at least one entry");
    const auto n = static_cast<Eigen::Index>(entries.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double s = ruzicka(entries[static_cast<std::size_t>(i)].bigrams,
                                     entries[static_cast<std::size_t>(j)].bigrams);
            m(i, j) = s;
            m(j, i) = s;
        }
    }
    return m;
}

std::vector<BenchmarkEntry> select_suite(const std::vector<BenchmarkEntry>& candidates,
                                         int max_size, double tau) {
    if (max_size < 1) throw ConfigError("suite max_size must be >= 1");
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("suite tau must lie in (0, 1]");

    std::vector<bool> used(candidates.size(), false);
    std::vector<std::size_t> admitted;
    std::set<std::vector<std::string>> represented;

    while (admitted.size() < static_cast<std::size_t>(max_size)) {
        // Best remaining candidate under the dynamic priority: rankings not
        // yet represented first, then spread, gap, and text for a total order.
        std::size_t pick = candidates.size();
        auto better = [&](std::size_t a, std::size_t b) {
            const auto& ca = candidates[a];
            const auto& cb = candidates[b];
            const bool ua = !represented.count(ca.method_ranking);
            const bool ub = !represented.count(cb.method_ranking);
            if (ua != ub) return ua;
            if (ca.spread != cb.spread) return ca.spread > cb.spread;
            if (ca.gap != cb.gap) return ca.gap > cb.gap;
            if (ca.function_text != cb.function_text) return ca.function_text < cb.function_text;
            return a < b;
        };
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (used[i]) continue;
            if (pick == candidates.size() || better(i, pick)) pick = i;
        }
        if (pick == candidates.size()) break;
        used[pick] = true;
        bool ok = true;
        for (std::size_t a : admitted) {
            if (ruzicka(candidates[pick].bigrams, candidates[a].bigrams) >= tau) {
                ok = false;
                break;
            }
        }
        if (ok) {
            admitted.push_back(pick);
            represented.insert(candidates[pick].method_ranking);
        }
    }

    std::sort(admitted.begin(), admitted.end());
    std::vector<BenchmarkEntry> suite;
    suite.reserve(admitted.size());
    for (std::size_t i : admitted) suite.push_back(candidates[i]);
    return suite;
}

void write_suite_manifest(const std::vector<BenchmarkEntry>& entries,
                          const std::filesystem::path& path, const std::string& manifest_hash) {
    nlohmann::json doc;
    doc["manifest_hash"] = manifest_hash;
    doc["entries"] = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json j;
        j["function"] = e.function_text;
        j["seed"] = e.seed;
        j["gap"] = e.gap;
        j["spread"] = e.spread;
        j["per_method_auroc"] = e.per_method_auroc;
        j["method_ranking"] = e.method_ranking;
        doc["entries"].push_back(std::move(j));
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write suite manifest: " + path.string());
    out << doc.dump(2) << '\n';
}

std::vector<BenchmarkEntry> read_suite_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read suite manifest: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("suite manifest " + path.string() + ": " + e.what());
    }
    if (!doc.contains("entries") || !doc["entries"].is_array())
        throw ConfigError("suite manifest " + path.string() + ": missing entries array");
    std::vector<BenchmarkEntry> entries;
    for (const auto& j : doc["entries"]) {
        std::map<std::string, double> per_method;
        if (j.contains("per_method_auroc"))
            per_method = j["per_method_auroc"].get<std::map<std::string, double>>();
        entries.push_back(make_benchmark_entry(
            j.at("function").get<std::string>(), j.value("seed", std::uint64_t{0}),
            j.value("gap", 0.0), j.value("spread", 0.0), std::move(per_method)));
    }
    return entries;
}

void write_similarity_csv(const std::vector<BenchmarkEntry>& entries,
                          const std::filesystem::path& path, const std::string& manifest_hash) {
    const Eigen::MatrixXd m = similarity_matrix(entries);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write similarity matrix: " + path.string());
    out << "# manifest_hash: " << manifest_hash << '\n';
    out << "id";
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ",f" << j;
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << 'f' << i;
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(i, j));
        out << '\n';
    }
}

}  // namespace duelbench
