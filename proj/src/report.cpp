#include "duelbench/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "duelbench/classifiers.hpp"
#include "duelbench/errors.hpp"
#include "duelbench/rng.hpp"
#include "duelbench/version.hpp"

namespace duelbench {

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

}  // namespace

RunManifest make_manifest(std::string command, std::string config_json, std::uint64_t base_seed,
                          std::vector<std::string> registry_names) {
    RunManifest m;
    m.version = kVersion;
    m.command = std::move(command);
    m.config_json = std::move(config_json);
    m.base_seed = base_seed;
    for (Op op : all_ops()) m.operator_names.emplace_back(op_name(op));
    m.registry_names = std::move(registry_names);
    return m;
}

std::string manifest_hash(const RunManifest& manifest) {
    std::string blob = manifest.version;
    blob += '\x1f';
    blob += manifest.command;
    blob += '\x1f';
    blob += manifest.config_json;
    blob += '\x1f';
    blob += std::to_string(manifest.base_seed);
    for (const auto& name : manifest.operator_names) {
        blob += '\x1f';
        blob += name;
    }
    for (const auto& name : manifest.registry_names) {
        blob += '\x1f';
        blob += name;
    }
    const std::uint64_t h = fnv1a64(blob);
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 0; i < 16; ++i) buf[15 - i] = digits[(h >> (4 * i)) & 0xF];
    buf[16] = '\0';
    return std::string(buf);
}

void write_manifest_json(const RunManifest& manifest, const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["version"] = manifest.version;
    doc["command"] = manifest.command;
    doc["config"] = nlohmann::json::parse(manifest.config_json);
    doc["base_seed"] = manifest.base_seed;
    doc["operator_set"] = manifest.operator_names;
    doc["registry"] = manifest.registry_names;
    doc["timestamp"] = manifest.timestamp;
    doc["manifest_hash"] = manifest_hash(manifest);
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

void write_archive_jsonl(const ParetoArchive& archive, const std::filesystem::path& path,
                         const std::string& hash) {
    std::vector<const ArchiveEntry*> order;
    order.reserve(archive.entries().size());
    for (const auto& e : archive.entries()) order.push_back(&e);
    std::sort(order.begin(), order.end(), [](const ArchiveEntry* a, const ArchiveEntry* b) {
        if (a->fitness.gap != b->fitness.gap) return a->fitness.gap > b->fitness.gap;
        if (a->fitness.spread != b->fitness.spread) return a->fitness.spread > b->fitness.spread;
        return a->text < b->text;
    });
    auto out = open_out(path);
    for (const ArchiveEntry* e : order) {
        nlohmann::json j;
        j["function"] = e->text;
        j["gap"] = e->fitness.gap;
        j["spread"] = e->fitness.spread;
        j["per_method_auroc"] = e->fitness.per_method_auroc;
        j["manifest_hash"] = hash;
        out << j.dump() << '\n';
    }
}

void write_history_csv(const std::vector<GenerationStats>& history,
                       const std::filesystem::path& path, const std::string& hash) {
    auto out = open_out(path);
    out << "# manifest_hash: " << hash << '\n';
    out << "generation,best_gap,best_spread,archive_size\n";
    for (const auto& g : history)
        out << g.generation << ',' << format_double(g.best_gap) << ','
            << format_double(g.best_spread) << ',' << g.archive_size << '\n';
}

double interpolated_quantile(std::vector<double> values, double p) {
    if (values.empty()) throw ConfigError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

BoxplotSummary summarize_replicates(const std::vector<double>& values) {
    BoxplotSummary s;
    s.min = interpolated_quantile(values, 0.0);
    s.q1 = interpolated_quantile(values, 0.25);
    s.median = interpolated_quantile(values, 0.5);
    s.q3 = interpolated_quantile(values, 0.75);
    s.max = interpolated_quantile(values, 1.0);
    return s;
}

void write_heatmap_csv(const std::vector<std::string>& dataset_ids,
                       const std::vector<std::string>& methods, const Eigen::MatrixXd& aurocs,
                       const std::filesystem::path& path, const std::string& hash) {
    if (aurocs.rows() != static_cast<Eigen::Index>(dataset_ids.size()) ||
        aurocs.cols() != static_cast<Eigen::Index>(methods.size()))
        throw ShapeError("heatmap matrix shape does not match its labels");
    auto out = open_out(path);
    out << "# manifest_hash: " << hash << '\n';
    out << "dataset";
    for (const auto& m : methods) out << ',' << m;
    out << '\n';
    for (Eigen::Index i = 0; i < aurocs.rows(); ++i) {
        out << dataset_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < aurocs.cols(); ++j) out << ',' << format_double(aurocs(i, j));
        out << '\n';
    }
}

void write_boxplot_csv(const std::vector<std::string>& methods,
                       const std::vector<BoxplotSummary>& summaries,
                       const std::filesystem::path& path, const std::string& hash) {
    if (methods.size() != summaries.size())
        throw ShapeError("boxplot summaries do not match the method list");
    auto out = open_out(path);
    out << "# manifest_hash: " << hash << '\n';
    out << "method,min,q1,median,q3,max\n";
    for (std::size_t i = 0; i < methods.size(); ++i) {
        const auto& s = summaries[i];
        out << methods[i] << ',' << format_double(s.min) << ',' << format_double(s.q1) << ','
            << format_double(s.median) << ',' << format_double(s.q3) << ','
            << format_double(s.max) << '\n';
    }
}

Eigen::MatrixXd deviation_table(const Eigen::MatrixXd& aurocs) {
    if (aurocs.cols() < 2) throw ConfigError("deviation table needs at least two methods");
    Eigen::MatrixXd dev = aurocs;
    for (Eigen::Index i = 0; i < dev.rows(); ++i) dev.row(i).array() -= aurocs.row(i).mean();
    return dev;
}

void write_deviation_csv(const std::vector<std::string>& dataset_ids,
                         const std::vector<std::string>& methods, const Eigen::MatrixXd& aurocs,
                         const std::filesystem::path& path, const std::string& hash) {
    write_heatmap_csv(dataset_ids, methods, deviation_table(aurocs), path, hash);
}

void write_roc_csv(const std::vector<RocPoint>& points, const std::filesystem::path& path,
                   const std::string& hash) {
    auto out = open_out(path);
    out << "# manifest_hash: " << hash << '\n';
    out << "threshold,fpr,tpr\n";
    for (const auto& p : points)
        out << format_double(p.threshold) << ',' << format_double(p.fpr) << ','
            << format_double(p.tpr) << '\n';
}

void write_prc_csv(const std::vector<PrcPoint>& points, const std::filesystem::path& path,
                   const std::string& hash) {
    auto out = open_out(path);
    out << "# manifest_hash: " << hash << '\n';
    out << "threshold,recall,precision\n";
    for (const auto& p : points)
        out << format_double(p.threshold) << ',' << format_double(p.recall) << ','
            << format_double(p.precision) << '\n';
}

void write_curve_svg(const std::vector<std::pair<double, double>>& xy, const std::string& x_label,
                     const std::string& y_label, const std::filesystem::path& path) {
    const double size = 480.0, pad = 40.0;
    auto px = [&](double x) { return pad + x * (size - 2 * pad); };
    auto py = [&](double y) { return size - pad - y * (size - 2 * pad); };
    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
    out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << size - 2 * pad
        << "\" height=\"" << size - 2 * pad << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << size / 2 << "\" y=\"" << size - 8 << "\" text-anchor=\"middle\">"
        << x_label << "</text>\n";
    out << "<text x=\"12\" y=\"" << size / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 12 "
        << size / 2 << ")\">" << y_label << "</text>\n";
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : xy)
        out << px(std::clamp(x, 0.0, 1.0)) << ',' << py(std::clamp(y, 0.0, 1.0)) << ' ';
    out << "\"/>\n</svg>\n";
}

}  // namespace duelbench
