// duelbench: discover, synthesize, evaluate, and report on synthetic
// classification benchmarks built from evolved generative functions.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "duelbench/classifiers.hpp"
#include "duelbench/crossval.hpp"
#include "duelbench/dataset.hpp"
#include "duelbench/errors.hpp"
#include "duelbench/evolution.hpp"
#include "duelbench/expr.hpp"
#include "duelbench/metrics.hpp"
#include "duelbench/parallel.hpp"
#include "duelbench/report.hpp"
#include "duelbench/rng.hpp"
#include "duelbench/suite.hpp"
#include "duelbench/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace duelbench;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int jobs = 1;
    std::string out_dir = ".";
};

fs::path ensure_out_dir(const GlobalOpts& g) {
    fs::path dir(g.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string());
    return dir;
}

std::vector<std::string> registry_names() {
    std::vector<std::string> names;
    for (const auto& spec : registry()) names.push_back(spec.name);
    return names;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

// --- typed config-field access with field-naming diagnostics ---------------

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown config field '" + where + key + "'");
}

template <typename T>
T field_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + key + "' has the wrong type");
    }
}

// --- discover --------------------------------------------------------------

struct DiscoverPlan {
    std::vector<std::string> classifiers;
    std::vector<std::pair<std::string, std::string>> duels;  // explicit target/rival pairs
    bool all_pairs = false;
    DuelConfig base;
    int suite_max_size = 40;
    double suite_tau = 0.5;
};

DiscoverPlan parse_discover_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("discover config must be a JSON object");
    reject_unknown_keys(doc,
                        {"classifiers", "duels", "population_size", "generations", "mutation_rate",
                         "crossover_rate", "fitness_tuning_budget", "fitness_cv_folds",
                         "archive_capacity", "spread_over_all", "dataset", "grow", "seed",
                         "suite_max_size", "suite_tau"},
                        "");
    DiscoverPlan plan;
    plan.classifiers = field_or<std::vector<std::string>>(doc, "classifiers", registry_names());
    for (const auto& name : plan.classifiers)
        find_classifier(name);  // throws with the bad name
    if (plan.classifiers.size() < 2)
        throw ConfigError("config field 'classifiers' needs at least two entries");

    plan.base.population_size = field_or<int>(doc, "population_size", plan.base.population_size);
    plan.base.generations = field_or<int>(doc, "generations", plan.base.generations);
    plan.base.mutation_rate = field_or<double>(doc, "mutation_rate", plan.base.mutation_rate);
    plan.base.crossover_rate = field_or<double>(doc, "crossover_rate", plan.base.crossover_rate);
    plan.base.fitness_tuning_budget =
        field_or<int>(doc, "fitness_tuning_budget", plan.base.fitness_tuning_budget);
    plan.base.fitness_cv_folds = field_or<int>(doc, "fitness_cv_folds", plan.base.fitness_cv_folds);
    plan.base.archive_capacity = field_or<int>(doc, "archive_capacity", plan.base.archive_capacity);
    plan.base.spread_over_all = field_or<bool>(doc, "spread_over_all", plan.base.spread_over_all);
    plan.base.seed = field_or<std::uint64_t>(doc, "seed", 0);
    plan.suite_max_size = field_or<int>(doc, "suite_max_size", plan.suite_max_size);
    plan.suite_tau = field_or<double>(doc, "suite_tau", plan.suite_tau);

    if (doc.contains("dataset")) {
        const json& ds = doc.at("dataset");
        if (!ds.is_object()) throw ConfigError("config field 'dataset' must be an object");
        reject_unknown_keys(ds, {"n_samples", "n_features"}, "dataset.");
        plan.base.dataset_config.n_samples =
            field_or<Eigen::Index>(ds, "n_samples", plan.base.dataset_config.n_samples);
        plan.base.dataset_config.n_features =
            field_or<Eigen::Index>(ds, "n_features", plan.base.dataset_config.n_features);
    }
    plan.base.grow.n_features = static_cast<int>(plan.base.dataset_config.n_features);
    if (doc.contains("grow")) {
        const json& gr = doc.at("grow");
        if (!gr.is_object()) throw ConfigError("config field 'grow' must be an object");
        reject_unknown_keys(gr, {"min_depth", "max_depth", "max_size", "p_constant"}, "grow.");
        plan.base.grow.min_depth = field_or<int>(gr, "min_depth", plan.base.grow.min_depth);
        plan.base.grow.max_depth = field_or<int>(gr, "max_depth", plan.base.grow.max_depth);
        plan.base.grow.max_size = field_or<int>(gr, "max_size", plan.base.grow.max_size);
        plan.base.grow.p_constant = field_or<double>(gr, "p_constant", plan.base.grow.p_constant);
    }

    if (doc.contains("duels")) {
        const json& duels = doc.at("duels");
        if (!duels.is_array()) throw ConfigError("config field 'duels' must be an array");
        for (const json& d : duels) {
            if (!d.is_object() || !d.contains("target") || !d.contains("rival"))
                throw ConfigError("each entry of 'duels' needs 'target' and 'rival' fields");
            reject_unknown_keys(d, {"target", "rival"}, "duels[].");
            plan.duels.emplace_back(field_or<std::string>(d, "target", ""),
                                    field_or<std::string>(d, "rival", ""));
        }
        if (plan.duels.empty()) throw ConfigError("config field 'duels' must not be empty");
    } else {
        plan.all_pairs = true;
    }
    return plan;
}

json resolved_discover_config(const DiscoverPlan& plan) {
    json doc;
    doc["classifiers"] = plan.classifiers;
    if (!plan.all_pairs) {
        json duels = json::array();
        for (const auto& [t, r] : plan.duels) duels.push_back({{"target", t}, {"rival", r}});
        doc["duels"] = duels;
    }
    doc["population_size"] = plan.base.population_size;
    doc["generations"] = plan.base.generations;
    doc["mutation_rate"] = plan.base.mutation_rate;
    doc["crossover_rate"] = plan.base.crossover_rate;
    doc["fitness_tuning_budget"] = plan.base.fitness_tuning_budget;
    doc["fitness_cv_folds"] = plan.base.fitness_cv_folds;
    doc["archive_capacity"] = plan.base.archive_capacity;
    doc["spread_over_all"] = plan.base.spread_over_all;
    doc["dataset"] = {{"n_samples", plan.base.dataset_config.n_samples},
                      {"n_features", plan.base.dataset_config.n_features}};
    doc["grow"] = {{"min_depth", plan.base.grow.min_depth},
                   {"max_depth", plan.base.grow.max_depth},
                   {"max_size", plan.base.grow.max_size},
                   {"p_constant", plan.base.grow.p_constant}};
    doc["seed"] = plan.base.seed;
    doc["suite_max_size"] = plan.suite_max_size;
    doc["suite_tau"] = plan.suite_tau;
    return doc;
}

std::vector<std::string> duel_bystanders(const std::vector<std::string>& names,
                                         const std::string& target, const std::string& rival) {
    std::vector<std::string> out;
    for (const auto& n : names)
        if (n != target && n != rival) out.push_back(n);
    return out;
}

int cmd_discover(const GlobalOpts& g) {
    if (g.config_path.empty()) throw ConfigError("discover needs --config <file.json>");
    DiscoverPlan plan = parse_discover_config(load_json_file(g.config_path));
    if (g.seed_given) plan.base.seed = g.seed;

    const fs::path dir = ensure_out_dir(g);
    const RunManifest manifest = make_manifest("discover", resolved_discover_config(plan).dump(),
                                               plan.base.seed, plan.classifiers);
    const std::string hash = manifest_hash(manifest);
    write_manifest_json(manifest, dir / "manifest.json");

    std::vector<DuelResult> results;
    if (plan.all_pairs) {
        results = run_all_duels(plan.classifiers, plan.base, g.jobs);
    } else {
        for (const auto& [target, rival] : plan.duels) {
            DuelConfig duel = plan.base;
            duel.target = target;
            duel.rival = rival;
            duel.bystanders = duel_bystanders(plan.classifiers, target, rival);
            duel.seed = hash_seed(hash_seed(plan.base.seed, target), rival);
            validate_duel(duel);
            results.push_back(run_duel(duel, g.jobs));
        }
    }
    std::vector<BenchmarkEntry> candidates;
    for (const auto& res : results) {
        const std::string stem = res.config.target + "_vs_" + res.config.rival;
        write_archive_jsonl(res.archive, dir / ("archive_" + stem + ".jsonl"), hash);
        write_history_csv(res.history, dir / ("history_" + stem + ".csv"), hash);
        for (const auto& entry : res.archive.entries())
            candidates.push_back(make_benchmark_entry(
                entry.text, hash_seed(res.config.seed, "features"), entry.fitness.gap,
                entry.fitness.spread, entry.fitness.per_method_auroc));
        std::cout << stem << ": archive " << res.archive.size() << " entries, best gap "
                  << res.archive.best_gap() << '\n';
    }
    const auto suite = select_suite(candidates, plan.suite_max_size, plan.suite_tau);
    write_suite_manifest(suite, dir / "suite.json", hash);
    std::cout << "suite: " << suite.size() << " of " << candidates.size() << " candidates\n";
    return 0;
}

// --- synthesize ------------------------------------------------------------

struct SynthOpts {
    std::string function_text;
    std::string suite_path;
    std::int64_t n = 1000;
    int features = 10;
    int n_seeds = 1;
};

int cmd_synthesize(const GlobalOpts& g, const SynthOpts& s) {
    if (s.function_text.empty() == s.suite_path.empty())
        throw ConfigError("synthesize needs exactly one of --function or --suite");

    struct Job {
        std::string text;
        Expr f;
        std::uint64_t base_seed;
    };
    std::vector<Job> jobs;
    if (!s.function_text.empty()) {
        jobs.push_back({s.function_text, parse_expr(s.function_text, s.features), g.seed});
    } else {
        for (const auto& entry : read_suite_manifest(s.suite_path))
            jobs.push_back({entry.function_text, parse_expr(entry.function_text, s.features),
                            g.seed_given ? g.seed : entry.seed});
    }

    const fs::path dir = ensure_out_dir(g);
    json cfg;
    cfg["n"] = s.n;
    cfg["features"] = s.features;
    cfg["seeds"] = s.n_seeds;
    json fns = json::array();
    for (const auto& job : jobs) fns.push_back(job.text);
    cfg["functions"] = fns;
    const RunManifest manifest = make_manifest("synthesize", cfg.dump(), g.seed, registry_names());
    const std::string hash = manifest_hash(manifest);
    write_manifest_json(manifest, dir / "manifest.json");

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        for (int k = 0; k < s.n_seeds; ++k) {
            DatasetConfig cfg_k;
            cfg_k.n_samples = s.n;
            cfg_k.n_features = s.features;
            cfg_k.seed = jobs[i].base_seed + static_cast<std::uint64_t>(k);
            const Dataset ds = synthesize(jobs[i].f, cfg_k);
            const std::string stem = "f" + std::to_string(i) + "_seed" + std::to_string(cfg_k.seed);
            write_csv(ds, dir / (stem + ".csv"));
            write_sidecar(ds, dir / (stem + ".json"), hash);
        }
    }
    std::cout << "wrote " << jobs.size() * static_cast<std::size_t>(s.n_seeds) << " dataset(s)\n";
    return 0;
}

// --- evaluate --------------------------------------------------------------

struct EvalOpts {
    std::vector<std::string> dataset_paths;
    std::vector<std::string> methods;
    int budget = 200;
    int folds = 10;
    double train_fraction = 0.8;
    bool svg = false;
};

int cmd_evaluate(const GlobalOpts& g, const EvalOpts& e) {
    std::vector<std::string> methods = e.methods.empty() ? registry_names() : e.methods;
    for (const auto& m : methods) find_classifier(m);

    struct Loaded {
        std::string id;
        Dataset data;
    };
    std::vector<Loaded> datasets;
    for (const auto& path : e.dataset_paths) {
        try {
            datasets.push_back({fs::path(path).stem().string(), read_csv(path)});
        } catch (const std::exception& ex) {
            std::cerr << "skipping " << path << ": " << ex.what() << '\n';
        }
    }
    if (datasets.empty()) {
        std::cerr << "no readable datasets\n";
        return 1;
    }

    const fs::path dir = ensure_out_dir(g);
    json cfg;
    cfg["datasets"] = e.dataset_paths;
    cfg["methods"] = methods;
    cfg["budget"] = e.budget;
    cfg["folds"] = e.folds;
    cfg["train_fraction"] = e.train_fraction;
    const RunManifest manifest = make_manifest("evaluate", cfg.dump(), g.seed, registry_names());
    const std::string hash = manifest_hash(manifest);
    write_manifest_json(manifest, dir / "manifest.json");

    // One independent, schedule-free seed per (dataset, method) cell.
    const std::size_t n_cells = datasets.size() * methods.size();
    std::vector<TunedResult> cells(n_cells);
    parallel_for(n_cells, g.jobs, [&](std::size_t c) {
        const std::size_t d = c / methods.size(), m = c % methods.size();
        ProtocolConfig pc;
        pc.train_fraction = e.train_fraction;
        pc.budget = e.budget;
        pc.folds = e.folds;
        pc.seed = hash_seed(hash_seed(g.seed, datasets[d].id), methods[m]);
        cells[c] = evaluate_on_dataset(find_classifier(methods[m]), datasets[d].data, pc);
    });

    std::vector<std::string> ids;
    for (const auto& d : datasets) ids.push_back(d.id);
    Eigen::MatrixXd heat(static_cast<Eigen::Index>(datasets.size()),
                         static_cast<Eigen::Index>(methods.size()));
    json results = json::array();
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        for (std::size_t m = 0; m < methods.size(); ++m) {
            const TunedResult& r = cells[d * methods.size() + m];
            heat(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m)) = r.test_auroc;
            results.push_back({{"dataset", ids[d]},
                               {"method", methods[m]},
                               {"test_auroc", r.test_auroc},
                               {"best_cv_auroc", r.best_cv_auroc},
                               {"n_trials", r.n_trials},
                               {"best_params", json::parse(params_to_json(r.best_params))}});
        }
    }
    json results_doc;
    results_doc["manifest_hash"] = hash;
    results_doc["methods"] = methods;
    results_doc["datasets"] = ids;
    results_doc["results"] = results;
    {
        std::ofstream out(dir / "results.json");
        if (!out) throw ConfigError("cannot write results.json");
        out << results_doc.dump(2) << '\n';
    }

    write_heatmap_csv(ids, methods, heat, dir / "heatmap.csv", hash);

    std::vector<BoxplotSummary> box;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        std::vector<double> vals;
        for (std::size_t d = 0; d < datasets.size(); ++d)
            vals.push_back(heat(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m)));
        box.push_back(summarize_replicates(vals));
    }
    write_boxplot_csv(methods, box, dir / "boxplot.csv", hash);

    // Curves for the first dataset only.
    for (std::size_t m = 0; m < methods.size(); ++m) {
        const TunedResult& r = cells[m];
        const auto roc = roc_curve(r.test_scores, r.test_labels);
        const auto prc = prc_curve(r.test_scores, r.test_labels);
        write_roc_csv(roc, dir / ("roc_" + methods[m] + ".csv"), hash);
        write_prc_csv(prc, dir / ("prc_" + methods[m] + ".csv"), hash);
        if (e.svg) {
            std::vector<std::pair<double, double>> roc_xy, prc_xy;
            for (const auto& p : roc) roc_xy.emplace_back(p.fpr, p.tpr);
            for (const auto& p : prc) prc_xy.emplace_back(p.recall, p.precision);
            write_curve_svg(roc_xy, "false positive rate", "true positive rate",
                            dir / ("roc_" + methods[m] + ".svg"));
            write_curve_svg(prc_xy, "recall", "precision", dir / ("prc_" + methods[m] + ".svg"));
        }
    }
    std::cout << "evaluated " << datasets.size() << " dataset(s) x " << methods.size()
              << " method(s)\n";
    return 0;
}

// --- similarity ------------------------------------------------------------

int cmd_similarity(const GlobalOpts& g, const std::string& suite_path) {
    const auto entries = read_suite_manifest(suite_path);
    const fs::path dir = ensure_out_dir(g);
    json cfg;
    cfg["suite"] = suite_path;
    cfg["entries"] = entries.size();
    const RunManifest manifest = make_manifest("similarity", cfg.dump(), g.seed, registry_names());
    write_manifest_json(manifest, dir / "manifest.json");
    write_similarity_csv(entries, dir / "similarity.csv", manifest_hash(manifest));
    std::cout << "wrote " << entries.size() << "x" << entries.size() << " similarity matrix\n";
    return 0;
}

// --- report (deviation table) ----------------------------------------------

int cmd_report(const GlobalOpts& g, const std::string& results_path) {
    const json doc = load_json_file(results_path);
    if (!doc.is_object() || !doc.contains("methods") || !doc.contains("datasets") ||
        !doc.contains("results"))
        throw ConfigError(results_path + ": expected fields 'methods', 'datasets', 'results'");
    const auto methods = doc.at("methods").get<std::vector<std::string>>();
    const auto ids = doc.at("datasets").get<std::vector<std::string>>();
    if (methods.size() < 2) throw ConfigError("deviation table needs at least two methods");

    std::map<std::pair<std::string, std::string>, double> cells;
    for (const json& r : doc.at("results"))
        cells[{r.at("dataset").get<std::string>(), r.at("method").get<std::string>()}] =
            r.at("test_auroc").get<double>();
    std::vector<std::string> gaps;
    for (const auto& d : ids)
        for (const auto& m : methods)
            if (!cells.count({d, m})) gaps.push_back(d + "/" + m);
    if (!gaps.empty()) {
        std::string msg = results_path + ": missing entries:";
        for (const auto& gap : gaps) msg += " " + gap;
        throw ConfigError(msg);
    }

    Eigen::MatrixXd heat(static_cast<Eigen::Index>(ids.size()),
                         static_cast<Eigen::Index>(methods.size()));
    for (std::size_t d = 0; d < ids.size(); ++d)
        for (std::size_t m = 0; m < methods.size(); ++m)
            heat(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m)) =
                cells[{ids[d], methods[m]}];

    const fs::path dir = ensure_out_dir(g);
    json cfg;
    cfg["results"] = results_path;
    cfg["source_hash"] = doc.value("manifest_hash", "");
    const RunManifest manifest = make_manifest("report", cfg.dump(), g.seed, registry_names());
    write_manifest_json(manifest, dir / "manifest.json");
    write_deviation_csv(ids, methods, heat, dir / "deviation.csv", manifest_hash(manifest));
    std::cout << "wrote deviation table for " << ids.size() << " dataset(s)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"duelbench: synthetic classification benchmarks from classifier duels"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON config file (discover)")
        ->envname("DUELBENCH_CONFIG");
    auto* seed_opt =
        app.add_option("--seed", g.seed, "base random seed")->envname("DUELBENCH_SEED");
    app.add_option("--jobs", g.jobs, "worker threads (results are identical for any value)")
        ->check(CLI::PositiveNumber)
        ->envname("DUELBENCH_JOBS");
    app.add_option("--out-dir", g.out_dir, "output directory")->envname("DUELBENCH_OUT_DIR");

    auto* discover = app.add_subcommand("discover", "evolve benchmark functions via duels");

    SynthOpts s;
    auto* synthesize_cmd =
        app.add_subcommand("synthesize", "generate dataset CSVs from a function or suite");
    synthesize_cmd->add_option("--function", s.function_text, "generative function text");
    synthesize_cmd->add_option("--suite", s.suite_path, "suite manifest JSON");
    synthesize_cmd->add_option("--n", s.n, "samples per dataset (even)");
    synthesize_cmd->add_option("--features", s.features, "feature count")
        ->check(CLI::PositiveNumber);
    synthesize_cmd->add_option("--seeds", s.n_seeds, "replicate seeds per function")
        ->check(CLI::PositiveNumber);

    EvalOpts e;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "tune and score classifiers on datasets");
    evaluate_cmd->add_option("datasets", e.dataset_paths, "dataset CSV files")->required();
    evaluate_cmd->add_option("--methods", e.methods, "classifier subset (default: all)")
        ->delimiter(',');
    evaluate_cmd->add_option("--budget", e.budget, "tuning trials per cell")
        ->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--folds", e.folds, "cross-validation folds");
    evaluate_cmd->add_option("--train-fraction", e.train_fraction, "train split fraction");
    evaluate_cmd->add_flag("--svg", e.svg, "also render ROC/PRC SVGs");

    std::string suite_path;
    auto* similarity_cmd =
        app.add_subcommand("similarity", "pairwise function similarity matrix for a suite");
    similarity_cmd->add_option("--suite", suite_path, "suite manifest JSON")->required();

    std::string results_path;
    auto* report_cmd = app.add_subcommand("report", "deviation-from-mean table from results JSON");
    report_cmd->add_option("--results", results_path, "results.json from evaluate")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex);
        return code == 0 ? 0 : 2;
    }
    g.seed_given = seed_opt->count() > 0;

    try {
        if (discover->parsed()) return cmd_discover(g);
        if (synthesize_cmd->parsed()) return cmd_synthesize(g, s);
        if (evaluate_cmd->parsed()) return cmd_evaluate(g, e);
        if (similarity_cmd->parsed()) return cmd_similarity(g, suite_path);
        if (report_cmd->parsed()) return cmd_report(g, results_path);
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return 2;
    } catch (const ParseError& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
