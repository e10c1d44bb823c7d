#include "duelbench/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "duelbench/classifiers.hpp"
#include "duelbench/crossval.hpp"
#include "duelbench/errors.hpp"
#include "duelbench/parallel.hpp"
#include "duelbench/rng.hpp"

namespace duelbench {

void validate_duel(const DuelConfig& duel) {
    if (duel.target == duel.rival) throw ConfigError("duel: target and rival must differ");
    find_classifier(duel.target);
    find_classifier(duel.rival);
    for (const auto& name : duel.bystanders) {
        find_classifier(name);
        if (name == duel.target || name == duel.rival)
            throw ConfigError("duel: bystander '" + name + "' is already a duelist");
    }
    if (duel.mutation_rate < 0.0 || duel.mutation_rate > 1.0 || duel.crossover_rate < 0.0 ||
        duel.crossover_rate > 1.0)
        throw ConfigError("duel: variation rates must lie in [0, 1]");
    if (duel.population_size < 2) throw ConfigError("duel: population_size must be >= 2");
    if (duel.generations < 0) throw ConfigError("duel: generations must be >= 0");
    if (duel.fitness_tuning_budget < 1 || duel.fitness_cv_folds < 2)
        throw ConfigError("duel: fitness tuning budget/folds out of range");
    if (duel.archive_capacity < 2) throw ConfigError("duel: archive_capacity must be >= 2");
}

ParetoArchive::ParetoArchive(int capacity) : capacity_(capacity) {
    if (capacity < 2) throw ConfigError("archive capacity must be >= 2");
}

void ParetoArchive::insert(ArchiveEntry entry) {
    for (const auto& e : entries_) {
        if (e.text == entry.text) return;
        if (dominates(e.fitness.objectives(), entry.fitness.objectives())) return;
    }
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [&](const ArchiveEntry& e) {
                                      return dominates(entry.fitness.objectives(),
                                                       e.fitness.objectives());
                                  }),
                   entries_.end());
    entries_.push_back(std::move(entry));
    while (static_cast<int>(entries_.size()) > capacity_) {
        std::vector<ObjectivePoint> points;
        points.reserve(entries_.size());
        for (const auto& e : entries_) points.push_back(e.fitness.objectives());
        std::vector<int> all(static_cast<int>(entries_.size()));
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        const auto crowd = crowding_distances(points, all);
        // Drop the most crowded-in entry; prefer evicting newer on ties so the
        // archive stays stable. Objective extremes carry infinite distance and
        // are therefore never dropped.
        std::size_t victim = 0;
        for (std::size_t i = 1; i < crowd.size(); ++i)
            if (crowd[i] < crowd[victim] || (crowd[i] == crowd[victim] && i > victim)) victim = i;
        entries_.erase(entries_.begin() + static_cast<long>(victim));
    }
}

double ParetoArchive::best_gap() const {
    double best = -1.0;
    for (const auto& e : entries_) best = std::max(best, e.fitness.gap);
    return best;
}

double ParetoArchive::best_spread() const {
    double best = 0.0;
    for (const auto& e : entries_) best = std::max(best, e.fitness.spread);
    return best;
}

Eigen::MatrixXd duel_features(const DuelConfig& duel) {
    DatasetConfig cfg = duel.dataset_config;
    cfg.seed = hash_seed(duel.seed, "features");
    return sample_features(cfg);
}

namespace {

std::vector<std::string> duel_methods(const DuelConfig& duel) {
    std::vector<std::string> methods{duel.target, duel.rival};
    methods.insert(methods.end(), duel.bystanders.begin(), duel.bystanders.end());
    return methods;
}

FitnessRecord sentinel_fitness(const DuelConfig& duel) {
    FitnessRecord rec;
    rec.degenerate = true;
    for (const auto& name : duel_methods(duel)) rec.per_method_auroc[name] = 0.5;
    return rec;
}

}  // namespace

FitnessRecord evaluate_fitness(const Expr& f, const DuelConfig& duel,
                               const Eigen::Ref<const Eigen::MatrixXd>& shared_features) {
    const Eigen::VectorXd raw = evaluate_rows(f, shared_features);
    if (raw.minCoeff() == raw.maxCoeff()) return sentinel_fitness(duel);
    const Eigen::VectorXi labels = rank_median_labels(raw);

    // Seeds depend only on the duel and the function text, never on schedule.
    const std::uint64_t base = hash_seed(hash_seed(duel.seed, "fitness"), fnv1a64(to_string(f)));
    const auto split = stratified_split(labels, 0.8, hash_seed(base, "split"));
    const Eigen::MatrixXd X_train = take_rows(shared_features, split.train);
    const Eigen::VectorXi y_train = take_labels(labels, split.train);
    const Eigen::MatrixXd X_test = take_rows(shared_features, split.test);
    const Eigen::VectorXi y_test = take_labels(labels, split.test);

    FitnessRecord rec;
    rec.degenerate = false;
    for (const auto& name : duel_methods(duel)) {
        TuneConfig tc;
        tc.budget = duel.fitness_tuning_budget;
        tc.folds = duel.fitness_cv_folds;
        tc.seed = hash_seed(base, name);
        rec.per_method_auroc[name] =
            tune(find_classifier(name), X_train, y_train, X_test, y_test, tc).test_auroc;
    }
    rec.gap = rec.per_method_auroc.at(duel.target) - rec.per_method_auroc.at(duel.rival);
    const std::vector<std::string> spread_names =
        duel.spread_over_all ? duel_methods(duel) : duel.bystanders;
    double mean = 0.0;
    for (const auto& name : spread_names) mean += rec.per_method_auroc.at(name);
    if (!spread_names.empty()) {
        mean /= static_cast<double>(spread_names.size());
        double var = 0.0;
        for (const auto& name : spread_names) {
            const double d = rec.per_method_auroc.at(name) - mean;
            var += d * d;
        }
        rec.spread = std::sqrt(var / static_cast<double>(spread_names.size()));
    }
    return rec;
}

namespace {

struct Evaluator {
    const DuelConfig& duel;
    const Eigen::MatrixXd& features;
    int jobs;
    std::unordered_map<std::string, FitnessRecord> cache;

    /// Fills fitness for every individual, computing unseen texts in parallel.
    std::vector<FitnessRecord> evaluate(const std::vector<Expr>& population) {
        std::vector<std::string> texts;
        texts.reserve(population.size());
        for (const auto& f : population) texts.push_back(to_string(f));

        std::vector<std::size_t> missing;
        for (std::size_t i = 0; i < texts.size(); ++i) {
            if (cache.count(texts[i])) continue;
            bool queued = false;
            for (std::size_t j : missing)
                if (texts[j] == texts[i]) {
                    queued = true;
                    break;
                }
            if (!queued) missing.push_back(i);
        }
        std::vector<FitnessRecord> fresh(missing.size());
        parallel_for(missing.size(), jobs, [&](std::size_t m) {
            fresh[m] = evaluate_fitness(population[missing[m]], duel, features);
        });
        for (std::size_t m = 0; m < missing.size(); ++m)
            cache.emplace(texts[missing[m]], std::move(fresh[m]));

        std::vector<FitnessRecord> out;
        out.reserve(population.size());
        for (const auto& text : texts) out.push_back(cache.at(text));
        return out;
    }
};

int tournament_pick(const std::vector<RankedPoint>& ranked, CounterRng& rng) {
    const auto n = static_cast<std::int64_t>(ranked.size());
    const int a = static_cast<int>(rng.uniform_int(0, n - 1));
    const int b = static_cast<int>(rng.uniform_int(0, n - 1));
    const auto& ra = ranked[static_cast<std::size_t>(a)];
    const auto& rb = ranked[static_cast<std::size_t>(b)];
    if (ra.rank != rb.rank) return ra.rank < rb.rank ? a : b;
    if (ra.crowding != rb.crowding) return ra.crowding > rb.crowding ? a : b;
    return std::min(a, b);
}

}  // namespace

DuelResult run_duel(const DuelConfig& duel, int jobs) {
    validate_duel(duel);
    const Eigen::MatrixXd features = duel_features(duel);
    CounterRng rng(hash_seed(duel.seed, "evolution"));
    Evaluator evaluator{duel, features, jobs, {}};

    DuelResult result;
    result.config = duel;
    result.archive = ParetoArchive(duel.archive_capacity);

    const auto n = static_cast<std::size_t>(duel.population_size);
    std::vector<Expr> population;
    population.reserve(n);
    for (std::size_t i = 0; i < n; ++i) population.push_back(random_tree(duel.grow, rng));
    std::vector<FitnessRecord> fitness = evaluator.evaluate(population);

    const auto archive_all = [&](const std::vector<Expr>& group,
                                 const std::vector<FitnessRecord>& recs) {
        for (std::size_t i = 0; i < group.size(); ++i)
            result.archive.insert({to_string(group[i]), group[i], recs[i]});
    };
    const auto record_generation = [&](int gen) {
        result.history.push_back({gen, result.archive.best_gap(), result.archive.best_spread(),
                                  result.archive.size()});
    };
    archive_all(population, fitness);
    record_generation(0);

    for (int gen = 1; gen <= duel.generations; ++gen) {
        std::vector<ObjectivePoint> points;
        points.reserve(population.size());
        for (const auto& rec : fitness) points.push_back(rec.objectives());
        const auto ranked = rank_population(points);

        std::vector<Expr> offspring;
        offspring.reserve(n);
        while (offspring.size() < n) {
            const auto& a = population[static_cast<std::size_t>(tournament_pick(ranked, rng))];
            const auto& b = population[static_cast<std::size_t>(tournament_pick(ranked, rng))];
            Expr c1 = a, c2 = b;
            if (rng.bernoulli(duel.crossover_rate)) {
                auto pair = crossover(a, b, duel.grow, rng);
                c1 = std::move(pair.first);
                c2 = std::move(pair.second);
            }
            if (rng.bernoulli(duel.mutation_rate)) c1 = mutate(c1, duel.grow, rng);
            offspring.push_back(std::move(c1));
            if (offspring.size() < n) {
                if (rng.bernoulli(duel.mutation_rate)) c2 = mutate(c2, duel.grow, rng);
                offspring.push_back(std::move(c2));
            }
        }
        std::vector<FitnessRecord> offspring_fitness = evaluator.evaluate(offspring);
        archive_all(offspring, offspring_fitness);

        // mu+lambda environmental selection over parents and offspring.
        std::vector<Expr> combined = population;
        combined.insert(combined.end(), offspring.begin(), offspring.end());
        std::vector<FitnessRecord> combined_fitness = fitness;
        combined_fitness.insert(combined_fitness.end(), offspring_fitness.begin(),
                                offspring_fitness.end());
        std::vector<ObjectivePoint> combined_points;
        combined_points.reserve(combined.size());
        for (const auto& rec : combined_fitness) combined_points.push_back(rec.objectives());
        const auto fronts = non_dominated_sort(combined_points);

        std::vector<Expr> next;
        std::vector<FitnessRecord> next_fitness;
        next.reserve(n);
        next_fitness.reserve(n);
        for (const auto& front : fronts) {
            for (int idx : front) {
                if (next.size() == n) break;
                next.push_back(combined[static_cast<std::size_t>(idx)]);
                next_fitness.push_back(combined_fitness[static_cast<std::size_t>(idx)]);
            }
            if (next.size() == n) break;
        }
        population = std::move(next);
        fitness = std::move(next_fitness);
        record_generation(gen);
    }
    return result;
}

std::vector<DuelResult> run_all_duels(const std::vector<std::string>& names,
                                      const DuelConfig& base, int jobs) {
    if (names.size() < 2) throw ConfigError("duel sweep needs at least two classifiers");
    std::vector<DuelResult> results;
    for (const auto& target : names) {
        for (const auto& rival : names) {
            if (target == rival) continue;
            DuelConfig duel = base;
            duel.target = target;
            duel.rival = rival;
            duel.bystanders.clear();
            for (const auto& name : names)
                if (name != target && name != rival) duel.bystanders.push_back(name);
            duel.seed = hash_seed(hash_seed(base.seed, target), rival);
            results.push_back(run_duel(duel, jobs));
        }
    }
    return results;
}

}  // namespace duelbench
