#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "duelbench/dataset.hpp"
#include "duelbench/expr.hpp"
#include "duelbench/pareto.hpp"

namespace duelbench {

/// One evolutionary run pitting `target` (should excel) against `rival`
/// (should underperform); `bystanders` supply the spread objective unless
/// `spread_over_all` widens it to every participant including the duelists.
struct DuelConfig {
    std::string target;
    std::string rival;
    std::vector<std::string> bystanders;
    bool spread_over_all = false;
    int population_size = 20;
    int generations = 15;
    double mutation_rate = 0.7;
    double crossover_rate = 0.7;
    int fitness_tuning_budget = 8;
    int fitness_cv_folds = 3;
    int archive_capacity = 64;
    GrowConfig grow;
    DatasetConfig dataset_config;
    std::uint64_t seed = 0;
};

/// Throws ConfigError on role clashes, unknown classifier names, or rates
/// outside [0, 1].
void validate_duel(const DuelConfig& duel);

struct FitnessRecord {
    double gap = -1.0;    // test AUROC(target) - test AUROC(rival)
    double spread = 0.0;  // population std-dev of bystander test AUROCs
    std::map<std::string, double> per_method_auroc;
    bool degenerate = false;

    ObjectivePoint objectives() const { return {gap, spread}; }
};

struct ArchiveEntry {
    std::string text;  // canonical function form
    Expr function;
    FitnessRecord fitness;
};

/// All-time elitist store of mutually non-dominated entries, truncated to
/// capacity by crowding distance (objective extremes are never dropped, so the
/// best gap seen is monotone).
class ParetoArchive {
public:
    explicit ParetoArchive(int capacity = 64);

    void insert(ArchiveEntry entry);
    const std::vector<ArchiveEntry>& entries() const { return entries_; }
    int size() const { return static_cast<int>(entries_.size()); }
    double best_gap() const;
    double best_spread() const;

private:
    int capacity_;
    std::vector<ArchiveEntry> entries_;
};

struct GenerationStats {
    int generation = 0;  // 0 is the evaluated initial population
    double best_gap = 0.0;
    double best_spread = 0.0;
    int archive_size = 0;
};

struct DuelResult {
    DuelConfig config;
    ParetoArchive archive;
    std::vector<GenerationStats> history;
};

/// Scores one function against the duel: label the shared feature matrix by
/// rank-median of f's raw outcome, split 80/20, tune every participating
/// classifier at the inner budget, and derive (gap, spread). A constant raw
/// outcome short-circuits to the sentinel (-1, 0) with all AUROCs 0.5. Pure
/// in (f, duel): all inner seeds derive from the duel seed and the function
/// text, so results are independent of evaluation schedule.
FitnessRecord evaluate_fitness(const Expr& f, const DuelConfig& duel,
                               const Eigen::Ref<const Eigen::MatrixXd>& shared_features);

/// Feature matrix shared by every evaluation in a duel run.
Eigen::MatrixXd duel_features(const DuelConfig& duel);

/// NSGA-II-style generational loop with binary tournament on (rank, crowding),
/// subtree crossover and mutation at the configured rates, mu+lambda
/// environmental selection, and an all-time archive. `jobs` parallelizes
/// fitness evaluation without changing any result.
DuelResult run_duel(const DuelConfig& duel, int jobs = 1);

/// Every ordered (target, rival) pair from `names`, each with an independent
/// seed derived from the base seed and both role names. Order is stable.
std::vector<DuelResult> run_all_duels(const std::vector<std::string>& names,
                                      const DuelConfig& base, int jobs = 1);

}  // namespace duelbench
