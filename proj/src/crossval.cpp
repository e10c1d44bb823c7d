#include "duelbench/crossval.hpp"

#include <algorithm>
#include <cmath>

#include "duelbench/errors.hpp"
#include "duelbench/metrics.hpp"
#include "duelbench/rng.hpp"

namespace duelbench {

namespace {

std::pair<std::vector<int>, std::vector<int>> class_indices(
    const Eigen::Ref<const Eigen::VectorXi>& labels) {
    std::vector<int> zeros, ones;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw ConfigError("labels must be 0 or 1");
        (labels[i] == 1 ? ones : zeros).push_back(static_cast<int>(i));
    }
    if (zeros.empty() || ones.empty())
        throw DegenerateDataError("labels contain a single class");
    return {std::move(zeros), std::move(ones)};
}

}  // namespace

SplitIndices stratified_split(const Eigen::Ref<const Eigen::VectorXi>& labels,
                              double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("train_fraction must lie in (0, 1)");
    auto [zeros, ones] = class_indices(labels);
    CounterRng rng(seed);
    SplitIndices out;
    for (auto* cls : {&zeros, &ones}) {
        rng.shuffle(*cls);
        const auto n_train = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(cls->size())));
        if (n_train == 0 || n_train == cls->size())
            throw DegenerateDataError("split would leave a side single-class");
        out.train.insert(out.train.end(), cls->begin(), cls->begin() + static_cast<long>(n_train));
        out.test.insert(out.test.end(), cls->begin() + static_cast<long>(n_train), cls->end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::vector<std::vector<int>> stratified_kfold(const Eigen::Ref<const Eigen::VectorXi>& labels,
                                               int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("cross-validation needs k >= 2");
    auto [zeros, ones] = class_indices(labels);
    if (zeros.size() < static_cast<std::size_t>(k) || ones.size() < static_cast<std::size_t>(k))
        throw DegenerateDataError("a class has fewer samples than folds");
    CounterRng rng(seed);
    std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
    for (auto* cls : {&zeros, &ones}) {
        rng.shuffle(*cls);
        for (std::size_t i = 0; i < cls->size(); ++i)
            folds[i % static_cast<std::size_t>(k)].push_back((*cls)[i]);
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

Eigen::MatrixXd take_rows(const Eigen::Ref<const Eigen::MatrixXd>& X,
                          const std::vector<int>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
    return out;
}

Eigen::VectorXi take_labels(const Eigen::Ref<const Eigen::VectorXi>& y,
                            const std::vector<int>& rows) {
    Eigen::VectorXi out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = y[rows[i]];
    return out;
}

double cross_val_auroc(const ClassifierSpec& spec, const ParamMap& params,
                       const Eigen::Ref<const Eigen::MatrixXd>& X,
                       const Eigen::Ref<const Eigen::VectorXi>& y, int k, std::uint64_t seed) {
    const auto folds = stratified_kfold(y, k, hash_seed(seed, "folds"));
    std::vector<char> in_fold(static_cast<std::size_t>(y.size()));
    double sum = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::fill(in_fold.begin(), in_fold.end(), 0);
        for (int i : folds[f]) in_fold[static_cast<std::size_t>(i)] = 1;
        std::vector<int> train;
        train.reserve(static_cast<std::size_t>(y.size()) - folds[f].size());
        for (Eigen::Index i = 0; i < y.size(); ++i)
            if (!in_fold[static_cast<std::size_t>(i)]) train.push_back(static_cast<int>(i));
        const auto model = fit(spec, params, take_rows(X, train), take_labels(y, train),
                               hash_seed(seed, f));
        const Eigen::VectorXd scores = model->predict_scores(take_rows(X, folds[f]));
        sum += auroc(scores, take_labels(y, folds[f]));
    }
    return sum / static_cast<double>(folds.size());
}

TunedResult tune(const ClassifierSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X_train,
                 const Eigen::Ref<const Eigen::VectorXi>& y_train,
                 const Eigen::Ref<const Eigen::MatrixXd>& X_test,
                 const Eigen::Ref<const Eigen::VectorXi>& y_test, const TuneConfig& config) {
    if (config.budget < 1) throw ConfigError("tuning budget must be >= 1");
    CounterRng param_rng(hash_seed(config.seed, "params"));
    std::vector<ParamMap> trials;
    trials.reserve(static_cast<std::size_t>(config.budget));
    for (int t = 0; t < config.budget; ++t)
        trials.push_back(sample_params(spec.hyper_space, param_rng));

    const std::uint64_t cv_seed = hash_seed(config.seed, "cv");
    TunedResult result;
    result.n_trials = config.budget;
    int best = -1;
    for (int t = 0; t < config.budget; ++t) {
        const double cv =
            cross_val_auroc(spec, trials[static_cast<std::size_t>(t)], X_train, y_train,
                            config.folds, cv_seed);
        result.trial_log.emplace_back(trials[static_cast<std::size_t>(t)], cv);
        if (best < 0 || cv > result.best_cv_auroc) {
            best = t;
            result.best_cv_auroc = cv;
        }
    }
    result.best_params = trials[static_cast<std::size_t>(best)];
    const auto model = fit(spec, result.best_params, X_train, y_train,
                           hash_seed(config.seed, "refit"));
    result.test_scores = model->predict_scores(X_test);
    result.test_labels = y_test;
    result.test_auroc = auroc(result.test_scores, y_test);
    return result;
}

TunedResult evaluate_on_dataset(const ClassifierSpec& spec, const Dataset& dataset,
                                const ProtocolConfig& config) {
    const auto split =
        stratified_split(dataset.target, config.train_fraction, hash_seed(config.seed, "split"));
    TuneConfig tc;
    tc.budget = config.budget;
    tc.folds = config.folds;
    tc.seed = hash_seed(config.seed, "tune");
    return tune(spec, take_rows(dataset.features, split.train),
                take_labels(dataset.target, split.train), take_rows(dataset.features, split.test),
                take_labels(dataset.target, split.test), tc);
}

}  // namespace duelbench
