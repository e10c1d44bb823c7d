#include "duelbench/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "duelbench/errors.hpp"
#include "duelbench/tree.hpp"

namespace duelbench {

namespace {

void check_training_data(const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXi>& y) {
    if (X.rows() == 0) throw DegenerateDataError("training data is empty");
    if (X.rows() != y.size()) throw ShapeError("feature/label row counts differ");
    Eigen::Index ones = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] != 0 && y[i] != 1) throw ConfigError("labels must be 0 or 1");
        ones += y[i];
    }
    if (ones == 0 || ones == y.size())
        throw DegenerateDataError("training data contains a single class");
}

std::vector<int> all_slots(Eigen::Index n) {
    std::vector<int> slots(static_cast<std::size_t>(n));
    std::iota(slots.begin(), slots.end(), 0);
    return slots;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

int count_param(const ParamMap& params, const std::string& key) {
    const double v = get_real(params, key);
    if (!std::isfinite(v) || v < 0.0)
        throw ConfigError("hyperparameter '" + key + "': must be a finite count >= 0");
    return static_cast<int>(std::llround(v));
}

int depth_param(const ParamMap& params) {
    const auto v = get_int(params, "max_depth");
    if (v < 0) throw ConfigError("hyperparameter 'max_depth': must be >= 0");
    return static_cast<int>(v);
}

double positive_real(const ParamMap& params, const std::string& key) {
    const double v = get_real(params, key);
    if (!std::isfinite(v) || v <= 0.0)
        throw ConfigError("hyperparameter '" + key + "': must be finite and > 0");
    return v;
}

// --- decision tree -----------------------------------------------------------

class DecisionTreeModel final : public FittedModel {
public:
    DecisionTreeModel(ParamMap params, std::uint64_t seed, Eigen::Index d, Tree tree)
        : FittedModel("decision_tree", std::move(params), seed, d), tree_(std::move(tree)) {}

private:
    Eigen::VectorXd do_predict(const Eigen::Ref<const Eigen::MatrixXd>& X) const override {
        return tree_.predict_rows(X);
    }
    Tree tree_;
};

ModelPtr fit_decision_tree(const ParamMap& params, const Eigen::Ref<const Eigen::MatrixXd>& X,
                           const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed) {
    TreeBuildConfig config;
    config.max_depth = depth_param(params);
    Tree tree = build_gini_tree(X, y, all_slots(X.rows()), config);
    return std::make_unique<DecisionTreeModel>(params, seed, X.cols(), std::move(tree));
}

// --- random forest -----------------------------------------------------------

class ForestModel final : public FittedModel {
public:
    ForestModel(ParamMap params, std::uint64_t seed, Eigen::Index d, std::vector<Tree> trees,
                double prior)
        : FittedModel("random_forest", std::move(params), seed, d),
          trees_(std::move(trees)),
          prior_(prior) {}

private:
    Eigen::VectorXd do_predict(const Eigen::Ref<const Eigen::MatrixXd>& X) const override {
        if (trees_.empty()) return Eigen::VectorXd::Constant(X.rows(), prior_);
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(X.rows());
        for (const Tree& t : trees_) sum += t.predict_rows(X);
        return sum / static_cast<double>(trees_.size());
    }
    std::vector<Tree> trees_;
    double prior_;
};

ModelPtr fit_random_forest(const ParamMap& params, const Eigen::Ref<const Eigen::MatrixXd>& X,
                           const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed) {
    const int n_trees = count_param(params, "n_estimators");
    TreeBuildConfig config;
    config.max_depth = depth_param(params);
    config.feature_subsample = std::max(
        1, static_cast<int>(std::llround(std::sqrt(static_cast<double>(X.cols())))));
    CounterRng rng(seed);
    const auto n = X.rows();
    std::vector<Tree> trees;
    trees.reserve(static_cast<std::size_t>(n_trees));
    std::vector<int> slots(static_cast<std::size_t>(n));
    for (int t = 0; t < n_trees; ++t) {
        for (auto& s : slots) s = static_cast<int>(rng.uniform_int(0, n - 1));
        trees.push_back(build_gini_tree(X, y, slots, config, &rng));
    }
    const double prior = y.cast<double>().mean();
    return std::make_unique<ForestModel>(params, seed, X.cols(), std::move(trees), prior);
}

// --- gradient boosting (shared by the level-wise and best-first variants) ----

class BoostModel final : public FittedModel {
public:
    BoostModel(std::string name, ParamMap params, std::uint64_t seed, Eigen::Index d,
               double base_score, double learning_rate, std::vector<Tree> trees)
        : FittedModel(std::move(name), std::move(params), seed, d),
          base_score_(base_score),
          learning_rate_(learning_rate),
          trees_(std::move(trees)) {}

private:
    Eigen::VectorXd do_predict(const Eigen::Ref<const Eigen::MatrixXd>& X) const override {
        // Raw additive log-odds; monotone in the class-1 probability.
        Eigen::VectorXd f = Eigen::VectorXd::Constant(X.rows(), base_score_);
        for (const Tree& t : trees_) f += learning_rate_ * t.predict_rows(X);
        return f;
    }
    double base_score_;
    double learning_rate_;
    std::vector<Tree> trees_;
};

ModelPtr fit_gradient_boosting(const std::string& name, const ParamMap& params,
                               const Eigen::Ref<const Eigen::MatrixXd>& X,
                               const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed,
                               bool best_first) {
    const int n_rounds = count_param(params, "n_estimators");
    const double lr = positive_real(params, "learning_rate");
    TreeBuildConfig config;
    if (best_first) {
        const auto leaves = get_int(params, "max_leaves");
        if (leaves < 1) throw ConfigError("hyperparameter 'max_leaves': must be >= 1");
        config.max_leaves = static_cast<int>(leaves);
    } else {
        config.max_depth = depth_param(params);
    }

    const auto n = X.rows();
    const Eigen::VectorXd yd = y.cast<double>();
    const double prior = yd.mean();
    const double base_score = std::log(prior / (1.0 - prior));
    Eigen::VectorXd f = Eigen::VectorXd::Constant(n, base_score);
    const auto slots = all_slots(n);
    std::vector<Tree> trees;
    trees.reserve(static_cast<std::size_t>(n_rounds));
    Eigen::VectorXd p(n), grad(n), hess(n);
    for (int round = 0; round < n_rounds; ++round) {
        for (Eigen::Index i = 0; i < n; ++i) p[i] = sigmoid(f[i]);
        grad = yd - p;
        hess = p.array() * (1.0 - p.array());
        Tree tree = build_newton_tree(X, grad, hess, slots, config);
        f += lr * tree.predict_rows(X);
        trees.push_back(std::move(tree));
    }
    return std::make_unique<BoostModel>(name, params, seed, X.cols(), base_score, lr,
                                        std::move(trees));
}

// --- k nearest neighbors -----------------------------------------------------

class KnnModel final : public FittedModel {
public:
    KnnModel(ParamMap params, std::uint64_t seed, Eigen::MatrixXd X, Eigen::VectorXi y, int k,
             bool distance_weighted)
        : FittedModel("knn", std::move(params), seed, X.cols()),
          X_(std::move(X)),
          y_(std::move(y)),
          k_(k),
          distance_weighted_(distance_weighted) {}

private:
    Eigen::VectorXd do_predict(const Eigen::Ref<const Eigen::MatrixXd>& Q) const override {
        const auto n = X_.rows();
        const int k = std::min<int>(k_, static_cast<int>(n));
        Eigen::VectorXd out(Q.rows());
        std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
        for (Eigen::Index q = 0; q < Q.rows(); ++q) {
            for (Eigen::Index j = 0; j < n; ++j)
                dist[static_cast<std::size_t>(j)] = {(X_.row(j) - Q.row(q)).norm(),
                                                     static_cast<int>(j)};
            std::sort(dist.begin(), dist.end());
            if (distance_weighted_ && dist[0].first == 0.0) {
                // Exact matches dominate any finite weight.
                double sum = 0.0;
                int count = 0;
                for (const auto& [d, j] : dist) {
                    if (d != 0.0) break;
                    sum += y_[j];
                    ++count;
                }
                out[q] = sum / count;
            } else if (distance_weighted_) {
                double num = 0.0, den = 0.0;
                for (int i = 0; i < k; ++i) {
                    const double w = 1.0 / dist[static_cast<std::size_t>(i)].first;
                    num += w * y_[dist[static_cast<std::size_t>(i)].second];
                    den += w;
                }
                out[q] = num / den;
            } else {
                double sum = 0.0;
                for (int i = 0; i < k; ++i) sum += y_[dist[static_cast<std::size_t>(i)].second];
                out[q] = sum / k;
            }
        }
        return out;
    }

    Eigen::MatrixXd X_;
    Eigen::VectorXi y_;
    int k_;
    bool distance_weighted_;
};

ModelPtr fit_knn(const ParamMap& params, const Eigen::Ref<const Eigen::MatrixXd>& X,
                 const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed) {
    const auto k = get_int(params, "k");
    if (k < 1) throw ConfigError("hyperparameter 'k': must be >= 1");
    const bool weighted = get_str(params, "weights") == "distance";
    return std::make_unique<KnnModel>(params, seed, X, y, static_cast<int>(k), weighted);
}

// --- linear models -----------------------------------------------------------

class LinearModel final : public FittedModel {
public:
    LinearModel(std::string name, ParamMap params, std::uint64_t seed, Eigen::VectorXd w, double b,
                bool sigmoid_output)
        : FittedModel(std::move(name), std::move(params), seed, w.size()),
          w_(std::move(w)),
          b_(b),
          sigmoid_output_(sigmoid_output) {}

private:
    Eigen::VectorXd do_predict(const Eigen::Ref<const Eigen::MatrixXd>& X) const override {
        Eigen::VectorXd z = (X * w_).array() + b_;
        if (sigmoid_output_)
            for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i]);
        return z;
    }
    Eigen::VectorXd w_;
    double b_;
    bool sigmoid_output_;
};

constexpr int kLinearIterations = 500;

ModelPtr fit_logistic_regression(const ParamMap& params,
                                 const Eigen::Ref<const Eigen::MatrixXd>& X,
                                 const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed) {
    const double lambda = get_real(params, "l2");
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw ConfigError("hyperparameter 'l2': must be finite and >= 0");
    const auto n = X.rows();
    const double nd = static_cast<double>(n);
    const Eigen::VectorXd yd = y.cast<double>();
    // Gradient Lipschitz bound for mean logistic loss over [X | 1], plus ridge.
    const double lipschitz = (X.squaredNorm() + nd) / (4.0 * nd) + lambda;
    const double step = 0.1 / lipschitz;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(X.cols());
    double b = 0.0;
    Eigen::VectorXd z(n), r(n);
    for (int it = 0; it < kLinearIterations; ++it) {
        z = (X * w).array() + b;
        for (Eigen::Index i = 0; i < n; ++i) r[i] = sigmoid(z[i]) - yd[i];
        r /= nd;
        const Eigen::VectorXd grad_w = X.transpose() * r + lambda * w;
        const double grad_b = r.sum();
        w -= step * grad_w;
        b -= step * grad_b;
    }
    return std::make_unique<LinearModel>("logistic_regression", params, seed, std::move(w), b,
                                         true);
}

ModelPtr fit_linear_svm(const ParamMap& params, const Eigen::Ref<const Eigen::MatrixXd>& X,
                        const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed) {
    const double lambda = positive_real(params, "reg_lambda");
    const auto n = X.rows();
    const double nd = static_cast<double>(n);
    Eigen::VectorXd s(n);  // labels as +-1
    for (Eigen::Index i = 0; i < n; ++i) s[i] = y[i] == 1 ? 1.0 : -1.0;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(X.cols());
    double b = 0.0;
    const double radius = 1.0 / std::sqrt(lambda);
    Eigen::VectorXd margin(n), active(n);
    for (int t = 0; t < kLinearIterations; ++t) {
        margin = s.array() * ((X * w).array() + b);
        for (Eigen::Index i = 0; i < n; ++i) active[i] = margin[i] < 1.0 ? s[i] : 0.0;
        const Eigen::VectorXd grad_w = lambda * w - (X.transpose() * active) / nd;
        const double grad_b = -active.sum() / nd;
        const double eta = 1.0 / (lambda * static_cast<double>(t + 1));
        w -= eta * grad_w;
        b -= eta * grad_b;
        const double norm = w.norm();
        if (norm > radius) w *= radius / norm;
    }
    return std::make_unique<LinearModel>("linear_svm", params, seed, std::move(w), b, false);
}

}  // namespace

Eigen::VectorXd FittedModel::predict_scores(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    if (X.cols() != n_features_)
        throw ShapeError("query width " + std::to_string(X.cols()) + " does not match training width " +
                         std::to_string(n_features_));
    return do_predict(X);
}

const std::vector<ClassifierSpec>& registry() {
    static const std::vector<ClassifierSpec> specs = [] {
        std::vector<ClassifierSpec> r;
        r.push_back({"decision_tree",
                     {HyperParam::integer_range("max_depth", 1, 10)},
                     {{"max_depth", std::int64_t{5}}}});
        r.push_back({"random_forest",
                     {HyperParam::log_real_range("n_estimators", 10.0, 500.0),
                      HyperParam::integer_range("max_depth", 1, 10)},
                     {{"n_estimators", 100.0}, {"max_depth", std::int64_t{10}}}});
        r.push_back({"gradient_boosting_a",
                     {HyperParam::log_real_range("n_estimators", 10.0, 500.0),
                      HyperParam::log_real_range("learning_rate", 0.01, 0.3),
                      HyperParam::integer_range("max_depth", 1, 10)},
                     {{"n_estimators", 100.0}, {"learning_rate", 0.1}, {"max_depth", std::int64_t{3}}}});
        r.push_back({"gradient_boosting_b",
                     {HyperParam::log_real_range("n_estimators", 10.0, 500.0),
                      HyperParam::log_real_range("learning_rate", 0.01, 0.3),
                      HyperParam::integer_range("max_leaves", 2, 31)},
                     {{"n_estimators", 100.0}, {"learning_rate", 0.1}, {"max_leaves", std::int64_t{31}}}});
        r.push_back({"knn",
                     {HyperParam::integer_range("k", 1, 50),
                      HyperParam::categorical("weights", {"uniform", "distance"})},
                     {{"k", std::int64_t{5}}, {"weights", std::string("uniform")}}});
        r.push_back({"logistic_regression",
                     {HyperParam::log_real_range("l2", 1e-4, 1e2)},
                     {{"l2", 1e-2}}});
        r.push_back({"linear_svm",
                     {HyperParam::log_real_range("reg_lambda", 1e-4, 1e2)},
                     {{"reg_lambda", 1e-2}}});
        return r;
    }();
    return specs;
}

const ClassifierSpec& find_classifier(const std::string& name) {
    for (const auto& spec : registry())
        if (spec.name == name) return spec;
    throw ConfigError("unknown classifier '" + name + "'");
}

ModelPtr fit(const ClassifierSpec& spec, const ParamMap& params,
             const Eigen::Ref<const Eigen::MatrixXd>& X,
             const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed) {
    check_training_data(X, y);
    validate_param_types(spec.hyper_space, params);
    ParamMap merged = spec.default_params;
    for (const auto& [key, value] : params) merged[key] = value;

    if (spec.name == "decision_tree") return fit_decision_tree(merged, X, y, seed);
    if (spec.name == "random_forest") return fit_random_forest(merged, X, y, seed);
    if (spec.name == "gradient_boosting_a")
        return fit_gradient_boosting(spec.name, merged, X, y, seed, false);
    if (spec.name == "gradient_boosting_b")
        return fit_gradient_boosting(spec.name, merged, X, y, seed, true);
    if (spec.name == "knn") return fit_knn(merged, X, y, seed);
    if (spec.name == "logistic_regression") return fit_logistic_regression(merged, X, y, seed);
    if (spec.name == "linear_svm") return fit_linear_svm(merged, X, y, seed);
    throw ConfigError("unknown classifier '" + spec.name + "'");
}

}  // namespace duelbench
