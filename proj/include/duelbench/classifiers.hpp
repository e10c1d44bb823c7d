#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "duelbench/hyperparam.hpp"

namespace duelbench {

struct ClassifierSpec {
    std::string name;
    std::vector<HyperParam> hyper_space;
    ParamMap default_params;
};

/// A trained scorer. Immutable after fit; safe for concurrent prediction.
/// Higher score means more confident class 1.
class FittedModel {
public:
    virtual ~FittedModel() = default;

    /// Validates the feature width, then dispatches to the learner.
    Eigen::VectorXd predict_scores(const Eigen::Ref<const Eigen::MatrixXd>& X) const;

    const std::string& classifier_name() const { return name_; }
    const ParamMap& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }

protected:
    FittedModel(std::string name, ParamMap params, std::uint64_t seed, Eigen::Index n_features)
        : name_(std::move(name)), params_(std::move(params)), seed_(seed), n_features_(n_features) {}

    virtual Eigen::VectorXd do_predict(const Eigen::Ref<const Eigen::MatrixXd>& X) const = 0;

private:
    std::string name_;
    ParamMap params_;
    std::uint64_t seed_;
    Eigen::Index n_features_;
};

using ModelPtr = std::unique_ptr<FittedModel>;

/// The built-in classifiers: decision_tree, random_forest, gradient_boosting_a
/// (level-wise trees), gradient_boosting_b (best-first leaf-limited trees),
/// knn, logistic_regression, linear_svm.
const std::vector<ClassifierSpec>& registry();

/// Throws ConfigError for unknown names.
const ClassifierSpec& find_classifier(const std::string& name);

/// Trains spec on (X, y) with defaults overridden by params. Structural
/// parameter validity is enforced (types, categories, e.g. rounds >= 0); the
/// sampling ranges are the tuner's concern, so off-range but meaningful values
/// such as a zero-round booster are accepted.
ModelPtr fit(const ClassifierSpec& spec, const ParamMap& params,
             const Eigen::Ref<const Eigen::MatrixXd>& X,
             const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed);

}  // namespace duelbench
