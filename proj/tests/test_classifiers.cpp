#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "duelbench/classifiers.hpp"
#include "duelbench/crossval.hpp"
#include "duelbench/dataset.hpp"
#include "duelbench/errors.hpp"
#include "duelbench/expr.hpp"
#include "duelbench/metrics.hpp"
#include "duelbench/rng.hpp"

using namespace duelbench;

namespace {

struct Problem {
    Eigen::MatrixXd X;
    Eigen::VectorXi y;
};

Problem random_problem(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    CounterRng rng(seed);
    Problem p;
    p.X.resize(n, d);
    p.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) p.X(i, j) = rng.normal();
    for (Eigen::Index i = 0; i < n; ++i) p.y[i] = p.X(i, 0) > 0.0 ? 1 : 0;
    return p;
}

}  // namespace

TEST_CASE("registry holds seven uniquely named classifiers with valid defaults") {
    const auto& specs = registry();
    CHECK(specs.size() == 7);
    std::set<std::string> names;
    for (const auto& spec : specs) {
        names.insert(spec.name);
        CHECK_NOTHROW(validate_params_in_space(spec.hyper_space, spec.default_params));
        CHECK(spec.default_params.size() == spec.hyper_space.size());
    }
    CHECK(names.size() == 7);
    CHECK(names.count("decision_tree") == 1);
    CHECK(names.count("random_forest") == 1);
    CHECK(names.count("gradient_boosting_a") == 1);
    CHECK(names.count("gradient_boosting_b") == 1);
    CHECK(names.count("knn") == 1);
    CHECK(names.count("logistic_regression") == 1);
    CHECK(names.count("linear_svm") == 1);
    CHECK_THROWS_AS(find_classifier("kernel_svm"), ConfigError);
}

TEST_CASE("decision tree stump finds the class boundary on separated 1-D data") {
    Eigen::MatrixXd X(6, 1);
    X << -3.0, -2.0, -1.0, 1.0, 2.0, 3.0;
    Eigen::VectorXi y(6);
    y << 0, 0, 0, 1, 1, 1;
    const auto model =
        fit(find_classifier("decision_tree"), {{"max_depth", std::int64_t{1}}}, X, y, 0);
    Eigen::MatrixXd probe(2, 1);
    probe << -0.5, 0.5;
    const Eigen::VectorXd s = model->predict_scores(probe);
    CHECK(s[0] == 0.0);
    CHECK(s[1] == 1.0);
}

TEST_CASE("knn with k=1 reproduces training labels exactly") {
    const Problem p = random_problem(60, 4, 21);
    const auto model = fit(find_classifier("knn"), {{"k", std::int64_t{1}}}, p.X, p.y, 0);
    const Eigen::VectorXd s = model->predict_scores(p.X);
    for (Eigen::Index i = 0; i < p.y.size(); ++i)
        CHECK(s[i] == static_cast<double>(p.y[i]));
}

TEST_CASE("distance-weighted knn collapses to the exact match on training queries") {
    const Problem p = random_problem(60, 4, 22);
    const auto model = fit(find_classifier("knn"),
                           {{"k", std::int64_t{3}}, {"weights", std::string("distance")}}, p.X,
                           p.y, 0);
    const Eigen::VectorXd s = model->predict_scores(p.X);
    for (Eigen::Index i = 0; i < p.y.size(); ++i)
        CHECK(s[i] == static_cast<double>(p.y[i]));
}

TEST_CASE("logistic regression emits probabilities and separates x0 = label") {
    const DatasetConfig cfg{1000, 10, 5};
    const Dataset ds = synthesize(Expr::feature(0), cfg);
    const auto split = stratified_split(ds.target, 0.8, 101);
    const auto model = fit(find_classifier("logistic_regression"), {},
                           take_rows(ds.features, split.train),
                           take_labels(ds.target, split.train), 0);
    const Eigen::VectorXd s = model->predict_scores(take_rows(ds.features, split.test));
    CHECK(s.minCoeff() >= 0.0);
    CHECK(s.maxCoeff() <= 1.0);
    CHECK(auroc(s, take_labels(ds.target, split.test)) > 0.95);
}

TEST_CASE("zero-round boosting scores the class prior log-odds everywhere") {
    Eigen::MatrixXd X(4, 2);
    X << 0, 0, 1, 1, 2, 2, 3, 3;
    Eigen::VectorXi y(4);
    y << 0, 1, 1, 1;
    for (const char* name : {"gradient_boosting_a", "gradient_boosting_b"}) {
        const auto model = fit(find_classifier(name), {{"n_estimators", 0.0}}, X, y, 0);
        const Eigen::VectorXd s = model->predict_scores(X);
        const double prior = std::log(0.75 / 0.25);
        for (Eigen::Index i = 0; i < 4; ++i)
            CHECK(s[i] == doctest::Approx(prior).epsilon(1e-15));
    }
}

TEST_CASE("identical (params, data, seed) give identical scores for every learner") {
    const Problem p = random_problem(80, 5, 31);
    const Problem q = random_problem(20, 5, 32);
    for (const auto& spec : registry()) {
        const auto a = fit(spec, {}, p.X, p.y, 4242);
        const auto b = fit(spec, {}, p.X, p.y, 4242);
        const Eigen::VectorXd sa = a->predict_scores(q.X);
        const Eigen::VectorXd sb = b->predict_scores(q.X);
        for (Eigen::Index i = 0; i < sa.size(); ++i) {
            INFO(spec.name);
            CHECK(sa[i] == sb[i]);
        }
    }
}

TEST_CASE("training scores stay finite for every registry learner") {
    const Problem p = random_problem(50, 3, 77);
    for (const auto& spec : registry()) {
        const auto model = fit(spec, {}, p.X, p.y, 9);
        const Eigen::VectorXd s = model->predict_scores(p.X);
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            INFO(spec.name);
            CHECK(std::isfinite(s[i]));
        }
    }
}

TEST_CASE("deterministic tree learners ignore sample order on distinct-valued data") {
    const Problem p = random_problem(120, 4, 55);
    std::vector<int> perm(120);
    std::iota(perm.begin(), perm.end(), 0);
    CounterRng shuffle_rng(8);
    shuffle_rng.shuffle(perm);
    Eigen::MatrixXd Xp(120, 4);
    Eigen::VectorXi yp(120);
    for (int i = 0; i < 120; ++i) {
        Xp.row(i) = p.X.row(perm[static_cast<std::size_t>(i)]);
        yp[i] = p.y[perm[static_cast<std::size_t>(i)]];
    }
    const Problem probe = random_problem(30, 4, 56);

    const auto dt_a = fit(find_classifier("decision_tree"), {}, p.X, p.y, 0);
    const auto dt_b = fit(find_classifier("decision_tree"), {}, Xp, yp, 0);
    const Eigen::VectorXd sa = dt_a->predict_scores(probe.X);
    const Eigen::VectorXd sb = dt_b->predict_scores(probe.X);
    for (Eigen::Index i = 0; i < sa.size(); ++i) CHECK(sa[i] == sb[i]);

    // Boosted trees re-sum gradients per node, so order shifts only ulps.
    for (const char* name : {"gradient_boosting_a", "gradient_boosting_b"}) {
        const auto gb_a = fit(find_classifier(name), {}, p.X, p.y, 0);
        const auto gb_b = fit(find_classifier(name), {}, Xp, yp, 0);
        const Eigen::VectorXd ga = gb_a->predict_scores(probe.X);
        const Eigen::VectorXd gb = gb_b->predict_scores(probe.X);
        for (Eigen::Index i = 0; i < ga.size(); ++i) {
            INFO(name);
            CHECK(ga[i] == doctest::Approx(gb[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("every learner clears the separable floor and stays near chance on noise") {
    const DatasetConfig cfg{1000, 10, 40};
    const Dataset separable = synthesize(Expr::feature(0), cfg);

    Dataset noise = separable;
    std::vector<int> order(1000);
    std::iota(order.begin(), order.end(), 0);
    CounterRng perm_rng(4040);
    perm_rng.shuffle(order);
    for (int i = 0; i < 1000; ++i) noise.target[i] = separable.target[order[static_cast<std::size_t>(i)]];

    for (const auto& spec : registry()) {
        for (int case_id = 0; case_id < 2; ++case_id) {
            const Dataset& ds = case_id == 0 ? separable : noise;
            const auto split = stratified_split(ds.target, 0.8, 11);
            const auto model = fit(spec, {}, take_rows(ds.features, split.train),
                                   take_labels(ds.target, split.train), 7);
            const double a = auroc(model->predict_scores(take_rows(ds.features, split.test)),
                                   take_labels(ds.target, split.test));
            INFO(spec.name << (case_id == 0 ? " separable" : " noise"));
            if (case_id == 0) {
                // Defaults only: knn at k=5/uniform sits near 0.93 because nine
                // noise dimensions dilute the metric; the tuned-model floor of
                // 0.95 is asserted separately where tuning runs.
                const double floor = spec.name == "knn" ? 0.90 : 0.95;
                CHECK(a >= floor);
            } else {
                CHECK(a > 0.4);
                CHECK(a < 0.6);
            }
        }
    }
}

TEST_CASE("fit rejects broken inputs with the documented errors") {
    const Problem p = random_problem(20, 3, 66);
    const auto& dt = find_classifier("decision_tree");

    Eigen::VectorXi ones = Eigen::VectorXi::Ones(20);
    CHECK_THROWS_AS(fit(dt, {}, p.X, ones, 0), DegenerateDataError);

    Eigen::VectorXi bad = p.y;
    bad[3] = 2;
    CHECK_THROWS_AS(fit(dt, {}, p.X, bad, 0), ConfigError);

    Eigen::MatrixXd empty(0, 3);
    Eigen::VectorXi no_labels(0);
    CHECK_THROWS_AS(fit(dt, {}, empty, no_labels, 0), DegenerateDataError);

    CHECK_THROWS_AS(fit(dt, {{"max_depth", 2.5}}, p.X, p.y, 0), ConfigError);
    CHECK_THROWS_AS(fit(dt, {{"bogus", std::int64_t{1}}}, p.X, p.y, 0), ConfigError);

    const auto model = fit(dt, {}, p.X, p.y, 0);
    Eigen::MatrixXd narrow(4, 2);
    narrow.setZero();
    CHECK_THROWS_AS(model->predict_scores(narrow), ShapeError);
}

TEST_CASE("svm margins are signed and order test points by confidence") {
    const DatasetConfig cfg{400, 10, 17};
    const Dataset ds = synthesize(Expr::feature(0), cfg);
    const auto split = stratified_split(ds.target, 0.8, 3);
    const auto model = fit(find_classifier("linear_svm"), {},
                           take_rows(ds.features, split.train),
                           take_labels(ds.target, split.train), 0);
    const Eigen::VectorXd s = model->predict_scores(take_rows(ds.features, split.test));
    CHECK(s.minCoeff() < 0.0);  // raw margins, not probabilities
    CHECK(s.maxCoeff() > 0.0);
    CHECK(auroc(s, take_labels(ds.target, split.test)) > 0.95);
}

TEST_CASE("forest with zero trees scores the class prior") {
    const Problem p = random_problem(30, 3, 91);
    const auto model = fit(find_classifier("random_forest"), {{"n_estimators", 0.0}}, p.X, p.y, 0);
    const Eigen::VectorXd s = model->predict_scores(p.X);
    double frac = 0.0;
    for (Eigen::Index i = 0; i < p.y.size(); ++i) frac += p.y[i];
    frac /= static_cast<double>(p.y.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) CHECK(s[i] == doctest::Approx(frac).epsilon(1e-15));
}
