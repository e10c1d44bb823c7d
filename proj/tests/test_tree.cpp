#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "duelbench/tree.hpp"

using namespace duelbench;

namespace {

std::vector<int> all_slots(Eigen::Index n) {
    std::vector<int> s(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = static_cast<int>(i);
    return s;
}

}  // namespace

TEST_CASE("gini stump splits separated 1-D data at the boundary midpoint") {
    Eigen::MatrixXd X(6, 1);
    X << 0.0, 1.0, 2.0, 10.0, 11.0, 12.0;
    Eigen::VectorXi y(6);
    y << 0, 0, 0, 1, 1, 1;
    TreeBuildConfig cfg;
    cfg.max_depth = 1;
    const Tree t = build_gini_tree(X, y, all_slots(6), cfg);
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[0].feature == 0);
    CHECK(t.nodes[0].threshold == 6.0);  // midpoint of the only impurity-clearing gap
    CHECK(t.n_leaves() == 2);
    Eigen::VectorXd probe(1);
    probe << 5.0;
    CHECK(t.predict_row(probe) == 0.0);
    probe << 7.0;
    CHECK(t.predict_row(probe) == 1.0);
}

TEST_CASE("midpoint that rounds up to the higher value falls back to the lower") {
    // Adjacent doubles: their exact midpoint is not representable and rounds to
    // one of the endpoints; the guard keeps the split strictly below hi.
    const double lo = 1.0;
    const double hi = std::nextafter(lo, 2.0);
    Eigen::MatrixXd X(2, 1);
    X << lo, hi;
    Eigen::VectorXi y(2);
    y << 0, 1;
    TreeBuildConfig cfg;
    cfg.max_depth = 1;
    const Tree t = build_gini_tree(X, y, all_slots(2), cfg);
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[0].threshold == lo);
    Eigen::VectorXd probe(1);
    probe << lo;
    CHECK(t.predict_row(probe) == 0.0);
    probe << hi;
    CHECK(t.predict_row(probe) == 1.0);
}

TEST_CASE("gain ties keep the first (feature, threshold) in ascending order") {
    // Both features carry the identical perfect split; feature 0 must win.
    Eigen::MatrixXd X(4, 2);
    X << 0.0, 0.0, 1.0, 1.0, 10.0, 10.0, 11.0, 11.0;
    Eigen::VectorXi y(4);
    y << 0, 0, 1, 1;
    TreeBuildConfig cfg;
    cfg.max_depth = 1;
    const Tree t = build_gini_tree(X, y, all_slots(4), cfg);
    CHECK(t.nodes[0].feature == 0);
}

TEST_CASE("pure nodes and depth limits stop growth") {
    Eigen::MatrixXd X(4, 1);
    X << 0.0, 1.0, 2.0, 3.0;
    Eigen::VectorXi y_pure(4);
    y_pure << 1, 1, 1, 1;
    TreeBuildConfig cfg;
    const Tree leaf = build_gini_tree(X, y_pure, all_slots(4), cfg);
    CHECK(leaf.nodes.size() == 1);
    CHECK(leaf.nodes[0].value == 1.0);

    Eigen::VectorXi y_mixed(4);
    y_mixed << 0, 1, 0, 1;
    cfg.max_depth = 0;
    const Tree stumpless = build_gini_tree(X, y_mixed, all_slots(4), cfg);
    CHECK(stumpless.nodes.size() == 1);
    CHECK(stumpless.nodes[0].value == 0.5);  // class-1 fraction of the node

    cfg.max_depth = 10;
    const Tree deep = build_gini_tree(X, y_mixed, all_slots(4), cfg);
    CHECK(deep.depth() <= 10);
    CHECK(deep.n_leaves() == 4);  // alternating labels need one leaf per row
}

TEST_CASE("best-first growth respects the leaf budget and expands best gain first") {
    // Labels 00001110 admit a clean first split and a weaker second one.
    Eigen::MatrixXd X(8, 1);
    X << 0, 1, 2, 3, 4, 5, 6, 7;
    Eigen::VectorXi y(8);
    y << 0, 0, 0, 0, 1, 1, 1, 0;
    TreeBuildConfig cfg;
    cfg.max_leaves = 3;
    const Tree t = build_gini_tree(X, y, all_slots(8), cfg);
    CHECK(t.n_leaves() <= 3);
    CHECK(t.n_leaves() >= 2);

    cfg.max_leaves = 1;
    const Tree single = build_gini_tree(X, y, all_slots(8), cfg);
    CHECK(single.nodes.size() == 1);
}

TEST_CASE("repeated slots weight rows like bagging") {
    Eigen::MatrixXd X(2, 1);
    X << 0.0, 1.0;
    Eigen::VectorXi y(2);
    y << 0, 1;
    // Row 1 drawn three times: the root leaf fraction becomes 3/4.
    const std::vector<int> slots = {0, 1, 1, 1};
    TreeBuildConfig cfg;
    cfg.max_depth = 0;
    const Tree t = build_gini_tree(X, y, slots, cfg);
    CHECK(t.nodes[0].value == 0.75);
}

TEST_CASE("newton tree leaves apply the ridge-damped gradient step") {
    Eigen::MatrixXd X(4, 1);
    X << 0.0, 1.0, 2.0, 3.0;
    Eigen::VectorXd grad(4), hess(4);
    grad << 0.5, 0.5, 0.5, 0.5;
    hess << 0.25, 0.25, 0.25, 0.25;
    TreeBuildConfig cfg;
    cfg.max_depth = 0;
    const Tree t = build_newton_tree(X, grad, hess, all_slots(4), cfg);
    REQUIRE(t.nodes.size() == 1);
    // sum(grad) / (sum(hess) + ridge) = 2 / (1 + 1)
    CHECK(t.nodes[0].value == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("newton tree splits where the gradients disagree") {
    Eigen::MatrixXd X(4, 1);
    X << 0.0, 1.0, 10.0, 11.0;
    Eigen::VectorXd grad(4), hess(4);
    grad << -1.0, -1.0, 1.0, 1.0;
    hess << 0.25, 0.25, 0.25, 0.25;
    TreeBuildConfig cfg;
    cfg.max_depth = 1;
    const Tree t = build_newton_tree(X, grad, hess, all_slots(4), cfg);
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[0].threshold == 5.5);
    Eigen::VectorXd probe(1);
    probe << 0.0;
    CHECK(t.predict_row(probe) == doctest::Approx(-2.0 / 1.5).epsilon(1e-15));
    probe << 11.0;
    CHECK(t.predict_row(probe) == doctest::Approx(2.0 / 1.5).epsilon(1e-15));
}

TEST_CASE("feature subsampling is seed-deterministic") {
    CounterRng rng_a(3), rng_b(3);
    Eigen::MatrixXd X(40, 6);
    Eigen::VectorXi y(40);
    CounterRng data_rng(12);
    for (Eigen::Index i = 0; i < 40; ++i) {
        for (Eigen::Index j = 0; j < 6; ++j) X(i, j) = data_rng.uniform01();
        y[i] = X(i, 2) > 0.5 ? 1 : 0;
    }
    TreeBuildConfig cfg;
    cfg.feature_subsample = 2;
    const Tree a = build_gini_tree(X, y, all_slots(40), cfg, &rng_a);
    const Tree b = build_gini_tree(X, y, all_slots(40), cfg, &rng_b);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].feature == b.nodes[i].feature);
        CHECK(a.nodes[i].threshold == b.nodes[i].threshold);
        CHECK(a.nodes[i].value == b.nodes[i].value);
    }
}

TEST_CASE("predict_rows matches predict_row element-wise") {
    Eigen::MatrixXd X(30, 3);
    Eigen::VectorXi y(30);
    CounterRng data_rng(77);
    for (Eigen::Index i = 0; i < 30; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = data_rng.uniform01();
        y[i] = (X(i, 0) + X(i, 1) > 1.0) ? 1 : 0;
    }
    const Tree t = build_gini_tree(X, y, all_slots(30), TreeBuildConfig{});
    const Eigen::VectorXd batch = t.predict_rows(X);
    for (Eigen::Index i = 0; i < 30; ++i) CHECK(batch[i] == t.predict_row(X.row(i)));
}
