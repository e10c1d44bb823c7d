#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <vector>

#include "duelbench/errors.hpp"
#include "duelbench/expr.hpp"
#include "duelbench/rng.hpp"

using namespace duelbench;

namespace {

Eigen::VectorXd row10(std::initializer_list<double> head) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(10);
    int i = 0;
    for (double v : head) r[i++] = v;
    return r;
}

}  // namespace

TEST_CASE("leaves and operator composition evaluate as written") {
    CHECK(evaluate(Expr::feature(0), row10({2.5})) == 2.5);
    CHECK(evaluate(Expr::constant(-0.75), row10({})) == -0.75);

    const Expr f = parse_expr("add(mul(x0,x1),neg(x2))");
    CHECK(evaluate(f, row10({2.0, 3.0, 5.0})) == 1.0);
    CHECK(f.size() == 6);
    CHECK(f.depth() == 3);
    CHECK(f.max_feature() == 2);
}

TEST_CASE("safediv falls back to 1 near zero divisors") {
    const Expr f = parse_expr("safediv(x0,x1)");
    CHECK(evaluate(f, row10({3.0, 0.0})) == 1.0);
    CHECK(evaluate(f, row10({3.0, 1e-9})) == 1.0);   // boundary is exclusive
    CHECK(evaluate(f, row10({1.0, 2e-9})) == doctest::Approx(5e8).epsilon(1e-12));
    CHECK(evaluate(f, row10({-4.0, 2.0})) == -2.0);
}

TEST_CASE("results are clamped to the value range") {
    const Expr f = parse_expr("mul(1e300,1e300)");
    CHECK(evaluate(f, row10({})) == 1e12);
    const Expr g = parse_expr("neg(mul(1e300,1e300))");
    CHECK(evaluate(g, row10({})) == -1e12);
}

TEST_CASE("tree structure accessors") {
    const Expr f = parse_expr("add(mul(x0,x1),neg(x2))");
    CHECK(f.subtree_size(0) == 6);
    CHECK(f.subtree_size(1) == 3);
    CHECK(f.subtree_size(4) == 2);
    CHECK(f.subtree_size(5) == 1);
    CHECK(Expr::feature(3).depth() == 1);
    CHECK(parse_expr("add(x0,x1)").depth() == 2);

    CHECK_THROWS_AS(Expr({ExprNode{ExprNode::Kind::Operator, Op::Add, 0, 0.0}}), ConfigError);
    std::vector<ExprNode> extra{ExprNode{ExprNode::Kind::Feature, Op::Add, 0, 0.0},
                                ExprNode{ExprNode::Kind::Feature, Op::Add, 1, 0.0}};
    CHECK_THROWS_AS(Expr{extra}, ConfigError);
}

TEST_CASE("text form round-trips") {
    const Expr f = parse_expr("max(abs(x3),safediv(x1,sub(x2,0.5)))");
    CHECK(to_string(f) == "max(abs(x3),safediv(x1,sub(x2,0.5)))");
    CHECK(parse_expr(to_string(f)) == f);
    CHECK(parse_expr("  add( x0 , x1 )  ") == parse_expr("add(x0,x1)"));
}

TEST_CASE("parse errors carry 1-based offsets") {
    try {
        parse_expr("add(x0");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 7);
        CHECK(std::string(e.what()).find("','") != std::string::npos);
    }
    try {
        parse_expr("foo(x0,x1)");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 1);
        CHECK(std::string(e.what()).find("unknown operator") != std::string::npos);
    }
    try {
        parse_expr("add(x0,x10)");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 8);
        CHECK(std::string(e.what()).find("out of range") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_expr("add(x0,x1)x"), ParseError);
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    CHECK_THROWS_AS(parse_expr("neg(x0,x1)"), ParseError);
    CHECK_NOTHROW(parse_expr("add(x0,x10)", 11));
}

TEST_CASE("random trees respect the ramped depth and size bounds") {
    GrowConfig cfg;  // depths 2..6, size <= 64, 10 features
    CounterRng rng(11);
    std::set<int> seen_depths;
    for (int i = 0; i < 1000; ++i) {
        const Expr f = random_tree(cfg, rng);
        REQUIRE(f.depth() >= cfg.min_depth);
        REQUIRE(f.depth() <= cfg.max_depth);
        REQUIRE(f.size() <= cfg.max_size);
        REQUIRE(f.max_feature() < cfg.n_features);
        seen_depths.insert(f.depth());
    }
    for (int d = cfg.min_depth; d <= cfg.max_depth; ++d) CHECK(seen_depths.count(d) == 1);

    GrowConfig leaf_cfg;
    leaf_cfg.min_depth = 1;
    leaf_cfg.max_depth = 1;
    const Expr leaf = random_tree(leaf_cfg, rng);
    CHECK(leaf.size() == 1);
}

TEST_CASE("generation is deterministic per seed") {
    GrowConfig cfg;
    CounterRng r1(5), r2(5);
    for (int i = 0; i < 50; ++i) CHECK(random_tree(cfg, r1) == random_tree(cfg, r2));
}

TEST_CASE("mutation preserves the bounds") {
    GrowConfig cfg;
    CounterRng rng(21);
    Expr f = random_tree(cfg, rng);
    for (int i = 0; i < 1000; ++i) {
        f = mutate(f, cfg, rng);
        REQUIRE(f.depth() <= cfg.max_depth);
        REQUIRE(f.size() <= cfg.max_size);
        REQUIRE(f.max_feature() < cfg.n_features);
    }
    // A single-leaf tree mutates into another valid tree.
    const Expr tiny = mutate(Expr::feature(2), cfg, rng);
    CHECK(tiny.depth() <= cfg.max_depth);
}

TEST_CASE("crossover on single leaves swaps them") {
    GrowConfig cfg;
    CounterRng rng(31);
    const Expr a = Expr::feature(1);
    const Expr b = Expr::feature(7);
    const auto [c1, c2] = crossover(a, b, cfg, rng);
    CHECK(c1 == b);
    CHECK(c2 == a);
}

TEST_CASE("crossover children respect the bounds") {
    GrowConfig cfg;
    CounterRng rng(41);
    for (int i = 0; i < 300; ++i) {
        const Expr a = random_tree(cfg, rng);
        const Expr b = random_tree(cfg, rng);
        const auto [c1, c2] = crossover(a, b, cfg, rng);
        REQUIRE(c1.depth() <= cfg.max_depth);
        REQUIRE(c2.depth() <= cfg.max_depth);
        REQUIRE(c1.size() <= cfg.max_size);
        REQUIRE(c2.size() <= cfg.max_size);
    }
}

TEST_CASE("bigram histogram counts parent-child operator pairs") {
    const auto h = bigram_histogram(parse_expr("add(mul(x0,x1),neg(x2))"));
    REQUIRE(h.size() == 2);
    CHECK(h.at({Op::Add, Op::Mul}) == 1);
    CHECK(h.at({Op::Add, Op::Neg}) == 1);

    const auto nested = bigram_histogram(parse_expr("neg(neg(neg(x0)))"));
    REQUIRE(nested.size() == 1);
    CHECK(nested.at({Op::Neg, Op::Neg}) == 2);

    CHECK(bigram_histogram(Expr::feature(0)).empty());
}

TEST_CASE("random trees round-trip through text") {
    GrowConfig cfg;
    cfg.p_constant = 0.3;
    CounterRng rng(61);
    for (int i = 0; i < 200; ++i) {
        const Expr f = random_tree(cfg, rng);
        CHECK(parse_expr(to_string(f)) == f);
    }
}

TEST_CASE("evaluation is total and the batched path agrees with the scalar one") {
    GrowConfig cfg;
    cfg.p_constant = 0.2;
    CounterRng rng(71);
    for (int t = 0; t < 200; ++t) {
        const Expr f = random_tree(cfg, rng);
        Eigen::MatrixXd X(25, 10);
        for (int i = 0; i < X.rows(); ++i)
            for (int j = 0; j < X.cols(); ++j) X(i, j) = rng.normal() * 3.0;
        const Eigen::VectorXd batched = evaluate_rows(f, X);
        for (int i = 0; i < X.rows(); ++i) {
            const double v = evaluate(f, X.row(i).transpose());
            REQUIRE(std::isfinite(v));
            REQUIRE(std::fabs(v) <= kValueClamp);
            REQUIRE(batched[i] == v);
        }
    }
}

TEST_CASE("evaluate rejects rows that are too short") {
    const Expr f = parse_expr("add(x0,x8)");
    Eigen::VectorXd small = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(evaluate(f, small), ShapeError);
}
