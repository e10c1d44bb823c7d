#include <doctest.h>

#include <Eigen/Dense>
#include <vector>

#include "duelbench/errors.hpp"
#include "duelbench/metrics.hpp"
#include "duelbench/rng.hpp"

using namespace duelbench;

namespace {

Eigen::VectorXd scores_of(std::initializer_list<double> v) {
    Eigen::VectorXd s(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) s[i++] = x;
    return s;
}

Eigen::VectorXi labels_of(std::initializer_list<int> v) {
    Eigen::VectorXi s(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (int x : v) s[i++] = x;
    return s;
}

// Pair-counting definition: P(score+ > score-) + P(tie)/2.
double auroc_brute(const Eigen::VectorXd& s, const Eigen::VectorXi& y) {
    double wins = 0.0;
    long pairs = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (y[i] != 1) continue;
        for (Eigen::Index j = 0; j < s.size(); ++j) {
            if (y[j] != 0) continue;
            ++pairs;
            if (s[i] > s[j]) wins += 1.0;
            else if (s[i] == s[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

double trapezoid_roc_area(const std::vector<RocPoint>& pts) {
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        area += (pts[i].fpr - pts[i - 1].fpr) * 0.5 * (pts[i].tpr + pts[i - 1].tpr);
    return area;
}

}  // namespace

TEST_CASE("auroc on separable, anti-separable, and tied scores") {
    CHECK(auroc(scores_of({0.9, 0.8, 0.3, 0.2}), labels_of({1, 1, 0, 0})) == 1.0);
    CHECK(auroc(scores_of({0.5, 0.5}), labels_of({1, 0})) == 0.5);
    CHECK(auroc(scores_of({0.8, 0.7, 0.4, 0.3}), labels_of({1, 0, 1, 0})) == 0.75);
    CHECK(auroc(scores_of({0.9, 0.8, 0.2, 0.1}), labels_of({0, 0, 1, 1})) == 0.0);
    CHECK(auroc(scores_of({0.5, 0.5, 0.5, 0.5}), labels_of({0, 0, 1, 1})) == 0.5);
}

TEST_CASE("auroc matches pair counting on random data") {
    CounterRng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 30;
        Eigen::VectorXd s(n);
        Eigen::VectorXi y(n);
        bool has0 = false, has1 = false;
        for (int i = 0; i < n; ++i) {
            // Coarse grid to force plenty of ties.
            s[i] = static_cast<double>(rng.uniform_int(0, 8)) / 8.0;
            y[i] = rng.bernoulli(0.4) ? 1 : 0;
            (y[i] ? has1 : has0) = true;
        }
        if (!has0 || !has1) continue;
        CHECK(auroc(s, y) == doctest::Approx(auroc_brute(s, y)).epsilon(1e-13));
    }
}

TEST_CASE("auroc is invariant under monotone score transforms") {
    CounterRng rng(19);
    const int n = 40;
    Eigen::VectorXd s(n);
    Eigen::VectorXi y(n);
    for (int i = 0; i < n; ++i) {
        s[i] = rng.normal();
        y[i] = i % 3 == 0 ? 1 : 0;
    }
    const double base = auroc(s, y);
    Eigen::VectorXd warped = (s.array() * 3.0).exp();
    CHECK(auroc(warped, y) == doctest::Approx(base).epsilon(1e-13));
}

TEST_CASE("complement symmetry: flipping labels mirrors auroc") {
    CounterRng rng(23);
    const int n = 50;
    Eigen::VectorXd s(n);
    Eigen::VectorXi y(n), flipped(n);
    for (int i = 0; i < n; ++i) {
        s[i] = static_cast<double>(rng.uniform_int(0, 9));
        y[i] = i % 2;
        flipped[i] = 1 - y[i];
    }
    CHECK(auroc(s, y) + auroc(s, flipped) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("roc curve endpoints and monotonicity") {
    const auto s = scores_of({0.2, 0.4, 0.4, 0.9, 0.1, 0.7});
    const auto y = labels_of({0, 1, 0, 1, 0, 1});
    const auto pts = roc_curve(s, y);
    REQUIRE(pts.size() >= 2);
    CHECK(pts.front().fpr == 0.0);
    CHECK(pts.front().tpr == 0.0);
    CHECK(pts.back().fpr == 1.0);
    CHECK(pts.back().tpr == 1.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(pts[i].fpr >= pts[i - 1].fpr);
        CHECK(pts[i].tpr >= pts[i - 1].tpr);
        CHECK(pts[i].threshold < pts[i - 1].threshold);
    }
}

TEST_CASE("trapezoid area under the roc curve equals auroc") {
    CounterRng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 60;
        Eigen::VectorXd s(n);
        Eigen::VectorXi y(n);
        for (int i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng.uniform_int(0, 11));
            y[i] = i < n / 2 ? 0 : 1;
        }
        CHECK(trapezoid_roc_area(roc_curve(s, y)) == doctest::Approx(auroc(s, y)).epsilon(1e-12));
    }
}

TEST_CASE("average precision on the worked example") {
    // Step areas: 0.5 recall at precision 1, then 0.5 more at precision 2/3.
    const auto s = scores_of({0.9, 0.6, 0.4, 0.1});
    const auto y = labels_of({1, 0, 1, 0});
    CHECK(average_precision(s, y) == doctest::Approx(5.0 / 6.0).epsilon(1e-13));
    CHECK(average_precision(scores_of({0.9, 0.8, 0.2, 0.1}), labels_of({1, 1, 0, 0})) == 1.0);
    // All scores tied with balanced labels degrades to the prevalence.
    CHECK(average_precision(scores_of({0.4, 0.4, 0.4, 0.4}), labels_of({1, 0, 1, 0})) == 0.5);
}

TEST_CASE("prc curve recall reaches 1 and precision stays in range") {
    const auto s = scores_of({0.9, 0.7, 0.5, 0.5, 0.3, 0.2});
    const auto y = labels_of({1, 0, 1, 0, 1, 0});
    const auto pts = prc_curve(s, y);
    REQUIRE_FALSE(pts.empty());
    CHECK(pts.back().recall == 1.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].precision >= 0.0);
        CHECK(pts[i].precision <= 1.0);
        if (i > 0) {
            CHECK(pts[i].recall >= pts[i - 1].recall);
            CHECK(pts[i].threshold < pts[i - 1].threshold);
        }
    }
}

TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(auroc(scores_of({0.1, 0.2}), labels_of({1, 1})), UndefinedMetricError);
    CHECK_THROWS_AS(auroc(scores_of({0.1, 0.2}), labels_of({0, 0})), UndefinedMetricError);
    CHECK_THROWS_AS(auroc(scores_of({}), labels_of({})), UndefinedMetricError);
    CHECK_THROWS_AS(auroc(scores_of({0.1}), labels_of({2})), ConfigError);
    CHECK_THROWS_AS(auroc(scores_of({0.1, 0.2}), labels_of({1})), ShapeError);
}

TEST_CASE("evaluate_scores bundles all metrics consistently") {
    const auto s = scores_of({0.2, 0.4, 0.4, 0.9});
    const auto y = labels_of({0, 1, 0, 1});
    const EvaluationResult r = evaluate_scores(s, y);
    CHECK(r.auroc == auroc(s, y));
    CHECK(r.average_precision == average_precision(s, y));
    CHECK(r.roc_points.size() == roc_curve(s, y).size());
    CHECK(r.prc_points.size() == prc_curve(s, y).size());
}
