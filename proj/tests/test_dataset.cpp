#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "duelbench/dataset.hpp"
#include "duelbench/errors.hpp"
#include "duelbench/expr.hpp"

using namespace duelbench;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("duelbench_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

}  // namespace

TEST_CASE("rank-median labeling splits at the sorted midpoint") {
    const Eigen::VectorXi labels = rank_median_labels(vec({3.2, -1.0, 0.5, 7.7}));
    CHECK(labels[0] == 1);
    CHECK(labels[1] == 0);
    CHECK(labels[2] == 0);
    CHECK(labels[3] == 1);
}

TEST_CASE("rank-median labeling breaks ties by row index") {
    const Eigen::VectorXi labels = rank_median_labels(vec({1.0, 2.0, 1.0, 2.0}));
    CHECK(labels[0] == 0);
    CHECK(labels[1] == 1);
    CHECK(labels[2] == 0);
    CHECK(labels[3] == 1);

    // All-constant raw values still split by index.
    const Eigen::VectorXi flat = rank_median_labels(vec({5.0, 5.0, 5.0, 5.0, 5.0, 5.0}));
    CHECK(flat.sum() == 3);
    CHECK(flat[0] == 0);
    CHECK(flat[5] == 1);
}

TEST_CASE("synthesis yields exactly balanced classes") {
    DatasetConfig cfg;
    cfg.seed = 42;
    const Dataset ds = synthesize(parse_expr("add(mul(x0,x1),neg(x2))"), cfg);
    CHECK(ds.features.rows() == 1000);
    CHECK(ds.features.cols() == 10);
    CHECK(ds.target.size() == 1000);
    CHECK(ds.target.sum() == 500);
    CHECK(ds.function_text == "add(mul(x0,x1),neg(x2))");
}

TEST_CASE("feature sampling is reproducible and roughly standard normal") {
    DatasetConfig cfg;
    cfg.seed = 7;
    const Eigen::MatrixXd a = sample_features(cfg);
    const Eigen::MatrixXd b = sample_features(cfg);
    CHECK(a == b);

    const double mean = a.mean();
    const double var = (a.array() - mean).square().mean();
    CHECK(std::fabs(mean) < 0.02);
    CHECK(var == doctest::Approx(1.0).epsilon(0.03));

    DatasetConfig other = cfg;
    other.seed = 8;
    CHECK(sample_features(other) != a);
}

TEST_CASE("feature matrix is pinned for seed 42") {
    DatasetConfig cfg;
    cfg.seed = 42;
    const Eigen::MatrixXd X = sample_features(cfg);
    // Row-major draw order: X(0,0) is the first normal deviate of the stream.
    const double expected[10] = {
        -2.4995644813002054, 1.8731280787694002, 0.32202563965940273, 0.13698389007745831,
        1.5377143137763887,  1.4593272237166999, -0.05637366183655185, -1.4188084047906915,
        1.0918449415756863,  0.5896492947278563};
    for (int j = 0; j < 10; ++j)
        CHECK(X(0, j) == doctest::Approx(expected[j]).epsilon(1e-12));
}

TEST_CASE("replicates differ but are individually reproducible") {
    DatasetConfig cfg;
    cfg.n_samples = 100;
    cfg.seed = 10;
    const Expr f = parse_expr("max(x0,mul(x1,x2))");
    const auto reps = replicate(f, cfg, 3);
    REQUIRE(reps.size() == 3);
    CHECK(reps[0].config.seed == 10);
    CHECK(reps[1].config.seed == 11);
    CHECK(reps[2].config.seed == 12);
    CHECK(reps[0].features != reps[1].features);

    DatasetConfig shifted = cfg;
    shifted.seed = 11;
    const Dataset again = synthesize(f, shifted);
    CHECK(again.features == reps[1].features);
    CHECK(again.target == reps[1].target);
}

TEST_CASE("synthesis validates its inputs") {
    DatasetConfig odd;
    odd.n_samples = 101;
    CHECK_THROWS_AS(synthesize(Expr::feature(0), odd), ConfigError);

    DatasetConfig tiny;
    tiny.n_samples = 2;
    CHECK_THROWS_AS(synthesize(Expr::feature(0), tiny), ConfigError);

    DatasetConfig cfg;
    cfg.n_features = 3;
    CHECK_THROWS_AS(synthesize(parse_expr("add(x0,x5)"), cfg), ConfigError);
}

TEST_CASE("csv round-trips bit for bit") {
    TempDir tmp;
    DatasetConfig cfg;
    cfg.n_samples = 60;
    cfg.seed = 77;
    const Dataset ds = synthesize(parse_expr("safediv(x3,x4)"), cfg);
    const auto csv = tmp.path / "ds.csv";
    write_csv(ds, csv);

    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "feature_0,feature_1,feature_2,feature_3,feature_4,feature_5,feature_6,feature_7,"
          "feature_8,feature_9,target");

    const Dataset back = read_csv(csv);
    CHECK(back.features == ds.features);
    CHECK(back.target == ds.target);
}

TEST_CASE("csv reader rejects malformed rows") {
    TempDir tmp;
    const auto bad_cols = tmp.path / "bad_cols.csv";
    {
        std::ofstream out(bad_cols);
        out << "feature_0,feature_1,target\n1.0,2.0,1\n3.0,0\n";
    }
    CHECK_THROWS_AS(read_csv(bad_cols), ConfigError);

    const auto bad_target = tmp.path / "bad_target.csv";
    {
        std::ofstream out(bad_target);
        out << "feature_0,target\n1.0,2\n-1.0,0\n";
    }
    CHECK_THROWS_AS(read_csv(bad_target), ConfigError);
}

TEST_CASE("sidecar records the generating function and seed") {
    TempDir tmp;
    DatasetConfig cfg;
    cfg.n_samples = 20;
    cfg.seed = 5;
    const Dataset ds = synthesize(parse_expr("abs(x1)"), cfg);
    const auto side = tmp.path / "ds.json";
    write_sidecar(ds, side, "deadbeef");

    std::ifstream in(side);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("\"abs(x1)\"") != std::string::npos);
    CHECK(text.find("\"seed\": 5") != std::string::npos);
    CHECK(text.find("\"n_samples\": 20") != std::string::npos);
    CHECK(text.find("safediv") != std::string::npos);  // operator set listed
    CHECK(text.find("deadbeef") != std::string::npos);
}
