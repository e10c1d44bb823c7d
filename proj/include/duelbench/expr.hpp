#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "duelbench/rng.hpp"

namespace duelbench {

/// Operator vocabulary. Every operator is total over the reals: safediv falls
/// back to 1.0 near a zero divisor, and every result is clamped to
/// [-kValueClamp, kValueClamp] so compositions stay finite.
enum class Op : std::uint8_t { Add, Sub, Mul, SafeDiv, Min, Max, Neg, Abs };

constexpr int kNumOps = 8;
constexpr double kDivEpsilon = 1e-9;
constexpr double kValueClamp = 1e12;

int arity(Op op);
std::string_view op_name(Op op);
const std::vector<Op>& all_ops();

struct ExprNode {
    enum class Kind : std::uint8_t { Operator, Feature, Constant };
    Kind kind = Kind::Feature;
    Op op = Op::Add;       // valid when kind == Operator
    int feature = 0;       // valid when kind == Feature
    double value = 0.0;    // valid when kind == Constant

    bool operator==(const ExprNode&) const = default;
};

/// A symbolic function of the feature vector, stored as a preorder-flattened
/// tree. Immutable after construction; variation builds new trees.
class Expr {
public:
    Expr() : nodes_{ExprNode{}} {}
    explicit Expr(std::vector<ExprNode> preorder_nodes);

    static Expr feature(int index);
    static Expr constant(double value);
    static Expr apply(Op op, const Expr& a);
    static Expr apply(Op op, const Expr& a, const Expr& b);

    const std::vector<ExprNode>& nodes() const { return nodes_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    int depth() const;

    /// Node count of the subtree rooted at preorder index i.
    int subtree_size(int i) const;
    /// Highest feature index referenced, or -1 if the tree is constants only.
    int max_feature() const;

    bool operator==(const Expr& other) const { return nodes_ == other.nodes_; }

private:
    std::vector<ExprNode> nodes_;
};

struct GrowConfig {
    int n_features = 10;
    int min_depth = 2;
    int max_depth = 6;
    int max_size = 64;
    /// Probability that a generated leaf is an ephemeral constant drawn
    /// uniform(-1, 1). Zero keeps leaves feature-only.
    double p_constant = 0.0;
};

/// Ordered (parent operator, child operator) edge counts.
using BigramHistogram = std::map<std::pair<Op, Op>, std::int64_t>;

double evaluate(const Expr& f, const Eigen::Ref<const Eigen::VectorXd>& features);

/// Column-wise evaluation over every row of X at once.
Eigen::VectorXd evaluate_rows(const Expr& f, const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Ramped half-and-half initialization within [min_depth, max_depth].
Expr random_tree(const GrowConfig& config, CounterRng& rng);

/// Point mutation (same-arity operator / leaf swap) or subtree replacement,
/// each half the time. Result always satisfies the depth and size bounds.
Expr mutate(const Expr& f, const GrowConfig& config, CounterRng& rng);

/// Subtree exchange at uniformly chosen nodes, with out-of-bound subtrees
/// repaired by truncation to a random leaf.
std::pair<Expr, Expr> crossover(const Expr& a, const Expr& b, const GrowConfig& config,
                                CounterRng& rng);

BigramHistogram bigram_histogram(const Expr& f);

/// Prefix text form, e.g. "add(mul(x0,x1),neg(x2))".
std::string to_string(const Expr& f);

/// Inverse of to_string. Throws ParseError with a 1-based byte offset.
Expr parse_expr(std::string_view text, int n_features = 10);

}  // namespace duelbench
