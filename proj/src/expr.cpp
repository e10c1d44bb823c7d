#include "duelbench/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "duelbench/errors.hpp"

namespace duelbench {

namespace {

constexpr std::array<std::string_view, kNumOps> kOpNames = {
    "add", "sub", "mul", "safediv", "min", "max", "neg", "abs"};

const std::vector<Op> kAllOps = {Op::Add, Op::Sub, Op::Mul, Op::SafeDiv,
                                 Op::Min, Op::Max, Op::Neg, Op::Abs};
const std::vector<Op> kBinaryOps = {Op::Add, Op::Sub, Op::Mul, Op::SafeDiv, Op::Min, Op::Max};
const std::vector<Op> kUnaryOps = {Op::Neg, Op::Abs};

inline double clamp_value(double v) { return std::clamp(v, -kValueClamp, kValueClamp); }

inline int node_arity(const ExprNode& n) {
    return n.kind == ExprNode::Kind::Operator ? arity(n.op) : 0;
}

std::string format_shortest(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

int arity(Op op) { return (op == Op::Neg || op == Op::Abs) ? 1 : 2; }

std::string_view op_name(Op op) { return kOpNames[static_cast<int>(op)]; }

const std::vector<Op>& all_ops() { return kAllOps; }

Expr::Expr(std::vector<ExprNode> preorder_nodes) : nodes_(std::move(preorder_nodes)) {
    if (nodes_.empty()) throw ConfigError("expression tree must have at least one node");
    int remaining = 1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (remaining == 0) throw ConfigError("malformed expression tree: extra nodes");
        --remaining;
        remaining += node_arity(nodes_[i]);
        if (nodes_[i].kind == ExprNode::Kind::Feature && nodes_[i].feature < 0)
            throw ConfigError("malformed expression tree: negative feature index");
    }
    if (remaining != 0) throw ConfigError("malformed expression tree: missing children");
}

Expr Expr::feature(int index) {
    return Expr({ExprNode{ExprNode::Kind::Feature, Op::Add, index, 0.0}});
}

Expr Expr::constant(double value) {
    return Expr({ExprNode{ExprNode::Kind::Constant, Op::Add, 0, value}});
}

Expr Expr::apply(Op op, const Expr& a) {
    if (arity(op) != 1) throw ConfigError("operator is not unary");
    std::vector<ExprNode> nodes;
    nodes.reserve(1 + a.nodes_.size());
    nodes.push_back(ExprNode{ExprNode::Kind::Operator, op, 0, 0.0});
    nodes.insert(nodes.end(), a.nodes_.begin(), a.nodes_.end());
    return Expr(std::move(nodes));
}

Expr Expr::apply(Op op, const Expr& a, const Expr& b) {
    if (arity(op) != 2) throw ConfigError("operator is not binary");
    std::vector<ExprNode> nodes;
    nodes.reserve(1 + a.nodes_.size() + b.nodes_.size());
    nodes.push_back(ExprNode{ExprNode::Kind::Operator, op, 0, 0.0});
    nodes.insert(nodes.end(), a.nodes_.begin(), a.nodes_.end());
    nodes.insert(nodes.end(), b.nodes_.begin(), b.nodes_.end());
    return Expr(std::move(nodes));
}

int Expr::depth() const {
    // Preorder walk tracking each node's depth through a pending-children stack.
    std::vector<std::pair<int, int>> stack;  // (children remaining, depth)
    int max_depth = 0;
    for (const auto& node : nodes_) {
        const int d = stack.empty() ? 1 : stack.back().second + 1;
        max_depth = std::max(max_depth, d);
        const int a = node_arity(node);
        if (a > 0) {
            stack.push_back({a, d});
        } else {
            while (!stack.empty() && --stack.back().first == 0) stack.pop_back();
        }
    }
    return max_depth;
}

int Expr::subtree_size(int i) const {
    int remaining = 1;
    int j = i;
    while (remaining > 0) {
        --remaining;
        remaining += node_arity(nodes_[static_cast<std::size_t>(j)]);
        ++j;
    }
    return j - i;
}

int Expr::max_feature() const {
    int m = -1;
    for (const auto& node : nodes_)
        if (node.kind == ExprNode::Kind::Feature) m = std::max(m, node.feature);
    return m;
}

double evaluate(const Expr& f, const Eigen::Ref<const Eigen::VectorXd>& features) {
    if (f.max_feature() >= features.size())
        throw ShapeError("malformed function: feature index out of bounds");
    const auto& nodes = f.nodes();
    int pos = 0;
    auto eval = [&](auto&& self) -> double {
        const ExprNode& node = nodes[static_cast<std::size_t>(pos++)];
        switch (node.kind) {
            case ExprNode::Kind::Feature:
                return features[node.feature];
            case ExprNode::Kind::Constant:
                return node.value;
            case ExprNode::Kind::Operator:
                break;
        }
        if (arity(node.op) == 1) {
            const double c = self(self);
            return clamp_value(node.op == Op::Neg ? -c : std::fabs(c));
        }
        const double l = self(self);
        const double r = self(self);
        double v = 0.0;
        switch (node.op) {
            case Op::Add: v = l + r; break;
            case Op::Sub: v = l - r; break;
            case Op::Mul: v = l * r; break;
            case Op::SafeDiv: v = std::fabs(r) > kDivEpsilon ? l / r : 1.0; break;
            case Op::Min: v = std::min(l, r); break;
            case Op::Max: v = std::max(l, r); break;
            default: break;
        }
        return clamp_value(v);
    };
    return eval(eval);
}

Eigen::VectorXd evaluate_rows(const Expr& f, const Eigen::Ref<const Eigen::MatrixXd>& X) {
    if (f.max_feature() >= X.cols())
        throw ShapeError("malformed function: feature index out of bounds");
    const auto& nodes = f.nodes();
    using Arr = Eigen::ArrayXd;
    int pos = 0;
    auto eval = [&](auto&& self) -> Arr {
        const ExprNode& node = nodes[static_cast<std::size_t>(pos++)];
        switch (node.kind) {
            case ExprNode::Kind::Feature:
                return X.col(node.feature).array();
            case ExprNode::Kind::Constant:
                return Arr::Constant(X.rows(), node.value);
            case ExprNode::Kind::Operator:
                break;
        }
        if (arity(node.op) == 1) {
            const Arr c = self(self);
            const Arr v = node.op == Op::Neg ? Arr(-c) : Arr(c.abs());
            return v.min(kValueClamp).max(-kValueClamp);
        }
        const Arr l = self(self);
        const Arr r = self(self);
        Arr v;
        switch (node.op) {
            case Op::Add: v = l + r; break;
            case Op::Sub: v = l - r; break;
            case Op::Mul: v = l * r; break;
            case Op::SafeDiv: v = (r.abs() > kDivEpsilon).select(l / r, 1.0); break;
            case Op::Min: v = l.min(r); break;
            case Op::Max: v = l.max(r); break;
            default: break;
        }
        return v.min(kValueClamp).max(-kValueClamp);
    };
    return eval(eval).matrix();
}

namespace {

ExprNode random_leaf(const GrowConfig& config, CounterRng& rng) {
    if (config.p_constant > 0.0 && rng.bernoulli(config.p_constant))
        return ExprNode{ExprNode::Kind::Constant, Op::Add, 0, rng.uniform(-1.0, 1.0)};
    const int idx = static_cast<int>(rng.uniform_int(0, config.n_features - 1));
    return ExprNode{ExprNode::Kind::Feature, Op::Add, idx, 0.0};
}

// Emits a subtree in preorder. depth_left and budget are upper bounds on the
// subtree's depth and node count; min_more forces operators until the minimum
// depth is reached along one path. Returns the node count used.
int grow_subtree(std::vector<ExprNode>& out, const GrowConfig& config, CounterRng& rng,
                 int depth_left, int min_more, int budget, bool full) {
    const bool can_binary = depth_left >= 2 && budget >= 3;
    const bool can_unary = depth_left >= 2 && budget >= 2;
    bool make_op = can_binary || can_unary;
    if (make_op && !full && min_more <= 1) make_op = !rng.bernoulli(0.5);
    if (!make_op) {
        out.push_back(random_leaf(config, rng));
        return 1;
    }
    const std::vector<Op>& pool = can_binary ? kAllOps : kUnaryOps;
    const Op op = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
    out.push_back(ExprNode{ExprNode::Kind::Operator, op, 0, 0.0});
    if (arity(op) == 1)
        return 1 + grow_subtree(out, config, rng, depth_left - 1, min_more - 1, budget - 1, full);
    const bool deep_first = rng.bernoulli(0.5);
    const int used_left = grow_subtree(out, config, rng, depth_left - 1,
                                       deep_first ? min_more - 1 : 1, budget - 2, full);
    const int used_right = grow_subtree(out, config, rng, depth_left - 1,
                                        deep_first ? 1 : min_more - 1, budget - 1 - used_left, full);
    return 1 + used_left + used_right;
}

void validate_grow_config(const GrowConfig& config) {
    if (config.min_depth < 1 || config.min_depth > config.max_depth)
        throw ConfigError("grow config: need 1 <= min_depth <= max_depth");
    if (config.max_size < 1) throw ConfigError("grow config: max_size must be >= 1");
    if (config.n_features < 1) throw ConfigError("grow config: n_features must be >= 1");
    if (config.p_constant < 0.0 || config.p_constant > 1.0)
        throw ConfigError("grow config: p_constant must be in [0, 1]");
}

// Node depths (root = 1) for every preorder position.
std::vector<int> node_depths(const Expr& f) {
    std::vector<int> depths(static_cast<std::size_t>(f.size()));
    std::vector<std::pair<int, int>> stack;  // (children remaining, depth)
    const auto& nodes = f.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const int d = stack.empty() ? 1 : stack.back().second + 1;
        depths[i] = d;
        const int a = node_arity(nodes[i]);
        if (a > 0) {
            stack.push_back({a, d});
        } else {
            while (!stack.empty() && --stack.back().first == 0) stack.pop_back();
        }
    }
    return depths;
}

Expr splice(const Expr& host, int at, const std::vector<ExprNode>& replacement) {
    const int sub = host.subtree_size(at);
    std::vector<ExprNode> nodes;
    nodes.reserve(host.nodes().size() - static_cast<std::size_t>(sub) + replacement.size());
    nodes.insert(nodes.end(), host.nodes().begin(), host.nodes().begin() + at);
    nodes.insert(nodes.end(), replacement.begin(), replacement.end());
    nodes.insert(nodes.end(), host.nodes().begin() + at + sub, host.nodes().end());
    return Expr(std::move(nodes));
}

// Truncates depth violations, then shrinks oversized trees by replacing the
// deepest pre-terminal operator with a random leaf until the size bound holds.
Expr repair(Expr tree, const GrowConfig& config, CounterRng& rng) {
    if (tree.depth() > config.max_depth) {
        const auto depths = node_depths(tree);
        std::vector<ExprNode> out;
        const auto& nodes = tree.nodes();
        for (std::size_t i = 0; i < nodes.size();) {
            if (node_arity(nodes[i]) > 0 && depths[i] >= config.max_depth) {
                out.push_back(random_leaf(config, rng));
                i += static_cast<std::size_t>(tree.subtree_size(static_cast<int>(i)));
            } else {
                out.push_back(nodes[i]);
                ++i;
            }
        }
        tree = Expr(std::move(out));
    }
    while (tree.size() > config.max_size) {
        const auto depths = node_depths(tree);
        int pick = -1, pick_depth = -1;
        for (int i = 0; i < tree.size(); ++i) {
            const auto& node = tree.nodes()[static_cast<std::size_t>(i)];
            if (node_arity(node) == 0) continue;
            const int sub = tree.subtree_size(i);
            if (sub != 1 + node_arity(node)) continue;  // children not all leaves
            if (depths[static_cast<std::size_t>(i)] > pick_depth) {
                pick_depth = depths[static_cast<std::size_t>(i)];
                pick = i;
            }
        }
        if (pick < 0) break;  // single leaf already
        tree = splice(tree, pick, {random_leaf(config, rng)});
    }
    return tree;
}

}  // namespace

Expr random_tree(const GrowConfig& config, CounterRng& rng) {
    validate_grow_config(config);
    const int depth_target = static_cast<int>(rng.uniform_int(config.min_depth, config.max_depth));
    const bool full = rng.bernoulli(0.5);
    std::vector<ExprNode> nodes;
    grow_subtree(nodes, config, rng, depth_target, depth_target, config.max_size, full);
    return Expr(std::move(nodes));
}

Expr mutate(const Expr& f, const GrowConfig& config, CounterRng& rng) {
    validate_grow_config(config);
    const int at = static_cast<int>(rng.uniform_int(0, f.size() - 1));
    if (rng.bernoulli(0.5)) {
        // Point mutation: swap in a same-arity operator or a fresh leaf.
        std::vector<ExprNode> nodes = f.nodes();
        ExprNode& node = nodes[static_cast<std::size_t>(at)];
        if (node.kind == ExprNode::Kind::Operator) {
            const auto& pool = arity(node.op) == 1 ? kUnaryOps : kBinaryOps;
            node.op = pool[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
        } else {
            node = random_leaf(config, rng);
        }
        return Expr(std::move(nodes));
    }
    // Subtree replacement within the depth and size budget at this position.
    const int node_depth = node_depths(f)[static_cast<std::size_t>(at)];
    const int depth_room = std::max(1, config.max_depth - node_depth + 1);
    const int size_room = std::max(1, config.max_size - (f.size() - f.subtree_size(at)));
    const int depth_target = static_cast<int>(rng.uniform_int(1, depth_room));
    std::vector<ExprNode> replacement;
    grow_subtree(replacement, config, rng, depth_target, 1, size_room, false);
    return repair(splice(f, at, replacement), config, rng);
}

std::pair<Expr, Expr> crossover(const Expr& a, const Expr& b, const GrowConfig& config,
                                CounterRng& rng) {
    validate_grow_config(config);
    const int i = static_cast<int>(rng.uniform_int(0, a.size() - 1));
    const int j = static_cast<int>(rng.uniform_int(0, b.size() - 1));
    const auto& bn = b.nodes();
    const auto& an = a.nodes();
    std::vector<ExprNode> sub_b(bn.begin() + j, bn.begin() + j + b.subtree_size(j));
    std::vector<ExprNode> sub_a(an.begin() + i, an.begin() + i + a.subtree_size(i));
    Expr child1 = repair(splice(a, i, sub_b), config, rng);
    Expr child2 = repair(splice(b, j, sub_a), config, rng);
    return {std::move(child1), std::move(child2)};
}

BigramHistogram bigram_histogram(const Expr& f) {
    BigramHistogram counts;
    const auto& nodes = f.nodes();
    std::vector<std::pair<int, Op>> stack;  // (children remaining, parent op)
    for (const auto& node : nodes) {
        const bool is_op = node.kind == ExprNode::Kind::Operator;
        if (is_op && !stack.empty()) ++counts[{stack.back().second, node.op}];
        const int a = node_arity(node);
        if (a > 0) {
            stack.push_back({a, node.op});
        } else {
            while (!stack.empty() && --stack.back().first == 0) stack.pop_back();
        }
    }
    return counts;
}

std::string to_string(const Expr& f) {
    const auto& nodes = f.nodes();
    int pos = 0;
    std::string out;
    auto print = [&](auto&& self) -> void {
        const ExprNode& node = nodes[static_cast<std::size_t>(pos++)];
        switch (node.kind) {
            case ExprNode::Kind::Feature:
                out += 'x';
                out += std::to_string(node.feature);
                return;
            case ExprNode::Kind::Constant:
                out += format_shortest(node.value);
                return;
            case ExprNode::Kind::Operator:
                break;
        }
        out += op_name(node.op);
        out += '(';
        self(self);
        for (int c = 1; c < arity(node.op); ++c) {
            out += ',';
            self(self);
        }
        out += ')';
    };
    print(print);
    return out;
}

namespace {

class Parser {
public:
    Parser(std::string_view text, int n_features) : text_(text), n_features_(n_features) {}

    Expr run() {
        std::vector<ExprNode> nodes;
        parse_node(nodes);
        skip_spaces();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return Expr(std::move(nodes));
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError("syntax error: " + message, pos_ + 1);
    }

    void skip_spaces() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void expect(char c) {
        if (pos_ >= text_.size() || text_[pos_] != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void parse_node(std::vector<ExprNode>& out) {
        skip_spaces();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = peek();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            parse_name(out);
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
            parse_constant(out);
        } else {
            fail("expected operator, feature, or number");
        }
    }

    void parse_name(std::vector<ExprNode>& out) {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string_view word = text_.substr(start, pos_ - start);
        if (word == "x" && std::isdigit(static_cast<unsigned char>(peek()))) {
            int index = 0;
            const auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), index);
            if (res.ec != std::errc{}) fail("invalid feature index");
            pos_ = static_cast<std::size_t>(res.ptr - text_.data());
            if (index >= n_features_) {
                pos_ = start;
                fail("feature index out of range");
            }
            out.push_back(ExprNode{ExprNode::Kind::Feature, Op::Add, index, 0.0});
            return;
        }
        Op op = Op::Add;
        bool found = false;
        for (int k = 0; k < kNumOps; ++k) {
            if (word == kOpNames[static_cast<std::size_t>(k)]) {
                op = static_cast<Op>(k);
                found = true;
                break;
            }
        }
        if (!found) {
            pos_ = start;
            fail("unknown operator '" + std::string(word) + "'");
        }
        out.push_back(ExprNode{ExprNode::Kind::Operator, op, 0, 0.0});
        skip_spaces();
        expect('(');
        parse_node(out);
        for (int child = 1; child < arity(op); ++child) {
            skip_spaces();
            expect(',');
            parse_node(out);
        }
        skip_spaces();
        expect(')');
    }

    void parse_constant(std::vector<ExprNode>& out) {
        double value = 0.0;
        const auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
        if (res.ec != std::errc{}) fail("invalid number");
        pos_ = static_cast<std::size_t>(res.ptr - text_.data());
        out.push_back(ExprNode{ExprNode::Kind::Constant, Op::Add, 0, value});
    }

    std::string_view text_;
    int n_features_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, int n_features) {
    return Parser(text, n_features).run();
}

}  // namespace duelbench
