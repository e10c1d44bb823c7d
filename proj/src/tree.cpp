#include "duelbench/tree.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "duelbench/errors.hpp"

namespace duelbench {

double Tree::predict_row(const Eigen::Ref<const Eigen::VectorXd>& row) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<std::size_t>(i)];
        i = row[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
}

Eigen::VectorXd Tree::predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) out[r] = predict_row(X.row(r).transpose());
    return out;
}

int Tree::n_leaves() const {
    int c = 0;
    for (const auto& n : nodes) c += n.feature < 0;
    return c;
}

int Tree::depth() const {
    // Root depth 0; recursion depth bounded by tree depth.
    auto walk = [&](auto&& self, int i) -> int {
        const TreeNode& n = nodes[static_cast<std::size_t>(i)];
        if (n.feature < 0) return 0;
        return 1 + std::max(self(self, n.left), self(self, n.right));
    };
    return walk(walk, 0);
}

namespace {

struct GiniStats {
    double n = 0.0, pos = 0.0;
    void add(int label) { n += 1.0; pos += label; }
    GiniStats operator-(const GiniStats& o) const { return {n - o.n, pos - o.pos}; }
    double impurity() const {
        if (n <= 0.0) return 0.0;
        const double p = pos / n;
        return 1.0 - p * p - (1.0 - p) * (1.0 - p);
    }
};

struct GiniCriterion {
    using Stats = GiniStats;
    const Eigen::Ref<const Eigen::VectorXi>& y;
    void accumulate(Stats& s, int slot) const { s.add(y[slot]); }
    static double gain(const Stats& left, const Stats& right, const Stats& total) {
        return total.impurity() - (left.n / total.n) * left.impurity() -
               (right.n / total.n) * right.impurity();
    }
    static double leaf_value(const Stats& total) { return total.pos / total.n; }
    static bool splittable(const Stats& total) { return total.n >= 2.0; }
};

struct NewtonStats {
    double g = 0.0, h = 0.0, n = 0.0;
    NewtonStats operator-(const NewtonStats& o) const { return {g - o.g, h - o.h, n - o.n}; }
    double score() const { return g * g / (h + kLeafRidge); }
};

struct NewtonCriterion {
    using Stats = NewtonStats;
    const Eigen::Ref<const Eigen::VectorXd>& grad;
    const Eigen::Ref<const Eigen::VectorXd>& hess;
    void accumulate(Stats& s, int slot) const {
        s.g += grad[slot];
        s.h += hess[slot];
        s.n += 1.0;
    }
    static double gain(const Stats& left, const Stats& right, const Stats& total) {
        return left.score() + right.score() - total.score();
    }
    static double leaf_value(const Stats& total) { return total.g / (total.h + kLeafRidge); }
    static bool splittable(const Stats& total) { return total.n >= 2.0; }
};

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

std::vector<int> chosen_features(int n_features, const TreeBuildConfig& config, CounterRng* rng) {
    std::vector<int> all(static_cast<std::size_t>(n_features));
    std::iota(all.begin(), all.end(), 0);
    if (config.feature_subsample <= 0 || config.feature_subsample >= n_features) return all;
    if (!rng) throw ConfigError("tree builder: feature subsampling needs an rng");
    // Partial Fisher-Yates, then ascending order for the deterministic sweep.
    for (int i = 0; i < config.feature_subsample; ++i) {
        const auto j = rng->uniform_int(i, n_features - 1);
        std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
    }
    all.resize(static_cast<std::size_t>(config.feature_subsample));
    std::sort(all.begin(), all.end());
    return all;
}

template <class Criterion>
typename Criterion::Stats total_stats(const Criterion& crit, const std::vector<int>& slots) {
    typename Criterion::Stats total;
    for (int s : slots) crit.accumulate(total, s);
    return total;
}

/// Per-node bookkeeping: `slots` keeps the caller's relative row order (leaf
/// statistics accumulate in that order), `by_feature[f]` keeps the rows sorted
/// by (value, slot). Children inherit sortedness via stable partition, so the
/// sort runs once at the root instead of once per node.
struct NodeLists {
    std::vector<int> slots;
    std::vector<std::vector<int>> by_feature;
};

NodeLists root_lists(const Eigen::Ref<const Eigen::MatrixXd>& X, const std::vector<int>& slots) {
    NodeLists node;
    node.slots = slots;
    node.by_feature.resize(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index f = 0; f < X.cols(); ++f) {
        auto& order = node.by_feature[static_cast<std::size_t>(f)];
        order = slots;
        const auto col = X.col(f);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double va = col[a], vb = col[b];
            return va < vb || (va == vb && a < b);
        });
    }
    return node;
}

template <class Criterion>
SplitChoice best_split(const Eigen::Ref<const Eigen::MatrixXd>& X, const Criterion& crit,
                       const NodeLists& node, const typename Criterion::Stats& total,
                       const TreeBuildConfig& config, CounterRng* rng) {
    SplitChoice best;
    if (!Criterion::splittable(total)) return best;
    const auto features = chosen_features(static_cast<int>(X.cols()), config, rng);
    for (int f : features) {
        const auto& order = node.by_feature[static_cast<std::size_t>(f)];
        const auto col = X.col(f);
        typename Criterion::Stats left;
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            crit.accumulate(left, order[i]);
            const double lo = col[order[i]], hi = col[order[i + 1]];
            if (lo == hi) continue;
            double threshold = lo + 0.5 * (hi - lo);
            if (threshold >= hi) threshold = lo;  // defeat midpoint rounding
            const double gain = Criterion::gain(left, total - left, total);
            if (gain > best.gain + kMinSplitGain || (!best.found && gain > kMinSplitGain)) {
                best = {true, f, threshold, gain};
            }
        }
    }
    return best;
}

/// `fill_sorted` skips the per-feature lists when the children can never be
/// split again (depth cap), saving the partition work at the last level.
void partition_node(const Eigen::Ref<const Eigen::MatrixXd>& X, const NodeLists& node,
                    const SplitChoice& split, bool fill_sorted, NodeLists& left,
                    NodeLists& right) {
    const auto col = X.col(split.feature);
    const auto goes_left = [&](int s) { return col[s] <= split.threshold; };
    for (int s : node.slots) (goes_left(s) ? left : right).slots.push_back(s);
    left.by_feature.assign(node.by_feature.size(), {});
    right.by_feature.assign(node.by_feature.size(), {});
    if (!fill_sorted) return;
    for (std::size_t f = 0; f < node.by_feature.size(); ++f)
        for (int s : node.by_feature[f])
            (goes_left(s) ? left : right).by_feature[f].push_back(s);
}

template <class Criterion>
Tree build_tree(const Eigen::Ref<const Eigen::MatrixXd>& X, const Criterion& crit,
                const std::vector<int>& slots, const TreeBuildConfig& config, CounterRng* rng) {
    if (slots.empty()) throw ConfigError("tree builder: no training rows");
    Tree tree;

    struct Pending {
        int node;
        NodeLists lists;
        int depth;
        SplitChoice split;  // best-first only
    };

    const auto make_leaf = [&](const std::vector<int>& s) {
        TreeNode node;
        node.value = Criterion::leaf_value(total_stats(crit, s));
        tree.nodes.push_back(node);
        return static_cast<int>(tree.nodes.size()) - 1;
    };

    if (config.max_leaves > 0) {
        // Best-first: expand the candidate with the largest gain; ties keep
        // the earliest-created node.
        std::vector<Pending> cands;
        make_leaf(slots);
        NodeLists root = root_lists(X, slots);
        const SplitChoice root_split =
            best_split(X, crit, root, total_stats(crit, root.slots), config, rng);
        cands.push_back({0, std::move(root), 0, root_split});
        int leaves = 1;
        while (leaves < config.max_leaves) {
            int pick = -1;
            for (std::size_t i = 0; i < cands.size(); ++i) {
                if (!cands[i].split.found) continue;
                if (pick < 0 || cands[i].split.gain > cands[static_cast<std::size_t>(pick)].split.gain)
                    pick = static_cast<int>(i);
            }
            if (pick < 0) break;
            Pending cand = std::move(cands[static_cast<std::size_t>(pick)]);
            cands.erase(cands.begin() + pick);
            NodeLists ls, rs;
            partition_node(X, cand.lists, cand.split, true, ls, rs);
            const int li = make_leaf(ls.slots);
            const int ri = make_leaf(rs.slots);
            TreeNode& parent = tree.nodes[static_cast<std::size_t>(cand.node)];
            parent.feature = cand.split.feature;
            parent.threshold = cand.split.threshold;
            parent.left = li;
            parent.right = ri;
            const SplitChoice lsplit =
                best_split(X, crit, ls, total_stats(crit, ls.slots), config, rng);
            const SplitChoice rsplit =
                best_split(X, crit, rs, total_stats(crit, rs.slots), config, rng);
            cands.push_back({li, std::move(ls), cand.depth + 1, lsplit});
            cands.push_back({ri, std::move(rs), cand.depth + 1, rsplit});
            ++leaves;
        }
        return tree;
    }

    // Level-wise: breadth-first expansion down to max_depth.
    std::deque<Pending> queue;
    make_leaf(slots);
    queue.push_back({0, root_lists(X, slots), 0, {}});
    while (!queue.empty()) {
        Pending cand = std::move(queue.front());
        queue.pop_front();
        if (cand.depth >= config.max_depth) continue;
        const auto total = total_stats(crit, cand.lists.slots);
        const SplitChoice split = best_split(X, crit, cand.lists, total, config, rng);
        if (!split.found) continue;
        NodeLists ls, rs;
        partition_node(X, cand.lists, split, cand.depth + 1 < config.max_depth, ls, rs);
        const int li = make_leaf(ls.slots);
        const int ri = make_leaf(rs.slots);
        TreeNode& parent = tree.nodes[static_cast<std::size_t>(cand.node)];
        parent.feature = split.feature;
        parent.threshold = split.threshold;
        parent.left = li;
        parent.right = ri;
        queue.push_back({li, std::move(ls), cand.depth + 1, {}});
        queue.push_back({ri, std::move(rs), cand.depth + 1, {}});
    }
    return tree;
}

}  // namespace

Tree build_gini_tree(const Eigen::Ref<const Eigen::MatrixXd>& X,
                     const Eigen::Ref<const Eigen::VectorXi>& y, const std::vector<int>& slots,
                     const TreeBuildConfig& config, CounterRng* rng) {
    GiniCriterion crit{y};
    return build_tree(X, crit, slots, config, rng);
}

Tree build_newton_tree(const Eigen::Ref<const Eigen::MatrixXd>& X,
                       const Eigen::Ref<const Eigen::VectorXd>& grad,
                       const Eigen::Ref<const Eigen::VectorXd>& hess, const std::vector<int>& slots,
                       const TreeBuildConfig& config, CounterRng* rng) {
    NewtonCriterion crit{grad, hess};
    return build_tree(X, crit, slots, config, rng);
}

}  // namespace duelbench
