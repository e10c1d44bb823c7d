#include "duelbench/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "duelbench/errors.hpp"

namespace duelbench {

namespace {

struct ClassCounts {
    Eigen::Index positives = 0;
    Eigen::Index negatives = 0;
};

ClassCounts check_labels(const Eigen::Ref<const Eigen::VectorXd>& scores,
                         const Eigen::Ref<const Eigen::VectorXi>& labels) {
    if (scores.size() != labels.size()) throw ShapeError("scores and labels differ in length");
    if (scores.size() == 0) throw UndefinedMetricError("empty inputs");
    ClassCounts counts;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1)
            ++counts.positives;
        else if (labels[i] == 0)
            ++counts.negatives;
        else
            throw ConfigError("labels must be 0 or 1");
    }
    if (counts.positives == 0 || counts.negatives == 0)
        throw UndefinedMetricError("metric undefined: labels contain a single class");
    return counts;
}

// Indices sorted by score descending; equal scores keep ascending index order.
std::vector<Eigen::Index> descending_order(const Eigen::Ref<const Eigen::VectorXd>& scores) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    return order;
}

}  // namespace

double auroc(const Eigen::Ref<const Eigen::VectorXd>& scores,
             const Eigen::Ref<const Eigen::VectorXi>& labels) {
    const ClassCounts counts = check_labels(scores, labels);
    const Eigen::Index n = scores.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });

    // Average ranks over tie groups, then the Mann-Whitney U statistic.
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) positive_rank_sum += avg_rank;
        i = j;
    }
    const double n_pos = static_cast<double>(counts.positives);
    const double n_neg = static_cast<double>(counts.negatives);
    const double u = positive_rank_sum - n_pos * (n_pos + 1.0) / 2.0;
    return u / (n_pos * n_neg);
}

std::vector<RocPoint> roc_curve(const Eigen::Ref<const Eigen::VectorXd>& scores,
                                const Eigen::Ref<const Eigen::VectorXi>& labels) {
    const ClassCounts counts = check_labels(scores, labels);
    const auto order = descending_order(scores);
    std::vector<RocPoint> points;
    points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    Eigen::Index tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == threshold) {
            if (labels[order[j]] == 1)
                ++tp;
            else
                ++fp;
            ++j;
        }
        points.push_back({threshold, static_cast<double>(fp) / static_cast<double>(counts.negatives),
                          static_cast<double>(tp) / static_cast<double>(counts.positives)});
        i = j;
    }
    return points;
}

std::vector<PrcPoint> prc_curve(const Eigen::Ref<const Eigen::VectorXd>& scores,
                                const Eigen::Ref<const Eigen::VectorXi>& labels) {
    check_labels(scores, labels);
    const auto order = descending_order(scores);
    std::vector<PrcPoint> points;
    Eigen::Index tp = 0, fp = 0;
    const double n_pos = static_cast<double>((labels.array() == 1).count());
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == threshold) {
            if (labels[order[j]] == 1)
                ++tp;
            else
                ++fp;
            ++j;
        }
        points.push_back({threshold, static_cast<double>(tp) / n_pos,
                          static_cast<double>(tp) / static_cast<double>(tp + fp)});
        i = j;
    }
    return points;
}

double average_precision(const Eigen::Ref<const Eigen::VectorXd>& scores,
                         const Eigen::Ref<const Eigen::VectorXi>& labels) {
    const auto points = prc_curve(scores, labels);
    double ap = 0.0;
    double prev_recall = 0.0;
    for (const auto& point : points) {
        ap += (point.recall - prev_recall) * point.precision;
        prev_recall = point.recall;
    }
    return ap;
}

EvaluationResult evaluate_scores(const Eigen::Ref<const Eigen::VectorXd>& scores,
                                 const Eigen::Ref<const Eigen::VectorXi>& labels) {
    EvaluationResult result;
    result.auroc = auroc(scores, labels);
    result.roc_points = roc_curve(scores, labels);
    result.prc_points = prc_curve(scores, labels);
    result.average_precision = 0.0;
    double prev_recall = 0.0;
    for (const auto& point : result.prc_points) {
        result.average_precision += (point.recall - prev_recall) * point.precision;
        prev_recall = point.recall;
    }
    return result;
}

}  // namespace duelbench
