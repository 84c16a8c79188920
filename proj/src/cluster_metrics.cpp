#include "textile/cluster_metrics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace textile {

namespace {

struct Contingency {
    std::size_t n = 0;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> joint;
    std::map<std::size_t, std::size_t> rows;  // cluster sizes
    std::map<std::size_t, std::size_t> cols;  // class sizes
};

Contingency tabulate(std::span<const std::size_t> clusters, std::span<const std::size_t> classes) {
    if (clusters.size() != classes.size()) {
        throw std::invalid_argument("clustering covers " + std::to_string(clusters.size()) +
                                    " items, reference covers " + std::to_string(classes.size()));
    }
    if (clusters.empty()) {
        throw std::invalid_argument("cannot score an empty clustering");
    }
    Contingency t;
    t.n = clusters.size();
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        ++t.joint[{clusters[i], classes[i]}];
        ++t.rows[clusters[i]];
        ++t.cols[classes[i]];
    }
    return t;
}

double pairs(std::size_t x) { return static_cast<double>(x) * static_cast<double>(x - (x > 0)) / 2.0; }

double entropy(const std::map<std::size_t, std::size_t>& sizes, std::size_t n) {
    double h = 0.0;
    for (const auto& [id, size] : sizes) {
        const double p = static_cast<double>(size) / static_cast<double>(n);
        h -= p * std::log2(p);
    }
    return h;
}

struct PairCounts {
    double tp = 0.0;
    double fp = 0.0;
    double fn = 0.0;
    double tn = 0.0;
};

PairCounts count_pairs(const Contingency& t) {
    PairCounts c;
    double same_cell = 0.0;
    for (const auto& [cell, size] : t.joint) {
        same_cell += pairs(size);
    }
    double same_cluster = 0.0;
    for (const auto& [id, size] : t.rows) {
        same_cluster += pairs(size);
    }
    double same_class = 0.0;
    for (const auto& [id, size] : t.cols) {
        same_class += pairs(size);
    }
    c.tp = same_cell;
    c.fp = same_cluster - same_cell;
    c.fn = same_class - same_cell;
    c.tn = pairs(t.n) - c.tp - c.fp - c.fn;
    return c;
}

}  // namespace

double purity(std::span<const std::size_t> clusters, std::span<const std::size_t> classes) {
    const Contingency t = tabulate(clusters, classes);
    std::map<std::size_t, std::size_t> best;
    for (const auto& [cell, size] : t.joint) {
        auto& b = best[cell.first];
        b = std::max(b, size);
    }
    std::size_t correct = 0;
    for (const auto& [cluster, size] : best) {
        correct += size;
    }
    return static_cast<double>(correct) / static_cast<double>(t.n);
}

double nmi(std::span<const std::size_t> clusters, std::span<const std::size_t> classes) {
    const Contingency t = tabulate(clusters, classes);
    const double n = static_cast<double>(t.n);
    double mutual = 0.0;
    for (const auto& [cell, size] : t.joint) {
        const double joint = static_cast<double>(size);
        const double rows = static_cast<double>(t.rows.at(cell.first));
        const double cols = static_cast<double>(t.cols.at(cell.second));
        mutual += joint / n * std::log2(n * joint / (rows * cols));
    }
    const double h = entropy(t.rows, t.n) + entropy(t.cols, t.n);
    if (h == 0.0) {
        return 1.0;
    }
    return std::max(0.0, mutual / (h / 2.0));
}

double rand_index(std::span<const std::size_t> clusters, std::span<const std::size_t> classes) {
    const Contingency t = tabulate(clusters, classes);
    const PairCounts c = count_pairs(t);
    const double total = c.tp + c.fp + c.fn + c.tn;
    return total == 0.0 ? 1.0 : (c.tp + c.tn) / total;
}

PairScores pair_prf(std::span<const std::size_t> clusters, std::span<const std::size_t> classes) {
    const PairCounts c = count_pairs(tabulate(clusters, classes));
    PairScores s;
    s.precision = (c.tp + c.fp) == 0.0 ? 1.0 : c.tp / (c.tp + c.fp);
    s.recall = (c.tp + c.fn) == 0.0 ? 1.0 : c.tp / (c.tp + c.fn);
    s.f = (s.precision + s.recall) == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

ClusterQuality evaluate_clustering(std::span<const std::size_t> clusters, std::span<const std::size_t> classes) {
    ClusterQuality q;
    q.purity = purity(clusters, classes);
    q.nmi = nmi(clusters, classes);
    q.rand = rand_index(clusters, classes);
    q.pairs = pair_prf(clusters, classes);
    return q;
}

std::vector<std::size_t> label_ids(std::span<const std::string> labels) {
    std::map<std::string, std::size_t> ids;
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto& label : labels) {
        const auto [it, inserted] = ids.try_emplace(label, ids.size());
        out.push_back(it->second);
    }
    return out;
}

}  // namespace textile
