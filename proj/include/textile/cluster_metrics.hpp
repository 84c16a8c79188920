#pragma once

#include <span>
#include <string>
#include <vector>

namespace textile {

/// Pair-counting precision, recall and F-measure.
struct PairScores {
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
};

/// External quality of a clustering against a reference classification.
/// Both arguments give one group id per item; ids need not be contiguous.
double purity(std::span<const std::size_t> clusters, std::span<const std::size_t> classes);

/// Normalized mutual information I(L;A) / ((H(L) + H(A)) / 2) in bits.
/// Two single-group partitions are identical and score 1.
double nmi(std::span<const std::size_t> clusters, std::span<const std::size_t> classes);

double rand_index(std::span<const std::size_t> clusters, std::span<const std::size_t> classes);

/// Precision is 1 when no pair is put together, recall is 1 when no pair
/// belongs together; F is 0 when both are 0.
PairScores pair_prf(std::span<const std::size_t> clusters, std::span<const std::size_t> classes);

struct ClusterQuality {
    double purity = 0.0;
    double nmi = 0.0;
    double rand = 0.0;
    PairScores pairs;
};

ClusterQuality evaluate_clustering(std::span<const std::size_t> clusters, std::span<const std::size_t> classes);

/// Dense ids for string labels, in first-seen order.
std::vector<std::size_t> label_ids(std::span<const std::string> labels);

}  // namespace textile
