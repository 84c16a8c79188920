#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textile/distance.hpp"

namespace textile {

/// Inter-cluster criterion for agglomerative clustering.
enum class Linkage { Ward, Single, Complete, Average };

std::string_view linkage_name(Linkage linkage) noexcept;
Linkage parse_linkage(std::string_view name);

/// Partition of item ids 0..n-1 plus where it came from.
struct Clustering {
    /// Each block sorted ascending; blocks ordered by their smallest member.
    std::vector<std::vector<std::size_t>> clusters;

    std::string algorithm;
    std::string measure;
    std::string criterion;
    int k = 0;
    std::uint64_t seed = 0;

    std::size_t item_count() const noexcept;
    /// Cluster index of every item.
    std::vector<std::size_t> assignment() const;
};

/// Componentwise mean of the member vectors.
SparseVector centroid(std::span<const SparseVector> vectors, std::span<const std::size_t> members);

/**
 * Distance between two disjoint, non-empty clusters.
 *
 * Single, complete and average linkage read only `chi`. Ward uses the
 * centroids of the member vectors: |u1||u2| / (|u1| + |u2|) * D_E(c1, c2)^2.
 */
double cluster_distance(std::span<const std::size_t> u1, std::span<const std::size_t> u2, Linkage criterion,
                        const DistanceMatrix* chi, std::span<const SparseVector> vectors = {});

/**
 * Agglomerative clustering down to m clusters.
 *
 * Starts from singletons and merges the closest pair until m remain. Ties go
 * to the pair whose clusters have the smallest member ids. Ward is defined on
 * Euclidean centroids only; passing any other measure with it is an error.
 */
Clustering hac(std::span<const SparseVector> vectors, std::size_t m, Linkage criterion,
               std::optional<Measure> measure, const CorpusStats* stats = nullptr, unsigned jobs = 1);

/// HAC on a precomputed distance matrix (single, complete or average linkage).
Clustering hac(const DistanceMatrix& chi, std::size_t m, Linkage criterion);

struct KMeansResult {
    Clustering clustering;
    std::vector<SparseVector> centroids;
    std::size_t iterations = 0;
    bool converged = false;
    /// Per iteration: sum of member-to-centroid distances under the measure.
    std::vector<double> objective;
    /// Per iteration: sum of squared Euclidean member-to-centroid distances.
    std::vector<double> sse;
};

/// Change tolerance per centroid component for the convergence test.
inline constexpr double kCentroidTolerance = 1e-9;

/**
 * Centroid clustering with m seeded random items as initial centroids.
 *
 * Each iteration assigns items to the closest centroid (ties to the lower
 * centroid index), refills empty clusters with the item farthest from its
 * centroid, and recomputes means. Stops when no centroid moves by more than
 * kCentroidTolerance in any component, or after max_iter iterations.
 */
KMeansResult kmeans(std::span<const SparseVector> vectors, std::size_t m, std::size_t max_iter, Measure measure,
                    const CorpusStats* stats, std::uint64_t seed, unsigned jobs = 1);

}  // namespace textile
