#include "textile/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "textile/parallel.hpp"

namespace textile {

std::string_view linkage_name(Linkage linkage) noexcept {
    switch (linkage) {
        case Linkage::Ward:
            return "ward";
        case Linkage::Single:
            return "single";
        case Linkage::Complete:
            return "complete";
        case Linkage::Average:
            return "average";
    }
    return "unknown";
}

Linkage parse_linkage(std::string_view name) {
    for (const Linkage l : {Linkage::Ward, Linkage::Single, Linkage::Complete, Linkage::Average}) {
        if (linkage_name(l) == name) {
            return l;
        }
    }
    throw std::invalid_argument("unknown criterion '" + std::string(name) + "'");
}

std::size_t Clustering::item_count() const noexcept {
    std::size_t n = 0;
    for (const auto& c : clusters) {
        n += c.size();
    }
    return n;
}

std::vector<std::size_t> Clustering::assignment() const {
    std::vector<std::size_t> out(item_count());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (const std::size_t item : clusters[c]) {
            out.at(item) = c;
        }
    }
    return out;
}

SparseVector centroid(std::span<const SparseVector> vectors, std::span<const std::size_t> members) {
    if (members.empty()) {
        throw std::invalid_argument("centroid of an empty cluster");
    }
    std::map<Key, double> sums;
    for (const std::size_t i : members) {
        for (const auto& [key, value] : vectors[i].entries()) {
            sums[key] += value;
        }
    }
    std::vector<SparseVector::Entry> entries;
    entries.reserve(sums.size());
    const double size = static_cast<double>(members.size());
    for (const auto& [key, total] : sums) {
        entries.emplace_back(key, total / size);
    }
    return SparseVector(std::move(entries), vectors[members.front()].k());
}

namespace {

double ward_value(std::size_t n1, const SparseVector& c1, std::size_t n2, const SparseVector& c2) {
    const double d = euclidean(c1, c2);
    const double a = static_cast<double>(n1);
    const double b = static_cast<double>(n2);
    return a * b / (a + b) * d * d;
}

double linkage_from_matrix(std::span<const std::size_t> u1, std::span<const std::size_t> u2, Linkage criterion,
                           const DistanceMatrix& chi) {
    double best_min = std::numeric_limits<double>::infinity();
    double best_max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const std::size_t r : u1) {
        for (const std::size_t s : u2) {
            const double d = chi(r, s);
            best_min = std::min(best_min, d);
            best_max = std::max(best_max, d);
            sum += d;
        }
    }
    switch (criterion) {
        case Linkage::Single:
            return best_min;
        case Linkage::Complete:
            return best_max;
        case Linkage::Average:
            return sum / static_cast<double>(u1.size() * u2.size());
        case Linkage::Ward:
            break;
    }
    throw std::invalid_argument("ward linkage needs member vectors");
}

void check_m(std::size_t m, std::size_t n) {
    if (m < 1 || m > n) {
        throw std::invalid_argument("cluster count m=" + std::to_string(m) + " outside 1.." +
                                    std::to_string(n));
    }
}

/// Shared merge loop. `distance_fn(i, j)` gives the criterion value between
/// the current clusters held in slots i and j.
template <typename DistanceFn, typename MergeFn>
std::vector<std::vector<std::size_t>> agglomerate(std::size_t n, std::size_t m, DistanceFn&& distance_fn,
                                                  MergeFn&& on_merge) {
    // Slot i holds the cluster whose smallest member is i.
    std::vector<std::vector<std::size_t>> members(n);
    std::vector<char> alive(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        members[i] = {i};
    }
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d[i * n + j] = d[j * n + i] = distance_fn(members, i, j);
        }
    }

    std::size_t live = n;
    while (live > m) {
        std::size_t bi = 0;
        std::size_t bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) {
                continue;
            }
            const double* row = &d[i * n];
            for (std::size_t j = i + 1; j < n; ++j) {
                if (alive[j] && row[j] < best) {
                    best = row[j];
                    bi = i;
                    bj = j;
                }
            }
        }
        if (!std::isfinite(best)) {
            throw std::runtime_error("agglomerative clustering found no finite cluster distance");
        }
        auto& target = members[bi];
        target.insert(target.end(), members[bj].begin(), members[bj].end());
        std::sort(target.begin(), target.end());
        members[bj].clear();
        alive[bj] = 0;
        --live;
        on_merge(members, bi);
        for (std::size_t l = 0; l < n; ++l) {
            if (alive[l] && l != bi) {
                d[bi * n + l] = d[l * n + bi] = distance_fn(members, std::min(bi, l), std::max(bi, l));
            }
        }
    }

    std::vector<std::vector<std::size_t>> out;
    out.reserve(m);
    for (std::size_t i = 0; i < n; ++i) {
        if (alive[i]) {
            out.push_back(std::move(members[i]));
        }
    }
    return out;
}

}  // namespace

double cluster_distance(std::span<const std::size_t> u1, std::span<const std::size_t> u2, Linkage criterion,
                        const DistanceMatrix* chi, std::span<const SparseVector> vectors) {
    if (u1.empty() || u2.empty()) {
        throw std::invalid_argument("cluster distance between empty clusters");
    }
    if (criterion == Linkage::Ward) {
        if (vectors.empty()) {
            throw std::invalid_argument("ward linkage needs member vectors");
        }
        return ward_value(u1.size(), centroid(vectors, u1), u2.size(), centroid(vectors, u2));
    }
    if (chi == nullptr) {
        throw std::invalid_argument("linkage criterion needs a distance matrix");
    }
    return linkage_from_matrix(u1, u2, criterion, *chi);
}

Clustering hac(const DistanceMatrix& chi, std::size_t m, Linkage criterion) {
    if (criterion == Linkage::Ward) {
        throw std::invalid_argument("ward linkage needs member vectors, not a distance matrix");
    }
    check_m(m, chi.size());
    Clustering out;
    out.clusters = agglomerate(
        chi.size(), m,
        [&](const std::vector<std::vector<std::size_t>>& members, std::size_t i, std::size_t j) {
            return linkage_from_matrix(members[i], members[j], criterion, chi);
        },
        [](const std::vector<std::vector<std::size_t>>&, std::size_t) {});
    out.algorithm = "hac";
    out.measure = std::string(measure_name(chi.measure()));
    out.criterion = std::string(linkage_name(criterion));
    out.k = chi.k();
    return out;
}

Clustering hac(std::span<const SparseVector> vectors, std::size_t m, Linkage criterion,
               std::optional<Measure> measure, const CorpusStats* stats, unsigned jobs) {
    check_m(m, vectors.size());
    if (criterion != Linkage::Ward) {
        if (!measure) {
            throw std::invalid_argument("linkage '" + std::string(linkage_name(criterion)) +
                                        "' needs a distance measure");
        }
        return hac(distance_matrix(vectors, *measure, stats, jobs), m, criterion);
    }
    if (measure && *measure != Measure::Euclid) {
        throw std::invalid_argument("ward linkage is defined on Euclidean centroids; got measure '" +
                                    std::string(measure_name(*measure)) + "'");
    }

    std::vector<SparseVector> centroids(vectors.begin(), vectors.end());
    Clustering out;
    out.clusters = agglomerate(
        vectors.size(), m,
        [&](const std::vector<std::vector<std::size_t>>& members, std::size_t i, std::size_t j) {
            return ward_value(members[i].size(), centroids[i], members[j].size(), centroids[j]);
        },
        [&](const std::vector<std::vector<std::size_t>>& members, std::size_t merged) {
            centroids[merged] = centroid(vectors, members[merged]);
        });
    out.algorithm = "hac";
    out.measure = std::string(measure_name(Measure::Euclid));
    out.criterion = std::string(linkage_name(Linkage::Ward));
    out.k = vectors.empty() ? 0 : vectors.front().k();
    return out;
}

namespace {

double max_component_change(const SparseVector& a, const SparseVector& b) {
    double worst = 0.0;
    const auto ea = a.entries();
    const auto eb = b.entries();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ea.size() || j < eb.size()) {
        if (j == eb.size() || (i < ea.size() && ea[i].first < eb[j].first)) {
            worst = std::max(worst, ea[i++].second);
        } else if (i == ea.size() || eb[j].first < ea[i].first) {
            worst = std::max(worst, eb[j++].second);
        } else {
            worst = std::max(worst, std::abs(ea[i++].second - eb[j++].second));
        }
    }
    return worst;
}

}  // namespace

KMeansResult kmeans(std::span<const SparseVector> vectors, std::size_t m, std::size_t max_iter, Measure measure,
                    const CorpusStats* stats, std::uint64_t seed, unsigned jobs) {
    const std::size_t n = vectors.size();
    check_m(m, n);
    if (max_iter < 1) {
        throw std::invalid_argument("max_iter must be at least 1");
    }
    if (measure == Measure::CosTfidf && stats == nullptr) {
        throw MeasureError("cos-tfidf requires corpus statistics");
    }

    // Items in the space the measure compares; cos-tfidf compares weighted vectors.
    const bool weighted = measure == Measure::CosTfidf;
    std::vector<SparseVector> items;
    if (weighted) {
        items.resize(n);
        parallel_for(n, jobs, [&](std::size_t i) { items[i] = tfidf_weighted(vectors[i], *stats); });
    }
    auto item_distance = [&](std::size_t i, const SparseVector& c, const SparseVector& c_weighted) {
        return weighted ? cosine_distance(items[i], c_weighted) : distance(measure, vectors[i], c, stats);
    };

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) {
        all[i] = i;
    }
    std::vector<std::size_t> init;
    init.reserve(m);
    std::sample(all.begin(), all.end(), std::back_inserter(init), static_cast<std::ptrdiff_t>(m), rng);

    KMeansResult result;
    for (const std::size_t i : init) {
        result.centroids.push_back(vectors[i]);
    }

    std::vector<std::size_t> assign(n, 0);
    std::vector<double> assigned_distance(n, 0.0);
    std::vector<SparseVector> centroid_weighted(m);

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        if (weighted) {
            for (std::size_t c = 0; c < m; ++c) {
                centroid_weighted[c] = tfidf_weighted(result.centroids[c], *stats);
            }
        }
        parallel_for(n, jobs, [&](std::size_t i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < m; ++c) {
                const double d = item_distance(i, result.centroids[c], centroid_weighted[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            assign[i] = best;
            assigned_distance[i] = best_d;
        });

        double objective = 0.0;
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            objective += assigned_distance[i];
            const double e = euclidean(vectors[i], result.centroids[assign[i]]);
            sse += e * e;
        }
        result.objective.push_back(objective);
        result.sse.push_back(sse);

        // Empty clusters take the item farthest from its centroid (ties: lowest id)
        // among clusters that can spare a member.
        std::vector<std::size_t> sizes(m, 0);
        for (const std::size_t c : assign) {
            ++sizes[c];
        }
        for (std::size_t c = 0; c < m; ++c) {
            if (sizes[c] != 0) {
                continue;
            }
            std::size_t pick = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[assign[i]] > 1 && (pick == n || assigned_distance[i] > assigned_distance[pick])) {
                    pick = i;
                }
            }
            --sizes[assign[pick]];
            assign[pick] = c;
            assigned_distance[pick] = 0.0;
            sizes[c] = 1;
        }

        std::vector<std::vector<std::size_t>> members(m);
        for (std::size_t i = 0; i < n; ++i) {
            members[assign[i]].push_back(i);
        }
        bool changed = false;
        for (std::size_t c = 0; c < m; ++c) {
            SparseVector next = centroid(vectors, members[c]);
            if (max_component_change(next, result.centroids[c]) > kCentroidTolerance) {
                changed = true;
            }
            result.centroids[c] = std::move(next);
        }
        result.iterations = iter + 1;
        if (!changed) {
            result.converged = true;
            break;
        }
    }

    std::vector<std::vector<std::size_t>> blocks(m);
    for (std::size_t i = 0; i < n; ++i) {
        blocks[assign[i]].push_back(i);
    }
    std::erase_if(blocks, [](const auto& b) { return b.empty(); });
    std::sort(blocks.begin(), blocks.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });

    result.clustering.clusters = std::move(blocks);
    result.clustering.algorithm = "kmeans";
    result.clustering.measure = std::string(measure_name(measure));
    result.clustering.criterion = "centroid";
    result.clustering.k = n == 0 ? 0 : vectors.front().k();
    result.clustering.seed = seed;
    return result;
}

}  // namespace textile
