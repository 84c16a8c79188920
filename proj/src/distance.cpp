#include "textile/distance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "textile/parallel.hpp"

namespace textile {

Key Vocabulary::intern(const Neighbourhood& neighbourhood) {
    const auto [it, inserted] = ids_.try_emplace(neighbourhood, static_cast<Key>(entries_.size()));
    if (inserted) {
        entries_.push_back(neighbourhood);
    }
    return it->second;
}

std::optional<Key> Vocabulary::find(const Neighbourhood& neighbourhood) const {
    const auto it = ids_.find(neighbourhood);
    if (it == ids_.end()) {
        return std::nullopt;
    }
    return it->second;
}

SparseVector::SparseVector(std::initializer_list<Entry> entries, int k)
    : SparseVector(std::vector<Entry>(entries), k) {}

SparseVector::SparseVector(std::vector<Entry> entries, int k) : entries_(std::move(entries)), k_(k) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& x, const Entry& y) { return x.first < y.first; });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].first == entries_[i - 1].first) {
            throw std::invalid_argument("duplicate key " + std::to_string(entries_[i].first) +
                                        " in sparse vector");
        }
    }
    for (const auto& [key, value] : entries_) {
        if (!(value >= 0.0) || !std::isfinite(value)) {
            throw std::invalid_argument("sparse vector weights must be finite and non-negative");
        }
    }
    std::erase_if(entries_, [](const Entry& e) { return e.second == 0.0; });
}

double SparseVector::get(Key key) const {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                                     [](const Entry& e, Key k) { return e.first < k; });
    return (it != entries_.end() && it->first == key) ? it->second : 0.0;
}

double SparseVector::sum() const noexcept {
    double total = 0.0;
    for (const auto& e : entries_) {
        total += e.second;
    }
    return total;
}

SparseVector to_sparse(const Fingerprint& fp, Vocabulary& vocabulary) {
    std::vector<SparseVector::Entry> entries;
    entries.reserve(fp.distinct());
    for (const auto& [neighbourhood, count] : fp.counts()) {
        entries.emplace_back(vocabulary.intern(neighbourhood), static_cast<double>(count));
    }
    return SparseVector(std::move(entries), fp.k());
}

std::size_t CorpusStats::frequency(Key key) const {
    const auto it = doc_freq.find(key);
    return it == doc_freq.end() ? 0 : it->second;
}

double CorpusStats::idf(Key key) const {
    const std::size_t f = frequency(key);
    if (f == 0) {
        throw MeasureError("neighbourhood key " + std::to_string(key) + " absent from corpus statistics");
    }
    return std::log(static_cast<double>(documents) / static_cast<double>(f));
}

CorpusStats corpus_stats(std::span<const SparseVector> vectors) {
    if (vectors.empty()) {
        throw std::invalid_argument("corpus statistics need at least one document");
    }
    CorpusStats stats;
    stats.documents = vectors.size();
    for (const auto& v : vectors) {
        for (const auto& [key, value] : v.entries()) {
            ++stats.doc_freq[key];
        }
    }
    return stats;
}

std::string_view measure_name(Measure measure) noexcept {
    switch (measure) {
        case Measure::Euclid:
            return "euclid";
        case Measure::CosFreq:
            return "cos-freq";
        case Measure::CosTfidf:
            return "cos-tfidf";
        case Measure::HamBool:
            return "ham-bool";
        case Measure::HamFreq:
            return "ham-freq";
        case Measure::Jaccard:
            return "jaccard";
        case Measure::Overlap:
            return "overlap";
    }
    return "unknown";
}

Measure parse_measure(std::string_view name) {
    for (const Measure m : kAllMeasures) {
        if (measure_name(m) == name) {
            return m;
        }
    }
    throw std::invalid_argument("unknown measure '" + std::string(name) + "'");
}

namespace {

void require_same_k(const SparseVector& a, const SparseVector& b) {
    if (a.k() != b.k()) {
        throw MeasureError("fingerprints built with different k (" + std::to_string(a.k()) + " vs " +
                           std::to_string(b.k()) + ")");
    }
}

/// Calls fn(x, y) for every key in the union of both supports.
template <typename Fn>
void merge(const SparseVector& a, const SparseVector& b, Fn&& fn) {
    const auto ea = a.entries();
    const auto eb = b.entries();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ea.size() && j < eb.size()) {
        if (ea[i].first < eb[j].first) {
            fn(ea[i++].second, 0.0);
        } else if (eb[j].first < ea[i].first) {
            fn(0.0, eb[j++].second);
        } else {
            fn(ea[i++].second, eb[j++].second);
        }
    }
    for (; i < ea.size(); ++i) {
        fn(ea[i].second, 0.0);
    }
    for (; j < eb.size(); ++j) {
        fn(0.0, eb[j].second);
    }
}

double squared_norm(const SparseVector& v) {
    double s = 0.0;
    for (const auto& e : v.entries()) {
        s += e.second * e.second;
    }
    return s;
}

}  // namespace

double euclidean(const SparseVector& a, const SparseVector& b) {
    require_same_k(a, b);
    double s = 0.0;
    merge(a, b, [&s](double x, double y) { s += (x - y) * (x - y); });
    return std::sqrt(s);
}

double cosine_distance(const SparseVector& a, const SparseVector& b) {
    require_same_k(a, b);
    const double na = squared_norm(a);
    const double nb = squared_norm(b);
    if (na == 0.0 || nb == 0.0) {
        // A zero vector has no direction: equal to another zero vector, orthogonal to the rest.
        return (na == 0.0 && nb == 0.0) ? 0.0 : 1.0;
    }
    double dot = 0.0;
    const auto ea = a.entries();
    const auto eb = b.entries();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ea.size() && j < eb.size()) {
        if (ea[i].first < eb[j].first) {
            ++i;
        } else if (eb[j].first < ea[i].first) {
            ++j;
        } else {
            dot += ea[i++].second * eb[j++].second;
        }
    }
    return std::clamp(1.0 - dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double cosine_freq(const SparseVector& a, const SparseVector& b) { return cosine_distance(a, b); }

double tf_weight(double frequency) noexcept {
    if (frequency <= 0.0) {
        return 0.0;
    }
    return frequency >= 1.0 ? 1.0 + std::log(frequency) : frequency;
}

SparseVector tfidf_weighted(const SparseVector& v, const CorpusStats& stats) {
    std::vector<SparseVector::Entry> weighted;
    weighted.reserve(v.size());
    for (const auto& [key, value] : v.entries()) {
        const double w = tf_weight(value) * stats.idf(key);
        if (w > 0.0) {
            weighted.emplace_back(key, w);
        }
    }
    return SparseVector(std::move(weighted), v.k());
}

double cosine_tfidf(const SparseVector& a, const SparseVector& b, const CorpusStats& stats) {
    require_same_k(a, b);
    return cosine_distance(tfidf_weighted(a, stats), tfidf_weighted(b, stats));
}

double hamming_bool(const SparseVector& a, const SparseVector& b) {
    require_same_k(a, b);
    const auto ea = a.entries();
    const auto eb = b.entries();
    std::size_t differ = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ea.size() && j < eb.size()) {
        if (ea[i].first == eb[j].first) {
            differ += ea[i++].second != eb[j++].second;
        } else {
            ++differ;
            ea[i].first < eb[j].first ? ++i : ++j;
        }
    }
    differ += (ea.size() - i) + (eb.size() - j);
    return static_cast<double>(differ);
}

double hamming_freq(const SparseVector& a, const SparseVector& b) {
    require_same_k(a, b);
    double s = 0.0;
    merge(a, b, [&s](double x, double y) { s += std::abs(x - y); });
    return s;
}

double jaccard(const SparseVector& a, const SparseVector& b) {
    require_same_k(a, b);
    if (a.empty() && b.empty()) {
        throw MeasureError("jaccard distance is undefined for two empty fingerprints");
    }
    double diff = 0.0;
    double upper = 0.0;
    merge(a, b, [&](double x, double y) {
        diff += std::abs(x - y);
        upper += std::max(x, y);
    });
    return diff / upper;
}

double overlap(const SparseVector& a, const SparseVector& b) {
    require_same_k(a, b);
    if (a.empty() || b.empty()) {
        throw MeasureError("overlap distance is undefined for an empty fingerprint");
    }
    double shared = 0.0;
    merge(a, b, [&shared](double x, double y) { shared += std::min(x, y); });
    return std::clamp(1.0 - shared / std::min(a.sum(), b.sum()), 0.0, 1.0);
}

double distance(Measure measure, const SparseVector& a, const SparseVector& b, const CorpusStats* stats) {
    switch (measure) {
        case Measure::Euclid:
            return euclidean(a, b);
        case Measure::CosFreq:
            return cosine_freq(a, b);
        case Measure::CosTfidf:
            if (stats == nullptr) {
                throw MeasureError("cos-tfidf requires corpus statistics");
            }
            return cosine_tfidf(a, b, *stats);
        case Measure::HamBool:
            return hamming_bool(a, b);
        case Measure::HamFreq:
            return hamming_freq(a, b);
        case Measure::Jaccard:
            return jaccard(a, b);
        case Measure::Overlap:
            return overlap(a, b);
    }
    throw std::invalid_argument("unknown measure");
}

DistanceMatrix::DistanceMatrix(std::size_t n, Measure measure, int k)
    : n_(n), measure_(measure), k_(k), values_(n < 2 ? 0 : n * (n - 1) / 2, 0.0) {}

std::size_t DistanceMatrix::index(std::size_t i, std::size_t j) const {
    if (i > j) {
        std::swap(i, j);
    }
    // Row i of the upper triangle starts after sum_{r<i} (n - 1 - r) entries.
    return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

double DistanceMatrix::operator()(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) {
        throw std::out_of_range("distance matrix index out of range");
    }
    return i == j ? 0.0 : values_[index(i, j)];
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double value) {
    if (i == j || i >= n_ || j >= n_) {
        throw std::out_of_range("distance matrix index invalid");
    }
    values_[index(i, j)] = value;
}

DistanceMatrix distance_matrix(std::span<const SparseVector> vectors, Measure measure,
                               const CorpusStats* stats, unsigned jobs) {
    if (measure == Measure::CosTfidf && stats == nullptr) {
        throw MeasureError("cos-tfidf requires corpus statistics");
    }
    const std::size_t n = vectors.size();
    const int k = n == 0 ? 0 : vectors.front().k();
    DistanceMatrix matrix(n, measure, k);

    std::vector<SparseVector> weighted;
    if (measure == Measure::CosTfidf) {
        weighted.resize(n);
        parallel_for(n, jobs, [&](std::size_t i) { weighted[i] = tfidf_weighted(vectors[i], *stats); });
    }

    parallel_for(n, jobs, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            try {
                const double d = measure == Measure::CosTfidf
                                     ? (require_same_k(vectors[i], vectors[j]),
                                        cosine_distance(weighted[i], weighted[j]))
                                     : distance(measure, vectors[i], vectors[j], stats);
                matrix.set(i, j, d);
            } catch (const MeasureError& e) {
                throw MeasureError("pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                   "): " + e.what());
            }
        }
    });
    return matrix;
}

}  // namespace textile
