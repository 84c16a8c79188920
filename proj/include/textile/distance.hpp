#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "textile/fingerprint.hpp"

namespace textile {

/// Interned neighbourhood identifier.
using Key = std::uint32_t;

/// Assigns dense ids to neighbourhoods, in first-seen order.
class Vocabulary {
public:
    Key intern(const Neighbourhood& neighbourhood);
    std::optional<Key> find(const Neighbourhood& neighbourhood) const;
    const Neighbourhood& at(Key key) const { return entries_.at(key); }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<Neighbourhood, Key> ids_;
    std::vector<Neighbourhood> entries_;
};

/**
 * Sparse non-negative vector keyed by interned neighbourhoods.
 *
 * Entries are kept sorted by key with no explicit zeros, so every binary
 * measure is a single merge over the two supports. `k` tags the neighbourhood
 * size the vector came from (0 for untagged data).
 */
class SparseVector {
public:
    using Entry = std::pair<Key, double>;

    SparseVector() = default;
    SparseVector(std::initializer_list<Entry> entries, int k = 0);
    SparseVector(std::vector<Entry> entries, int k = 0);

    int k() const noexcept { return k_; }
    std::span<const Entry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    double get(Key key) const;
    double sum() const noexcept;

    bool operator==(const SparseVector&) const = default;

private:
    std::vector<Entry> entries_;
    int k_ = 0;
};

SparseVector to_sparse(const Fingerprint& fp, Vocabulary& vocabulary);

/// Document frequencies for TF-IDF weighting.
struct CorpusStats {
    std::size_t documents = 0;
    std::unordered_map<Key, std::size_t> doc_freq;

    std::size_t frequency(Key key) const;
    /// ln(N / f_p); throws when the key never occurs in the corpus.
    double idf(Key key) const;
};

CorpusStats corpus_stats(std::span<const SparseVector> vectors);

enum class Measure { Euclid, CosFreq, CosTfidf, HamBool, HamFreq, Jaccard, Overlap };

inline constexpr Measure kAllMeasures[] = {Measure::Euclid,  Measure::CosFreq, Measure::CosTfidf,
                                           Measure::HamBool, Measure::HamFreq, Measure::Jaccard,
                                           Measure::Overlap};

/// CLI / CSV name: euclid, cos-freq, cos-tfidf, ham-bool, ham-freq, jaccard, overlap.
std::string_view measure_name(Measure measure) noexcept;
Measure parse_measure(std::string_view name);

/// Raised when two operands cannot be compared (k mismatch, missing stats,
/// empty operands where a measure is undefined).
class MeasureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double euclidean(const SparseVector& a, const SparseVector& b);
double cosine_freq(const SparseVector& a, const SparseVector& b);
double cosine_tfidf(const SparseVector& a, const SparseVector& b, const CorpusStats& stats);
double hamming_bool(const SparseVector& a, const SparseVector& b);
double hamming_freq(const SparseVector& a, const SparseVector& b);
double jaccard(const SparseVector& a, const SparseVector& b);
double overlap(const SparseVector& a, const SparseVector& b);

/// Sublinear term frequency: 1 + ln(x) for x >= 1, x on (0, 1).
double tf_weight(double frequency) noexcept;

/// TF-IDF weighted copy of a frequency vector. Keys with zero weight drop out.
SparseVector tfidf_weighted(const SparseVector& v, const CorpusStats& stats);

/// Cosine distance between vectors that are already weighted.
double cosine_distance(const SparseVector& a, const SparseVector& b);

/// Dispatches on `measure`. `stats` is required for cos-tfidf only.
double distance(Measure measure, const SparseVector& a, const SparseVector& b,
                const CorpusStats* stats = nullptr);

/// Condensed symmetric matrix of pairwise distances (diagonal is zero).
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(std::size_t n, Measure measure, int k);

    std::size_t size() const noexcept { return n_; }
    Measure measure() const noexcept { return measure_; }
    int k() const noexcept { return k_; }

    double operator()(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, double value);
    std::span<const double> condensed() const noexcept { return values_; }

private:
    std::size_t index(std::size_t i, std::size_t j) const;

    std::size_t n_ = 0;
    Measure measure_ = Measure::Euclid;
    int k_ = 0;
    std::vector<double> values_;
};

/// All pairwise distances. Pairs may be evaluated on `jobs` threads; the
/// result does not depend on scheduling. Per-pair errors are rethrown with
/// the offending pair named.
DistanceMatrix distance_matrix(std::span<const SparseVector> vectors, Measure measure,
                               const CorpusStats* stats = nullptr, unsigned jobs = 1);

}  // namespace textile
