#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "textile/distance.hpp"

namespace textile {

struct RankedHit {
    std::size_t item;
    double distance;
};

/// Corpus items ordered most-similar first.
struct RankedList {
    std::optional<std::size_t> query;
    std::vector<RankedHit> hits;
};

/// Category label per corpus item.
using Qrels = std::vector<std::string>;

/**
 * Ranks every corpus item by ascending distance to `query`; ties go to the
 * lower item id. When `exclude` is set (the query is itself a corpus item) that
 * item is left out of the list.
 */
RankedList rank(std::span<const SparseVector> corpus, const SparseVector& query, Measure measure,
                const CorpusStats* stats = nullptr, std::optional<std::size_t> exclude = std::nullopt);

/// Ranking of corpus item `query` against the rest, read from a precomputed matrix.
RankedList rank_from_matrix(const DistanceMatrix& matrix, std::size_t query);

/// Mean of the precision values at the rank of each relevant item.
double average_precision(const RankedList& list, const Qrels& qrels, const std::string& category);

double precision_at(const RankedList& list, const Qrels& qrels, const std::string& category,
                    std::size_t cutoff);

inline constexpr std::size_t kRecallLevels = 11;
using RecallCurve = std::array<double, kRecallLevels>;

/// Interpolated precision of one ranking at recall 0.0, 0.1, ..., 1.0.
RecallCurve interpolated_precision(const RankedList& list, const Qrels& qrels, const std::string& category);

/// F-measure from an interpolated precision curve; 0 at recall level 0.
RecallCurve f_from_precision(const RecallCurve& precision);

struct QueryOutcome {
    std::string category;
    RankedList list;
};

double mean_ap(std::span<const QueryOutcome> queries, const Qrels& qrels);

/// Mean of P@cutoff where each query's cutoff is its category size.
double mean_precision_at_category_size(std::span<const QueryOutcome> queries, const Qrels& qrels);

/// Mean over queries of the 11-point interpolated precision.
RecallCurve interpolated_pr(std::span<const QueryOutcome> queries, const Qrels& qrels);

/// Mean over queries of the per-query interpolated F-measure.
RecallCurve interpolated_fr(std::span<const QueryOutcome> queries, const Qrels& qrels);

struct RetrievalReport {
    double map = 0.0;
    double mean_p_at_m = 0.0;
    RecallCurve precision{};
    RecallCurve f_measure{};
};

/// Every corpus item queried against all others.
std::vector<QueryOutcome> leave_one_out(const DistanceMatrix& matrix, const Qrels& qrels, unsigned jobs = 1);

RetrievalReport evaluate_retrieval(const DistanceMatrix& matrix, const Qrels& qrels, unsigned jobs = 1);

}  // namespace textile
