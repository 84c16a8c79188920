#include "textile/retrieval.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "textile/parallel.hpp"

namespace textile {

namespace {

void sort_hits(std::vector<RankedHit>& hits) {
    std::sort(hits.begin(), hits.end(), [](const RankedHit& x, const RankedHit& y) {
        return x.distance != y.distance ? x.distance < y.distance : x.item < y.item;
    });
}

bool relevant(const Qrels& qrels, std::size_t item, const std::string& category) {
    if (item >= qrels.size()) {
        throw std::out_of_range("item " + std::to_string(item) + " has no relevance label");
    }
    return qrels[item] == category;
}

std::size_t relevant_total(const RankedList& list, const Qrels& qrels, const std::string& category) {
    std::size_t m = 0;
    for (const auto& hit : list.hits) {
        m += relevant(qrels, hit.item, category);
    }
    return m;
}

}  // namespace

RankedList rank(std::span<const SparseVector> corpus, const SparseVector& query, Measure measure,
                const CorpusStats* stats, std::optional<std::size_t> exclude) {
    RankedList list;
    list.query = exclude;
    list.hits.reserve(corpus.size());
    if (measure == Measure::CosTfidf) {
        if (stats == nullptr) {
            throw MeasureError("cos-tfidf requires corpus statistics");
        }
        const SparseVector q = tfidf_weighted(query, *stats);
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (exclude && *exclude == i) {
                continue;
            }
            if (corpus[i].k() != query.k()) {
                throw MeasureError("fingerprints built with different k");
            }
            list.hits.push_back({i, cosine_distance(tfidf_weighted(corpus[i], *stats), q)});
        }
    } else {
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (exclude && *exclude == i) {
                continue;
            }
            list.hits.push_back({i, distance(measure, corpus[i], query, stats)});
        }
    }
    sort_hits(list.hits);
    return list;
}

RankedList rank_from_matrix(const DistanceMatrix& matrix, std::size_t query) {
    RankedList list;
    list.query = query;
    list.hits.reserve(matrix.size());
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        if (i != query) {
            list.hits.push_back({i, matrix(query, i)});
        }
    }
    sort_hits(list.hits);
    return list;
}

double average_precision(const RankedList& list, const Qrels& qrels, const std::string& category) {
    double sum = 0.0;
    std::size_t found = 0;
    for (std::size_t r = 0; r < list.hits.size(); ++r) {
        if (relevant(qrels, list.hits[r].item, category)) {
            ++found;
            sum += static_cast<double>(found) / static_cast<double>(r + 1);
        }
    }
    if (found == 0) {
        throw std::invalid_argument("average precision needs at least one relevant item for '" +
                                    category + "'");
    }
    return sum / static_cast<double>(found);
}

double precision_at(const RankedList& list, const Qrels& qrels, const std::string& category,
                    std::size_t cutoff) {
    if (cutoff == 0 || cutoff > list.hits.size()) {
        throw std::invalid_argument("cutoff " + std::to_string(cutoff) + " outside 1.." +
                                    std::to_string(list.hits.size()));
    }
    std::size_t hits = 0;
    for (std::size_t r = 0; r < cutoff; ++r) {
        hits += relevant(qrels, list.hits[r].item, category);
    }
    return static_cast<double>(hits) / static_cast<double>(cutoff);
}

RecallCurve interpolated_precision(const RankedList& list, const Qrels& qrels, const std::string& category) {
    const std::size_t m = relevant_total(list, qrels, category);
    if (m == 0) {
        throw std::invalid_argument("interpolated precision needs relevant items for '" + category + "'");
    }
    // (recall, precision) after each retrieved item.
    std::vector<std::pair<double, double>> points;
    points.reserve(list.hits.size());
    std::size_t found = 0;
    for (std::size_t r = 0; r < list.hits.size(); ++r) {
        found += relevant(qrels, list.hits[r].item, category);
        points.emplace_back(static_cast<double>(found) / static_cast<double>(m),
                            static_cast<double>(found) / static_cast<double>(r + 1));
    }
    RecallCurve curve{};
    for (std::size_t l = 0; l < kRecallLevels; ++l) {
        const double level = static_cast<double>(l) / 10.0;
        double best = 0.0;
        for (const auto& [recall, precision] : points) {
            if (recall >= level - 1e-12) {
                best = std::max(best, precision);
            }
        }
        curve[l] = best;
    }
    return curve;
}

RecallCurve f_from_precision(const RecallCurve& precision) {
    RecallCurve f{};
    for (std::size_t l = 0; l < kRecallLevels; ++l) {
        const double r = static_cast<double>(l) / 10.0;
        const double p = precision[l];
        f[l] = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    }
    return f;
}

double mean_ap(std::span<const QueryOutcome> queries, const Qrels& qrels) {
    if (queries.empty()) {
        throw std::invalid_argument("MAP over an empty query set");
    }
    double sum = 0.0;
    for (const auto& q : queries) {
        sum += average_precision(q.list, qrels, q.category);
    }
    return sum / static_cast<double>(queries.size());
}

double mean_precision_at_category_size(std::span<const QueryOutcome> queries, const Qrels& qrels) {
    if (queries.empty()) {
        throw std::invalid_argument("mean precision over an empty query set");
    }
    std::map<std::string, std::size_t> sizes;
    for (const auto& label : qrels) {
        ++sizes[label];
    }
    double sum = 0.0;
    for (const auto& q : queries) {
        const std::size_t cutoff = std::min(sizes[q.category], q.list.hits.size());
        sum += precision_at(q.list, qrels, q.category, cutoff);
    }
    return sum / static_cast<double>(queries.size());
}

RecallCurve interpolated_pr(std::span<const QueryOutcome> queries, const Qrels& qrels) {
    if (queries.empty()) {
        throw std::invalid_argument("PR curve over an empty query set");
    }
    RecallCurve mean{};
    for (const auto& q : queries) {
        const RecallCurve c = interpolated_precision(q.list, qrels, q.category);
        for (std::size_t l = 0; l < kRecallLevels; ++l) {
            mean[l] += c[l];
        }
    }
    for (auto& v : mean) {
        v /= static_cast<double>(queries.size());
    }
    return mean;
}

RecallCurve interpolated_fr(std::span<const QueryOutcome> queries, const Qrels& qrels) {
    if (queries.empty()) {
        throw std::invalid_argument("FR curve over an empty query set");
    }
    RecallCurve mean{};
    for (const auto& q : queries) {
        const RecallCurve f = f_from_precision(interpolated_precision(q.list, qrels, q.category));
        for (std::size_t l = 0; l < kRecallLevels; ++l) {
            mean[l] += f[l];
        }
    }
    for (auto& v : mean) {
        v /= static_cast<double>(queries.size());
    }
    return mean;
}

std::vector<QueryOutcome> leave_one_out(const DistanceMatrix& matrix, const Qrels& qrels, unsigned jobs) {
    if (qrels.size() != matrix.size()) {
        throw std::invalid_argument("relevance labels do not cover the corpus");
    }
    std::vector<QueryOutcome> out(matrix.size());
    parallel_for(matrix.size(), jobs, [&](std::size_t q) {
        out[q] = QueryOutcome{qrels[q], rank_from_matrix(matrix, q)};
    });
    return out;
}

RetrievalReport evaluate_retrieval(const DistanceMatrix& matrix, const Qrels& qrels, unsigned jobs) {
    const auto queries = leave_one_out(matrix, qrels, jobs);
    RetrievalReport report;
    report.map = mean_ap(queries, qrels);
    report.mean_p_at_m = mean_precision_at_category_size(queries, qrels);
    report.precision = interpolated_pr(queries, qrels);
    report.f_measure = interpolated_fr(queries, qrels);
    return report;
}

}  // namespace textile
