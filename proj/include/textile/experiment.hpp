#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "textile/clustering.hpp"
#include "textile/cluster_metrics.hpp"
#include "textile/corpus.hpp"
#include "textile/distance.hpp"
#include "textile/generators.hpp"
#include "textile/retrieval.hpp"

namespace textile {

/// Clustering method of a sweep cell: a HAC linkage or K-means.
struct Method {
    enum class Kind { None, Hac, KMeans };
    Kind kind = Kind::None;
    Linkage linkage = Linkage::Complete;

    std::string name() const;
    static Method parse(std::string_view text);  ///< none, ward, single, complete, average, kmeans
};

struct SweepConfig {
    std::vector<int> ks{4};
    std::vector<Measure> measures{Measure::Jaccard};
    std::vector<Method> methods;  ///< empty: retrieval only
    std::size_t m = 16;
    std::size_t max_iter = 5;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

struct SweepRow {
    int k = 0;
    Measure measure = Measure::Jaccard;
    Method method;
    RetrievalReport retrieval;
    std::optional<ClusterQuality> clustering;  ///< unset for retrieval-only rows
    std::string status = "ok";                 ///< "unsupported" for ward with a non-Euclidean measure
};

/// Runs a single clustering; shared by the cluster command and the sweep.
Clustering run_clustering(const FingerprintSet& set, const Method& method, Measure measure, std::size_t m,
                          std::size_t max_iter, std::uint64_t seed, unsigned jobs);

/// One row per (k, measure, method); retrieval columns are filled on every row.
std::vector<SweepRow> sweep(const Corpus& corpus, const SweepConfig& config);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// `recall_level,precision,f_measure` table preceded by `# map=` and `# mean_p_at_m=` lines.
void write_retrieval_csv(std::ostream& out, const RetrievalReport& report);

/// `purity,nmi,rand,precision,recall,f` header and one row.
void write_quality_csv(std::ostream& out, const ClusterQuality& quality);

struct BenchConfig {
    std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};  ///< crossings per graph
    std::vector<int> ks{2, 4, 8};
    std::vector<Measure> measures{std::begin(kAllMeasures), std::end(kAllMeasures)};
    std::size_t samples = 16;  ///< graphs per corpus
    std::size_t runs = 5;      ///< medians are taken over this many runs (at least 5)
    double min_run_seconds = 0.1;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

struct BenchRow {
    std::size_t crossings = 0;
    int k = 0;
    Measure measure = Measure::Jaccard;
    double fingerprint_seconds = 0.0;  ///< whole corpus
    double matrix_seconds = 0.0;
};

/// Wall-clock medians on perturbed plain-weave corpora of the given sizes.
std::vector<BenchRow> bench(const BenchConfig& config);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

struct ReproConfig {
    CorpusConfig corpus;
    std::string out_dir;
    unsigned jobs = 1;
};

/**
 * Regenerates the evaluation corpus and writes under out_dir:
 * corpus/ (TG1 files and manifest), retrieval.csv (k = 3, 4 over all
 * measures), clustering.csv (HAC and K-means with per-measure k) and
 * summary.txt.
 */
void repro(const ReproConfig& config);

/// Neighbourhood size used per measure when clustering: 2 for cos-tfidf,
/// 3 for cos-freq and Ward, 4 otherwise.
int clustering_k(Measure measure, const Method& method);

}  // namespace textile
