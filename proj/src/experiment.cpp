#include "textile/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

namespace textile {

std::string Method::name() const {
    switch (kind) {
        case Kind::None:
            return "none";
        case Kind::KMeans:
            return "kmeans";
        case Kind::Hac:
            return std::string(linkage_name(linkage));
    }
    return "none";
}

Method Method::parse(std::string_view text) {
    if (text == "none") {
        return {};
    }
    if (text == "kmeans") {
        return {Kind::KMeans, Linkage::Complete};
    }
    return {Kind::Hac, parse_linkage(text)};
}

int clustering_k(Measure measure, const Method& method) {
    if (method.kind == Method::Kind::Hac && method.linkage == Linkage::Ward) {
        return 3;
    }
    switch (measure) {
        case Measure::CosTfidf:
            return 2;
        case Measure::CosFreq:
            return 3;
        default:
            return 4;
    }
}

Clustering run_clustering(const FingerprintSet& set, const Method& method, Measure measure, std::size_t m,
                          std::size_t max_iter, std::uint64_t seed, unsigned jobs) {
    switch (method.kind) {
        case Method::Kind::None:
            throw std::invalid_argument("no clustering method given");
        case Method::Kind::KMeans:
            return kmeans(set.vectors, m, max_iter, measure, &set.stats, seed, jobs).clustering;
        case Method::Kind::Hac:
            return hac(set.vectors, m, method.linkage, measure, &set.stats, jobs);
    }
    throw std::invalid_argument("unknown clustering method");
}

std::vector<SweepRow> sweep(const Corpus& corpus, const SweepConfig& config) {
    const auto classes = label_ids(corpus.labels);
    std::vector<SweepRow> rows;
    for (const int k : config.ks) {
        const FingerprintSet set = fingerprint_corpus(corpus.graphs, k, config.jobs);
        for (const Measure measure : config.measures) {
            const DistanceMatrix matrix = distance_matrix(set.vectors, measure, &set.stats, config.jobs);
            const RetrievalReport retrieval = evaluate_retrieval(matrix, corpus.labels, config.jobs);
            if (config.methods.empty()) {
                rows.push_back({k, measure, Method{}, retrieval, std::nullopt, "ok"});
                continue;
            }
            for (const Method& method : config.methods) {
                SweepRow row{k, measure, method, retrieval, std::nullopt, "ok"};
                if (method.kind == Method::Kind::Hac && method.linkage == Linkage::Ward &&
                    measure != Measure::Euclid) {
                    row.status = "unsupported";
                } else if (method.kind == Method::Kind::Hac && method.linkage != Linkage::Ward) {
                    row.clustering = evaluate_clustering(hac(matrix, config.m, method.linkage).assignment(), classes);
                } else if (method.kind != Method::Kind::None) {
                    const Clustering c =
                        run_clustering(set, method, measure, config.m, config.max_iter, config.seed, config.jobs);
                    row.clustering = evaluate_clustering(c.assignment(), classes);
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "k,measure,method,map,mean_p_at_m,purity,nmi,rand,precision,recall,f,status\n";
    for (const auto& row : rows) {
        out << row.k << ',' << measure_name(row.measure) << ',' << row.method.name() << ','
            << format_double(row.retrieval.map) << ',' << format_double(row.retrieval.mean_p_at_m);
        if (row.clustering) {
            const ClusterQuality& q = *row.clustering;
            for (const double v : {q.purity, q.nmi, q.rand, q.pairs.precision, q.pairs.recall, q.pairs.f}) {
                out << ',' << format_double(v);
            }
        } else {
            out << ",,,,,,";
        }
        out << ',' << row.status << '\n';
    }
}

void write_retrieval_csv(std::ostream& out, const RetrievalReport& report) {
    out << "# map=" << format_double(report.map) << '\n';
    out << "# mean_p_at_m=" << format_double(report.mean_p_at_m) << '\n';
    out << "recall_level,precision,f_measure\n";
    for (std::size_t i = 0; i < kRecallLevels; ++i) {
        out << format_double(static_cast<double>(i) / 10.0) << ',' << format_double(report.precision[i]) << ','
            << format_double(report.f_measure[i]) << '\n';
    }
}

void write_quality_csv(std::ostream& out, const ClusterQuality& q) {
    out << "purity,nmi,rand,precision,recall,f\n";
    out << format_double(q.purity) << ',' << format_double(q.nmi) << ',' << format_double(q.rand) << ','
        << format_double(q.pairs.precision) << ',' << format_double(q.pairs.recall) << ','
        << format_double(q.pairs.f) << '\n';
}

namespace {

using Clock = std::chrono::steady_clock;

// Median over `runs` timings; each timing repeats `work` until it has run
// for at least `min_seconds` and reports the time per repetition.
template <typename Work>
double median_seconds(std::size_t runs, double min_seconds, Work&& work) {
    std::vector<double> samples;
    for (std::size_t r = 0; r < runs; ++r) {
        std::size_t reps = 0;
        const auto start = Clock::now();
        double elapsed = 0.0;
        do {
            work();
            ++reps;
            elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        } while (elapsed < min_seconds);
        samples.push_back(elapsed / static_cast<double>(reps));
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t mid = samples.size() / 2;
    return samples.size() % 2 == 1 ? samples[mid] : (samples[mid - 1] + samples[mid]) / 2.0;
}

std::vector<TextileGraph> plain_weave_corpus(std::size_t crossings, std::size_t samples, std::uint64_t seed) {
    // Near-square grids holding exactly the requested number of crossings when it factors well.
    int rows = static_cast<int>(std::lround(std::sqrt(static_cast<double>(crossings))));
    while (rows > 1 && crossings % static_cast<std::size_t>(rows) != 0) {
        --rows;
    }
    const int cols = static_cast<int>(crossings / static_cast<std::size_t>(rows));
    std::vector<TextileGraph> graphs;
    for (std::size_t i = 0; i < samples; ++i) {
        PatternSpec spec;
        spec.family = Family::PlainWeave;
        spec.rows = rows;
        spec.cols = cols;
        spec.seed = sample_seed(seed, 0, i);
        PerturbationPlan plan;
        plan.flip_fraction = 0.01;
        plan.seed = spec.seed ^ 0x9e3779b97f4a7c15ULL;
        graphs.push_back(perturb(generate(spec), plan).graph);
    }
    return graphs;
}

}  // namespace

std::vector<BenchRow> bench(const BenchConfig& config) {
    if (config.runs < 5) {
        throw std::invalid_argument("bench needs at least 5 runs");
    }
    std::vector<BenchRow> rows;
    for (const std::size_t size : config.sizes) {
        const auto graphs = plain_weave_corpus(size, config.samples, config.seed);
        for (const int k : config.ks) {
            const double fp_time = median_seconds(config.runs, config.min_run_seconds, [&] {
                for (const auto& g : graphs) {
                    const Fingerprint fp = fingerprint(g, k);
                    if (fp.total() != g.crossing_count()) {
                        throw std::logic_error("fingerprint lost crossings");
                    }
                }
            });
            const FingerprintSet set = fingerprint_corpus(graphs, k, config.jobs);
            for (const Measure measure : config.measures) {
                const double matrix_time = median_seconds(config.runs, config.min_run_seconds, [&] {
                    const DistanceMatrix d = distance_matrix(set.vectors, measure, &set.stats, config.jobs);
                    if (d.size() != graphs.size()) {
                        throw std::logic_error("matrix size mismatch");
                    }
                });
                rows.push_back({size, k, measure, fp_time, matrix_time});
            }
        }
    }
    return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "crossings,k,measure,fingerprint_seconds,matrix_seconds\n";
    for (const auto& row : rows) {
        out << row.crossings << ',' << row.k << ',' << measure_name(row.measure) << ','
            << format_double(row.fingerprint_seconds) << ',' << format_double(row.matrix_seconds) << '\n';
    }
}

namespace {

void open_or_throw(std::ofstream& out, const std::filesystem::path& path) {
    out.open(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

}  // namespace

void repro(const ReproConfig& config) {
    namespace fs = std::filesystem;
    const fs::path root(config.out_dir);
    fs::create_directories(root);

    CorpusConfig corpus_config = config.corpus;
    corpus_config.jobs = config.jobs;
    const auto items = generate_corpus(corpus_config);
    write_corpus(items, (root / "corpus").string());
    const Corpus corpus = load_corpus((root / "corpus").string());
    const auto classes = label_ids(corpus.labels);

    std::ofstream summary;
    open_or_throw(summary, root / "summary.txt");
    summary << "corpus " << corpus.size() << " items, hash " << corpus_hash(corpus) << '\n';

    SweepConfig retrieval_config;
    retrieval_config.ks = {3, 4};
    retrieval_config.measures.assign(std::begin(kAllMeasures), std::end(kAllMeasures));
    retrieval_config.jobs = config.jobs;
    const auto retrieval_rows = sweep(corpus, retrieval_config);
    {
        std::ofstream out;
        open_or_throw(out, root / "retrieval.csv");
        write_sweep_csv(out, retrieval_rows);
    }
    summary << "\nretrieval (MAP, MeanP@m)\n";
    for (const auto& row : retrieval_rows) {
        summary << "  k=" << row.k << ' ' << measure_name(row.measure) << ' ' << format_double(row.retrieval.map)
                << ' ' << format_double(row.retrieval.mean_p_at_m) << '\n';
    }

    // HAC on cosine/set measures with per-measure k, Ward on Euclidean, K-means at 5 and 10 iterations.
    std::map<int, FingerprintSet> sets;
    auto set_for = [&](int k) -> const FingerprintSet& {
        auto it = sets.find(k);
        if (it == sets.end()) {
            it = sets.emplace(k, fingerprint_corpus(corpus.graphs, k, config.jobs)).first;
        }
        return it->second;
    };
    std::ofstream clustering_out;
    open_or_throw(clustering_out, root / "clustering.csv");
    clustering_out << "algorithm,criterion,measure,k,max_iter,purity,nmi,rand,precision,recall,f\n";
    summary << "\nclustering (purity, NMI, RI, F)\n";
    auto report = [&](const std::string& algo, const std::string& criterion, Measure measure, int k,
                      std::size_t max_iter, const ClusterQuality& q) {
        clustering_out << algo << ',' << criterion << ',' << measure_name(measure) << ',' << k << ',' << max_iter;
        for (const double v : {q.purity, q.nmi, q.rand, q.pairs.precision, q.pairs.recall, q.pairs.f}) {
            clustering_out << ',' << format_double(v);
        }
        clustering_out << '\n';
        summary << "  " << algo << ' ' << criterion << ' ' << measure_name(measure) << " k=" << k;
        if (algo == "kmeans") {
            summary << " max_iter=" << max_iter;
        }
        summary << ' ' << format_double(q.purity) << ' ' << format_double(q.nmi) << ' ' << format_double(q.rand)
                << ' ' << format_double(q.pairs.f) << '\n';
    };
    const std::size_t m = corpus_config.categories.empty() ? kCategoryCount : corpus_config.categories.size();
    for (const Measure measure : {Measure::Jaccard, Measure::Overlap, Measure::CosFreq, Measure::CosTfidf}) {
        for (const Linkage linkage : {Linkage::Single, Linkage::Complete, Linkage::Average}) {
            const Method method{Method::Kind::Hac, linkage};
            const int k = clustering_k(measure, method);
            const FingerprintSet& set = set_for(k);
            const DistanceMatrix matrix = distance_matrix(set.vectors, measure, &set.stats, config.jobs);
            report("hac", std::string(linkage_name(linkage)), measure, k, 0,
                   evaluate_clustering(hac(matrix, m, linkage).assignment(), classes));
        }
    }
    {
        const Method ward{Method::Kind::Hac, Linkage::Ward};
        const int k = clustering_k(Measure::Euclid, ward);
        const Clustering c = run_clustering(set_for(k), ward, Measure::Euclid, m, 0, 0, config.jobs);
        report("hac", "ward", Measure::Euclid, k, 0, evaluate_clustering(c.assignment(), classes));
    }
    for (const Measure measure : kAllMeasures) {
        const Method km{Method::Kind::KMeans, Linkage::Complete};
        const int k = clustering_k(measure, km);
        for (const std::size_t max_iter : {std::size_t{5}, std::size_t{10}}) {
            const Clustering c = run_clustering(set_for(k), km, measure, m, max_iter, corpus_config.seed, config.jobs);
            report("kmeans", "-", measure, k, max_iter, evaluate_clustering(c.assignment(), classes));
        }
    }
}

}  // namespace textile
