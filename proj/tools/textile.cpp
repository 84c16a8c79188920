// Command-line front end for the textile library.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "textile/cluster_metrics.hpp"
#include "textile/clustering.hpp"
#include "textile/corpus.hpp"
#include "textile/distance.hpp"
#include "textile/experiment.hpp"
#include "textile/fingerprint.hpp"
#include "textile/generators.hpp"
#include "textile/graph.hpp"
#include "textile/retrieval.hpp"

namespace fs = std::filesystem;
using namespace textile;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Output goes to a file, or to stdout for "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (path != "-") {
            if (const fs::path parent = fs::path(path).parent_path(); !parent.empty()) {
                fs::create_directories(parent);
            }
            file_.open(path);
            if (!file_) {
                throw std::runtime_error("cannot write " + path);
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    void close() {
        stream().flush();
        if (!stream()) {
            throw std::runtime_error("write failed");
        }
    }

private:
    std::ofstream file_;
};

std::vector<Measure> parse_measures(const std::vector<std::string>& names) {
    std::vector<Measure> out;
    for (const auto& n : names) {
        if (n == "all") {
            out.insert(out.end(), std::begin(kAllMeasures), std::end(kAllMeasures));
        } else {
            out.push_back(parse_measure(n));
        }
    }
    return out;
}

Measure measure_arg(const std::string& name) {
    try {
        return parse_measure(name);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

void check_k(int k) {
    if (k < 1) {
        throw UsageError("--k must be at least 1");
    }
}

// Appends `--key=value` for every config entry whose flag is not already on
// the command line. Lines are `key=value`; `#` starts a comment.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (config_path.empty()) {
        return args;
    }
    std::ifstream in(config_path);
    if (!in) {
        throw UsageError("cannot read config file " + config_path);
    }
    std::set<std::string> present;
    for (const auto& a : args) {
        if (a.rfind("--", 0) == 0) {
            present.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
        }
    }
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(config_path + ":" + std::to_string(number) + ": expected key=value");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        if (key.rfind("--", 0) == 0) {
            key.erase(0, 2);
        }
        if (present.count(key) != 0) {
            continue;
        }
        if (value == "true") {
            args.push_back("--" + key);
        } else if (value != "false") {
            args.push_back("--" + key + "=" + value);
        }
    }
    return args;
}

FingerprintSet fingerprints_of(const Corpus& corpus, int k, unsigned jobs) {
    if (corpus.size() == 0) {
        throw std::runtime_error("corpus is empty");
    }
    return fingerprint_corpus(corpus.graphs, k, jobs);
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = expand_config(std::move(args));
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    CLI::App app{"Textile crossing graphs: generation, fingerprints, retrieval and clustering"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned jobs = 1;
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1U, 1024U));
    app.add_option("--config", "Flat key=value file supplying any flag");  // consumed before parsing

    // generate
    auto* gen = app.add_subcommand("generate", "Write a labelled synthetic corpus");
    std::vector<std::string> families;
    std::size_t samples = 25;
    std::optional<int> rows;
    std::optional<int> cols;
    std::vector<int> size_range;
    CorpusConfig corpus_config;
    std::string gen_out;
    bool full_scale = false;
    gen->add_option("--families", families, "Category names (default: all sixteen)")->delimiter(',');
    gen->add_option("--samples", samples, "Samples per category")->check(CLI::PositiveNumber);
    gen->add_option("--rows", rows, "Fixed grid rows")->check(CLI::PositiveNumber);
    gen->add_option("--cols", cols, "Fixed grid columns")->check(CLI::PositiveNumber);
    gen->add_option("--size-range", size_range, "Min and max grid dimension, e.g. 16,32")
        ->delimiter(',')
        ->expected(2);
    gen->add_option("--flip-rate", corpus_config.flip_rate, "Fraction of crossings flipped")
        ->check(CLI::Range(0.0, 1.0));
    gen->add_option("--rotate-rate", corpus_config.rotate_rate, "Probability of a rotation")
        ->check(CLI::Range(0.0, 1.0));
    gen->add_option("--mirror-rate", corpus_config.mirror_rate, "Probability of a mirror image")
        ->check(CLI::Range(0.0, 1.0));
    gen->add_option("--seed", corpus_config.seed, "Master seed");
    gen->add_flag("--full-scale", full_scale, "100 samples per category of about 72x72");
    gen->add_option("--out", gen_out, "Output directory")->required();

    // fingerprint
    auto* fpc = app.add_subcommand("fingerprint", "Write k-neighbourhood fingerprints as CSV");
    int fp_k = 4;
    std::string fp_in;
    std::string fp_out = "-";
    fpc->add_option("--k", fp_k, "Neighbourhood size")->required();
    fpc->add_option("--in", fp_in, "TG1 file, corpus directory or manifest")->required();
    fpc->add_option("--out", fp_out, "CSV path or - for stdout");

    // query
    auto* qry = app.add_subcommand("query", "Rank a corpus against query patterns");
    int q_k = 4;
    std::string q_measure = "jaccard";
    std::string q_corpus;
    std::string q_query = "all";
    std::string q_out = "-";
    std::optional<std::size_t> q_top;
    qry->add_option("--k", q_k, "Neighbourhood size");
    qry->add_option("--measure", q_measure, "Distance measure");
    qry->add_option("--corpus", q_corpus, "Corpus directory or manifest")->required();
    qry->add_option("--query", q_query, "TG1 file, or 'all' for leave-one-out over the corpus");
    qry->add_option("--top", q_top, "Keep only the first N hits per query");
    qry->add_option("--out", q_out, "CSV path or - for stdout");

    // evaluate-retrieval
    auto* evr = app.add_subcommand("evaluate-retrieval", "MAP, MeanP@m and 11-point PR/FR tables");
    int r_k = 4;
    std::string r_measure = "jaccard";
    std::string r_corpus;
    std::string r_matrix;
    std::string r_out = "-";
    evr->add_option("--k", r_k, "Neighbourhood size");
    evr->add_option("--measure", r_measure, "Distance measure");
    evr->add_option("--corpus", r_corpus, "Corpus directory or manifest")->required();
    evr->add_option("--save-matrix", r_matrix, "Also write the distance matrix CSV here");
    evr->add_option("--out", r_out, "CSV path or - for stdout");

    // cluster
    auto* clu = app.add_subcommand("cluster", "Cluster a corpus and write assignments");
    std::string c_algo = "hac";
    int c_k = 4;
    std::string c_measure = "jaccard";
    std::string c_criterion = "complete";
    std::size_t c_m = 16;
    std::size_t c_max_iter = 5;
    std::uint64_t c_seed = 1;
    std::string c_corpus;
    std::string c_out = "-";
    clu->add_option("--algo", c_algo, "hac or kmeans")->check(CLI::IsMember({"hac", "kmeans"}));
    clu->add_option("--k", c_k, "Neighbourhood size");
    auto* c_measure_opt = clu->add_option("--measure", c_measure, "Distance measure (ward defaults to euclid)");
    clu->add_option("--criterion", c_criterion, "ward, single, complete or average (hac)")
        ->check(CLI::IsMember({"ward", "single", "complete", "average"}));
    clu->add_option("--m", c_m, "Number of clusters")->check(CLI::PositiveNumber);
    clu->add_option("--max-iter", c_max_iter, "K-means iteration limit")->check(CLI::PositiveNumber);
    clu->add_option("--seed", c_seed, "K-means seed");
    clu->add_option("--corpus", c_corpus, "Corpus directory or manifest")->required();
    clu->add_option("--out", c_out, "CSV path or - for stdout");

    // evaluate-clustering
    auto* evc = app.add_subcommand("evaluate-clustering", "Purity, NMI, Rand index and pair P/R/F");
    std::string e_truth;
    std::string e_assign;
    std::string e_out = "-";
    evc->add_option("--truth", e_truth, "Manifest with reference labels")->required();
    evc->add_option("--assignments", e_assign, "item_id,cluster_id CSV")->required();
    evc->add_option("--out", e_out, "CSV path or - for stdout");

    // sweep
    auto* swp = app.add_subcommand("sweep", "Metrics over k x measure x method");
    std::vector<int> s_ks{4};
    std::vector<std::string> s_measures{"jaccard"};
    std::vector<std::string> s_methods;
    SweepConfig sweep_config;
    std::string s_corpus;
    std::string s_out = "-";
    swp->add_option("--k", s_ks, "Neighbourhood sizes")->delimiter(',');
    swp->add_option("--measures", s_measures, "Measures or 'all'")->delimiter(',');
    swp->add_option("--criteria", s_methods, "none, ward, single, complete, average, kmeans")->delimiter(',');
    swp->add_option("--m", sweep_config.m, "Number of clusters")->check(CLI::PositiveNumber);
    swp->add_option("--max-iter", sweep_config.max_iter, "K-means iteration limit")->check(CLI::PositiveNumber);
    swp->add_option("--seed", sweep_config.seed, "K-means seed");
    swp->add_option("--corpus", s_corpus, "Corpus directory or manifest")->required();
    swp->add_option("--out", s_out, "CSV path or - for stdout");

    // bench
    auto* bch = app.add_subcommand("bench", "Fingerprint and distance-matrix timings");
    BenchConfig bench_config;
    std::vector<std::string> b_measures{"all"};
    std::string b_out = "-";
    bch->add_option("--sizes", bench_config.sizes, "Crossings per graph")->delimiter(',');
    bch->add_option("--k", bench_config.ks, "Neighbourhood sizes")->delimiter(',');
    bch->add_option("--measures", b_measures, "Measures or 'all'")->delimiter(',');
    bch->add_option("--samples", bench_config.samples, "Graphs per corpus")->check(CLI::PositiveNumber);
    bch->add_option("--runs", bench_config.runs, "Timed runs per cell (median taken)")->check(CLI::Range(5, 1000));
    bch->add_option("--seed", bench_config.seed, "Seed");
    bch->add_option("--out", b_out, "CSV path or - for stdout");

    // repro
    auto* rep = app.add_subcommand("repro", "Regenerate the corpus and run the full evaluation");
    ReproConfig repro_config;
    bool r_full = false;
    rep->add_option("--out", repro_config.out_dir, "Output directory")->required();
    rep->add_option("--seed", repro_config.corpus.seed, "Master seed");
    rep->add_option("--samples", repro_config.corpus.samples, "Samples per category")->check(CLI::PositiveNumber);
    rep->add_flag("--full-scale", r_full, "100 samples per category of about 72x72");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) {
            if (full_scale) {
                corpus_config.samples = 100;
                corpus_config.min_size = 64;
                corpus_config.max_size = 80;
            }
            if (gen->count("--samples") != 0) {
                corpus_config.samples = samples;
            }
            if (!size_range.empty()) {
                corpus_config.min_size = size_range[0];
                corpus_config.max_size = size_range[1];
            }
            if (rows || cols) {
                if (!rows || !cols || !size_range.empty()) {
                    throw UsageError("--rows and --cols go together and exclude --size-range");
                }
                corpus_config.rows = *rows;
                corpus_config.cols = *cols;
            }
            corpus_config.categories = families;
            corpus_config.jobs = jobs;
            for (const auto& f : families) {
                try {
                    category(f);
                } catch (const GeneratorError& e) {
                    throw UsageError(e.what());
                }
            }
            write_corpus(generate_corpus(corpus_config), gen_out);
        } else if (*fpc) {
            check_k(fp_k);
            Corpus corpus;
            if (fs::is_regular_file(fp_in) && fs::path(fp_in).extension() == ".tg1") {
                corpus.ids.push_back(fs::path(fp_in).stem().string());
                corpus.graphs.push_back(read_graph_file(fp_in));
            } else {
                corpus = load_corpus(fp_in);
            }
            std::vector<Fingerprint> fps;
            for (const auto& g : corpus.graphs) {
                fps.push_back(fingerprint(g, fp_k));
            }
            Output out(fp_out);
            write_fingerprint_csv(out.stream(), corpus.ids, fps);
            out.close();
        } else if (*qry) {
            check_k(q_k);
            const Measure measure = measure_arg(q_measure);
            const Corpus corpus = load_corpus(q_corpus);
            FingerprintSet set = fingerprints_of(corpus, q_k, jobs);
            Output out(q_out);
            out.stream() << "query_id,rank,item_id,distance\n";
            auto emit = [&](const std::string& query_id, const RankedList& list) {
                const std::size_t limit = q_top ? std::min(*q_top, list.hits.size()) : list.hits.size();
                for (std::size_t r = 0; r < limit; ++r) {
                    out.stream() << query_id << ',' << r + 1 << ',' << corpus.ids[list.hits[r].item] << ','
                                 << format_double(list.hits[r].distance) << '\n';
                }
            };
            if (q_query == "all") {
                const DistanceMatrix matrix = distance_matrix(set.vectors, measure, &set.stats, jobs);
                for (std::size_t q = 0; q < corpus.size(); ++q) {
                    emit(corpus.ids[q], rank_from_matrix(matrix, q));
                }
            } else {
                const TextileGraph g = read_graph_file(q_query);
                const SparseVector v = to_sparse(fingerprint(g, q_k), set.vocabulary);
                // Document frequencies count the query as one more document.
                std::vector<SparseVector> all = set.vectors;
                all.push_back(v);
                const CorpusStats stats = corpus_stats(all);
                emit(fs::path(q_query).stem().string(), rank(set.vectors, v, measure, &stats));
            }
            out.close();
        } else if (*evr) {
            check_k(r_k);
            const Measure measure = measure_arg(r_measure);
            const Corpus corpus = load_corpus(r_corpus);
            const FingerprintSet set = fingerprints_of(corpus, r_k, jobs);
            const DistanceMatrix matrix = distance_matrix(set.vectors, measure, &set.stats, jobs);
            if (!r_matrix.empty()) {
                Output m(r_matrix);
                write_matrix_csv(m.stream(), matrix, corpus_hash(corpus));
                m.close();
            }
            Output out(r_out);
            write_retrieval_csv(out.stream(), evaluate_retrieval(matrix, corpus.labels, jobs));
            out.close();
        } else if (*clu) {
            check_k(c_k);
            if (c_algo == "hac" && c_criterion == "ward" && c_measure_opt->count() == 0) {
                c_measure = "euclid";
            }
            const Measure measure = measure_arg(c_measure);
            const Corpus corpus = load_corpus(c_corpus);
            const FingerprintSet set = fingerprints_of(corpus, c_k, jobs);
            Method method = c_algo == "kmeans" ? Method{Method::Kind::KMeans, Linkage::Complete}
                                               : Method{Method::Kind::Hac, parse_linkage(c_criterion)};
            if (method.kind == Method::Kind::Hac && method.linkage == Linkage::Ward && measure != Measure::Euclid) {
                throw UsageError("ward linkage requires --measure euclid");
            }
            if (c_m > corpus.size()) {
                throw UsageError("--m exceeds the corpus size");
            }
            const Clustering c = run_clustering(set, method, measure, c_m, c_max_iter, c_seed, jobs);
            Output out(c_out);
            write_assignments_csv(out.stream(), corpus.ids, c);
            out.close();
        } else if (*evc) {
            const auto truth = read_manifest(e_truth);
            std::ifstream in(e_assign);
            if (!in) {
                throw std::runtime_error("cannot open " + e_assign);
            }
            const auto assigned = read_assignments_csv(in);
            std::map<std::string, std::size_t> cluster_of;
            for (const auto& a : assigned) {
                if (!cluster_of.emplace(a.item, a.cluster).second) {
                    throw std::runtime_error("item '" + a.item + "' assigned twice");
                }
            }
            std::vector<std::string> labels;
            std::vector<std::size_t> clusters;
            for (const auto& row : truth) {
                const std::string id = fs::path(row.path).stem().string();
                const auto it = cluster_of.find(id);
                if (it == cluster_of.end()) {
                    throw std::runtime_error("item '" + id + "' has no cluster assignment");
                }
                labels.push_back(row.label);
                clusters.push_back(it->second);
            }
            if (cluster_of.size() != truth.size()) {
                throw std::runtime_error("assignments name items missing from the manifest");
            }
            Output out(e_out);
            write_quality_csv(out.stream(), evaluate_clustering(clusters, label_ids(labels)));
            out.close();
        } else if (*swp) {
            for (const int k : s_ks) {
                check_k(k);
            }
            sweep_config.ks = s_ks;
            sweep_config.measures = parse_measures(s_measures);
            sweep_config.methods.clear();
            for (const auto& name : s_methods) {
                try {
                    const Method method = Method::parse(name);
                    if (method.kind != Method::Kind::None) {
                        sweep_config.methods.push_back(method);
                    }
                } catch (const std::exception& e) {
                    throw UsageError(e.what());
                }
            }
            sweep_config.jobs = jobs;
            const Corpus corpus = load_corpus(s_corpus);
            if (!sweep_config.methods.empty() && sweep_config.m > corpus.size()) {
                throw UsageError("--m exceeds the corpus size");
            }
            Output out(s_out);
            write_sweep_csv(out.stream(), sweep(corpus, sweep_config));
            out.close();
        } else if (*bch) {
            for (const int k : bench_config.ks) {
                check_k(k);
            }
            bench_config.measures = parse_measures(b_measures);
            bench_config.jobs = jobs;
            Output out(b_out);
            write_bench_csv(out.stream(), bench(bench_config));
            out.close();
        } else if (*rep) {
            if (r_full) {
                repro_config.corpus.min_size = 64;
                repro_config.corpus.max_size = 80;
                if (rep->count("--samples") == 0) {
                    repro_config.corpus.samples = 100;
                }
            }
            repro_config.jobs = jobs;
            repro(repro_config);
            std::ifstream summary(fs::path(repro_config.out_dir) / "summary.txt");
            std::cout << summary.rdbuf();
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
