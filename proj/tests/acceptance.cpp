// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance 3 5        run the listed criteria only
//
// The exit status is non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "textile/cluster_metrics.hpp"
#include "textile/clustering.hpp"
#include "textile/corpus.hpp"
#include "textile/distance.hpp"
#include "textile/experiment.hpp"
#include "textile/fingerprint.hpp"
#include "textile/generators.hpp"
#include "textile/retrieval.hpp"

using namespace textile;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

bool near(double got, double want, double tol) { return std::fabs(got - want) <= tol; }

std::map<std::string, std::uint64_t> codes_of(const Fingerprint& fp) {
    std::map<std::string, std::uint64_t> out;
    for (const auto& [nb, count] : fp.counts()) {
        out[nb.code()] = count;
    }
    return out;
}

// Evaluation corpus: 16 categories x 25 samples with the default perturbation rates.
const Corpus& evaluation_corpus() {
    static const Corpus corpus = [] {
        CorpusConfig config;
        config.jobs = std::max(1U, std::thread::hardware_concurrency());
        Corpus c;
        for (auto& item : generate_corpus(config)) {
            c.ids.push_back(item.id);
            c.labels.push_back(item.label);
            c.graphs.push_back(std::move(item.graph));
        }
        return c;
    }();
    return corpus;
}

unsigned jobs() { return std::max(1U, std::thread::hardware_concurrency()); }

const FingerprintSet& evaluation_set(int k) {
    static std::map<int, FingerprintSet> sets;
    auto it = sets.find(k);
    if (it == sets.end()) {
        it = sets.emplace(k, fingerprint_corpus(evaluation_corpus().graphs, k, jobs())).first;
    }
    return it->second;
}

// Worked distance values on the vectors (0, 4) and (2, 2).
Verdict worked_examples() {
    const SparseVector a{{1, 4.0}};
    const SparseVector b{{0, 2.0}, {1, 2.0}};
    const std::vector<std::pair<Measure, double>> expected{
        {Measure::Euclid, 2.0 * std::sqrt(2.0)}, {Measure::CosFreq, 1.0 - std::sqrt(2.0) / 2.0},
        {Measure::HamBool, 2.0},                 {Measure::HamFreq, 4.0},
        {Measure::Jaccard, 2.0 / 3.0},           {Measure::Overlap, 0.5},
    };
    Verdict v;
    for (const auto& [measure, want] : expected) {
        const double got = distance(measure, a, b);
        const bool ok = near(got, want, 1e-9);
        v.pass = v.pass && ok;
        v.detail += std::string(measure_name(measure)) + "=" + fixed(got, 6) + (ok ? " " : "(want " + fixed(want, 6) + ") ");
    }
    return v;
}

Verdict figure_graphs() {
    Verdict v;
    PatternSpec spec;
    spec.rows = 2;
    spec.cols = 2;
    const TextileGraph h1 = generate(spec).graph;
    const bool h1_ok = codes_of(fingerprint(h1, 1)) == std::map<std::string, std::uint64_t>{{"[a|t][a|t]", 4}} &&
                       codes_of(fingerprint(parse(fixtures::kH1), 1)) ==
                           std::map<std::string, std::uint64_t>{{"[a|t][a|t]", 4}};
    const TextileGraph h2 = parse(fixtures::kH2);
    const bool h2_ok = codes_of(fingerprint(h2, 1)) ==
                       std::map<std::string, std::uint64_t>{{"[a|n][a|n]", 2}, {"[a|t][a|t]", 2}};
    const std::string x1 = k_neighbourhood(h2, 0, 2).code();
    const bool x1_ok = x1 == "[at|na][at|na]";
    v.pass = h1_ok && h2_ok && x1_ok;
    v.detail = std::string("F(H1) ") + (h1_ok ? "ok" : "wrong") + ", F(H2) " + (h2_ok ? "ok" : "wrong") +
               ", x1 k=2 " + x1;
    return v;
}

Verdict orientation_invariance() {
    const auto start = Clock::now();
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::string first_failure;
    const Transform ops[] = {Transform::Rotate90, Transform::Rotate180, Transform::MirrorH, Transform::MirrorV};
    const char* op_names[] = {"rotate90", "rotate180", "mirrorH", "mirrorV"};
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        const Category& category = categories()[c];
        for (std::size_t i = 0; i < 10; ++i) {
            PatternSpec spec = category.spec;
            spec.rows = 16 + static_cast<int>(i);
            spec.cols = 16 + static_cast<int>((3 * i) % 9);
            spec.seed = sample_seed(7, c, i);
            PerturbationPlan plan;
            plan.flip_fraction = 0.01;
            plan.seed = spec.seed + 1;
            const Fabric fabric = perturb(generate(spec), plan);
            std::vector<Fingerprint> base;
            for (int k = 1; k <= 6; ++k) {
                base.push_back(fingerprint(fabric.graph, k));
            }
            for (std::size_t o = 0; o < 4; ++o) {
                const TextileGraph g = transform(fabric, ops[o]).graph;
                for (int k = 1; k <= 6; ++k) {
                    ++checks;
                    if (!(fingerprint(g, k) == base[static_cast<std::size_t>(k - 1)])) {
                        ++failures;
                        if (first_failure.empty()) {
                            first_failure = std::string(category.name) + " #" + std::to_string(i) + " " +
                                            op_names[o] + " k=" + std::to_string(k);
                        }
                    }
                }
            }
        }
    }
    const double elapsed = seconds_since(start);
    Verdict v;
    v.pass = failures == 0 && elapsed < 60.0;
    v.detail = std::to_string(checks - failures) + "/" + std::to_string(checks) + " equal in " + fixed(elapsed, 1) + "s";
    if (!first_failure.empty()) {
        v.detail += ", first mismatch " + first_failure;
    }
    return v;
}

Verdict oracle_equivalence() {
    std::mt19937_64 rng(20240601);
    std::vector<TextileGraph> graphs;
    for (int i = 0; i < 200; ++i) {
        graphs.push_back(oracle::random_graph(rng, 10));
    }
    std::size_t fp_mismatch = 0;
    std::size_t matrix_mismatch = 0;
    double worst = 0.0;
    for (int k = 1; k <= 4; ++k) {
        for (const auto& g : graphs) {
            fp_mismatch += codes_of(fingerprint(g, k)) != oracle::fingerprint(g, k);
        }
        const FingerprintSet set = fingerprint_corpus(graphs, k, jobs());
        std::vector<oracle::Bag> bags;
        std::vector<oracle::Bag> weighted;
        for (const auto& g : graphs) {
            bags.push_back(oracle::bag_of(oracle::fingerprint(g, k)));
        }
        for (const auto& b : bags) {
            weighted.push_back(oracle::tfidf(b, bags));
        }
        for (const Measure m : kAllMeasures) {
            const DistanceMatrix matrix = distance_matrix(set.vectors, m, &set.stats, jobs());
            for (std::size_t i = 0; i < graphs.size(); ++i) {
                for (std::size_t j = i + 1; j < graphs.size(); ++j) {
                    double want = 0.0;
                    switch (m) {
                        case Measure::Euclid:
                            want = oracle::euclid(bags[i], bags[j]);
                            break;
                        case Measure::CosFreq:
                            want = oracle::cosine(bags[i], bags[j]);
                            break;
                        case Measure::CosTfidf:
                            want = oracle::cosine(weighted[i], weighted[j]);
                            break;
                        case Measure::HamBool:
                            want = oracle::ham_bool(bags[i], bags[j]);
                            break;
                        case Measure::HamFreq:
                            want = oracle::ham_freq(bags[i], bags[j]);
                            break;
                        case Measure::Jaccard:
                            want = oracle::jaccard(bags[i], bags[j]);
                            break;
                        case Measure::Overlap:
                            want = oracle::overlap(bags[i], bags[j]);
                            break;
                    }
                    const double err = std::fabs(matrix(i, j) - want);
                    worst = std::max(worst, err);
                    matrix_mismatch += err > 1e-9;
                }
            }
        }
    }
    Verdict v;
    v.pass = fp_mismatch == 0 && matrix_mismatch == 0;
    v.detail = "fingerprint mismatches " + std::to_string(fp_mismatch) + "/800, matrix mismatches " +
               std::to_string(matrix_mismatch) + ", worst error " + format_double(worst);
    return v;
}

Verdict linearity() {
    const auto start = Clock::now();
    BenchConfig config;
    config.jobs = 1;
    const auto rows = bench(config);
    const double elapsed = seconds_since(start);

    std::map<std::pair<std::size_t, int>, double> fp;
    std::map<Measure, double> matrix_total;
    std::map<std::pair<std::size_t, int>, std::map<Measure, double>> matrix;
    for (const auto& row : rows) {
        fp[{row.crossings, row.k}] = row.fingerprint_seconds;
        matrix_total[row.measure] += row.matrix_seconds;
        matrix[{row.crossings, row.k}][row.measure] = row.matrix_seconds;
    }
    double lo_n = 1e9;
    double hi_n = 0.0;
    double lo_k = 1e9;
    double hi_k = 0.0;
    for (const auto& [key, t] : fp) {
        const auto [n, k] = key;
        if (const auto it = fp.find({2 * n, k}); it != fp.end()) {
            lo_n = std::min(lo_n, it->second / t);
            hi_n = std::max(hi_n, it->second / t);
        }
        if (const auto it = fp.find({n, 2 * k}); it != fp.end()) {
            lo_k = std::min(lo_k, it->second / t);
            hi_k = std::max(hi_k, it->second / t);
        }
    }
    Measure fastest = Measure::HamBool;
    for (const auto& [m, t] : matrix_total) {
        if (t < matrix_total[fastest]) {
            fastest = m;
        }
    }
    std::size_t cell_wins = 0;
    for (const auto& [key, by_measure] : matrix) {
        const double hb = by_measure.at(Measure::HamBool);
        cell_wins += std::all_of(by_measure.begin(), by_measure.end(), [hb](const auto& e) { return hb <= e.second; });
    }
    const bool n_ok = lo_n >= 1.5 && hi_n <= 2.7;
    const bool k_ok = lo_k >= 1.5 && hi_k <= 2.7;
    Verdict v;
    v.pass = n_ok && k_ok && fastest == Measure::HamBool && elapsed < 300.0;
    v.detail = "n-doubling " + fixed(lo_n, 2) + ".." + fixed(hi_n, 2) + ", k-doubling " + fixed(lo_k, 2) + ".." +
               fixed(hi_k, 2) + ", fastest matrix " + std::string(measure_name(fastest)) + " (ham-bool fastest in " +
               std::to_string(cell_wins) + "/" + std::to_string(matrix.size()) + " cells), " + fixed(elapsed, 1) + "s";
    return v;
}

Verdict retrieval_scaled() {
    const auto start = Clock::now();
    const Corpus& corpus = evaluation_corpus();
    std::map<Measure, double> map4;
    for (const Measure m : kAllMeasures) {
        const FingerprintSet& set = evaluation_set(4);
        map4[m] = evaluate_retrieval(distance_matrix(set.vectors, m, &set.stats, jobs()), corpus.labels, jobs()).map;
    }
    const FingerprintSet& set3 = evaluation_set(3);
    const double jaccard3 =
        evaluate_retrieval(distance_matrix(set3.vectors, Measure::Jaccard, &set3.stats, jobs()), corpus.labels, jobs()).map;
    const double elapsed = seconds_since(start);

    const double jac = map4[Measure::Jaccard];
    const double upper_min = std::min({map4[Measure::CosFreq], map4[Measure::CosTfidf], map4[Measure::Overlap]});
    const double upper_max = std::max({map4[Measure::CosFreq], map4[Measure::CosTfidf], map4[Measure::Overlap]});
    const double middle_min = std::min(map4[Measure::Euclid], map4[Measure::HamFreq]);
    const double middle_max = std::max(map4[Measure::Euclid], map4[Measure::HamFreq]);
    const double hb = map4[Measure::HamBool];

    std::vector<std::string> failed;
    if (!near(jac, 0.91, 0.10)) {
        failed.push_back("jaccard MAP off target");
    }
    if (!(jac >= upper_max)) {
        failed.push_back("jaccard below an upper-group measure");
    }
    if (!(upper_min > middle_max)) {
        failed.push_back("upper group not above euclid/ham-freq");
    }
    if (!(middle_min > hb)) {
        failed.push_back("euclid/ham-freq not above ham-bool");
    }
    if (!(jac - hb >= 0.10)) {
        failed.push_back("jaccard - ham-bool < 0.10");
    }
    if (!(jac - jaccard3 <= 0.05)) {
        failed.push_back("k=4 gains more than 0.05 over k=3");
    }
    if (!(elapsed < 600.0)) {
        failed.push_back("too slow");
    }
    Verdict v;
    v.pass = failed.empty();
    for (const Measure m : kAllMeasures) {
        v.detail += std::string(measure_name(m)) + "=" + fixed(map4[m]) + " ";
    }
    v.detail += "jaccard(k=3)=" + fixed(jaccard3) + ", " + fixed(elapsed, 1) + "s";
    for (const auto& f : failed) {
        v.detail += "; " + f;
    }
    return v;
}

Verdict clustering_scaled() {
    const auto start = Clock::now();
    const Corpus& corpus = evaluation_corpus();
    const auto classes = label_ids(corpus.labels);
    const std::size_t m = kCategoryCount;

    struct Cell {
        std::string name;
        ClusterQuality quality;
    };
    std::vector<Cell> cells;
    for (const Measure measure : {Measure::Jaccard, Measure::Overlap, Measure::CosFreq, Measure::CosTfidf}) {
        const Method any{Method::Kind::Hac, Linkage::Complete};
        const FingerprintSet& set = evaluation_set(clustering_k(measure, any));
        const DistanceMatrix chi = distance_matrix(set.vectors, measure, &set.stats, jobs());
        for (const Linkage linkage : {Linkage::Single, Linkage::Complete, Linkage::Average}) {
            cells.push_back({std::string(linkage_name(linkage)) + "/" + std::string(measure_name(measure)),
                             evaluate_clustering(hac(chi, m, linkage).assignment(), classes)});
        }
    }
    {
        const Method ward{Method::Kind::Hac, Linkage::Ward};
        const FingerprintSet& set = evaluation_set(clustering_k(Measure::Euclid, ward));
        cells.push_back({"ward/euclid",
                         evaluate_clustering(hac(set.vectors, m, Linkage::Ward, std::nullopt, nullptr, jobs()).assignment(),
                                             classes)});
    }
    const double elapsed = seconds_since(start);

    const auto best = std::max_element(cells.begin(), cells.end(),
                                       [](const Cell& a, const Cell& b) { return a.quality.pairs.f < b.quality.pairs.f; });
    const auto find = [&](const std::string& name) {
        return std::find_if(cells.begin(), cells.end(), [&](const Cell& c) { return c.name == name; })->quality;
    };
    const ClusterQuality winner = find("complete/cos-tfidf");
    const ClusterQuality single_overlap = find("single/overlap");

    std::vector<std::string> failed;
    if (best->name != "complete/cos-tfidf") {
        failed.push_back("best F is " + best->name + " (" + fixed(best->quality.pairs.f) + ")");
    }
    if (!near(winner.purity, 0.842, 0.10)) {
        failed.push_back("purity off target");
    }
    if (!near(winner.nmi, 0.912, 0.10)) {
        failed.push_back("NMI off target");
    }
    if (!near(winner.rand, 0.976, 0.10)) {
        failed.push_back("RI off target");
    }
    if (!(single_overlap.purity < winner.purity)) {
        failed.push_back("single/overlap purity not below");
    }
    Verdict v;
    v.pass = failed.empty();
    v.detail = "complete/cos-tfidf F=" + fixed(winner.pairs.f) + " purity=" + fixed(winner.purity) +
               " NMI=" + fixed(winner.nmi) + " RI=" + fixed(winner.rand) + ", single/overlap purity=" +
               fixed(single_overlap.purity) + ", runner-up F ";
    double runner_up = 0.0;
    std::string runner_name;
    for (const auto& c : cells) {
        if (c.name != "complete/cos-tfidf" && c.quality.pairs.f > runner_up) {
            runner_up = c.quality.pairs.f;
            runner_name = c.name;
        }
    }
    v.detail += runner_name + "=" + fixed(runner_up) + ", " + fixed(elapsed, 1) + "s";
    for (const auto& f : failed) {
        v.detail += "; " + f;
    }
    return v;
}

Verdict metric_sanity() {
    const std::vector<std::size_t> truth{0, 0, 1, 1, 2};
    const ClusterQuality perfect = evaluate_clustering(std::vector<std::size_t>{4, 4, 7, 7, 1}, truth);
    const bool perfect_ok = perfect.purity == 1.0 && near(perfect.nmi, 1.0, 1e-12) && perfect.rand == 1.0 &&
                            perfect.pairs.precision == 1.0 && perfect.pairs.recall == 1.0 && perfect.pairs.f == 1.0;
    const ClusterQuality big =
        evaluate_clustering(std::vector<std::size_t>{0, 0, 0, 0}, std::vector<std::size_t>{0, 0, 1, 1});
    const bool big_ok = near(big.purity, 0.5, 1e-12) && near(big.rand, 1.0 / 3.0, 1e-12) &&
                        near(big.pairs.precision, 1.0 / 3.0, 1e-12) && near(big.pairs.recall, 1.0, 1e-12) &&
                        near(big.pairs.f, 0.5, 1e-12) && near(big.nmi, 0.0, 1e-12);
    Verdict v;
    v.pass = perfect_ok && big_ok;
    v.detail = std::string("perfect ") + (perfect_ok ? "ok" : "wrong") + ", one cluster purity=" + fixed(big.purity) +
               " RI=" + fixed(big.rand) + " P=" + fixed(big.pairs.precision) + " R=" + fixed(big.pairs.recall) +
               " F=" + fixed(big.pairs.f) + " NMI=" + fixed(big.nmi);
    return v;
}

Verdict kmeans_stabilization() {
    const auto start = Clock::now();
    const Corpus& corpus = evaluation_corpus();
    const auto classes = label_ids(corpus.labels);
    const Method km{Method::Kind::KMeans, Linkage::Complete};
    Verdict v;
    for (const Measure measure : kAllMeasures) {
        const FingerprintSet& set = evaluation_set(clustering_k(measure, km));
        const auto q5 = evaluate_clustering(run_clustering(set, km, measure, kCategoryCount, 5, 1, jobs()).assignment(), classes);
        const auto q10 = evaluate_clustering(run_clustering(set, km, measure, kCategoryCount, 10, 1, jobs()).assignment(), classes);
        const double gap = std::max({std::fabs(q5.purity - q10.purity), std::fabs(q5.nmi - q10.nmi),
                                     std::fabs(q5.rand - q10.rand), std::fabs(q5.pairs.precision - q10.pairs.precision),
                                     std::fabs(q5.pairs.recall - q10.pairs.recall), std::fabs(q5.pairs.f - q10.pairs.f)});
        v.pass = v.pass && gap < 0.02;
        v.detail += std::string(measure_name(measure)) + "=" + fixed(gap) + " ";
    }
    v.detail = "largest metric change from 5 to 10 iterations: " + v.detail + fixed(seconds_since(start), 1) + "s";
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Verdict()>> criteria{
        worked_examples,   figure_graphs,      orientation_invariance, oracle_equivalence,  linearity,
        retrieval_scaled,  clustering_scaled,  metric_sanity,          kmeans_stabilization,
    };
    std::vector<std::size_t> selected;
    for (int i = 1; i < argc; ++i) {
        const int n = std::atoi(argv[i]);
        if (n < 1 || n > static_cast<int>(criteria.size())) {
            std::cerr << "unknown criterion '" << argv[i] << "'\n";
            return 2;
        }
        selected.push_back(static_cast<std::size_t>(n));
    }
    if (selected.empty()) {
        for (std::size_t n = 1; n <= criteria.size(); ++n) {
            selected.push_back(n);
        }
    }
    bool all = true;
    for (const std::size_t n : selected) {
        Verdict v;
        try {
            v = criteria[n - 1]();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        all = all && v.pass;
        std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
    }
    return all ? 0 : 1;
}
