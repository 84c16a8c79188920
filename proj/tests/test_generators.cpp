#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "textile/corpus.hpp"
#include "textile/fingerprint.hpp"
#include "textile/generators.hpp"

using namespace textile;

namespace {

// 1-neighbourhood of every grid cell computed from the lift plan alone.
std::vector<std::string> grid_codes(const Drawdown& d) {
    auto label = [&](bool here_up, int r, int c, bool warp) -> char {
        if (r < 0 || r >= d.rows() || c < 0 || c >= d.cols()) {
            return 't';
        }
        const bool there_up = d.warp_up(r, c);
        // A warp is on top where the cell is up, a weft where it is down.
        const bool here_top = warp ? here_up : !here_up;
        const bool there_top = warp ? there_up : !there_up;
        return here_top == there_top ? 'n' : 'a';
    };
    auto pair = [](char x, char y) {
        if (y < x) {
            std::swap(x, y);
        }
        return std::string("[") + x + "|" + y + "]";
    };
    std::vector<std::string> codes;
    for (int r = 0; r < d.rows(); ++r) {
        for (int c = 0; c < d.cols(); ++c) {
            const bool up = d.warp_up(r, c);
            const std::string warp = pair(label(up, r - 1, c, true), label(up, r + 1, c, true));
            const std::string weft = pair(label(up, r, c - 1, false), label(up, r, c + 1, false));
            codes.push_back(up ? warp + weft : weft + warp);
        }
    }
    return codes;
}

std::map<std::string, std::uint64_t> tally(const std::vector<std::string>& codes) {
    std::map<std::string, std::uint64_t> out;
    for (const auto& c : codes) {
        ++out[c];
    }
    return out;
}

std::map<std::string, std::uint64_t> codes_of(const Fingerprint& fp) {
    std::map<std::string, std::uint64_t> out;
    for (const auto& [nb, count] : fp.counts()) {
        out[nb.code()] = count;
    }
    return out;
}

PatternSpec spec_for(const Category& category, int rows, int cols, std::uint64_t seed) {
    PatternSpec spec = category.spec;
    spec.rows = rows;
    spec.cols = cols;
    spec.seed = seed;
    return spec;
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("textile_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("2 x 2 plain weave is H1") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        PatternSpec spec;
        spec.rows = 2;
        spec.cols = 2;
        spec.seed = seed;
        const Fabric f = generate(spec);
        CHECK(codes_of(fingerprint(f.graph, 1)) == std::map<std::string, std::uint64_t>{{"[a|t][a|t]", 4}});
        CHECK(f.graph.terminal_count() == 8);
    }
}

TEST_CASE("10 x 10 plain weave matches the brute-force labeler") {
    Drawdown d(10, 10);
    for (int r = 0; r < 10; ++r) {
        for (int c = 0; c < 10; ++c) {
            d.set(r, c, (r + c) % 2 == 0);
        }
    }
    const auto expected = grid_codes(d);
    const Fabric woven = weave(d);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(k_neighbourhood(woven.graph, i, 1).code() == expected[i]);
    }
    for (int r = 1; r < 9; ++r) {
        for (int c = 1; c < 9; ++c) {
            CHECK(expected[static_cast<std::size_t>(r * 10 + c)] == "[a|a][a|a]");
        }
    }
    PatternSpec spec;
    spec.rows = 10;
    spec.cols = 10;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        spec.seed = seed;
        CHECK(codes_of(fingerprint(generate(spec).graph, 1)) == tally(expected));
    }
}

TEST_CASE("random drawdowns match the brute-force labeler") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const int rows = 1 + static_cast<int>(rng() % 9);
        const int cols = 1 + static_cast<int>(rng() % 9);
        Drawdown d(rows, cols);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                d.set(r, c, rng() % 2 == 0);
            }
        }
        const auto expected = grid_codes(d);
        const Fabric f = weave(d);
        CHECK(validate(f.graph).ok());
        CHECK(f.graph.terminal_count() == static_cast<std::size_t>(2 * (rows + cols)));
        for (std::size_t i = 0; i < expected.size(); ++i) {
            CHECK(k_neighbourhood(f.graph, i, 1).code() == expected[i]);
        }
    }
}

TEST_CASE("warp-above interior never alternates") {
    PatternSpec spec;
    spec.family = Family::WarpAbove;
    spec.rows = 7;
    spec.cols = 9;
    const Fabric f = generate(spec);
    for (int r = 1; r < 6; ++r) {
        for (int c = 1; c < 8; ++c) {
            CHECK(k_neighbourhood(f.graph, static_cast<std::size_t>(r * 9 + c), 1).code() == "[n|n][n|n]");
        }
    }
}

TEST_CASE("grid families have rows * cols crossings and 2(rows + cols) terminals") {
    for (const auto& category : categories()) {
        const Family fam = category.spec.family;
        const bool grid = fam == Family::PlainWeave || fam == Family::Twill || fam == Family::Satin ||
                          fam == Family::Andean || fam == Family::VietWeave || fam == Family::WarpAbove;
        if (!grid) {
            continue;
        }
        const Fabric f = generate(spec_for(category, 13, 17, 5));
        CHECK(f.graph.crossing_count() == 13 * 17);
        CHECK(f.graph.terminal_count() == 2 * (13 + 17));
    }
}

TEST_CASE("every category generates valid, deterministic graphs") {
    CHECK(categories().size() == 16);
    std::set<std::string_view> names;
    for (const auto& category : categories()) {
        names.insert(category.name);
        CHECK(&textile::category(category.name) == &category);
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const PatternSpec spec = spec_for(category, 16 + static_cast<int>(seed), 20, seed);
            const Fabric a = generate(spec, std::string(category.name));
            const Fabric b = generate(spec, std::string(category.name));
            CAPTURE(category.name);
            CHECK(validate(a.graph).ok());
            CHECK(a.graph.crossing_count() > 0);
            CHECK(serialize(a.graph) == serialize(b.graph));
            CHECK(a.placement.size() == a.graph.crossing_count());
            CHECK(a.graph.label() == std::optional<std::string>(std::string(category.name)));
        }
    }
    CHECK(names.size() == 16);
    CHECK_THROWS_AS(textile::category("tartan"), GeneratorError);
}

TEST_CASE("stochastic families depend on the seed") {
    for (const char* name : {"andean", "viet-weave", "viet-mix"}) {
        const Category& c = category(name);
        CHECK(serialize(generate(spec_for(c, 20, 20, 1)).graph) != serialize(generate(spec_for(c, 20, 20, 2)).graph));
    }
}

TEST_CASE("unsupported shapes are rejected") {
    PatternSpec braid;
    braid.family = Family::Braid;
    braid.braid_strands = 5;
    braid.rows = 10;
    braid.cols = 4;
    CHECK_THROWS_AS(generate(braid), GeneratorError);
    braid.braid_strands = 2;
    braid.cols = 10;
    CHECK_THROWS_AS(generate(braid), GeneratorError);
    PatternSpec twill;
    twill.family = Family::Twill;
    twill.twill_over = 5;
    twill.twill_under = 2;
    CHECK_THROWS_AS(generate(twill), GeneratorError);
    PatternSpec satin;
    satin.family = Family::Satin;
    satin.satin_float = 3;
    CHECK_THROWS_AS(generate(satin), GeneratorError);
    PatternSpec empty;
    empty.rows = 0;
    CHECK_THROWS_AS(generate(empty), GeneratorError);
}

TEST_CASE("identity perturbation plan") {
    const Fabric f = generate(spec_for(category("twill-3-1"), 12, 12, 3));
    CHECK(perturb(f, PerturbationPlan{}) == f);
    CHECK(flip_count(0.01, 576) == 6);
    CHECK(flip_count(1.0, 10) == 10);
    CHECK(flip_count(0.0, 10) == 0);
    CHECK_THROWS(flip_count(1.5, 10));
}

TEST_CASE("flipping every plain-weave crossing keeps the 1-fingerprint") {
    const Fabric f = generate(spec_for(category("plain-weave"), 10, 10, 0));
    PerturbationPlan all;
    all.flip_fraction = 1.0;
    const Fabric flipped = perturb(f, all);
    CHECK(flipped.graph != f.graph);
    CHECK(validate(flipped.graph).ok());
    CHECK(fingerprint(flipped.graph, 1) == fingerprint(f.graph, 1));
}

TEST_CASE("flipping one interior crossing changes five neighbourhoods") {
    const Fabric f = generate(spec_for(category("plain-weave"), 10, 10, 0));
    const std::size_t centre = 4 * 10 + 5;
    const Fabric flipped = flip_crossing(f, centre);
    std::set<std::size_t> changed;
    for (std::size_t c = 0; c < f.graph.crossing_count(); ++c) {
        if (k_neighbourhood(f.graph, c, 1) != k_neighbourhood(flipped.graph, c, 1)) {
            changed.insert(c);
        }
    }
    CHECK(changed == std::set<std::size_t>{centre - 10, centre - 1, centre, centre + 1, centre + 10});
    CHECK(flip_crossing(flipped, centre) == f);
    CHECK_THROWS(flip_crossing(f, 100));
}

TEST_CASE("transforms compose to the identity") {
    for (const char* name : {"twill-2-1", "triaxial", "braid", "viet-mix"}) {
        const Fabric f = generate(spec_for(category(name), 14, 15, 9));
        CAPTURE(name);
        CHECK(transform(transform(f, Transform::Rotate180), Transform::Rotate180) == f);
        CHECK(transform(transform(f, Transform::MirrorH), Transform::MirrorH) == f);
        CHECK(transform(transform(f, Transform::MirrorV), Transform::MirrorV) == f);
        Fabric spun = f;
        for (int i = 0; i < 4; ++i) {
            spun = transform(spun, Transform::Rotate90);
            CHECK(validate(spun.graph).ok());
        }
        CHECK(spun == f);
        CHECK(transform(transform(f, Transform::Rotate90), Transform::Rotate90) == transform(f, Transform::Rotate180));
    }
}

TEST_CASE("mirroring a weave equals weaving the mirrored drawdown") {
    const Fabric twill = generate(spec_for(category("twill-3-1"), 9, 11, 1));
    Drawdown d(9, 11);
    for (std::size_t i = 0; i < twill.graph.crossing_count(); ++i) {
        // Crossing i sits at cell (i / cols, i % cols); the warp is up where it owns slots 0 and 1.
        const int r = static_cast<int>(i / 11);
        const int c = static_cast<int>(i % 11);
        d.set(r, c, twill.placement[i].top_direction == Vec2{0, 1});
    }
    CHECK(weave(d).graph == twill.graph);
    Drawdown h(9, 11);
    Drawdown v(9, 11);
    for (int r = 0; r < 9; ++r) {
        for (int c = 0; c < 11; ++c) {
            h.set(r, c, d.warp_up(r, 10 - c));
            v.set(r, c, d.warp_up(8 - r, c));
        }
    }
    const Fabric mirrored = transform(twill, Transform::MirrorH);
    CHECK(mirrored.graph == weave(h).graph);
    CHECK(transform(twill, Transform::MirrorV).graph == weave(v).graph);
    CHECK(mirrored.graph != twill.graph);
    for (int k = 1; k <= 6; ++k) {
        CHECK(fingerprint(mirrored.graph, k) == fingerprint(twill.graph, k));
        CHECK(codes_of(fingerprint(mirrored.graph, 1)) == tally(grid_codes(h)));
    }
}

TEST_CASE("fingerprints are orientation invariant") {
    for (const auto& category : categories()) {
        for (std::uint64_t seed = 0; seed < 2; ++seed) {
            PerturbationPlan plan;
            plan.flip_fraction = 0.02;
            plan.seed = seed;
            const Fabric f = perturb(generate(spec_for(category, 12 + static_cast<int>(seed), 15, seed)), plan);
            for (const Transform op : {Transform::Rotate90, Transform::Rotate180, Transform::MirrorH, Transform::MirrorV}) {
                const Fabric g = transform(f, op);
                CAPTURE(category.name);
                CHECK(validate(g.graph).ok());
                for (int k = 1; k <= 4; ++k) {
                    CHECK(fingerprint(g.graph, k) == fingerprint(f.graph, k));
                }
            }
        }
    }
}

TEST_CASE("builder rejects malformed threads") {
    FabricBuilder twice;
    const auto p = twice.add_crossing({0, 0});
    const auto q = twice.add_crossing({0, 0});
    twice.add_thread({{p, true, {1, 0}}, {q, true, {1, 0}}});
    twice.add_thread({{p, false, {0, 1}}, {q, false, {0, 1}}});
    CHECK_THROWS_AS(twice.build(), GeneratorError);

    FabricBuilder b;
    const auto a = b.add_crossing({0, 0});
    b.add_thread({{a, true, {1, 0}}});
    CHECK_THROWS_AS(b.build(), GeneratorError);
    b.add_thread({{a, true, {0, 1}}});
    CHECK_THROWS_AS(b.build(), GeneratorError);

    FabricBuilder ok;
    const auto x = ok.add_crossing({0, 0});
    ok.add_thread({{x, true, {1, 0}}});
    ok.add_thread({{x, false, {0, 1}}});
    const Fabric f = ok.build("one");
    CHECK(serialize(f.graph) == "TG1 1\nLABEL one\n-1 -1 -1 -1\n");
}

TEST_CASE("corpus generation") {
    CorpusConfig config;
    config.categories = {"satin"};
    config.samples = 1;
    const auto items = generate_corpus(config);
    REQUIRE(items.size() == 1);
    CHECK(items[0].id == "satin_000");
    CHECK(items[0].label == "satin");

    const auto dir = scratch_dir("one");
    write_corpus(items, dir.string());
    const auto rows = read_manifest((dir / "manifest.csv").string());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].path == "satin_000.tg1");
    CHECK(rows[0].label == "satin");
    const TextileGraph g = read_graph_file((dir / rows[0].path).string());
    CHECK(g.label() == std::optional<std::string>("satin"));
    CHECK(g == items[0].graph);
    std::filesystem::remove_all(dir);
}

TEST_CASE("corpus generation is independent of the thread count") {
    CorpusConfig config;
    config.categories = {"plain-weave", "andean", "braid", "weft-knit"};
    config.samples = 4;
    config.min_size = 10;
    config.max_size = 14;
    config.jobs = 1;
    const auto serial = generate_corpus(config);
    config.jobs = 4;
    const auto threaded = generate_corpus(config);
    REQUIRE(serial.size() == 16);
    std::set<std::string> distinct;
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].id == threaded[i].id);
        CHECK(serial[i].graph == threaded[i].graph);
        distinct.insert(serialize(serial[i].graph));
    }
    CHECK(distinct.size() == 16);
    CHECK(sample_seed(1, 0, 0) != sample_seed(1, 0, 1));
    CHECK(sample_seed(1, 0, 0) != sample_seed(2, 0, 0));

    config.rows = 6;
    config.cols = 9;
    for (const auto& item : generate_corpus(config)) {
        if (item.label == "plain-weave") {
            CHECK(item.graph.crossing_count() == 54);
        }
    }
    config.flip_rate = 2.0;
    CHECK_THROWS(generate_corpus(config));
}
