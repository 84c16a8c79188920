#include "textile/generators.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <utility>

#include "textile/parallel.hpp"

namespace textile {

namespace {

bool positive(Vec2 d) { return d.x > 0 || (d.x == 0 && d.y > 0); }

Vec2 canonical(Vec2 d) { return positive(d) ? d : Vec2{-d.x, -d.y}; }

bool before(Vec2 a, Vec2 b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }

std::vector<std::size_t> rank_by_position(const std::vector<Vec2>& positions) {
    std::vector<std::size_t> order(positions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return before(positions[a], positions[b]); });
    std::vector<std::size_t> rank(positions.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        rank[order[i]] = i;
    }
    return rank;
}

int floor_mod(long long a, long long m) { return static_cast<int>(((a % m) + m) % m); }

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform_real(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace

// ---------------------------------------------------------------------------
// Builder

std::size_t FabricBuilder::add_crossing(Vec2 position) {
    positions_.push_back(position);
    return positions_.size() - 1;
}

void FabricBuilder::add_thread(std::vector<Visit> visits) {
    if (!visits.empty()) {
        threads_.push_back(std::move(visits));
    }
}

Fabric FabricBuilder::build(std::optional<std::string> label) const {
    const std::size_t n = positions_.size();
    {
        std::vector<Vec2> sorted = positions_;
        std::sort(sorted.begin(), sorted.end(), before);
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw GeneratorError("two crossings share a position");
        }
    }
    const std::vector<std::size_t> rank = rank_by_position(positions_);

    struct Pass {
        bool seen = false;
        Vec2 direction;
    };
    std::vector<std::array<Pass, 2>> passes(n);
    std::vector<NodeIndex> peers(n * kSlotsPerCrossing, kTerminal);

    // Entry and exit node of one pass.
    auto ends = [&](const Visit& v) {
        const auto base = static_cast<NodeIndex>(kSlotsPerCrossing * rank[v.crossing] + (v.over ? 0 : 2));
        return positive(v.direction) ? std::pair{base, base + 1} : std::pair{base + 1, base};
    };

    for (const auto& thread : threads_) {
        for (std::size_t i = 0; i < thread.size(); ++i) {
            const Visit& v = thread[i];
            if (v.crossing >= n) {
                throw GeneratorError("thread visits an unknown crossing");
            }
            if (v.direction == Vec2{}) {
                throw GeneratorError("thread pass without direction");
            }
            Pass& pass = passes[v.crossing][v.over ? 0 : 1];
            if (pass.seen) {
                throw GeneratorError("crossing passed twice on the same layer");
            }
            pass = {true, canonical(v.direction)};
            if (i + 1 < thread.size()) {
                const Visit& w = thread[i + 1];
                if (w.crossing == v.crossing) {
                    throw GeneratorError("thread links a crossing to itself");
                }
                const NodeIndex out = ends(v).second;
                const NodeIndex in = ends(w).first;
                peers[static_cast<std::size_t>(out)] = in;
                peers[static_cast<std::size_t>(in)] = out;
            }
        }
    }

    Fabric fabric;
    fabric.placement.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        if (!passes[c][0].seen || !passes[c][1].seen) {
            throw GeneratorError("crossing without both an upper and a lower pass");
        }
        fabric.placement[rank[c]] = {positions_[c], passes[c][0].direction, passes[c][1].direction};
    }
    fabric.graph = TextileGraph::from_peers(peers, std::move(label));
    return fabric;
}

// ---------------------------------------------------------------------------
// Weaves

Drawdown::Drawdown(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) {
        throw GeneratorError("drawdown needs at least one row and one column");
    }
    cells_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0);
}

std::size_t Drawdown::index(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
        throw std::out_of_range("drawdown cell out of range");
    }
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
}

void add_weave(FabricBuilder& builder, const Drawdown& drawdown, Vec2 offset) {
    const int rows = drawdown.rows();
    const int cols = drawdown.cols();
    std::vector<std::size_t> id(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            id[static_cast<std::size_t>(r * cols + c)] = builder.add_crossing({offset.x + c, offset.y + r});
        }
    }
    for (int r = 0; r < rows; ++r) {
        std::vector<Visit> weft;
        for (int c = 0; c < cols; ++c) {
            weft.push_back({id[static_cast<std::size_t>(r * cols + c)], !drawdown.warp_up(r, c), {1, 0}});
        }
        builder.add_thread(std::move(weft));
    }
    for (int c = 0; c < cols; ++c) {
        std::vector<Visit> warp;
        for (int r = 0; r < rows; ++r) {
            warp.push_back({id[static_cast<std::size_t>(r * cols + c)], drawdown.warp_up(r, c), {0, 1}});
        }
        builder.add_thread(std::move(warp));
    }
}

Fabric weave(const Drawdown& drawdown, std::optional<std::string> label) {
    FabricBuilder builder;
    add_weave(builder, drawdown, {});
    return builder.build(std::move(label));
}

namespace {

// Lift rules for rectangular blocks of a drawdown.
struct Block {
    enum class Kind { Plain, Twill, Satin, Pebble };
    Kind kind = Kind::Plain;
    int over = 1;   // twill float over / satin repeat
    int under = 1;  // twill float under / satin step
    int phase = 0;
    bool z = false;  // twill slant

    bool up(int r, int c) const {
        switch (kind) {
            case Kind::Plain:
                return floor_mod(r + c + phase, 2) == 0;
            case Kind::Twill:
                return floor_mod(static_cast<long long>(c) + (z ? r : -r) + phase, over + under) < over;
            case Kind::Satin:
                return floor_mod(static_cast<long long>(c) - static_cast<long long>(under) * r + phase, over) == 0;
            case Kind::Pebble:
                return floor_mod(r + 2 * floor_mod(c, 2) + phase, 4) < 3;
        }
        return false;
    }
};

int satin_step(int repeat) {
    for (int s = 2; s + 1 < repeat; ++s) {
        if (std::gcd(s, repeat) == 1) {
            return s;
        }
    }
    throw GeneratorError("no regular satin with repeat " + std::to_string(repeat));
}

Block plain_block(std::mt19937_64& rng) { return {Block::Kind::Plain, 1, 1, uniform_int(rng, 0, 1), false}; }

Block twill_block(std::mt19937_64& rng, int over, int under) {
    return {Block::Kind::Twill, over, under, uniform_int(rng, 0, over + under - 1), uniform_int(rng, 0, 1) == 1};
}

Block satin_block(std::mt19937_64& rng, int float_length) {
    const int repeat = float_length + 1;
    return {Block::Kind::Satin, repeat, satin_step(repeat), uniform_int(rng, 0, repeat - 1), false};
}

void paint(Drawdown& d, const Block& block, int r0, int c0, int rows, int cols) {
    for (int r = std::max(0, r0); r < std::min(d.rows(), r0 + rows); ++r) {
        for (int c = std::max(0, c0); c < std::min(d.cols(), c0 + cols); ++c) {
            d.set(r, c, block.up(r, c));
        }
    }
}

// Warp-faced vertical stripes drawn from a small palette of float structures,
// with the twill slant alternating between stripes.
Drawdown andean(int rows, int cols, std::mt19937_64& rng) {
    Drawdown d(rows, cols);
    bool z = uniform_int(rng, 0, 1) == 1;
    for (int c0 = 0; c0 < cols;) {
        const int width = uniform_int(rng, 3, 8);
        const double pick = uniform_real(rng);
        Block block;
        if (pick < 0.30) {
            block = twill_block(rng, 2, 1);
        } else if (pick < 0.55) {
            block = twill_block(rng, 3, 1);
        } else if (pick < 0.75) {
            block = plain_block(rng);
        } else {
            block = {Block::Kind::Pebble, 3, 1, uniform_int(rng, 0, 3), false};
        }
        block.z = z;
        z = !z;
        paint(d, block, 0, c0, rows, width);
        c0 += width;
    }
    return d;
}

// Plain ground with rectangular figured motifs.
Drawdown viet_weave(int rows, int cols, std::mt19937_64& rng) {
    Drawdown d(rows, cols);
    paint(d, plain_block(rng), 0, 0, rows, cols);
    const int motifs = 2 + rows * cols / 120;
    for (int m = 0; m < motifs; ++m) {
        const int h = uniform_int(rng, 4, 10);
        const int w = uniform_int(rng, 4, 10);
        const int r0 = uniform_int(rng, -h / 2, rows - h / 2);
        const int c0 = uniform_int(rng, -w / 2, cols - w / 2);
        const double pick = uniform_real(rng);
        Block block;
        if (pick < 0.40) {
            block = satin_block(rng, 4);
        } else if (pick < 0.75) {
            block = twill_block(rng, 2, 2);
        } else {
            block = twill_block(rng, 3, 3);
        }
        paint(d, block, r0, c0, h, w);
    }
    return d;
}

// Three thread directions on a kagome lattice. Horizontal threads are laid
// over both diagonal sets; the diagonal sets interlace with each other.
void add_triaxial(FabricBuilder& b, int rows, int cols, Vec2 offset) {
    if (rows < 2) {
        throw GeneratorError("triaxial needs at least two rows");
    }
    const int width = std::max(4, 4 * cols / 3);
    std::map<int, std::vector<std::pair<int, std::size_t>>> horizontal;  // h -> (x, id)
    std::map<int, std::vector<std::pair<int, std::size_t>>> rising;      // a -> (y, id)
    std::map<int, std::vector<std::pair<int, std::size_t>>> falling;     // b -> (y, id)
    std::map<std::size_t, bool> rising_over;

    auto line_a = [](int x, int y) { return (x - y - 1) / 4; };  // x - y = 4a + 1
    auto line_b = [](int x, int y) { return (x + y - 3) / 4; };  // x + y = 4b + 3
    for (int y = 0; y <= 2 * (rows - 1); ++y) {
        for (int x = 0; x < width; ++x) {
            const bool on_a = floor_mod(x - y - 1, 4) == 0;
            const bool on_b = floor_mod(x + y - 3, 4) == 0;
            const bool on_h = y % 2 == 0;
            if (static_cast<int>(on_a) + static_cast<int>(on_b) + static_cast<int>(on_h) != 2) {
                continue;
            }
            const std::size_t id = b.add_crossing({offset.x + x, offset.y + y});
            if (on_h) {
                horizontal[y / 2].push_back({x, id});
            }
            if (on_a) {
                rising[line_a(x, y)].push_back({y, id});
            }
            if (on_b) {
                falling[line_b(x, y)].push_back({y, id});
            }
            if (on_a && on_b) {
                rising_over[id] = floor_mod(line_a(x, y) + line_b(x, y), 2) == 0;
            }
        }
    }
    for (auto& [h, line] : horizontal) {
        std::sort(line.begin(), line.end());
        std::vector<Visit> visits;
        for (const auto& [x, id] : line) {
            visits.push_back({id, true, {1, 0}});
        }
        b.add_thread(std::move(visits));
    }
    auto diagonal = [&](auto& lines, Vec2 direction, bool rising_set) {
        for (auto& [index, line] : lines) {
            std::sort(line.begin(), line.end());
            std::vector<Visit> visits;
            for (const auto& [y, id] : line) {
                const auto it = rising_over.find(id);
                const bool over = it != rising_over.end() && (it->second == rising_set);
                visits.push_back({id, over, direction});
            }
            b.add_thread(std::move(visits));
        }
    };
    diagonal(rising, Vec2{1, 1}, true);
    diagonal(falling, Vec2{-1, 1}, false);
}

// Plain jersey: the head of each loop is crossed by the two legs of the loop
// drawn through it from the next course.
void add_weft_knit(FabricBuilder& b, int courses, int stitches, Vec2 offset) {
    if (courses < 2 || stitches < 1) {
        throw GeneratorError("weft knit needs at least two courses");
    }
    // Interlock of course r - 1 with course r, r = 1..courses-1.
    std::vector<std::size_t> left(static_cast<std::size_t>(courses * stitches));
    std::vector<std::size_t> right(left.size());
    auto at = [&](int r, int c) { return static_cast<std::size_t>(r * stitches + c); };
    for (int r = 1; r < courses; ++r) {
        for (int c = 0; c < stitches; ++c) {
            left[at(r, c)] = b.add_crossing({offset.x + 4 * c, offset.y + 2 * r});
            right[at(r, c)] = b.add_crossing({offset.x + 4 * c + 2, offset.y + 2 * r});
        }
    }
    for (int r = 0; r < courses; ++r) {
        std::vector<Visit> yarn;
        for (int c = 0; c < stitches; ++c) {
            if (r >= 1) {
                yarn.push_back({left[at(r, c)], true, {0, 1}});
            }
            if (r + 1 < courses) {
                yarn.push_back({left[at(r + 1, c)], false, {1, 0}});
                yarn.push_back({right[at(r + 1, c)], false, {1, 0}});
            }
            if (r >= 1) {
                yarn.push_back({right[at(r, c)], true, {0, -1}});
            }
        }
        b.add_thread(std::move(yarn));
    }
}

// Single-bar tricot with closed laps: every yarn zig-zags between two
// neighbouring wales, and each loop crosses itself at its base.
void add_warp_knit(FabricBuilder& b, int rows, int yarns, Vec2 offset) {
    if (rows < 2 || yarns < 1) {
        throw GeneratorError("warp knit needs at least two courses");
    }
    const int wales = yarns + 1;
    auto has_stitch = [&](int r, int col) {
        const int yarn = col - r % 2;
        return r >= 0 && r < rows && yarn >= 0 && yarn < yarns;
    };
    auto interlocked = [&](int r, int col) { return has_stitch(r - 1, col) && has_stitch(r, col); };
    std::map<std::pair<int, int>, std::size_t> left;
    std::map<std::pair<int, int>, std::size_t> right;
    std::map<std::pair<int, int>, std::size_t> base;
    for (int r = 0; r < rows; ++r) {
        for (int col = 0; col < wales; ++col) {
            if (interlocked(r, col)) {
                left[{r, col}] = b.add_crossing({offset.x + 4 * col, offset.y + 3 * r});
                right[{r, col}] = b.add_crossing({offset.x + 4 * col + 2, offset.y + 3 * r});
            }
            if (interlocked(r + 1, col)) {
                base[{r, col}] = b.add_crossing({offset.x + 4 * col + 1, offset.y + 3 * r + 1});
            }
        }
    }
    for (int yarn = 0; yarn < yarns; ++yarn) {
        std::vector<Visit> visits;
        for (int r = 0; r < rows; ++r) {
            const int col = yarn + r % 2;
            const bool below = interlocked(r, col);
            const bool above = interlocked(r + 1, col);
            if (below) {
                visits.push_back({left.at({r, col}), true, {0, 1}});
            }
            if (above) {
                visits.push_back({base.at({r, col}), false, {1, 1}});
                visits.push_back({left.at({r + 1, col}), false, {1, 0}});
                visits.push_back({right.at({r + 1, col}), false, {1, 0}});
                visits.push_back({base.at({r, col}), true, {-1, 1}});
            }
            if (below) {
                visits.push_back({right.at({r, col}), true, {0, -1}});
            }
        }
        b.add_thread(std::move(visits));
    }
}

// Grid of split rings, each linked to its four neighbours. A ring is one open
// thread running clockwise from its top-left gap.
void add_chain_mail(FabricBuilder& b, int ring_rows, int ring_cols, Vec2 offset) {
    if (ring_rows * ring_cols < 2) {
        throw GeneratorError("chain mail needs at least two rings");
    }
    // Links keyed by the lower ring: right link (r,c)-(r,c+1), down link (r,c)-(r+1,c).
    std::map<std::pair<int, int>, std::array<std::size_t, 2>> right_link;  // upper, lower
    std::map<std::pair<int, int>, std::array<std::size_t, 2>> down_link;   // left, right
    for (int r = 0; r < ring_rows; ++r) {
        for (int c = 0; c < ring_cols; ++c) {
            const int x = offset.x + 6 * c;
            const int y = offset.y + 6 * r;
            if (c + 1 < ring_cols) {
                right_link[{r, c}] = {b.add_crossing({x + 3, y - 1}), b.add_crossing({x + 3, y + 1})};
            }
            if (r + 1 < ring_rows) {
                down_link[{r, c}] = {b.add_crossing({x - 1, y + 3}), b.add_crossing({x + 1, y + 3})};
            }
        }
    }
    // The lower ring of a link passes over at the first crossing it meets.
    for (int r = 0; r < ring_rows; ++r) {
        for (int c = 0; c < ring_cols; ++c) {
            std::vector<Visit> ring;
            if (r > 0) {
                const auto& link = down_link.at({r - 1, c});
                ring.push_back({link[0], true, {1, 0}});
                ring.push_back({link[1], false, {1, 0}});
            }
            if (c + 1 < ring_cols) {
                const auto& link = right_link.at({r, c});
                ring.push_back({link[0], true, {0, 1}});
                ring.push_back({link[1], false, {0, 1}});
            }
            if (r + 1 < ring_rows) {
                const auto& link = down_link.at({r, c});
                ring.push_back({link[1], true, {-1, 0}});
                ring.push_back({link[0], false, {-1, 0}});
            }
            if (c > 0) {
                const auto& link = right_link.at({r, c - 1});
                ring.push_back({link[1], true, {0, -1}});
                ring.push_back({link[0], false, {0, -1}});
            }
            b.add_thread(std::move(ring));
        }
    }
}

// Flat braids side by side. The outermost strand alternately from the left
// and the right moves to the middle, passing over and under in turn.
void add_braid(FabricBuilder& b, int strands, int steps, int strips, Vec2 offset) {
    if (strands < 3) {
        throw GeneratorError("a braid needs at least three strands");
    }
    if (strips < 1 || steps < 1) {
        throw GeneratorError("braid too small");
    }
    for (int strip = 0; strip < strips; ++strip) {
        const int x0 = offset.x + strip * (2 * strands + 4);
        std::vector<int> at(static_cast<std::size_t>(strands));  // strand at each position
        std::iota(at.begin(), at.end(), 0);
        std::vector<std::vector<Visit>> threads(static_cast<std::size_t>(strands));
        for (int t = 0; t < steps; ++t) {
            const bool from_left = t % 2 == 0;
            const int target = from_left ? (strands - 1) / 2 : strands / 2;
            const int origin = from_left ? 0 : strands - 1;
            const int step = from_left ? 1 : -1;
            const int traveller = at[static_cast<std::size_t>(origin)];
            bool over = true;
            int j = 0;
            for (int p = origin + step; p != target + step; p += step, ++j) {
                const int passed = at[static_cast<std::size_t>(p)];
                const std::size_t id = b.add_crossing({x0 + 2 * p - step, offset.y + t * strands + j});
                threads[static_cast<std::size_t>(traveller)].push_back({id, over, {step, 1}});
                threads[static_cast<std::size_t>(passed)].push_back({id, !over, {-step, 1}});
                at[static_cast<std::size_t>(p - step)] = passed;
                over = !over;
            }
            at[static_cast<std::size_t>(target)] = traveller;
        }
        for (auto& thread : threads) {
            b.add_thread(std::move(thread));
        }
    }
}

int braid_steps(int rows) { return 2 * rows; }

void add_viet_mix(FabricBuilder& b, int rows, int cols, std::mt19937_64& rng) {
    constexpr int kStrands = 5;
    constexpr int kPanelGap = 1 << 20;
    const int braid_cols = kStrands * std::max(1, static_cast<int>(cols * (0.2 + 0.2 * uniform_real(rng))) / kStrands);
    const int mail_cols = std::max(4, static_cast<int>(cols * (0.25 + 0.15 * uniform_real(rng))));
    const int weave_cols = std::max(2, cols - braid_cols - mail_cols);
    add_chain_mail(b, std::max(2, rows / 2), std::max(2, mail_cols / 2), {0, 0});
    add_braid(b, kStrands, braid_steps(rows), braid_cols / kStrands, {kPanelGap, 0});
    add_weave(b, viet_weave(rows, weave_cols, rng), {2 * kPanelGap, 0});
}

}  // namespace

// ---------------------------------------------------------------------------
// Families and categories

const std::array<Category, kCategoryCount>& categories() {
    static const std::array<Category, kCategoryCount> table = [] {
        auto spec = [](Family family) {
            PatternSpec s;
            s.family = family;
            return s;
        };
        auto twill = [&](int over, int under) {
            PatternSpec s = spec(Family::Twill);
            s.twill_over = over;
            s.twill_under = under;
            return s;
        };
        return std::array<Category, kCategoryCount>{{
            {"plain-weave", spec(Family::PlainWeave)},
            {"twill-2-1", twill(2, 1)},
            {"twill-2-2", twill(2, 2)},
            {"twill-3-1", twill(3, 1)},
            {"twill-3-3", twill(3, 3)},
            {"twill-4-4", twill(4, 4)},
            {"satin", spec(Family::Satin)},
            {"andean", spec(Family::Andean)},
            {"viet-weave", spec(Family::VietWeave)},
            {"triaxial", spec(Family::Triaxial)},
            {"weft-knit", spec(Family::WeftKnit)},
            {"warp-knit", spec(Family::WarpKnit)},
            {"chain-mail", spec(Family::ChainMail)},
            {"braid", spec(Family::Braid)},
            {"warp-above", spec(Family::WarpAbove)},
            {"viet-mix", spec(Family::VietMix)},
        }};
    }();
    return table;
}

const Category& category(std::string_view name) {
    for (const auto& c : categories()) {
        if (c.name == name) {
            return c;
        }
    }
    throw GeneratorError("unknown category '" + std::string(name) + "'");
}

Fabric generate(const PatternSpec& spec, std::optional<std::string> label) {
    if (spec.rows < 1 || spec.cols < 1) {
        throw GeneratorError("rows and cols must be positive");
    }
    std::mt19937_64 rng(spec.seed);
    FabricBuilder b;
    switch (spec.family) {
        case Family::PlainWeave: {
            Drawdown d(spec.rows, spec.cols);
            paint(d, plain_block(rng), 0, 0, spec.rows, spec.cols);
            return weave(d, std::move(label));
        }
        case Family::Twill: {
            const bool supported = (spec.twill_over == 2 && spec.twill_under == 1) ||
                                   (spec.twill_over == 2 && spec.twill_under == 2) ||
                                   (spec.twill_over == 3 && spec.twill_under == 1) ||
                                   (spec.twill_over == 3 && spec.twill_under == 3) ||
                                   (spec.twill_over == 4 && spec.twill_under == 4);
            if (!supported) {
                throw GeneratorError("unsupported twill " + std::to_string(spec.twill_over) + "/" +
                                     std::to_string(spec.twill_under));
            }
            Drawdown d(spec.rows, spec.cols);
            paint(d, twill_block(rng, spec.twill_over, spec.twill_under), 0, 0, spec.rows, spec.cols);
            return weave(d, std::move(label));
        }
        case Family::Satin: {
            if (spec.satin_float < 4) {
                throw GeneratorError("satin float length must be at least 4");
            }
            Drawdown d(spec.rows, spec.cols);
            paint(d, satin_block(rng, spec.satin_float), 0, 0, spec.rows, spec.cols);
            return weave(d, std::move(label));
        }
        case Family::Andean:
            return weave(andean(spec.rows, spec.cols, rng), std::move(label));
        case Family::VietWeave:
            return weave(viet_weave(spec.rows, spec.cols, rng), std::move(label));
        case Family::WarpAbove: {
            Drawdown d(spec.rows, spec.cols);
            paint(d, {Block::Kind::Twill, 1, 0, 0, false}, 0, 0, spec.rows, spec.cols);
            return weave(d, std::move(label));
        }
        case Family::Triaxial:
            add_triaxial(b, spec.rows, spec.cols, {});
            break;
        case Family::WeftKnit:
            add_weft_knit(b, spec.rows, std::max(1, spec.cols / 2), {});
            break;
        case Family::WarpKnit:
            add_warp_knit(b, spec.rows, std::max(1, spec.cols / 3), {});
            break;
        case Family::ChainMail:
            add_chain_mail(b, std::max(1, spec.rows / 2), std::max(1, spec.cols / 2), {});
            break;
        case Family::Braid:
            if (spec.braid_strands < 3) {
                throw GeneratorError("a braid needs at least three strands");
            }
            if (spec.cols < spec.braid_strands) {
                throw GeneratorError("braid needs cols >= strands");
            }
            add_braid(b, spec.braid_strands, braid_steps(spec.rows), spec.cols / spec.braid_strands, {});
            break;
        case Family::VietMix:
            if (spec.rows < 2 || spec.cols < 12) {
                throw GeneratorError("viet-mix needs at least 2 rows and 12 cols");
            }
            add_viet_mix(b, spec.rows, spec.cols, rng);
            break;
    }
    return b.build(std::move(label));
}

// ---------------------------------------------------------------------------
// Transforms and perturbation

namespace {

Vec2 apply(Transform op, Vec2 v) {
    switch (op) {
        case Transform::Rotate90:
            return {-v.y, v.x};
        case Transform::Rotate180:
            return {-v.x, -v.y};
        case Transform::MirrorH:
            return {-v.x, v.y};
        case Transform::MirrorV:
            return {v.x, -v.y};
    }
    return v;
}

void check_layout(const Fabric& fabric) {
    if (fabric.placement.size() != fabric.graph.crossing_count()) {
        throw GeneratorError("fabric layout does not match its graph");
    }
}

}  // namespace

Fabric transform(const Fabric& fabric, Transform op) {
    check_layout(fabric);
    const std::size_t n = fabric.placement.size();
    std::vector<Vec2> positions(n);
    for (std::size_t c = 0; c < n; ++c) {
        positions[c] = apply(op, fabric.placement[c].position);
    }
    const std::vector<std::size_t> rank = rank_by_position(positions);

    Fabric out;
    out.placement.resize(n);
    std::vector<std::size_t> node_map(n * kSlotsPerCrossing);
    for (std::size_t c = 0; c < n; ++c) {
        const CrossingPlacement& p = fabric.placement[c];
        const std::array<Vec2, 2> directions{apply(op, p.top_direction), apply(op, p.bottom_direction)};
        for (std::size_t pair = 0; pair < 2; ++pair) {
            const std::size_t from = kSlotsPerCrossing * c + 2 * pair;
            const std::size_t to = kSlotsPerCrossing * rank[c] + 2 * pair;
            const bool keep = positive(directions[pair]);
            node_map[from] = keep ? to : to + 1;
            node_map[from + 1] = keep ? to + 1 : to;
        }
        out.placement[rank[c]] = {positions[c], canonical(directions[0]), canonical(directions[1])};
    }
    out.graph = permute_nodes(fabric.graph, node_map);
    return out;
}

std::size_t flip_count(double flip_fraction, std::size_t crossings) {
    if (!(flip_fraction >= 0.0 && flip_fraction <= 1.0)) {
        throw GeneratorError("flip fraction must lie in [0, 1]");
    }
    const auto count = static_cast<std::size_t>(std::llround(flip_fraction * static_cast<double>(crossings)));
    return std::min(count, crossings);
}

namespace {

Fabric flip_crossings(const Fabric& fabric, std::span<const std::size_t> flipped) {
    check_layout(fabric);
    const std::size_t n = fabric.placement.size();
    std::vector<std::size_t> node_map(n * kSlotsPerCrossing);
    std::iota(node_map.begin(), node_map.end(), std::size_t{0});
    Fabric out;
    out.placement = fabric.placement;
    for (const std::size_t c : flipped) {
        if (c >= n) {
            throw GeneratorError("crossing " + std::to_string(c) + " out of range");
        }
        for (std::size_t s = 0; s < kSlotsPerCrossing; ++s) {
            node_map[kSlotsPerCrossing * c + s] = kSlotsPerCrossing * c + (s ^ 2U);
        }
        std::swap(out.placement[c].top_direction, out.placement[c].bottom_direction);
    }
    out.graph = permute_nodes(fabric.graph, node_map);
    return out;
}

}  // namespace

Fabric flip_crossing(const Fabric& fabric, std::size_t crossing) {
    const std::array<std::size_t, 1> one{crossing};
    return flip_crossings(fabric, one);
}

Fabric perturb(const Fabric& fabric, const PerturbationPlan& plan) {
    const std::size_t n = fabric.graph.crossing_count();
    const std::size_t count = flip_count(plan.flip_fraction, n);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> chosen;
    chosen.reserve(count);
    std::mt19937_64 rng(plan.seed);
    std::sample(all.begin(), all.end(), std::back_inserter(chosen), count, rng);
    Fabric out = flip_crossings(fabric, chosen);

    switch (plan.rotate) {
        case Rotation::None:
            break;
        case Rotation::R90:
            out = transform(out, Transform::Rotate90);
            break;
        case Rotation::R180:
            out = transform(out, Transform::Rotate180);
            break;
        case Rotation::R270:
            out = transform(transform(out, Transform::Rotate180), Transform::Rotate90);
            break;
    }
    switch (plan.mirror) {
        case Mirror::None:
            break;
        case Mirror::Horizontal:
            out = transform(out, Transform::MirrorH);
            break;
        case Mirror::Vertical:
            out = transform(out, Transform::MirrorV);
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Corpora

std::uint64_t sample_seed(std::uint64_t master, std::size_t category_index, std::size_t sample) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32U),
                      static_cast<std::uint32_t>(category_index), static_cast<std::uint32_t>(sample)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32U) | words[1];
}

std::vector<CorpusItem> generate_corpus(const CorpusConfig& config) {
    if (config.min_size < 1 || config.max_size < config.min_size) {
        throw GeneratorError("invalid size range");
    }
    for (const double rate : {config.flip_rate, config.rotate_rate, config.mirror_rate}) {
        if (!(rate >= 0.0 && rate <= 1.0)) {
            throw GeneratorError("rates must lie in [0, 1]");
        }
    }
    std::vector<std::size_t> chosen;
    if (config.categories.empty()) {
        chosen.resize(kCategoryCount);
        std::iota(chosen.begin(), chosen.end(), std::size_t{0});
    } else {
        for (const auto& name : config.categories) {
            const Category& c = category(name);
            chosen.push_back(static_cast<std::size_t>(&c - categories().data()));
        }
    }

    std::vector<CorpusItem> items(chosen.size() * config.samples);
    parallel_for(items.size(), config.jobs, [&](std::size_t flat) {
        const std::size_t index = chosen[flat / config.samples];
        const std::size_t sample = flat % config.samples;
        const Category& cat = categories()[index];
        std::mt19937_64 rng(sample_seed(config.seed, index, sample));

        PatternSpec spec = cat.spec;
        spec.rows = uniform_int(rng, config.min_size, config.max_size);
        spec.cols = uniform_int(rng, config.min_size, config.max_size);
        if (config.rows > 0) {
            spec.rows = config.rows;
        }
        if (config.cols > 0) {
            spec.cols = config.cols;
        }
        spec.seed = rng();

        PerturbationPlan plan;
        plan.flip_fraction = config.flip_rate;
        if (uniform_real(rng) < config.rotate_rate) {
            plan.rotate = std::array{Rotation::R90, Rotation::R180, Rotation::R270}[uniform_int(rng, 0, 2)];
        }
        if (uniform_real(rng) < config.mirror_rate) {
            plan.mirror = uniform_int(rng, 0, 1) == 0 ? Mirror::Horizontal : Mirror::Vertical;
        }
        plan.seed = rng();

        const std::string label(cat.name);
        std::string number = std::to_string(sample);
        if (number.size() < 3) {
            number.insert(0, 3 - number.size(), '0');
        }
        items[flat] = {label + "_" + number, label, perturb(generate(spec, label), plan).graph};
    });
    return items;
}

void write_corpus(const std::vector<CorpusItem>& items, const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    std::ofstream manifest(fs::path(directory) / "manifest.csv");
    if (!manifest) {
        throw std::runtime_error("cannot write manifest in " + directory);
    }
    manifest << "path,label\n";
    for (const auto& item : items) {
        const std::string file = item.id + ".tg1";
        write_graph_file((fs::path(directory) / file).string(), item.graph);
        manifest << file << ',' << item.label << '\n';
    }
    if (!manifest.flush()) {
        throw std::runtime_error("failed writing manifest in " + directory);
    }
}

}  // namespace textile
