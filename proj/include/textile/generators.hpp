#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "textile/graph.hpp"

namespace textile {

struct Vec2 {
    int x = 0;
    int y = 0;
    bool operator==(const Vec2&) const = default;
};

/// Planar position of a crossing and the travel direction of its two passes.
/// A pass runs from its even slot to its odd slot along its direction, and
/// stored directions always point right, or straight down when vertical.
struct CrossingPlacement {
    Vec2 position;
    Vec2 top_direction;
    Vec2 bottom_direction;
    bool operator==(const CrossingPlacement&) const = default;
};

/// A textile graph together with the planar layout it was generated from.
/// Crossings are ordered by (y, x) of their positions.
struct Fabric {
    TextileGraph graph;
    std::vector<CrossingPlacement> placement;
    bool operator==(const Fabric&) const = default;
};

/// One pass of a thread through a crossing.
struct Visit {
    std::size_t crossing;
    bool over;
    Vec2 direction;
};

/**
 * Assembles a Fabric from threads.
 *
 * Crossings are registered with a unique position; each thread is the
 * ordered list of crossings it passes, and every crossing must end up with
 * exactly one pass over and one pass under. Open thread ends become
 * terminals.
 */
class FabricBuilder {
public:
    std::size_t add_crossing(Vec2 position);
    void add_thread(std::vector<Visit> visits);
    std::size_t crossing_count() const noexcept { return positions_.size(); }
    Fabric build(std::optional<std::string> label = std::nullopt) const;

private:
    std::vector<Vec2> positions_;
    std::vector<std::vector<Visit>> threads_;
};

/// Weave lift plan: warp_up(r, c) is true when warp c lies over weft r.
class Drawdown {
public:
    Drawdown(int rows, int cols);
    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    bool warp_up(int r, int c) const { return cells_[index(r, c)] != 0; }
    void set(int r, int c, bool up) { cells_[index(r, c)] = up ? 1 : 0; }

private:
    std::size_t index(int r, int c) const;
    int rows_;
    int cols_;
    std::vector<std::uint8_t> cells_;
};

/// Interlaces rows wefts with cols warps; every thread ends in two terminals.
void add_weave(FabricBuilder& builder, const Drawdown& drawdown, Vec2 offset = {});
Fabric weave(const Drawdown& drawdown, std::optional<std::string> label = std::nullopt);

enum class Family {
    PlainWeave,
    Twill,
    Satin,
    Andean,
    VietWeave,
    Triaxial,
    WeftKnit,
    WarpKnit,
    ChainMail,
    Braid,
    WarpAbove,
    VietMix,
};

struct PatternSpec {
    Family family = Family::PlainWeave;
    int twill_over = 2;    ///< Twill: warp floats over this many wefts
    int twill_under = 1;   ///< Twill: then under this many
    int satin_float = 4;   ///< Satin: weft float length (>= 4)
    int braid_strands = 5; ///< Braid: strands per braid (>= 3)
    int rows = 24;
    int cols = 24;
    std::uint64_t seed = 0;
};

/// One of the sixteen evaluation categories.
struct Category {
    std::string_view name;
    PatternSpec spec;  ///< family and family parameters; size and seed unset
};

inline constexpr std::size_t kCategoryCount = 16;
const std::array<Category, kCategoryCount>& categories();
const Category& category(std::string_view name);

/// Raised for pattern parameters a family cannot realize.
class GeneratorError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Deterministic in the spec. Throws GeneratorError for unsupported shapes.
Fabric generate(const PatternSpec& spec, std::optional<std::string> label = std::nullopt);

enum class Transform { Rotate90, Rotate180, MirrorH, MirrorV };
enum class Rotation { None, R90, R180, R270 };
enum class Mirror { None, Horizontal, Vertical };

/// Rotation by 90 degrees, 180 degrees, or a mirror image of the layout.
/// Crossing order follows the new positions; top threads stay on top.
Fabric transform(const Fabric& fabric, Transform op);

struct PerturbationPlan {
    double flip_fraction = 0.0;
    Rotation rotate = Rotation::None;
    Mirror mirror = Mirror::None;
    std::uint64_t seed = 0;
};

/// Number of crossings a plan flips: round(flip_fraction * crossings).
std::size_t flip_count(double flip_fraction, std::size_t crossings);

/// Swaps which thread is on top in one crossing.
Fabric flip_crossing(const Fabric& fabric, std::size_t crossing);

/// Flips round(flip_fraction * n) seeded random crossings, then rotates, then mirrors.
Fabric perturb(const Fabric& fabric, const PerturbationPlan& plan);

struct CorpusConfig {
    std::vector<std::string> categories;  ///< empty means all sixteen
    std::size_t samples = 25;
    int min_size = 16;
    int max_size = 32;
    int rows = 0;  ///< fixed grid rows when positive, otherwise drawn from the size range
    int cols = 0;  ///< fixed grid columns when positive
    double flip_rate = 0.01;
    double rotate_rate = 0.85;
    double mirror_rate = 0.35;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

struct CorpusItem {
    std::string id;     ///< file stem, e.g. twill-2-1_007
    std::string label;  ///< category name
    TextileGraph graph;
};

/// Generates every sample in memory. Sample order is category-major and
/// independent of `jobs`.
std::vector<CorpusItem> generate_corpus(const CorpusConfig& config);

/// Writes <id>.tg1 files and manifest.csv (`path,label`) into `directory`.
void write_corpus(const std::vector<CorpusItem>& items, const std::string& directory);

/// Per-sample seed derived from the master seed.
std::uint64_t sample_seed(std::uint64_t master, std::size_t category_index, std::size_t sample);

}  // namespace textile
