#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace textile {

/// Global node index. Node 4*c + s is slot s of crossing c.
using NodeIndex = std::int64_t;

/// Peer value for a thread end that runs into a terminal.
inline constexpr NodeIndex kTerminal = -1;

/// Number of node slots owned by every crossing.
inline constexpr std::size_t kSlotsPerCrossing = 4;

/// One node record of a crossing: the thread end stored in a slot.
struct NodeSlot {
    NodeIndex peer = kTerminal;  ///< node of the neighbouring crossing, or kTerminal
    bool on_top = false;         ///< part of the top thread of its crossing
    NodeIndex opposite = 0;      ///< other end of the same thread in this crossing

    bool operator==(const NodeSlot&) const = default;
};

/// Raised for malformed graph input (bad indices, failed validation on load).
class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the TG1 reader; carries the 1-based line and column.
class ParseError : public GraphError {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/**
 * Crossing hypergraph of a textile.
 *
 * Nodes are stored flat, four per crossing. Slots 0 and 1 of a crossing are
 * the two ends of the top thread (the pair joined by the top edge), slots 2
 * and 3 the ends of the bottom thread. Terminals are not stored: a thread end
 * that leaves the fabric has peer == kTerminal and only contributes to
 * terminal_count(). Instances are immutable once built.
 */
class TextileGraph {
public:
    TextileGraph() = default;

    /// Builds a graph from one peer entry per node using the fixed slot
    /// convention. Throws GraphError when the size is not a multiple of four
    /// or a peer lies outside [-1, node_count).
    static TextileGraph from_peers(std::span<const NodeIndex> peers,
                                   std::optional<std::string> label = std::nullopt);

    /// Builds a graph from raw node records without enforcing the slot
    /// convention. Intended for validation of arbitrary input; the result
    /// may be invalid.
    static TextileGraph from_slots(std::vector<NodeSlot> slots,
                                   std::optional<std::string> label = std::nullopt);

    std::size_t crossing_count() const noexcept { return nodes_.size() / kSlotsPerCrossing; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t terminal_count() const noexcept { return terminals_; }

    /// |Omega| = (4|Xi| + |T|) / 2: every node and every terminal is in one edge.
    std::size_t omega_count() const noexcept { return (nodes_.size() + terminals_) / 2; }

    const NodeSlot& node(std::size_t index) const;
    std::span<const NodeSlot> nodes() const noexcept { return nodes_; }

    static std::size_t crossing_of(NodeIndex node) noexcept {
        return static_cast<std::size_t>(node) / kSlotsPerCrossing;
    }

    const std::optional<std::string>& label() const noexcept { return label_; }
    TextileGraph with_label(std::optional<std::string> label) const;

    bool operator==(const TextileGraph& other) const = default;

private:
    std::vector<NodeSlot> nodes_;
    std::optional<std::string> label_;
    std::size_t terminals_ = 0;
};

enum class ViolationKind {
    NodeCount,         ///< node count not a multiple of four
    PeerRange,         ///< peer outside the node range
    PeerSymmetry,      ///< peer(peer(v)) != v
    PeerSameCrossing,  ///< a thread end linked back into its own crossing
    TopPair,           ///< crossing without exactly two mutually opposite top slots
    Opposite,          ///< opposite link outside the crossing or not an involution
    Parity,            ///< 4|Xi| + |T| odd
};

struct Violation {
    ViolationKind kind;
    std::vector<NodeIndex> nodes;
    std::string message;
};

/// Every violated structural invariant; empty iff the graph is valid.
struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool has(ViolationKind kind) const noexcept;
    std::string summary() const;
};

ValidationReport validate(const TextileGraph& graph);

/// Reads the TG1 text format. The result always passes validate().
TextileGraph parse(std::string_view text);

/// Canonical TG1 text of a valid graph.
std::string serialize(const TextileGraph& graph);

TextileGraph read_graph_file(const std::string& path);
void write_graph_file(const std::string& path, const TextileGraph& graph);

/**
 * Renames nodes: node v of the input becomes node node_map[v] of the output.
 *
 * The map must be a bijection that keeps the four slots of a crossing
 * together and maps each thread pair ({0,1} or {2,3}) onto a thread pair.
 * Sending a top pair to a bottom pair flips which thread lies on top.
 */
TextileGraph permute_nodes(const TextileGraph& graph, std::span<const std::size_t> node_map);

}  // namespace textile
