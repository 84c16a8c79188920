#include "textile/graph.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace textile {

namespace {

std::string position_message(std::size_t line, std::size_t column, const std::string& what) {
    std::ostringstream out;
    out << "line " << line << ", column " << column << ": " << what;
    return out.str();
}

constexpr bool is_top_slot(std::size_t slot) { return slot < 2; }

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : GraphError(position_message(line, column, what)), line_(line), column_(column) {}

TextileGraph TextileGraph::from_peers(std::span<const NodeIndex> peers,
                                      std::optional<std::string> label) {
    if (peers.size() % kSlotsPerCrossing != 0) {
        throw GraphError("node count " + std::to_string(peers.size()) + " is not a multiple of 4");
    }
    const auto count = static_cast<NodeIndex>(peers.size());
    std::vector<NodeSlot> slots(peers.size());
    for (std::size_t v = 0; v < peers.size(); ++v) {
        const NodeIndex peer = peers[v];
        if (peer < kTerminal || peer >= count) {
            throw GraphError("peer " + std::to_string(peer) + " of node " + std::to_string(v) +
                             " out of range");
        }
        const std::size_t slot = v % kSlotsPerCrossing;
        slots[v].peer = peer;
        slots[v].on_top = is_top_slot(slot);
        slots[v].opposite = static_cast<NodeIndex>(v ^ 1U);
    }
    return from_slots(std::move(slots), std::move(label));
}

TextileGraph TextileGraph::from_slots(std::vector<NodeSlot> slots, std::optional<std::string> label) {
    TextileGraph graph;
    graph.nodes_ = std::move(slots);
    graph.label_ = std::move(label);
    for (const auto& slot : graph.nodes_) {
        if (slot.peer == kTerminal) {
            ++graph.terminals_;
        }
    }
    return graph;
}

const NodeSlot& TextileGraph::node(std::size_t index) const {
    if (index >= nodes_.size()) {
        throw GraphError("node index " + std::to_string(index) + " out of range");
    }
    return nodes_[index];
}

TextileGraph TextileGraph::with_label(std::optional<std::string> label) const {
    TextileGraph copy = *this;
    copy.label_ = std::move(label);
    return copy;
}

bool ValidationReport::has(ViolationKind kind) const noexcept {
    for (const auto& v : violations) {
        if (v.kind == kind) {
            return true;
        }
    }
    return false;
}

std::string ValidationReport::summary() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) {
            out += "; ";
        }
        out += v.message;
    }
    return out;
}

ValidationReport validate(const TextileGraph& graph) {
    ValidationReport report;
    auto add = [&report](ViolationKind kind, std::vector<NodeIndex> nodes, std::string message) {
        report.violations.push_back({kind, std::move(nodes), std::move(message)});
    };

    const auto nodes = graph.nodes();
    const auto count = static_cast<NodeIndex>(nodes.size());
    if (nodes.size() % kSlotsPerCrossing != 0) {
        add(ViolationKind::NodeCount, {},
            "node count " + std::to_string(nodes.size()) + " is not a multiple of 4");
    }

    for (std::size_t c = 0; c < graph.crossing_count(); ++c) {
        const std::size_t base = c * kSlotsPerCrossing;
        std::vector<NodeIndex> top;
        for (std::size_t s = 0; s < kSlotsPerCrossing; ++s) {
            if (nodes[base + s].on_top) {
                top.push_back(static_cast<NodeIndex>(base + s));
            }
        }
        bool pair_ok = top.size() == 2 && nodes[top[0]].opposite == top[1] &&
                       nodes[top[1]].opposite == top[0];
        if (!pair_ok) {
            add(ViolationKind::TopPair, top,
                "Π-pair violation in crossing " + std::to_string(c) + ": " +
                    std::to_string(top.size()) + " top slots");
        }
        for (std::size_t s = 0; s < kSlotsPerCrossing; ++s) {
            const auto v = static_cast<NodeIndex>(base + s);
            const NodeIndex o = nodes[base + s].opposite;
            const bool inside = o >= static_cast<NodeIndex>(base) &&
                                o < static_cast<NodeIndex>(base + kSlotsPerCrossing) && o != v;
            if (!inside || nodes[o].opposite != v || nodes[o].on_top != nodes[v].on_top) {
                add(ViolationKind::Opposite, {v, o},
                    "opposite of node " + std::to_string(v) + " is " + std::to_string(o) +
                        ", not a matching slot of the same crossing");
            }
        }
    }

    for (NodeIndex v = 0; v < count; ++v) {
        const NodeIndex p = nodes[v].peer;
        if (p == kTerminal) {
            continue;
        }
        if (p < 0 || p >= count) {
            add(ViolationKind::PeerRange, {v, p},
                "peer " + std::to_string(p) + " of node " + std::to_string(v) + " out of range");
            continue;
        }
        if (TextileGraph::crossing_of(p) == TextileGraph::crossing_of(v)) {
            add(ViolationKind::PeerSameCrossing, {v, p},
                "node " + std::to_string(v) + " is linked to node " + std::to_string(p) +
                    " of its own crossing");
        }
        if (nodes[p].peer != v) {
            add(ViolationKind::PeerSymmetry, {v, p},
                "symmetry violation: node " + std::to_string(v) + " links to node " +
                    std::to_string(p) + " but node " + std::to_string(p) + " links to " +
                    std::to_string(nodes[p].peer));
        }
    }

    // Vacuous for symmetric peer links; kept so the report covers every invariant.
    if ((nodes.size() + graph.terminal_count()) % 2 != 0) {
        add(ViolationKind::Parity, {}, "4|Xi| + |T| is odd");
    }
    return report;
}

namespace {

class LineCursor {
public:
    LineCursor(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    bool at_end() {
        skip_space();
        return pos_ >= line_.size();
    }

    std::string_view word() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < line_.size() && !is_space(line_[pos_])) {
            ++pos_;
        }
        return line_.substr(start, pos_ - start);
    }

    std::int64_t integer(const char* what) {
        skip_space();
        const std::size_t column = pos_ + 1;
        const std::string_view token = word();
        if (token.empty()) {
            throw ParseError(line_no_, column, std::string("expected ") + what);
        }
        std::int64_t value = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size()) {
            throw ParseError(line_no_, column,
                             std::string("invalid integer '") + std::string(token) + "' for " + what);
        }
        return value;
    }

    /// Column of the next token.
    std::size_t column() {
        skip_space();
        return pos_ + 1;
    }

    /// Remainder of the line after one separating space, trailing CR removed.
    std::string_view rest() {
        if (pos_ < line_.size() && is_space(line_[pos_])) {
            ++pos_;
        }
        std::string_view r = line_.substr(pos_);
        while (!r.empty() && (r.back() == '\r' || r.back() == ' ' || r.back() == '\t')) {
            r.remove_suffix(1);
        }
        pos_ = line_.size();
        return r;
    }

private:
    static bool is_space(char ch) { return ch == ' ' || ch == '\t' || ch == '\r'; }
    void skip_space() {
        while (pos_ < line_.size() && is_space(line_[pos_])) {
            ++pos_;
        }
    }

    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        const std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace

TextileGraph parse(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) {
        throw ParseError(1, 1, "empty input, expected 'TG1 <n>'");
    }

    LineCursor header(lines[0], 1);
    if (header.word() != "TG1") {
        throw ParseError(1, 1, "expected 'TG1' magic");
    }
    const std::int64_t declared = header.integer("crossing count");
    if (declared < 0) {
        throw ParseError(1, 5, "negative crossing count");
    }
    if (!header.at_end()) {
        throw ParseError(1, header.column(), "trailing characters after crossing count");
    }

    const auto crossings = static_cast<std::size_t>(declared);
    std::vector<NodeIndex> peers;
    peers.reserve(crossings * kSlotsPerCrossing);
    std::optional<std::string> label;
    std::size_t rows = 0;

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const std::string_view line = lines[i];
        if (is_blank(line) || line.front() == '#') {
            continue;
        }
        LineCursor cursor(line, line_no);
        if (line.starts_with("LABEL")) {
            cursor.word();
            if (rows != 0 || label) {
                throw ParseError(line_no, 1, "LABEL must precede the crossing lines and appear once");
            }
            label = std::string(cursor.rest());
            continue;
        }
        if (rows == crossings) {
            throw ParseError(line_no, 1,
                             "count mismatch: more than " + std::to_string(crossings) +
                                 " crossing lines");
        }
        for (std::size_t s = 0; s < kSlotsPerCrossing; ++s) {
            const std::size_t column = cursor.column();
            const std::int64_t peer = cursor.integer("peer index");
            const auto limit = static_cast<std::int64_t>(crossings * kSlotsPerCrossing);
            if (peer < kTerminal || peer >= limit) {
                throw ParseError(line_no, column,
                                 "index out of range: peer " + std::to_string(peer) +
                                     " (node count " + std::to_string(limit) + ")");
            }
            peers.push_back(peer);
        }
        if (!cursor.at_end()) {
            throw ParseError(line_no, cursor.column(), "expected exactly four peers per crossing");
        }
        ++rows;
    }
    if (rows != crossings) {
        throw ParseError(lines.size(), 1,
                         "count mismatch: header declares " + std::to_string(crossings) +
                             " crossings, found " + std::to_string(rows));
    }

    TextileGraph graph = TextileGraph::from_peers(peers, std::move(label));
    const ValidationReport report = validate(graph);
    if (!report.ok()) {
        throw GraphError("invalid textile graph: " + report.summary());
    }
    return graph;
}

std::string serialize(const TextileGraph& graph) {
    std::string out = "TG1 " + std::to_string(graph.crossing_count()) + "\n";
    if (graph.label()) {
        out += "LABEL " + *graph.label() + "\n";
    }
    const auto nodes = graph.nodes();
    for (std::size_t c = 0; c < graph.crossing_count(); ++c) {
        for (std::size_t s = 0; s < kSlotsPerCrossing; ++s) {
            if (s != 0) {
                out += ' ';
            }
            out += std::to_string(nodes[c * kSlotsPerCrossing + s].peer);
        }
        out += '\n';
    }
    return out;
}

TextileGraph read_graph_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw GraphError("cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse(buffer.str());
    } catch (const GraphError& e) {
        throw GraphError(path + ": " + e.what());
    }
}

void write_graph_file(const std::string& path, const TextileGraph& graph) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << serialize(graph);
    if (!out) {
        throw std::runtime_error("write failed for " + path);
    }
}

TextileGraph permute_nodes(const TextileGraph& graph, std::span<const std::size_t> node_map) {
    const std::size_t n = graph.node_count();
    if (node_map.size() != n) {
        throw GraphError("node map size does not match the graph");
    }
    std::vector<char> seen(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t target = node_map[v];
        if (target >= n || seen[target]) {
            throw GraphError("node map is not a permutation");
        }
        seen[target] = 1;
        const std::size_t mate = node_map[v ^ 1U];
        if ((target ^ 1U) != mate) {
            throw GraphError("node map splits the thread pair of node " + std::to_string(v));
        }
        if (target / kSlotsPerCrossing != node_map[v - v % kSlotsPerCrossing] / kSlotsPerCrossing) {
            throw GraphError("node map splits crossing " + std::to_string(v / kSlotsPerCrossing));
        }
    }

    std::vector<NodeIndex> peers(n, kTerminal);
    const auto nodes = graph.nodes();
    for (std::size_t v = 0; v < n; ++v) {
        const NodeIndex p = nodes[v].peer;
        peers[node_map[v]] = p == kTerminal ? kTerminal : static_cast<NodeIndex>(node_map[p]);
    }
    return TextileGraph::from_peers(peers, graph.label());
}

}  // namespace textile
