#include "textile/fingerprint.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <unordered_map>

namespace textile {

namespace {

void require_k(int k) {
    if (k < 1) {
        throw std::invalid_argument("neighbourhood size k must be positive, got " + std::to_string(k));
    }
}

/// Sorts the two branches of a pair in place. Branches are k labels wide.
template <typename It>
void order_pair(It first, It second, int k) {
    if (std::lexicographical_compare(second, second + k, first, first + k)) {
        std::swap_ranges(first, first + k, second);
    }
}

}  // namespace

char to_char(EdgeLabel label) noexcept {
    switch (label) {
        case EdgeLabel::Alternating:
            return 'a';
        case EdgeLabel::NonAlternating:
            return 'n';
        case EdgeLabel::Terminated:
            return 't';
        case EdgeLabel::Pad:
            return '_';
    }
    return '?';
}

EdgeLabel label_from_char(char ch) {
    switch (ch) {
        case 'a':
            return EdgeLabel::Alternating;
        case 'n':
            return EdgeLabel::NonAlternating;
        case 't':
            return EdgeLabel::Terminated;
        case '_':
            return EdgeLabel::Pad;
        default:
            throw std::invalid_argument(std::string("unknown edge label '") + ch + "'");
    }
}

EdgeLabel edge_label(const TextileGraph& graph, std::size_t node) {
    const NodeSlot& slot = graph.node(node);
    if (slot.peer == kTerminal) {
        return EdgeLabel::Terminated;
    }
    return slot.on_top != graph.node(static_cast<std::size_t>(slot.peer)).on_top
               ? EdgeLabel::Alternating
               : EdgeLabel::NonAlternating;
}

Neighbourhood::Neighbourhood(int k, std::vector<EdgeLabel> labels) : k_(k), labels_(std::move(labels)) {
    require_k(k);
    if (labels_.size() != static_cast<std::size_t>(4 * k)) {
        throw std::invalid_argument("neighbourhood needs 4*k labels");
    }
    for (int b = 0; b < 4; ++b) {
        bool ended = false;
        for (int i = 0; i < k; ++i) {
            const EdgeLabel l = labels_[static_cast<std::size_t>(b * k + i)];
            if (ended && l != EdgeLabel::Pad) {
                throw std::invalid_argument("label after termination in neighbourhood branch");
            }
            if (!ended && l == EdgeLabel::Pad) {
                throw std::invalid_argument("padding before termination in neighbourhood branch");
            }
            ended = l == EdgeLabel::Terminated || l == EdgeLabel::Pad;
        }
    }
    order_pair(labels_.begin(), labels_.begin() + k, k);
    order_pair(labels_.begin() + 2 * k, labels_.begin() + 3 * k, k);
}

Neighbourhood Neighbourhood::from_code(std::string_view code) {
    // [b0|b1][b2|b3]
    const std::size_t len = code.size();
    if (len < 10 || (len - 6) % 4 != 0) {
        throw std::invalid_argument("malformed neighbourhood code '" + std::string(code) + "'");
    }
    const int k = static_cast<int>((len - 6) / 4);
    const std::size_t w = static_cast<std::size_t>(k);
    const std::array<std::size_t, 4> starts{1, 2 + w, 4 + 2 * w, 5 + 3 * w};
    const bool frame = code[0] == '[' && code[1 + w] == '|' && code[2 + 2 * w] == ']' &&
                       code[3 + 2 * w] == '[' && code[4 + 3 * w] == '|' && code[5 + 4 * w] == ']';
    if (!frame) {
        throw std::invalid_argument("malformed neighbourhood code '" + std::string(code) + "'");
    }
    std::vector<EdgeLabel> labels;
    labels.reserve(4 * w);
    for (const std::size_t start : starts) {
        for (std::size_t i = 0; i < w; ++i) {
            labels.push_back(label_from_char(code[start + i]));
        }
    }
    return Neighbourhood(k, std::move(labels));
}

std::span<const EdgeLabel> Neighbourhood::branch(int index) const {
    if (index < 0 || index > 3) {
        throw std::out_of_range("branch index must be in 0..3");
    }
    return std::span<const EdgeLabel>(labels_).subspan(static_cast<std::size_t>(index * k_),
                                                       static_cast<std::size_t>(k_));
}

std::string Neighbourhood::code() const {
    std::string out;
    out.reserve(labels_.size() + 6);
    for (int b = 0; b < 4; ++b) {
        out += (b % 2 == 0) ? '[' : '|';
        for (const EdgeLabel l : branch(b)) {
            out += to_char(l);
        }
        if (b % 2 == 1) {
            out += ']';
        }
    }
    return out;
}

namespace {

/// Follows the thread leaving `start` and writes k labels into `out`.
void walk_branch(std::span<const NodeSlot> nodes, std::size_t start, int k, EdgeLabel* out) {
    std::size_t current = start;
    int step = 0;
    while (step < k) {
        const NodeSlot& here = nodes[current];
        if (here.peer == kTerminal) {
            out[step++] = EdgeLabel::Terminated;
            break;
        }
        const NodeSlot& next = nodes[static_cast<std::size_t>(here.peer)];
        out[step++] = here.on_top != next.on_top ? EdgeLabel::Alternating : EdgeLabel::NonAlternating;
        current = static_cast<std::size_t>(next.opposite);
    }
    std::fill(out + step, out + k, EdgeLabel::Pad);
}

/// Fills `labels` (4k entries) with the canonical branches of a crossing.
void collect(std::span<const NodeSlot> nodes, std::size_t crossing, int k, EdgeLabel* labels) {
    const std::size_t base = crossing * kSlotsPerCrossing;
    // Slot order: the two top-thread ends first, then the two bottom ends.
    std::array<std::size_t, 4> slots{};
    std::size_t top = 0;
    std::size_t bottom = 2;
    for (std::size_t s = 0; s < kSlotsPerCrossing; ++s) {
        if (nodes[base + s].on_top) {
            slots[top++] = base + s;
        } else {
            slots[bottom++] = base + s;
        }
    }
    for (std::size_t b = 0; b < 4; ++b) {
        walk_branch(nodes, slots[b], k, labels + b * static_cast<std::size_t>(k));
    }
    order_pair(labels, labels + k, k);
    order_pair(labels + 2 * k, labels + 3 * k, k);
}

}  // namespace

Neighbourhood k_neighbourhood(const TextileGraph& graph, std::size_t crossing, int k) {
    require_k(k);
    if (crossing >= graph.crossing_count()) {
        throw std::out_of_range("crossing index " + std::to_string(crossing) + " out of range");
    }
    std::vector<EdgeLabel> labels(static_cast<std::size_t>(4 * k));
    collect(graph.nodes(), crossing, k, labels.data());
    return Neighbourhood(k, std::move(labels));
}

Fingerprint::Fingerprint(int k, Counts counts) : k_(k), counts_(std::move(counts)) {
    require_k(k);
    for (auto it = counts_.begin(); it != counts_.end();) {
        if (it->first.k() != k) {
            throw std::invalid_argument("neighbourhood size does not match fingerprint k");
        }
        if (it->second == 0) {
            it = counts_.erase(it);
        } else {
            total_ += it->second;
            ++it;
        }
    }
}

std::uint64_t Fingerprint::count(const Neighbourhood& neighbourhood) const {
    const auto it = counts_.find(neighbourhood);
    return it == counts_.end() ? 0 : it->second;
}

void Fingerprint::add(const Neighbourhood& neighbourhood, std::uint64_t times) {
    if (neighbourhood.k() != k_) {
        throw std::invalid_argument("neighbourhood size does not match fingerprint k");
    }
    if (times == 0) {
        return;
    }
    counts_[neighbourhood] += times;
    total_ += times;
}

Fingerprint fingerprint(const TextileGraph& graph, int k) {
    require_k(k);
    const auto nodes = graph.nodes();
    const std::size_t width = static_cast<std::size_t>(4 * k);

    // Raw label bytes are the hash key; conversion to Neighbourhood happens
    // once per distinct key.
    std::unordered_map<std::string, std::uint64_t> raw;
    std::string key(width, '\0');
    for (std::size_t c = 0; c < graph.crossing_count(); ++c) {
        collect(nodes, c, k, reinterpret_cast<EdgeLabel*>(key.data()));
        ++raw[key];
    }

    // Byte order of the keys is the neighbourhood order, so sorted keys go
    // in at the end of the map.
    std::vector<std::pair<std::string, std::uint64_t>> sorted(raw.begin(), raw.end());
    std::sort(sorted.begin(), sorted.end());
    Fingerprint::Counts counts;
    for (const auto& [bytes, n] : sorted) {
        std::vector<EdgeLabel> labels(width);
        std::copy_n(reinterpret_cast<const EdgeLabel*>(bytes.data()), width, labels.begin());
        counts.emplace_hint(counts.end(), Neighbourhood(k, std::move(labels)), n);
    }
    return Fingerprint(k, std::move(counts));
}

}  // namespace textile
