#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textile/graph.hpp"

namespace textile {

/// Label of a thread segment between consecutive crossings. Declaration
/// order is the canonical sort order.
enum class EdgeLabel : std::uint8_t {
    Alternating = 0,     ///< 'a': the thread changes layer
    NonAlternating = 1,  ///< 'n': the thread stays on its layer
    Terminated = 2,      ///< 't': the thread ends
    Pad = 3,             ///< '_': fill after termination
};

char to_char(EdgeLabel label) noexcept;
EdgeLabel label_from_char(char ch);

/// Label of the edge leaving `node` through its peer link.
EdgeLabel edge_label(const TextileGraph& graph, std::size_t node);

/**
 * Canonical k-neighbourhood of a crossing.
 *
 * Four label sequences of length k: two walks starting from the top thread's
 * ends and two from the bottom thread's ends. Each pair is unordered and
 * stored sorted; the top pair always comes first.
 */
class Neighbourhood {
public:
    /// `labels` holds the four branches back to back (4 * k entries), in
    /// slot order. The constructor canonicalizes.
    Neighbourhood(int k, std::vector<EdgeLabel> labels);

    /// Parses the `[s1|s2][s3|s4]` code produced by code().
    static Neighbourhood from_code(std::string_view code);

    int k() const noexcept { return k_; }
    std::span<const EdgeLabel> branch(int index) const;
    std::span<const EdgeLabel> labels() const noexcept { return labels_; }

    /// `[at|at][at|at]`-style text with '_' for padding.
    std::string code() const;

    auto operator<=>(const Neighbourhood&) const = default;
    bool operator==(const Neighbourhood&) const = default;

private:
    int k_;
    std::vector<EdgeLabel> labels_;
};

/// Walks the four threads of `crossing` for k steps.
Neighbourhood k_neighbourhood(const TextileGraph& graph, std::size_t crossing, int k);

/// Multiset of the k-neighbourhoods of all crossings of a graph.
class Fingerprint {
public:
    using Counts = std::map<Neighbourhood, std::uint64_t>;

    explicit Fingerprint(int k) : k_(k) {}
    Fingerprint(int k, Counts counts);

    int k() const noexcept { return k_; }
    const Counts& counts() const noexcept { return counts_; }
    std::uint64_t total() const noexcept { return total_; }
    std::size_t distinct() const noexcept { return counts_.size(); }
    std::uint64_t count(const Neighbourhood& neighbourhood) const;

    void add(const Neighbourhood& neighbourhood, std::uint64_t times = 1);

    bool operator==(const Fingerprint&) const = default;

private:
    int k_;
    Counts counts_;
    std::uint64_t total_ = 0;
};

/// Runs in O(n * k) for n crossings.
Fingerprint fingerprint(const TextileGraph& graph, int k);

}  // namespace textile
