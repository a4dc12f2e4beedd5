#ifndef KNZETA_COMBINATORICS_HPP
#define KNZETA_COMBINATORICS_HPP

// Equivalence classes of residue tuples in (F_p^x)^|J| described by their
// coincidence pattern (a set partition of J), optionally with a block pinned
// to the residue 1. Class sizes are falling factorials in the symbolic p.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "knzeta/symbolic.hpp"

namespace knzeta {

// Sorted set of indices in 1..31, stored as a bit mask.
class IndexSet {
public:
    IndexSet() = default;
    IndexSet(std::initializer_list<int> members);
    explicit IndexSet(const std::vector<int> &members);
    static IndexSet from_bits(std::uint32_t bits) { return IndexSet(bits, 0); }
    // {lo, lo+1, ..., hi}
    static IndexSet range(int lo, int hi);

    std::uint32_t bits() const { return bits_; }
    int size() const;
    bool empty() const { return bits_ == 0; }
    bool contains(int i) const { return i >= 0 && i < 32 && ((bits_ >> i) & 1U) != 0; }
    bool subset_of(const IndexSet &o) const { return (bits_ & ~o.bits_) == 0; }
    std::vector<int> members() const;
    int min() const;

    IndexSet operator|(const IndexSet &o) const { return from_bits(bits_ | o.bits_); }
    IndexSet operator&(const IndexSet &o) const { return from_bits(bits_ & o.bits_); }
    IndexSet operator-(const IndexSet &o) const { return from_bits(bits_ & ~o.bits_); }

    // All subsets; the nonempty proper ones are selected with the flags.
    std::vector<IndexSet> subsets(bool include_empty, bool include_full) const;

    std::string str() const;

    friend bool operator==(const IndexSet &, const IndexSet &) = default;
    friend auto operator<=>(const IndexSet &, const IndexSet &) = default;

private:
    IndexSet(std::uint32_t bits, int) : bits_(bits) {}
    std::uint32_t bits_ = 0;
};

// Pairs (i, j), i < j, with both ends in the set.
std::vector<SVar> pairs_within(const IndexSet &s);

// Set partition of an index set; blocks are sorted by their smallest member.
struct CoincidencePattern {
    std::vector<IndexSet> blocks;

    IndexSet support() const;
    bool has_coincidence() const;
    std::size_t block_count() const { return blocks.size(); }
    // All pairs lying within one block, i.e. K(a).
    std::vector<SVar> coincident_pairs() const;
    std::string str() const;

    friend bool operator==(const CoincidencePattern &, const CoincidencePattern &) = default;
    friend auto operator<=>(const CoincidencePattern &, const CoincidencePattern &) = default;
};

// Partition plus an optional block whose residue is pinned to 1.
struct MarkedPattern {
    CoincidencePattern partition;
    std::optional<std::size_t> marker;

    std::string str() const;

    friend bool operator==(const MarkedPattern &, const MarkedPattern &) = default;
    friend auto operator<=>(const MarkedPattern &, const MarkedPattern &) = default;
};

enum class CountMode { plain, excluding_one };

// Every set partition of J, in a deterministic order.
std::vector<CoincidencePattern> enumerate_set_partitions(const IndexSet &J);
// Set partitions of J with at least one block of size >= 2. Requires |J| >= 2.
std::vector<CoincidencePattern> enumerate_patterns(const IndexSet &J);
// Partitions with optional marked block, excluding all-singletons without marker.
std::vector<MarkedPattern> enumerate_marked_patterns(const IndexSet &J);

PrimeLaurent class_count(const CoincidencePattern &pat, CountMode mode);
PrimeLaurent class_count(const MarkedPattern &pat, CountMode mode = CountMode::excluding_one);
PrimeLaurent delta_count(const IndexSet &J);
PrimeLaurent pi_count(const IndexSet &J);

struct Block {
    IndexSet members;
    bool marked = false;
};

// Non-singleton blocks of the pattern.
std::vector<IndexSet> blocks(const CoincidencePattern &pat);
// Non-singleton unmarked blocks plus the marked block (always, tagged).
std::vector<Block> blocks(const MarkedPattern &pat);

// Coincidence pattern of a residue tuple indexed by the members of J.
CoincidencePattern pattern_of_tuple(const IndexSet &J, const std::vector<int> &residues);
MarkedPattern marked_pattern_of_tuple(const IndexSet &J, const std::vector<int> &residues);

// Brute-force class sizes over (F_p^x)^|J| keyed by pattern.
std::map<CoincidencePattern, long> brute_force_pattern_counts(const IndexSet &J, int p);
std::map<MarkedPattern, long> brute_force_marked_counts(const IndexSet &J, int p);

} // namespace knzeta

#endif
