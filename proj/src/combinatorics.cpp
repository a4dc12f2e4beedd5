#include "knzeta/combinatorics.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <sstream>

namespace knzeta {

// ---------------------------------------------------------------- IndexSet

IndexSet::IndexSet(std::initializer_list<int> members) : IndexSet(std::vector<int>(members)) {}

IndexSet::IndexSet(const std::vector<int> &members) {
    for (int i : members) {
        if (i < 1 || i > 31) {
            throw Error(ErrorCode::InvalidVariable, "index " + std::to_string(i) + " out of range");
        }
        bits_ |= 1U << i;
    }
}

IndexSet IndexSet::range(int lo, int hi) {
    std::uint32_t b = 0;
    for (int i = lo; i <= hi; ++i) {
        b |= 1U << i;
    }
    return from_bits(b);
}

int IndexSet::size() const { return std::popcount(bits_); }

std::vector<int> IndexSet::members() const {
    std::vector<int> out;
    for (int i = 0; i < 32; ++i) {
        if (contains(i)) {
            out.push_back(i);
        }
    }
    return out;
}

int IndexSet::min() const { return bits_ == 0 ? -1 : std::countr_zero(bits_); }

std::vector<IndexSet> IndexSet::subsets(bool include_empty, bool include_full) const {
    std::vector<IndexSet> out;
    // Enumerates submasks in increasing numeric order.
    std::uint32_t sub = 0;
    while (true) {
        const bool is_empty = sub == 0;
        const bool is_full = sub == bits_;
        if ((!is_empty || include_empty) && (!is_full || include_full)) {
            out.push_back(from_bits(sub));
        }
        if (sub == bits_) {
            break;
        }
        sub = (sub - bits_) & bits_;
    }
    return out;
}

std::string IndexSet::str() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (int i : members()) {
        os << (first ? "" : ",") << i;
        first = false;
    }
    os << "}";
    return os.str();
}

std::vector<SVar> pairs_within(const IndexSet &s) {
    std::vector<SVar> out;
    const auto m = s.members();
    for (std::size_t a = 0; a < m.size(); ++a) {
        for (std::size_t b = a + 1; b < m.size(); ++b) {
            out.push_back(SVar{m[a], m[b]});
        }
    }
    return out;
}

// ---------------------------------------------------------------- patterns

IndexSet CoincidencePattern::support() const {
    IndexSet s;
    for (const auto &b : blocks) {
        s = s | b;
    }
    return s;
}

bool CoincidencePattern::has_coincidence() const {
    return std::any_of(blocks.begin(), blocks.end(), [](const IndexSet &b) { return b.size() >= 2; });
}

std::vector<SVar> CoincidencePattern::coincident_pairs() const {
    std::vector<SVar> out;
    for (const auto &b : blocks) {
        const auto pb = pairs_within(b);
        out.insert(out.end(), pb.begin(), pb.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string CoincidencePattern::str() const {
    std::ostringstream os;
    os << "{";
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        os << (k ? "," : "") << blocks[k].str();
    }
    os << "}";
    return os.str();
}

std::string MarkedPattern::str() const {
    std::ostringstream os;
    os << partition.str();
    if (marker) {
        os << " marked " << partition.blocks[*marker].str();
    }
    return os.str();
}

std::vector<CoincidencePattern> enumerate_set_partitions(const IndexSet &J) {
    const auto m = J.members();
    std::vector<CoincidencePattern> out;
    std::vector<IndexSet> current;
    // Restricted-growth enumeration: element k joins an existing block or opens a new one.
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == m.size()) {
            out.push_back(CoincidencePattern{current});
            return;
        }
        const IndexSet e{m[k]};
        for (std::size_t b = 0; b < current.size(); ++b) {
            const IndexSet saved = current[b];
            current[b] = current[b] | e;
            rec(k + 1);
            current[b] = saved;
        }
        current.push_back(e);
        rec(k + 1);
        current.pop_back();
    };
    rec(0);
    return out;
}

std::vector<CoincidencePattern> enumerate_patterns(const IndexSet &J) {
    if (J.empty()) {
        throw Error(ErrorCode::EmptyIndexSet, "enumerate_patterns");
    }
    if (J.size() < 2) {
        throw Error(ErrorCode::IndexTooSmall, "enumerate_patterns needs |J| >= 2");
    }
    auto all = enumerate_set_partitions(J);
    std::erase_if(all, [](const CoincidencePattern &c) { return !c.has_coincidence(); });
    return all;
}

std::vector<MarkedPattern> enumerate_marked_patterns(const IndexSet &J) {
    if (J.empty()) {
        throw Error(ErrorCode::EmptyIndexSet, "enumerate_marked_patterns");
    }
    std::vector<MarkedPattern> out;
    for (const auto &part : enumerate_set_partitions(J)) {
        if (part.has_coincidence()) {
            out.push_back(MarkedPattern{part, std::nullopt});
        }
        for (std::size_t b = 0; b < part.blocks.size(); ++b) {
            out.push_back(MarkedPattern{part, b});
        }
    }
    return out;
}

PrimeLaurent class_count(const CoincidencePattern &pat, CountMode mode) {
    const long k = static_cast<long>(pat.block_count());
    return mode == CountMode::plain ? PrimeLaurent::falling(1, k) : PrimeLaurent::falling(2, k + 1);
}

PrimeLaurent class_count(const MarkedPattern &pat, CountMode mode) {
    const long k = static_cast<long>(pat.partition.block_count());
    if (mode == CountMode::plain || !pat.marker) {
        return class_count(pat.partition, mode);
    }
    return PrimeLaurent::falling(2, k);
}

PrimeLaurent delta_count(const IndexSet &J) {
    if (J.empty()) {
        throw Error(ErrorCode::EmptyIndexSet, "delta_count");
    }
    return PrimeLaurent::falling(1, J.size());
}

PrimeLaurent pi_count(const IndexSet &J) {
    if (J.empty()) {
        throw Error(ErrorCode::EmptyIndexSet, "pi_count");
    }
    return PrimeLaurent::falling(2, J.size() + 1);
}

std::vector<IndexSet> blocks(const CoincidencePattern &pat) {
    std::vector<IndexSet> out;
    for (const auto &b : pat.blocks) {
        if (b.size() >= 2) {
            out.push_back(b);
        }
    }
    return out;
}

std::vector<Block> blocks(const MarkedPattern &pat) {
    std::vector<Block> out;
    for (std::size_t k = 0; k < pat.partition.blocks.size(); ++k) {
        const bool marked = pat.marker && *pat.marker == k;
        if (marked || pat.partition.blocks[k].size() >= 2) {
            out.push_back(Block{pat.partition.blocks[k], marked});
        }
    }
    return out;
}

CoincidencePattern pattern_of_tuple(const IndexSet &J, const std::vector<int> &residues) {
    const auto m = J.members();
    if (m.size() != residues.size()) {
        throw Error(ErrorCode::InvalidVariable, "tuple length does not match index set");
    }
    std::vector<std::pair<int, IndexSet>> by_value;
    for (std::size_t k = 0; k < m.size(); ++k) {
        auto it = std::find_if(by_value.begin(), by_value.end(),
                               [&](const auto &e) { return e.first == residues[k]; });
        if (it == by_value.end()) {
            by_value.emplace_back(residues[k], IndexSet{m[k]});
        } else {
            it->second = it->second | IndexSet{m[k]};
        }
    }
    CoincidencePattern pat;
    for (const auto &e : by_value) {
        pat.blocks.push_back(e.second);
    }
    std::sort(pat.blocks.begin(), pat.blocks.end(),
              [](const IndexSet &a, const IndexSet &b) { return a.min() < b.min(); });
    return pat;
}

MarkedPattern marked_pattern_of_tuple(const IndexSet &J, const std::vector<int> &residues) {
    MarkedPattern mp{pattern_of_tuple(J, residues), std::nullopt};
    const auto m = J.members();
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (residues[k] == 1) {
            for (std::size_t b = 0; b < mp.partition.blocks.size(); ++b) {
                if (mp.partition.blocks[b].contains(m[k])) {
                    mp.marker = b;
                }
            }
        }
    }
    return mp;
}

namespace {

template <typename F>
void for_each_unit_tuple(std::size_t n, int p, F &&f) {
    std::vector<int> t(n, 1);
    while (true) {
        f(t);
        std::size_t k = 0;
        while (k < n && t[k] == p - 1) {
            t[k] = 1;
            ++k;
        }
        if (k == n) {
            return;
        }
        ++t[k];
    }
}

} // namespace

std::map<CoincidencePattern, long> brute_force_pattern_counts(const IndexSet &J, int p) {
    std::map<CoincidencePattern, long> out;
    for_each_unit_tuple(static_cast<std::size_t>(J.size()), p,
                        [&](const std::vector<int> &t) { ++out[pattern_of_tuple(J, t)]; });
    return out;
}

std::map<MarkedPattern, long> brute_force_marked_counts(const IndexSet &J, int p) {
    std::map<MarkedPattern, long> out;
    for_each_unit_tuple(static_cast<std::size_t>(J.size()), p,
                        [&](const std::vector<int> &t) { ++out[marked_pattern_of_tuple(J, t)]; });
    return out;
}

} // namespace knzeta
