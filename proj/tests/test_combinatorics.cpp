#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "knzeta/combinatorics.hpp"
#include "knzeta/errors.hpp"

using namespace knzeta;

namespace {

long at(const PrimeLaurent &x, int p) { return x.eval_exact(p).get_num().get_si(); }

long ipow(long b, int e) {
    long r = 1;
    for (int k = 0; k < e; ++k) {
        r *= b;
    }
    return r;
}

} // namespace

TEST_CASE("IndexSet basics") {
    const IndexSet J{4, 2, 3};
    CHECK(J.size() == 3);
    CHECK(J.members() == std::vector<int>{2, 3, 4});
    CHECK(J.str() == "{2,3,4}");
    CHECK(J.subsets(true, true).size() == 8);
    CHECK(J.subsets(false, false).size() == 6);
    CHECK(IndexSet::range(2, 4) == J);
}

TEST_CASE("pattern enumeration sizes") {
    CHECK(enumerate_patterns(IndexSet{2, 3}).size() == 1);
    CHECK(enumerate_patterns(IndexSet{2, 3, 4}).size() == 4);
    CHECK(enumerate_patterns(IndexSet{2, 3, 4, 5}).size() == 14);
    CHECK(enumerate_set_partitions(IndexSet{2, 3, 4, 5}).size() == 15);
    CHECK_THROWS_AS(enumerate_marked_patterns(IndexSet{}), Error);
}

TEST_CASE("class counts match the stated examples") {
    const CoincidencePattern pat{{IndexSet{2, 3}, IndexSet{4}}};
    CHECK(at(class_count(pat, CountMode::plain), 5) == 12);
    const auto brute = brute_force_pattern_counts(IndexSet{2, 3, 4}, 5);
    CHECK(brute.at(pat) == 12);
    const MarkedPattern marked{CoincidencePattern{{IndexSet{2}}}, 0};
    CHECK(at(class_count(marked), 5) == 1);
    CHECK(at(class_count(CoincidencePattern{{IndexSet{2}}}, CountMode::excluding_one), 5) == 3);
    CHECK(at(delta_count(IndexSet{2, 3}), 3) == 2);
    CHECK(at(pi_count(IndexSet{2}), 5) == 3);
    CHECK(delta_count(IndexSet{2}) == PrimeLaurent::p_minus(1));
}

TEST_CASE("completeness of plain and marked counts against brute force") {
    for (int p : {3, 5, 7}) {
        for (int k = 1; k <= 4; ++k) {
            CAPTURE(p);
            CAPTURE(k);
            const IndexSet J = IndexSet::range(2, k + 1);
            const auto brute = brute_force_pattern_counts(J, p);
            long total = at(delta_count(J), p);
            if (k >= 2) {
                for (const auto &pat : enumerate_patterns(J)) {
                    const long c = at(class_count(pat, CountMode::plain), p);
                    total += c;
                    const auto it = brute.find(pat);
                    CHECK((it == brute.end() ? 0 : it->second) == c);
                }
            }
            CHECK(total == ipow(p - 1, k));
            const auto marked_brute = brute_force_marked_counts(J, p);
            long marked_total = at(pi_count(J), p);
            for (const auto &mp : enumerate_marked_patterns(J)) {
                const long c = at(class_count(mp), p);
                marked_total += c;
                const auto it = marked_brute.find(mp);
                CHECK((it == marked_brute.end() ? 0 : it->second) == c);
            }
            CHECK(marked_total == ipow(p - 1, k));
        }
    }
}

TEST_CASE("counts vanish when there are more blocks than residues") {
    const IndexSet J{2, 3, 4};
    CHECK(at(delta_count(J), 3) == 0);
    CHECK(at(delta_count(J), 2) == 0);
    for (const auto &pat : enumerate_patterns(J)) {
        CHECK(at(class_count(pat, CountMode::plain), 2) == (pat.block_count() == 1 ? 1 : 0));
    }
}

TEST_CASE("blocks of the worked pattern") {
    const IndexSet J = IndexSet::range(2, 6);
    const CoincidencePattern pat = pattern_of_tuple(J, {1, 2, 1, 2, 2});
    const auto bl = blocks(pat);
    REQUIRE(bl.size() == 2);
    CHECK(bl[0] == IndexSet{2, 4});
    CHECK(bl[1] == IndexSet{3, 5, 6});
    CHECK(blocks(CoincidencePattern{{IndexSet{2, 3}, IndexSet{4}}}).size() == 1);
    CHECK(pat.coincident_pairs().size() == 4);
}

TEST_CASE("marked blocks are always returned") {
    const MarkedPattern mp = marked_pattern_of_tuple(IndexSet{2, 3, 4}, {1, 2, 2});
    REQUIRE(mp.marker.has_value());
    const auto bl = blocks(mp);
    REQUIRE(bl.size() == 2);
    int marked = 0;
    for (const Block &b : bl) {
        if (b.marked) {
            ++marked;
            CHECK(b.members == IndexSet{2});
        } else {
            CHECK(b.members == IndexSet{3, 4});
        }
    }
    CHECK(marked == 1);
}

TEST_CASE("blocks form a partition of the coincident indices") {
    for (const auto &pat : enumerate_patterns(IndexSet::range(2, 5))) {
        IndexSet seen;
        int total = 0;
        for (const IndexSet &b : blocks(pat)) {
            CHECK((seen & b).empty());
            seen = seen | b;
            total += b.size();
            CHECK(b.size() >= 2);
        }
        CHECK(seen.size() == total);
    }
}
