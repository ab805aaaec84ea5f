#include "doctest.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "svi/rng.hpp"
#include "svi/space.hpp"

using namespace svi;

namespace {

// bitmask oracle for the dyadic model at maxDepth 6: one bit per tick
MeasurableSet setFromBits(const SpaceModel& s, std::uint64_t bits) {
    std::vector<MeasurableSet::Run> runs;
    int i = 0;
    while (i < 64) {
        if (!((bits >> i) & 1)) { ++i; continue; }
        int j = i;
        while (j < 64 && ((bits >> j) & 1)) ++j;
        runs.push_back({static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
        i = j;
    }
    return MeasurableSet::fromRuns(s, std::move(runs));
}

std::uint64_t bitsOfSet(const MeasurableSet& m) {
    std::uint64_t bits = 0;
    for (const auto& [a, b] : m.runs())
        for (std::uint64_t t = a; t < b; ++t) bits |= 1ull << t;
    return bits;
}

} // namespace

TEST_CASE("run lists are canonicalized") {
    SpaceModel s = SpaceModel::dyadic(6);
    MeasurableSet a = MeasurableSet::fromRuns(s, {{8, 12}, {0, 4}, {4, 8}, {10, 14}, {20, 20}});
    REQUIRE(a.runs().size() == 1);
    CHECK(a.runs()[0] == MeasurableSet::Run{0, 14});
    CHECK(a == MeasurableSet::fromRuns(s, {{0, 14}}));
    CHECK(MeasurableSet::fromRuns(s, {}).isEmpty());
    CHECK(MeasurableSet::fromRuns(s, {{3, 3}}).isEmpty());
}

TEST_CASE("set algebra agrees with the tick bitmask oracle") {
    SpaceModel s = SpaceModel::dyadic(6);
    Rng rng(101);
    for (int trial = 0; trial < 1500; ++trial) {
        std::uint64_t x = rng.next();
        std::uint64_t y = rng.next();
        MeasurableSet a = setFromBits(s, x);
        MeasurableSet b = setFromBits(s, y);
        CHECK(bitsOfSet(a.unionWith(b)) == (x | y));
        CHECK(bitsOfSet(a.intersectWith(b)) == (x & y));
        CHECK(bitsOfSet(a.differenceWith(b)) == (x & ~y));
        CHECK(bitsOfSet(a.complement()) == ~x);
        CHECK(a.subsetOf(b) == ((x & ~y) == 0));
        CHECK(a.disjointFrom(b) == ((x & y) == 0));
        CHECK((a == b) == (x == y));
        if (x == y) CHECK(a.hashKey() == b.hashKey());
    }
}

TEST_CASE("maximal cell decomposition is aligned, maximal and exact") {
    SpaceModel s = SpaceModel::dyadic(3);
    MeasurableSet m = MeasurableSet::fromRuns(s, {{1, 6}});
    auto cs = m.cells();
    REQUIRE(cs.size() == 3);
    CHECK(cs[0] == DyadicCell{3, 1}); // [1/8, 2/8)
    CHECK(cs[1] == DyadicCell{2, 1}); // [2/8, 4/8)
    CHECK(cs[2] == DyadicCell{2, 2}); // [4/8, 6/8)

    CHECK(MeasurableSet::full(s).cells().size() == 1);
    CHECK(MeasurableSet::full(s).cells()[0] == DyadicCell{0, 0});

    SpaceModel s6 = SpaceModel::dyadic(6);
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        MeasurableSet a = setFromBits(s6, rng.next());
        MeasurableSet rebuilt = MeasurableSet::empty(s6);
        std::uint64_t total = 0;
        for (const auto& c : a.cells()) {
            MeasurableSet piece = MeasurableSet::cell(s6, c.depth, c.index);
            CHECK(rebuilt.disjointFrom(piece));
            rebuilt = rebuilt.unionWith(piece);
            total += 1ull << (6 - c.depth);
            // maximality: the enclosing cell one level up is not inside a
            if (c.depth > 0) {
                MeasurableSet parent = MeasurableSet::cell(s6, c.depth - 1, c.index / 2);
                CHECK(!parent.subsetOf(a));
            }
        }
        CHECK(rebuilt == a);
        CHECK(total == a.tickCount());
    }
}

TEST_CASE("cells at rational points form the nested chain around the point") {
    SpaceModel s = SpaceModel::dyadic(10);
    MeasurableSet prev = MeasurableSet::full(s);
    for (int d = 1; d <= 10; ++d) {
        MeasurableSet c = MeasurableSet::cellAtRational(s, d, 1, 3);
        CHECK(c.tickCount() == (1ull << (10 - d)));
        CHECK(c.subsetOf(prev));
        CHECK(c.containsRational(1, 3));
        CHECK(!c.containsRational(2, 3));
        prev = c;
    }
    // 1/3 in [1/4, 1/2) at depth 2, in [1/4, 3/8) at depth 3
    CHECK(MeasurableSet::cellAtRational(s, 2, 1, 3) == MeasurableSet::cell(s, 2, 1));
    CHECK(MeasurableSet::cellAtRational(s, 3, 1, 3) == MeasurableSet::cell(s, 3, 2));
    // the endpoint 1 clamps into the last cell
    CHECK(MeasurableSet::cellAtRational(s, 4, 1, 1) == MeasurableSet::cell(s, 4, 15));
    CHECK(tickOf(s, 1.0) == s.ticks() - 1);
    CHECK(tickOf(s, 0.0) == 0);
}

TEST_CASE("lebesgue mass is exact on cells and unions") {
    SpaceModel s = SpaceModel::dyadic(20);
    for (int d = 0; d <= 20; d += 5)
        CHECK(MeasurableSet::cell(s, d, 0).lebesgue() == std::ldexp(1.0, -d));
    MeasurableSet a = MeasurableSet::cell(s, 2, 0).unionWith(MeasurableSet::cell(s, 2, 3));
    CHECK(a.lebesgue() == 0.5);
    CHECK(MeasurableSet::full(s).lebesgue() == 1.0);
    CHECK(MeasurableSet::empty(s).lebesgue() == 0.0);
}

TEST_CASE("pieces split along the chain and the streaming variant agrees") {
    SpaceModel s = SpaceModel::dyadic(8);
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        std::uint64_t bits = rng.next();
        SpaceModel s6 = SpaceModel::dyadic(6);
        MeasurableSet a = setFromBits(s6, bits);
        for (int d = 0; d <= 6; d += 2) {
            auto ps = a.pieces(d);
            std::vector<MeasurableSet> streamed;
            a.eachPiece(d, [&](MeasurableSet&& p) { streamed.push_back(std::move(p)); });
            REQUIRE(ps.size() == streamed.size());
            MeasurableSet rebuilt = MeasurableSet::empty(s6);
            for (std::size_t i = 0; i < ps.size(); ++i) {
                CHECK(ps[i] == streamed[i]);
                CHECK(!ps[i].isEmpty());
                CHECK(ps[i].subsetOf(a));
                rebuilt = rebuilt.unionWith(ps[i]);
            }
            CHECK(rebuilt == a);
        }
    }
    CHECK(MeasurableSet::full(s).pieces(3).size() == 8);
    // each piece sits inside one depth-d chain cell
    MeasurableSet m = MeasurableSet::fromRuns(s, {{0, 96}});
    auto ps = m.pieces(2);
    REQUIRE(ps.size() == 2); // [0,64) and [64,96)
    CHECK(ps[0] == MeasurableSet::cell(s, 2, 0));
    CHECK(ps[1] == MeasurableSet::fromRuns(s, {{64, 96}}));
}

TEST_CASE("representative and sampled points land inside the set") {
    SpaceModel s = SpaceModel::dyadic(8);
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        SpaceModel s6 = SpaceModel::dyadic(6);
        MeasurableSet a = setFromBits(s6, rng.next() | 1);
        CHECK(a.containsPoint(a.repPoint()));
        for (int k = 0; k < 20; ++k) CHECK(a.containsPoint(a.samplePoint(rng)));
    }
    // the representative is deterministic
    MeasurableSet b = MeasurableSet::cell(s, 1, 1);
    CHECK(b.repPoint() == 0.75);
    CHECK(b.containsPoint(0.5));
    CHECK(!b.containsPoint(0.25));
    CHECK(!MeasurableSet::cell(s, 2, 1).containsPoint(0.5)); // [0.25,0.5) is half open
}

TEST_CASE("finite model sets behave as bitmasks") {
    SpaceModel s = SpaceModel::finite(8);
    MeasurableSet a = MeasurableSet::fromMask(s, 0b10110101);
    MeasurableSet b = MeasurableSet::fromMask(s, 0b01100110);
    CHECK(a.elementCount() == 5);
    CHECK(a.unionWith(b).mask() == 0b11110111);
    CHECK(a.intersectWith(b).mask() == 0b00100100);
    CHECK(a.differenceWith(b).mask() == 0b10010001);
    CHECK(a.complement().mask() == 0b01001010);
    CHECK(MeasurableSet::full(s).mask() == 0xff);
    CHECK(a.repPoint() == 0.0); // lowest member
    auto blocks = MeasurableSet::full(s).pieces(1);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].mask() == 0x0f);
    CHECK(blocks[1].mask() == 0xf0);
    auto singles = MeasurableSet::full(s).pieces(3);
    CHECK(singles.size() == 8);
    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        double p = a.samplePoint(rng);
        CHECK(((a.mask() >> static_cast<int>(p)) & 1) == 1);
    }
}

TEST_CASE("distinct sampled sets get distinct hash keys") {
    SpaceModel s = SpaceModel::dyadic(6);
    Rng rng(77);
    std::set<std::uint64_t> keys;
    std::set<std::uint64_t> masks;
    for (int trial = 0; trial < 3000; ++trial) {
        std::uint64_t bits = rng.next();
        if (!masks.insert(bits).second) continue;
        CHECK(keys.insert(setFromBits(s, bits).hashKey()).second);
    }
}
