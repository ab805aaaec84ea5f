#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "svi/partition.hpp"
#include "svi/rng.hpp"
#include "svi/space.hpp"

using namespace svi;

TEST_CASE("partitions validate disjointness and nonemptiness") {
    SpaceModel s = SpaceModel::dyadic(4);
    Partition good = Partition::finiteOf({MeasurableSet::cell(s, 1, 0), MeasurableSet::cell(s, 1, 1)});
    CHECK(good.valid());
    CHECK(good.domain() == MeasurableSet::full(s));

    Partition overlap = Partition::finiteOf({MeasurableSet::cell(s, 1, 0), MeasurableSet::cell(s, 2, 1)});
    CHECK(!overlap.valid());

    Partition hole = Partition::finiteOf({MeasurableSet::cell(s, 2, 0), MeasurableSet::empty(s)});
    CHECK(!hole.valid());

    CHECK_THROWS_AS(Partition::finiteOf({}), std::invalid_argument);
}

TEST_CASE("chain partitions double in size and refine each other") {
    SpaceModel s = SpaceModel::dyadic(5);
    auto chain = dyadicChain(MeasurableSet::full(s), 3);
    REQUIRE(chain.size() == 4);
    for (std::size_t m = 0; m < chain.size(); ++m) {
        CHECK(chain[m].cells.size() == (1ull << m));
        CHECK(chain[m].valid());
        CHECK(chain[m].domain() == MeasurableSet::full(s));
        if (m > 0) {
            CHECK(isFiner(chain[m], chain[m - 1]));
            CHECK(!isFiner(chain[m - 1], chain[m]));
        }
    }

    // a chain over a proper subset stays inside it
    MeasurableSet half = MeasurableSet::cell(s, 1, 1);
    auto sub = dyadicChain(half, 2);
    for (const auto& p : sub) CHECK(p.domain() == half);
}

TEST_CASE("common refinements refine both arguments") {
    SpaceModel s = SpaceModel::dyadic(5);
    MeasurableSet full = MeasurableSet::full(s);
    Partition a = Partition::finiteOf(full.pieces(1));
    Partition b = Partition::finiteOf({MeasurableSet::fromRuns(s, {{0, 8}}),
                                       MeasurableSet::fromRuns(s, {{8, 32}})});
    Partition c = commonRefinement(a, b);
    CHECK(c.valid());
    CHECK(c.domain() == full);
    CHECK(isFiner(c, a));
    CHECK(isFiner(c, b));
    CHECK(c.cells.size() == 3); // [0,8) [8,16) [16,32)
}

TEST_CASE("random refinements are genuine refinements") {
    SpaceModel s = SpaceModel::dyadic(8);
    Rng rng(21);
    MeasurableSet full = MeasurableSet::full(s);
    Partition base = Partition::finiteOf(full.pieces(2));
    for (int t = 0; t < 50; ++t) {
        Partition r = randomRefinement(base, 3, rng);
        CHECK(r.valid());
        CHECK(r.domain() == full);
        CHECK(isFiner(r, base));
    }
    // refinement depth is capped by the space resolution
    Partition deep = randomRefinement(Partition::finiteOf(full.pieces(7)), 5, rng);
    CHECK(deep.valid());
    CHECK(isFiner(deep, Partition::finiteOf(full.pieces(7))));
}

TEST_CASE("shell enumerations cover the interval exactly once") {
    SpaceModel s = SpaceModel::dyadic(6);
    for (auto g : {CountableGenerator::geometric(s, 1, 1), CountableGenerator::geometric(s, 1, 3),
                   CountableGenerator::dyadicTail(s, 2)}) {
        INFO(g.id());
        CHECK(g.shellCount() >= 3);
        Partition full = g.truncate(g.maxTruncation());
        CHECK(full.valid());
        CHECK(full.domain() == MeasurableSet::full(s));
        REQUIRE(full.tailSet.has_value());
        CHECK(full.tailSet->isEmpty());
        MeasurableSet acc = MeasurableSet::empty(s);
        for (const auto& c : full.cells) {
            CHECK(acc.disjointFrom(c));
            acc = acc.unionWith(c);
        }
        CHECK(acc == MeasurableSet::full(s));
    }
}

TEST_CASE("shells around a point ring the point and the tail shrinks onto it") {
    SpaceModel s = SpaceModel::dyadic(8);
    CountableGenerator g = CountableGenerator::geometric(s, 1, 3);
    // every truncation leaves the point in the tail, except the full one
    for (int n = 1; n < g.maxTruncation(); ++n) {
        Partition p = g.truncate(n);
        CHECK(p.valid());
        CHECK(p.domain() == MeasurableSet::full(s));
        REQUIRE(p.tailSet.has_value());
        CHECK(p.tailSet->containsRational(1, 3));
        for (const auto& c : p.cells) CHECK(!c.containsRational(1, 3));
        CHECK(p.tailSet->tickCount() == (1ull << (8 - n)));
    }
    // only the last enumerated cell contains the point
    Partition full = g.truncate(g.maxTruncation());
    int holders = 0;
    for (const auto& c : full.cells)
        if (c.containsRational(1, 3)) ++holders;
    CHECK(holders == 1);
    CHECK(full.cells.back().containsRational(1, 3));

    CHECK_THROWS_AS(g.truncate(0), std::invalid_argument);
    CHECK_THROWS_AS(g.truncate(g.maxTruncation() + 1), std::invalid_argument);
}

TEST_CASE("shells around the right endpoint halve in width") {
    SpaceModel s = SpaceModel::dyadic(6);
    CountableGenerator g = CountableGenerator::geometric(s, 1, 1);
    Partition p = g.truncate(3);
    REQUIRE(p.cells.size() == 3);
    CHECK(p.cells[0] == MeasurableSet::cell(s, 1, 0));          // [0, 1/2)
    CHECK(p.cells[1] == MeasurableSet::cell(s, 2, 2));          // [1/2, 3/4)
    CHECK(p.cells[2] == MeasurableSet::cell(s, 3, 6));          // [3/4, 7/8)
    CHECK(*p.tailSet == MeasurableSet::cell(s, 3, 7));          // [7/8, 1)
}

TEST_CASE("tagged partitions keep tags inside their cells under the free discipline") {
    SpaceModel s = SpaceModel::dyadic(6);
    MeasurableSet full = MeasurableSet::full(s);
    Partition base = Partition::finiteOf(full.pieces(2));
    TaggedPartition tp;
    tp.base = base;
    tp.discipline = TagDiscipline::henstock;
    for (const auto& c : base.cells) tp.tags.push_back(c.repPoint());
    CHECK(tp.tagsConsistent());

    tp.tags[0] = 0.9; // outside cell [0,1/4)
    CHECK(!tp.tagsConsistent());
    tp.discipline = TagDiscipline::mcshane; // free tags may roam
    CHECK(tp.tagsConsistent());

    tp.tags.pop_back();
    CHECK(!tp.tagsConsistent()); // arity mismatch
}
