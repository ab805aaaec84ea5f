#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "svi/errors.hpp"
#include "svi/partition.hpp"
#include "svi/set_function.hpp"
#include "svi/space.hpp"

using namespace svi;

namespace {

SetFunctionProps measureProps() {
    SetFunctionProps p;
    p.finitelyAdditive = true;
    p.countablyAdditive = true;
    p.monotone = true;
    p.nullAdditive = true;
    p.nullNullAdditive = true;
    p.sigmaNullNullAdditive = true;
    p.continuousFromBelow = true;
    p.pointwiseNonAtomic = true;
    return p;
}

SetFunction makeLebesgue(const SpaceModel& s) {
    SetFunction f;
    f.space = s;
    f.evaluator = [](const MeasurableSet& a) { return a.lebesgue(); };
    f.declaredProps = measureProps();
    f.catalogId = "lebesgue";
    return f;
}

SetFunction makeLebesgueSquared(const SpaceModel& s) {
    SetFunction f;
    f.space = s;
    f.evaluator = [](const MeasurableSet& a) { double v = a.lebesgue(); return v * v; };
    f.declaredProps.monotone = true;
    // only the empty set is null at tick resolution, so the null-additivity
    // family of properties holds vacuously
    f.declaredProps.nullAdditive = true;
    f.declaredProps.nullNullAdditive = true;
    f.declaredProps.sigmaNullNullAdditive = true;
    f.declaredProps.continuousFromBelow = true;
    f.declaredProps.pointwiseNonAtomic = true;
    f.catalogId = "lebesgue-squared";
    return f;
}

SetFunction makeSqrtLebesgue(const SpaceModel& s) {
    SetFunction f;
    f.space = s;
    f.evaluator = [](const MeasurableSet& a) { return std::sqrt(a.lebesgue()); };
    f.declaredProps.monotone = true;
    f.declaredProps.nullAdditive = true;
    f.declaredProps.nullNullAdditive = true;
    f.declaredProps.sigmaNullNullAdditive = true;
    f.declaredProps.continuousFromBelow = true;
    // the deepest probe cells still carry visible mass
    f.declaredProps.pointwiseNonAtomic = false;
    f.catalogId = "sqrt-lebesgue";
    return f;
}

SetFunction makeDiracThird(const SpaceModel& s) {
    SetFunction f;
    f.space = s;
    f.evaluator = [](const MeasurableSet& a) { return a.containsRational(1, 3) ? 2.0 : 0.0; };
    f.declaredProps = measureProps();
    f.declaredProps.pointwiseNonAtomic = false;
    f.catalogId = "dirac-third";
    return f;
}

SetFunction makeCounting(const SpaceModel& s) {
    SetFunction f;
    f.space = s;
    f.evaluator = [](const MeasurableSet& a) { return static_cast<double>(a.elementCount()); };
    f.declaredProps = measureProps();
    f.declaredProps.pointwiseNonAtomic = false;
    f.catalogId = "finite-counting";
    return f;
}

SetFunction makeThreshold(const SpaceModel& s) {
    SetFunction f;
    f.space = s;
    f.evaluator = [](const MeasurableSet& a) { return a.elementCount() >= 2 ? 1.0 : 0.0; };
    f.declaredProps.monotone = true;
    f.declaredProps.continuousFromBelow = true;
    f.declaredProps.pointwiseNonAtomic = true; // singletons are null; its atoms are pairs
    f.catalogId = "finite-threshold";
    return f;
}

SetFunction makeWeighted(const SpaceModel& s) {
    SetFunction f;
    f.space = s;
    f.evaluator = [](const MeasurableSet& a) {
        static const double w[6] = {0.5, 0.0, 0.25, 0.0, 0.25, 0.0};
        double v = 0.0;
        for (int i = 0; i < 6; ++i)
            if ((a.mask() >> i) & 1) v += w[i];
        return v;
    };
    f.declaredProps = measureProps();
    f.declaredProps.pointwiseNonAtomic = false;
    f.catalogId = "finite-weighted-null";
    return f;
}

// independent supremum oracle at tick resolution: enumerate every set
// partition of the ticks and keep the best sum
double bellVariation(const SetFunction& mu, int ticks) {
    std::vector<std::uint64_t> blocks;
    double best = 0.0;
    auto setOf = [&](std::uint64_t bits) {
        std::vector<MeasurableSet::Run> runs;
        for (int t = 0; t < ticks; ++t)
            if ((bits >> t) & 1) runs.push_back({static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(t + 1)});
        return MeasurableSet::fromRuns(mu.space, std::move(runs));
    };
    auto rec = [&](auto&& self, int next) -> void {
        if (next == ticks) {
            double sum = 0.0;
            for (std::uint64_t b : blocks) sum += mu(setOf(b));
            best = std::max(best, sum);
            return;
        }
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            blocks[i] |= 1ull << next;
            self(self, next + 1);
            blocks[i] &= ~(1ull << next);
        }
        blocks.push_back(1ull << next);
        self(self, next + 1);
        blocks.pop_back();
    };
    rec(rec, 0);
    return best;
}

} // namespace

TEST_CASE("divergence rule triggers on thresholds and geometric trends") {
    DivergenceRule rule;
    CHECK(rule.diverging({2e6}));
    CHECK(!rule.diverging({1.0, 2.0, 4.0, 8.0})); // too short for the trend
    CHECK(rule.diverging({1.0, 2.0, 4.0, 8.0, 16.0}));
    CHECK(rule.diverging({1.0, 1.5, 2.25, 3.375, 5.0625, 7.59}));
    CHECK(!rule.diverging({1.0, 1.02, 1.04, 1.06, 1.08})); // growth below the ratio
    CHECK(!rule.diverging({16.0, 8.0, 4.0, 2.0, 1.0}));
    CHECK(!rule.diverging({1.0, 2.0, 4.0, 3.0, 6.0})); // a dip resets the trend
    CHECK(!rule.diverging({}));
}

TEST_CASE("variation reproduces the closed forms of the worked examples") {
    SpaceModel s = SpaceModel::dyadic(12);
    MeasurableSet full = MeasurableSet::full(s);

    // additive mass: every partition sums to the same total
    VariationResult lv = variation(makeLebesgue(s), full, 8);
    CHECK(lv.value == 1.0);
    CHECK(!lv.diverging);
    for (double v : lv.depthSequence) CHECK(v == 1.0);

    // squared mass never gains by splitting, so the supremum is mu itself
    VariationResult qv = variation(makeLebesgueSquared(s), full, 8);
    CHECK(qv.value == 1.0);
    MeasurableSet half = MeasurableSet::cell(s, 1, 0);
    CHECK(variation(makeLebesgueSquared(s), half, 8).value == 0.25);

    // square-root mass gains by every split: value 2^(m/2) at depth m
    VariationResult sv = variation(makeSqrtLebesgue(s), full, 12);
    CHECK(sv.diverging);
    REQUIRE(sv.depthSequence.size() == 5); // trend detected at depth 4
    CHECK(sv.depthSequence[4] == 4.0);
    CHECK(sv.depthSequence[2] == 2.0);

    // a point mass concentrates: the value is the mass at every depth
    VariationResult dv = variation(makeDiracThird(s), full, 8);
    CHECK(dv.value == 2.0);
    CHECK(!dv.diverging);
}

TEST_CASE("variation agrees with full set partition enumeration at small resolution") {
    SpaceModel s = SpaceModel::dyadic(3);
    MeasurableSet full = MeasurableSet::full(s);
    std::vector<SetFunction> fns = {makeLebesgue(s), makeLebesgueSquared(s),
                                    makeSqrtLebesgue(s), makeDiracThird(s)};
    for (const auto& mu : fns) {
        VariationResult v = variation(mu, full, 3);
        CHECK(v.value == doctest::Approx(bellVariation(mu, 8)).epsilon(1e-12));
    }
    // and on a proper subset
    MeasurableSet half = MeasurableSet::cell(s, 1, 1);
    VariationResult v = variation(makeSqrtLebesgue(s), half, 3);
    double best = 0.0; // partitions of [1/2,1) into its four ticks: finest wins
    best = 4.0 * std::sqrt(0.125);
    CHECK(v.value == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("variation on the finite model enumerates set partitions exactly") {
    SpaceModel s = SpaceModel::finite(6);
    MeasurableSet full = MeasurableSet::full(s);
    CHECK(variation(makeCounting(s), full, 0).value == 6.0);
    CHECK(variation(makeWeighted(s), full, 0).value == 1.0);
    // best packing of six points into blocks of two or more: three pairs
    CHECK(variation(makeThreshold(s), full, 0).value == 3.0);
    MeasurableSet five = MeasurableSet::fromMask(s, 0b11111);
    CHECK(variation(makeThreshold(s), five, 0).value == 2.0);
}

TEST_CASE("atom detection on point masses and additive masses") {
    SpaceModel s = SpaceModel::dyadic(12);
    SetFunction dirac = makeDiracThird(s);

    AtomCertificate c1 = isAtom(dirac, MeasurableSet::full(s), 8);
    CHECK(c1.atom);
    CHECK(c1.method == "cell-reduction");

    AtomCertificate c2 = isAtom(dirac, MeasurableSet::cell(s, 2, 1), 8);
    CHECK(c2.atom); // [1/4,1/2) contains the carrier point

    AtomCertificate c3 = isAtom(makeLebesgue(s), MeasurableSet::full(s), 6);
    CHECK(!c3.atom);
    REQUIRE(c3.witness.has_value());
    CHECK(c3.witness->lebesgue() > 0.0);

    // zero-mass sets are never atoms
    CHECK(!isAtom(dirac, MeasurableSet::cell(s, 2, 3), 8).atom);
    CHECK(!isAtom(dirac, MeasurableSet::empty(s), 8).atom);

    SetFunction sq = makeLebesgueSquared(s);
    CHECK(!isAtom(sq, MeasurableSet::full(s), 6).atom);
}

TEST_CASE("atom detection on the finite model walks all subsets") {
    SpaceModel s = SpaceModel::finite(6);
    SetFunction thr = makeThreshold(s);
    CHECK(isAtom(thr, MeasurableSet::fromMask(s, 0b000011), 0).atom);
    CHECK(isAtom(thr, MeasurableSet::fromMask(s, 0b000111), 0).atom);
    AtomCertificate quad = isAtom(thr, MeasurableSet::fromMask(s, 0b001111), 0);
    CHECK(!quad.atom); // splits into two visible pairs
    REQUIRE(quad.witness.has_value());
    CHECK(quad.witness->elementCount() >= 2);

    SetFunction cnt = makeCounting(s);
    CHECK(isAtom(cnt, MeasurableSet::fromMask(s, 0b000001), 0).atom);
    CHECK(!isAtom(cnt, MeasurableSet::fromMask(s, 0b000011), 0).atom);
}

TEST_CASE("declared properties survive the empirical classifier") {
    SpaceModel s = SpaceModel::dyadic(12);
    for (const auto& mu : {makeLebesgue(s), makeLebesgueSquared(s), makeSqrtLebesgue(s),
                           makeDiracThird(s)}) {
        ClassifyReport r = classify(mu, 40, 9);
        INFO(mu.catalogId);
        for (const auto& c : r.checks) {
            INFO(c.flag, " declared=", c.declared, " passed=", c.passed, " ", c.witness);
            CHECK(c.declared == c.passed);
        }
        CHECK(r.agreesWithDeclared);
    }
    SpaceModel fs = SpaceModel::finite(6);
    for (const auto& mu : {makeCounting(fs), makeWeighted(fs), makeThreshold(fs)}) {
        ClassifyReport r = classify(mu, 40, 9);
        INFO(mu.catalogId);
        for (const auto& c : r.checks) {
            INFO(c.flag, " declared=", c.declared, " passed=", c.passed, " ", c.witness);
            CHECK(c.declared == c.passed);
        }
        CHECK(r.agreesWithDeclared);
    }
}

TEST_CASE("misdeclared properties are caught") {
    SpaceModel s = SpaceModel::dyadic(10);
    SetFunction wrong = makeLebesgueSquared(s);
    wrong.declaredProps.finitelyAdditive = true; // squared mass is not additive
    ClassifyReport r = classify(wrong, 30, 5);
    CHECK(!r.agreesWithDeclared);
    bool found = false;
    for (const auto& c : r.checks)
        if (c.flag == "finitelyAdditive") {
            found = true;
            CHECK(c.declared);
            CHECK(!c.passed);
            CHECK(!c.witness.empty());
        }
    CHECK(found);
}

TEST_CASE("refinement limit recovers the additive part exactly") {
    SpaceModel s = SpaceModel::dyadic(20);
    SetFunction mu = makeLebesgue(s);
    mu.evaluator = [](const MeasurableSet& a) {
        double v = a.lebesgue();
        return v + v * v;
    };
    mu.catalogId = "lebesgue-plus-squared";
    mu.declaredProps = measureProps();
    mu.declaredProps.finitelyAdditive = false;
    mu.declaredProps.countablyAdditive = false;

    PsiFunction psi(mu, 1e-3, 18);
    MeasurableSet full = MeasurableSet::full(s);

    // the squared part has an exactly geometric refinement tail, so the
    // extrapolated limit is the plain mass, to the last bit
    CHECK(psi(full) == 1.0);
    CHECK(psi(MeasurableSet::cell(s, 1, 0)) == 0.5);
    CHECK(psi(MeasurableSet::cell(s, 3, 5)) == 0.125);
    PsiEval e = psi.evaluate(full);
    CHECK(e.status == PsiStatus::converged);
    CHECK(e.depthUsed <= 6);
    CHECK(psi.certifiedError() <= 1e-12);

    // ragged sets still land within tolerance of the plain mass
    MeasurableSet ragged = MeasurableSet::fromRuns(s, {{3, 77}, {1000, 4099}});
    CHECK(std::abs(psi(ragged) - ragged.lebesgue()) <= 2e-3);
}

TEST_CASE("refinement limit of a pure square vanishes exactly") {
    SpaceModel s = SpaceModel::dyadic(20);
    PsiFunction psi(makeLebesgueSquared(s), 1e-3, 18);
    CHECK(psi(MeasurableSet::full(s)) == 0.0);
    CHECK(psi(MeasurableSet::cell(s, 2, 1)) == 0.0);
}

TEST_CASE("refinement limit fixes additive masses after two genuine refinements") {
    SpaceModel s = SpaceModel::dyadic(16);
    PsiFunction psi(makeLebesgue(s), 1e-6, 14);
    MeasurableSet ragged = MeasurableSet::fromRuns(s, {{5, 900}, {2048, 3000}});
    PsiEval e = psi.evaluate(ragged);
    CHECK(e.value == ragged.lebesgue());
    CHECK(e.status == PsiStatus::converged);
    CHECK(e.depthUsed <= 9);
    CHECK(e.certifiedError == 0.0);

    PsiFunction pd(makeDiracThird(s), 1e-6, 14);
    CHECK(pd(MeasurableSet::cell(s, 1, 0)) == 2.0);
    CHECK(pd(MeasurableSet::cell(s, 1, 1)) == 0.0);
}

TEST_CASE("refinement limit flags square-root mass as having no limit") {
    SpaceModel s = SpaceModel::dyadic(20);
    PsiFunction psi(makeSqrtLebesgue(s), 1e-3, 18);
    MeasurableSet full = MeasurableSet::full(s);
    PsiEval e = psi.evaluate(full);
    CHECK(e.status == PsiStatus::notIntegrable);
    CHECK_THROWS_AS(psi(full), NotIntegrableError);
    CHECK(psiIntegral(makeSqrtLebesgue(s), full, 1e-3, 18).status == PsiStatus::notIntegrable);
}

TEST_CASE("refinement limit requires declared monotonicity") {
    SpaceModel s = SpaceModel::dyadic(10);
    SetFunction mu = makeLebesgue(s);
    mu.declaredProps.monotone = false;
    CHECK_THROWS_AS(PsiFunction(mu, 1e-3, 8), HypothesisError);
    CHECK_THROWS_AS(psiIntegral(mu, MeasurableSet::full(s), 1e-3, 8), HypothesisError);
}

TEST_CASE("partition defect shrinks like the cell width") {
    SpaceModel s = SpaceModel::dyadic(20);
    SetFunction mu;
    mu.space = s;
    mu.evaluator = [](const MeasurableSet& a) {
        double v = a.lebesgue();
        return v + v * v;
    };
    mu.declaredProps = measureProps();
    mu.declaredProps.finitelyAdditive = false;
    mu.declaredProps.countablyAdditive = false;
    mu.catalogId = "lebesgue-plus-squared";
    PsiFunction psi(mu, 1e-3, 18);
    MeasurableSet full = MeasurableSet::full(s);

    for (int m : {4, 8, 12}) {
        Partition p = Partition::finiteOf(full.pieces(m));
        CHECK(henstockResidual(mu, psi, p, full) == std::ldexp(1.0, -m));
    }

    Partition best = epsApproxPartition(mu, psi, full, 0.01, 20, 3);
    CHECK(best.cells.size() == 128); // depth seven is the first that fits
}

TEST_CASE("every partition drops the whole mass of an atom into one cell") {
    SpaceModel s = SpaceModel::dyadic(16);
    SetFunction dirac = makeDiracThird(s);
    MeasurableSet full = MeasurableSet::full(s);

    Partition p = Partition::finiteOf(full.pieces(3));
    AtomCollapseReport r = checkAtomCollapse(dirac, full, p, 10);
    CHECK(r.holds);
    CHECK(r.fullMassCell == 2); // [1/4,3/8) holds the carrier point
    CHECK(r.variationMatches);
    CHECK(r.variationValue == 2.0);

    CountableGenerator g = CountableGenerator::geometric(s, 1, 3);
    Partition coarse = g.truncate(5);
    AtomCollapseReport rc = checkAtomCollapse(dirac, full, coarse, 10);
    CHECK(!rc.holds);
    CHECK(rc.tailCarriesMass); // the carrier point is still in the tail

    Partition complete = g.truncate(g.maxTruncation());
    AtomCollapseReport rf = checkAtomCollapse(dirac, full, complete, 10);
    CHECK(rf.holds);
    CHECK(rf.uniqueCellIsAtom);

    CHECK_THROWS_AS(checkAtomCollapse(makeLebesgue(s), full, p, 8), HypothesisError);
}
