#include "svi/set_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "svi/errors.hpp"

namespace svi {

bool DivergenceRule::diverging(const std::vector<double>& seq) const {
    if (seq.empty()) return false;
    if (seq.back() > hardThreshold) return true;
    if (static_cast<int>(seq.size()) < trendSteps + 1) return false;
    std::size_t n = seq.size();
    for (int k = 0; k < trendSteps; ++k) {
        double prev = seq[n - 2 - k];
        double cur = seq[n - 1 - k];
        if (!(cur > prev)) return false;
        if (!(prev > 0.0) || cur < growthRatio * prev) return false;
    }
    return true;
}

// ---- variation ------------------------------------------------------------

namespace {

// exact supremum over set partitions of the elements of `mask`; adding
// leftover elements as singleton blocks never lowers the sum, so partitions
// of the whole element set realize the supremum over disjoint families
double finiteVariation(const SetFunction& mu, std::uint64_t mask, const SpaceModel& s) {
    std::vector<int> elems;
    for (int i = 0; i < 64; ++i)
        if ((mask >> i) & 1) elems.push_back(i);
    if (elems.size() > 12) throw std::invalid_argument("variation: finite enumeration capped at 12 elements");
    if (elems.empty()) return 0.0;
    std::vector<std::uint64_t> blocks;
    double best = 0.0;
    auto rec = [&](auto&& self, std::size_t next) -> void {
        if (next == elems.size()) {
            double sum = 0.0;
            for (std::uint64_t b : blocks) sum += mu(MeasurableSet::fromMask(s, b));
            best = std::max(best, sum);
            return;
        }
        std::uint64_t bit = 1ull << elems[next];
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            blocks[i] |= bit;
            self(self, next + 1);
            blocks[i] &= ~bit;
        }
        blocks.push_back(bit);
        self(self, next + 1);
        blocks.pop_back();
    };
    rec(rec, 0);
    return best;
}

double dyadicBest(const SetFunction& mu, const SpaceModel& s, int depth, std::uint64_t index, int depthCap) {
    double v = mu(MeasurableSet::cell(s, depth, index));
    if (depth >= depthCap || depth >= s.maxDepth) return v;
    double split = dyadicBest(mu, s, depth + 1, 2 * index, depthCap) +
                   dyadicBest(mu, s, depth + 1, 2 * index + 1, depthCap);
    return std::max(v, split);
}

} // namespace

VariationResult variation(const SetFunction& mu, const MeasurableSet& e, int depthCap,
                          const DivergenceRule& rule) {
    VariationResult out;
    if (e.isEmpty()) return out;
    if (mu.space.isFinite()) {
        out.value = finiteVariation(mu, e.mask(), mu.space);
        out.depthSequence = {out.value};
        return out;
    }
    if (depthCap < 0 || depthCap > mu.space.maxDepth)
        throw std::invalid_argument("variation: depthCap out of range");
    for (int d = 0; d <= depthCap; ++d) {
        double v = 0.0;
        for (const auto& c : e.cells())
            v += dyadicBest(mu, mu.space, c.depth, c.index, std::max(d, c.depth));
        out.depthSequence.push_back(v);
        if (rule.diverging(out.depthSequence)) {
            out.diverging = true;
            out.value = v;
            return out;
        }
    }
    out.value = out.depthSequence.back();
    return out;
}

// ---- atoms ----------------------------------------------------------------

namespace {

bool violatesAtom(const SetFunction& mu, const MeasurableSet& a, const MeasurableSet& b) {
    return mu(b) > 0.0 && mu(a.differenceWith(b)) > 0.0;
}

} // namespace

AtomCertificate isAtom(const SetFunction& mu, const MeasurableSet& a, int depthCap, std::uint64_t seed) {
    AtomCertificate cert;
    cert.depthCap = depthCap;
    if (a.isEmpty() || mu(a) <= 0.0) {
        cert.method = "mass";
        return cert;
    }
    if (mu.space.isFinite()) {
        int n = a.elementCount();
        if (n > 20) throw std::invalid_argument("isAtom: finite enumeration capped at 20 elements");
        cert.method = "exhaustive";
        std::uint64_t mask = a.mask();
        for (std::uint64_t sub = (mask - 1) & mask; sub; sub = (sub - 1) & mask) {
            MeasurableSet b = MeasurableSet::fromMask(mu.space, sub);
            if (violatesAtom(mu, a, b)) {
                cert.witness = b;
                return cert;
            }
        }
        cert.atom = true;
        return cert;
    }
    const bool reducible = mu.declaredProps.monotone &&
                           (mu.declaredProps.nullAdditive || mu.declaredProps.nullNullAdditive);
    if (reducible) {
        // for monotone null-null-additive mu a violating union of pieces
        // contains a violating single piece, so single pieces suffice
        cert.method = "cell-reduction";
        for (int d = 1; d <= depthCap; ++d)
            for (const auto& p : a.pieces(d))
                if (violatesAtom(mu, a, p)) {
                    cert.witness = p;
                    return cert;
                }
        cert.atom = true;
        return cert;
    }
    // general mu: exhaust unions while feasible, then sample
    int exhaustedTo = 0;
    for (int d = 1; d <= depthCap; ++d) {
        auto ps = a.pieces(d);
        if (ps.size() <= 16) {
            exhaustedTo = d;
            std::uint64_t count = 1ull << ps.size();
            for (std::uint64_t sub = 1; sub + 1 < count; ++sub) {
                MeasurableSet b = MeasurableSet::empty(mu.space);
                for (std::size_t i = 0; i < ps.size(); ++i)
                    if ((sub >> i) & 1) b = b.unionWith(ps[i]);
                if (violatesAtom(mu, a, b)) {
                    cert.method = "exhaustive-unions";
                    cert.witness = b;
                    return cert;
                }
            }
        } else {
            Rng rng(seed ^ static_cast<std::uint64_t>(d));
            for (const auto& p : ps)
                if (violatesAtom(mu, a, p)) {
                    cert.method = "sampled";
                    cert.witness = p;
                    return cert;
                }
            for (int t = 0; t < 512; ++t) {
                MeasurableSet b = MeasurableSet::empty(mu.space);
                for (const auto& p : ps)
                    if (rng.nextBool()) b = b.unionWith(p);
                if (b.isEmpty() || b == a) continue;
                if (violatesAtom(mu, a, b)) {
                    cert.method = "sampled";
                    cert.witness = b;
                    return cert;
                }
            }
        }
    }
    cert.atom = true;
    cert.method = "exhaustive-unions(depth<=" + std::to_string(exhaustedTo) + ")+sampled";
    return cert;
}

// ---- classify -------------------------------------------------------------

namespace {

std::vector<MeasurableSet> sampleSets(const SpaceModel& s, int count, Rng& rng) {
    std::vector<MeasurableSet> out;
    if (s.isFinite()) {
        std::uint64_t fullMask = (s.points == 64) ? ~0ull : ((1ull << s.points) - 1);
        out.push_back(MeasurableSet::full(s));
        for (int i = 0; i < s.points; ++i) out.push_back(MeasurableSet::fromMask(s, 1ull << i));
        while (static_cast<int>(out.size()) < count) {
            std::uint64_t m = rng.next() & fullMask;
            if (m) out.push_back(MeasurableSet::fromMask(s, m));
        }
        return out;
    }
    out.push_back(MeasurableSet::full(s));
    out.push_back(MeasurableSet::cell(s, 1, 0));
    out.push_back(MeasurableSet::cell(s, 1, 1));
    for (std::uint64_t k = 0; k < 4; ++k) out.push_back(MeasurableSet::cell(s, 2, k));
    while (static_cast<int>(out.size()) < count) {
        int d = 1 + static_cast<int>(rng.nextBelow(static_cast<std::uint64_t>(std::min(8, s.maxDepth))));
        std::vector<MeasurableSet::Run> runs;
        std::uint64_t width = s.ticks() >> d;
        for (std::uint64_t k = 0; k < (1ull << d); ++k)
            if (rng.nextBool()) runs.push_back({k * width, (k + 1) * width});
        MeasurableSet m = MeasurableSet::fromRuns(s, std::move(runs));
        if (!m.isEmpty()) out.push_back(std::move(m));
    }
    return out;
}

constexpr double kExactTol = 1e-12;

} // namespace

ClassifyReport classify(const SetFunction& mu, int trials, std::uint64_t seed) {
    ClassifyReport report;
    report.mu = mu.catalogId;
    Rng rng(seed);
    auto sets = sampleSets(mu.space, std::max(trials, 16), rng);

    auto addCheck = [&](const std::string& flag, bool declared, bool passed, std::string witness, int n) {
        report.checks.push_back({flag, declared, passed, std::move(witness), n});
        if (passed != declared) report.agreesWithDeclared = false;
    };

    { // monotone on nested pairs
        bool ok = true;
        std::string witness;
        int n = 0;
        for (std::size_t i = 0; i < sets.size() && ok; ++i)
            for (std::size_t j = 0; j < sets.size() && ok; ++j) {
                MeasurableSet small = sets[i].intersectWith(sets[j]);
                if (small.isEmpty()) continue;
                ++n;
                if (mu(small) > mu(sets[i]) + kExactTol) {
                    ok = false;
                    witness = small.describe() + " inside " + sets[i].describe();
                }
            }
        addCheck("monotone", mu.declaredProps.monotone, ok, witness, n);
    }

    std::string additivityWitness;
    bool additive = true;
    { // finite additivity on disjoint pairs, canonical halves first
        int n = 0;
        for (std::size_t i = 0; i < sets.size() && additive; ++i)
            for (std::size_t j = i + 1; j < sets.size() && additive; ++j) {
                if (!sets[i].disjointFrom(sets[j])) continue;
                ++n;
                double lhs = mu(sets[i].unionWith(sets[j]));
                double rhs = mu(sets[i]) + mu(sets[j]);
                if (std::abs(lhs - rhs) > kExactTol) {
                    additive = false;
                    additivityWitness = sets[i].describe() + " , " + sets[j].describe();
                }
            }
        addCheck("finitelyAdditive", mu.declaredProps.finitelyAdditive, additive, additivityWitness, n);
    }

    { // countable additivity: finite additivity plus complete enumeration
      // along countable generators
        bool ok = additive;
        std::string witness = additivityWitness;
        int n = 0;
        if (mu.space.isDyadic() && ok) {
            std::vector<CountableGenerator> gens;
            gens.push_back(CountableGenerator::geometric(mu.space, 1, 1));
            gens.push_back(CountableGenerator::geometric(mu.space, 1, 3));
            gens.push_back(CountableGenerator::dyadicTail(mu.space, 2));
            for (const auto& g : gens) {
                Partition full = g.truncate(g.maxTruncation());
                double sum = 0.0;
                for (const auto& c : full.cells) sum += mu(c);
                ++n;
                if (std::abs(sum - mu(MeasurableSet::full(mu.space))) > 1e-9) {
                    ok = false;
                    witness = g.id();
                    break;
                }
            }
        }
        addCheck("countablyAdditive", mu.declaredProps.countablyAdditive, ok, witness, n);
    }

    { // null-additive: joining a null set changes nothing
        bool ok = true;
        std::string witness;
        int n = 0;
        for (std::size_t i = 0; i < sets.size() && ok; ++i) {
            if (mu(sets[i]) != 0.0) continue;
            for (std::size_t j = 0; j < sets.size() && ok; ++j) {
                ++n;
                double joined = mu(sets[j].unionWith(sets[i]));
                if (std::abs(joined - mu(sets[j])) > kExactTol) {
                    ok = false;
                    witness = sets[j].describe() + " + null " + sets[i].describe();
                }
            }
        }
        addCheck("nullAdditive", mu.declaredProps.nullAdditive, ok, witness, n);
    }

    { // null-null-additive: unions of two null sets stay null
        bool ok = true;
        std::string witness;
        int n = 0;
        for (std::size_t i = 0; i < sets.size() && ok; ++i) {
            if (mu(sets[i]) != 0.0) continue;
            for (std::size_t j = 0; j < sets.size() && ok; ++j) {
                if (mu(sets[j]) != 0.0) continue;
                ++n;
                if (mu(sets[i].unionWith(sets[j])) != 0.0) {
                    ok = false;
                    witness = sets[i].describe() + " , " + sets[j].describe();
                }
            }
        }
        addCheck("nullNullAdditive", mu.declaredProps.nullNullAdditive, ok, witness, n);
    }

    { // sigma variant: growing unions of null generator shells stay null
        bool ok = true;
        std::string witness;
        int n = 0;
        if (mu.space.isDyadic()) {
            std::vector<CountableGenerator> gens;
            gens.push_back(CountableGenerator::geometric(mu.space, 1, 1));
            gens.push_back(CountableGenerator::geometric(mu.space, 1, 3));
            for (const auto& g : gens) {
                Partition full = g.truncate(g.maxTruncation());
                MeasurableSet acc = MeasurableSet::empty(mu.space);
                for (const auto& c : full.cells) {
                    if (mu(c) != 0.0) continue;
                    acc = acc.unionWith(c);
                    ++n;
                    if (mu(acc) != 0.0) {
                        ok = false;
                        witness = g.id() + " partial union " + acc.describe();
                        break;
                    }
                }
                if (!ok) break;
            }
        } else {
            // finite model: unions of null singletons
            MeasurableSet acc = MeasurableSet::empty(mu.space);
            for (int i = 0; i < mu.space.points; ++i) {
                MeasurableSet single = MeasurableSet::fromMask(mu.space, 1ull << i);
                if (mu(single) != 0.0) continue;
                acc = acc.unionWith(single);
                ++n;
                if (mu(acc) != 0.0) {
                    ok = false;
                    witness = "union of null singletons " + acc.describe();
                    break;
                }
            }
        }
        addCheck("sigmaNullNullAdditive", mu.declaredProps.sigmaNullNullAdditive, ok, witness, n);
    }

    { // continuity from below along generator chains: values climb and the
      // completed chain meets the value of its union
        bool ok = true;
        std::string witness;
        int n = 0;
        if (mu.space.isDyadic()) {
            std::vector<CountableGenerator> gens;
            gens.push_back(CountableGenerator::geometric(mu.space, 1, 1));
            gens.push_back(CountableGenerator::dyadicTail(mu.space, 2));
            for (const auto& g : gens) {
                Partition full = g.truncate(g.maxTruncation());
                MeasurableSet acc = MeasurableSet::empty(mu.space);
                double prev = 0.0;
                for (const auto& c : full.cells) {
                    acc = acc.unionWith(c);
                    double v = mu(acc);
                    ++n;
                    if (v + kExactTol < prev) {
                        ok = false;
                        witness = g.id() + " chain value dropped";
                        break;
                    }
                    prev = v;
                }
                if (ok && std::abs(prev - mu(MeasurableSet::full(mu.space))) > 1e-9) {
                    ok = false;
                    witness = g.id() + " chain limit misses the union";
                }
                if (!ok) break;
            }
        }
        addCheck("continuousFromBelow", mu.declaredProps.continuousFromBelow, ok, witness, n);
    }

    { // pointwise non-atomic: the cell around each probe point loses its
      // mass as the depth grows
        bool ok = true;
        std::string witness;
        int n = 0;
        if (mu.space.isDyadic()) {
            int d = std::min(16, mu.space.maxDepth);
            std::vector<MeasurableSet> probes;
            probes.push_back(MeasurableSet::cellAtRational(mu.space, d, 1, 3));
            probes.push_back(MeasurableSet::cellAtRational(mu.space, d, 0, 1));
            probes.push_back(MeasurableSet::cellAtRational(mu.space, d, 999, 1000));
            for (int t = 0; t < 8; ++t)
                probes.push_back(MeasurableSet::cellAtPoint(mu.space, d, rng.nextDouble()));
            for (const auto& c : probes) {
                ++n;
                if (mu(c) >= 1e-3) {
                    ok = false;
                    witness = "mass persists on " + c.describe();
                    break;
                }
            }
        } else {
            for (int i = 0; i < mu.space.points; ++i) {
                ++n;
                if (mu(MeasurableSet::fromMask(mu.space, 1ull << i)) != 0.0) {
                    ok = false;
                    witness = "singleton " + std::to_string(i) + " carries mass";
                    break;
                }
            }
        }
        addCheck("pointwiseNonAtomic", mu.declaredProps.pointwiseNonAtomic, ok, witness, n);
    }

    if (mu.space.isFinite() && mu.space.points <= 12) {
        // extra report-only flag: does the space split into disjoint atoms
        // plus a null remainder
        MeasurableSet covered = MeasurableSet::empty(mu.space);
        std::uint64_t fullMask = (1ull << mu.space.points) - 1;
        for (std::uint64_t m = 1; m <= fullMask; ++m) {
            MeasurableSet cand = MeasurableSet::fromMask(mu.space, m);
            if (!cand.disjointFrom(covered)) continue;
            if (isAtom(mu, cand, 0, seed).atom) covered = covered.unionWith(cand);
        }
        bool atomicCover = mu(MeasurableSet::full(mu.space).differenceWith(covered)) == 0.0 &&
                           mu(covered) > 0.0;
        report.checks.push_back({"finitelyPurelyAtomic", atomicCover, atomicCover, "", 1});
    }

    return report;
}

// ---- Psi ------------------------------------------------------------------

namespace {

double aitken(double s0, double s1, double s2) {
    double d1 = s1 - s0;
    double d2 = s2 - s1;
    double den = d2 - d1;
    if (den == 0.0) return s2;
    return s0 - d1 * d1 / den;
}

PsiEval psiSequence(const SetFunction& mu, const MeasurableSet& a, double tol, int depthCap,
                    const DivergenceRule& rule) {
    PsiEval out;
    if (a.isEmpty()) return out;
    const std::uint64_t atomCount =
        mu.space.isDyadic() ? a.tickCount() : static_cast<std::uint64_t>(a.elementCount());
    // sums indexed by genuine refinement steps: a deeper level enters the
    // sequence only when some piece actually split (piece lists never merge,
    // so an unchanged count means an unchanged list and an unchanged sum);
    // judging convergence on raw depths would mistake a not-yet-subdivided
    // cell for a settled limit
    std::vector<double> s;
    s.reserve(depthCap + 1);
    std::uint64_t prevCount = 0;
    for (int m = 0; m <= depthCap; ++m) {
        double sm = 0.0;
        std::uint64_t count = 0;
        a.eachPiece(m, [&](MeasurableSet&& p) {
            sm += mu(p);
            ++count;
        });
        if (m > 0 && count == prevCount) continue;
        prevCount = count;
        s.push_back(sm);
        out.depthUsed = m;
        if (count == atomCount) { // every piece is a single tick: the chain is exhausted
            out.value = sm;
            out.certifiedError = 0.0;
            return out;
        }
        if (rule.diverging(s)) {
            out.value = sm;
            out.certifiedError = std::abs(sm);
            out.status = PsiStatus::notIntegrable;
            return out;
        }
        std::size_t k = s.size() - 1;
        if (k < 2) continue;
        double d1 = s[k - 1] - s[k - 2];
        double d2 = s[k] - s[k - 1];
        double scale = 1.0 + std::abs(sm);
        // settled to rounding noise across two genuine refinements
        if (std::abs(d2) <= 1e-14 * scale && std::abs(d1) <= 1e-14 * scale) {
            out.value = sm;
            out.certifiedError = std::abs(d2);
            return out;
        }
        // stably geometric tail: extrapolate, exact for exact ratios
        if (k >= 3) {
            double d0 = s[k - 2] - s[k - 3];
            if (d0 != 0.0 && d1 != 0.0) {
                double r1 = d1 / d0;
                double r2 = d2 / d1;
                bool stable = r1 > 0.0 && r2 > 0.0 && r1 < 0.97 && r2 < 0.97 &&
                              std::abs(r1 - r2) <= 0.05 * std::max(r1, r2);
                bool sameSign = (d0 > 0) == (d1 > 0) && (d1 > 0) == (d2 > 0);
                if (stable && sameSign) {
                    double cur = aitken(s[k - 2], s[k - 1], s[k]);
                    double prev = aitken(s[k - 3], s[k - 2], s[k - 1]);
                    double err = std::abs(cur - prev) + 1e-15 * (1.0 + std::abs(cur));
                    if (err < tol) {
                        out.value = cur;
                        out.certifiedError = err;
                        return out;
                    }
                }
            }
        }
        // plain settling; deferred to the fourth step so the geometric
        // detector above, which is exact on exact tails, gets first claim
        if (k >= 3 && std::abs(d2) < tol && std::abs(d2) <= std::abs(d1) + 1e-15 * scale) {
            double r = std::abs(d1) > 0 ? std::abs(d2) / std::abs(d1) : 0.0;
            double tail = r < 0.97 ? std::abs(d2) * r / (1.0 - r) : std::abs(d2);
            out.value = sm;
            out.certifiedError = std::max(tail, std::abs(d2));
            return out;
        }
    }
    out.value = s.back();
    out.certifiedError = s.size() >= 2 ? std::abs(s[s.size() - 1] - s[s.size() - 2]) : 0.0;
    out.status = PsiStatus::inconclusive;
    return out;
}

} // namespace

PsiFunction::PsiFunction(SetFunction base, double tol, int depthCap, DivergenceRule rule)
    : base_(std::move(base)), tol_(tol), depthCap_(depthCap), rule_(rule), memo_(std::make_shared<Memo>()) {
    if (!base_.declaredProps.monotone)
        throw HypothesisError("psi: set function must declare monotonicity");
    if (depthCap_ < 2 || depthCap_ > base_.space.maxDepth)
        throw std::invalid_argument("psi: depthCap out of range");
}

PsiEval PsiFunction::evaluate(const MeasurableSet& a) const {
    std::uint64_t key = a.hashKey();
    {
        std::lock_guard<std::mutex> g(memo_->lock);
        auto it = memo_->values.find(key);
        if (it != memo_->values.end()) return it->second;
    }
    PsiEval e = psiSequence(base_, a, tol_, depthCap_, rule_);
    std::lock_guard<std::mutex> g(memo_->lock);
    memo_->values.emplace(key, e);
    memo_->worstError = std::max(memo_->worstError, e.certifiedError);
    return e;
}

double PsiFunction::operator()(const MeasurableSet& a) const {
    PsiEval e = evaluate(a);
    if (e.status == PsiStatus::notIntegrable)
        throw NotIntegrableError("psi: refinement sums diverge on " + a.describe());
    return e.value;
}

double PsiFunction::certifiedError() const {
    std::lock_guard<std::mutex> g(memo_->lock);
    return memo_->worstError;
}

SetFunction PsiFunction::asSetFunction() const {
    SetFunction f;
    f.space = base_.space;
    PsiFunction self = *this; // shares the memo
    f.evaluator = [self](const MeasurableSet& a) { return self(a); };
    f.declaredProps.finitelyAdditive = true;
    f.declaredProps.countablyAdditive = base_.declaredProps.continuousFromBelow;
    f.declaredProps.monotone = true;
    f.declaredProps.nullAdditive = true;
    f.declaredProps.nullNullAdditive = true;
    f.declaredProps.sigmaNullNullAdditive = true;
    f.declaredProps.continuousFromBelow = base_.declaredProps.continuousFromBelow;
    f.declaredProps.pointwiseNonAtomic = base_.declaredProps.pointwiseNonAtomic;
    f.catalogId = "psi(" + base_.catalogId + ")";
    return f;
}

PsiEval psiIntegral(const SetFunction& mu, const MeasurableSet& a, double tol, int depthCap) {
    if (!mu.declaredProps.monotone)
        throw HypothesisError("psi: set function must declare monotonicity");
    return psiSequence(mu, a, tol, depthCap, DivergenceRule{});
}

// ---- eps-approximated partitions -------------------------------------------

Partition epsApproxPartition(const SetFunction& mu, const PsiFunction& psi,
                             const MeasurableSet& domain, double eps,
                             int verifyTrials, std::uint64_t seed) {
    double target = psi(domain);
    Rng rng(seed);
    for (int d = 0; d <= psi.depthCap(); ++d) {
        Partition p = Partition::finiteOf(domain.pieces(d));
        double sum = 0.0;
        for (const auto& c : p.cells) sum += mu(c);
        if (std::abs(sum - target) > eps) continue;
        bool verified = true;
        for (int t = 0; t < verifyTrials && verified; ++t) {
            Partition finer = randomRefinement(p, 2, rng);
            double fs = 0.0;
            for (const auto& c : finer.cells) fs += mu(c);
            verified = std::abs(fs - target) <= eps;
        }
        if (verified) return p;
    }
    throw NotIntegrableError("epsApproxPartition: no depth meets eps within the depth cap");
}

double henstockResidual(const SetFunction& mu, const PsiFunction& psi,
                        const Partition& p, const MeasurableSet& a) {
    double residual = 0.0;
    auto term = [&](const MeasurableSet& c) {
        MeasurableSet b = c.intersectWith(a);
        if (b.isEmpty()) return;
        residual += std::abs(psi(b) - mu(b));
    };
    for (const auto& c : p.cells) term(c);
    if (p.tailSet && !p.tailSet->isEmpty()) term(*p.tailSet);
    return residual;
}

// ---- atom collapse ---------------------------------------------------------

AtomCollapseReport checkAtomCollapse(const SetFunction& mu, const MeasurableSet& a,
                                     const Partition& p, int depthCap) {
    if (!mu.declaredProps.monotone || !mu.declaredProps.nullAdditive)
        throw HypothesisError("atom collapse: needs monotone null-additive mu");
    if (p.kind == PartitionKind::countableTruncated && !mu.declaredProps.sigmaNullNullAdditive)
        throw HypothesisError("atom collapse: countable partitions need sigma-null-null-additivity");
    AtomCertificate cert = isAtom(mu, a, depthCap);
    if (!cert.atom) throw HypothesisError("atom collapse: the domain is not an atom");

    AtomCollapseReport rep;
    double massA = mu(a);
    int carriers = 0;
    bool othersNull = true;
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
        MeasurableSet b = p.cells[i].intersectWith(a);
        double v = b.isEmpty() ? 0.0 : mu(b);
        if (std::abs(v - massA) <= kExactTol && v > 0.0) {
            ++carriers;
            rep.fullMassCell = static_cast<int>(i);
        } else if (std::abs(v) > kExactTol) {
            othersNull = false;
        }
    }
    if (p.tailSet && !p.tailSet->isEmpty()) {
        double tv = mu(p.tailSet->intersectWith(a));
        if (std::abs(tv) > kExactTol) rep.tailCarriesMass = true;
    }
    VariationResult var = variation(mu, a, depthCap);
    rep.variationValue = var.value;
    rep.variationMatches = !var.diverging && std::abs(var.value - massA) <= kExactTol;
    if (p.kind == PartitionKind::countableTruncated && carriers == 1) {
        MeasurableSet carrier = p.cells[rep.fullMassCell].intersectWith(a);
        rep.uniqueCellIsAtom = isAtom(mu, carrier, depthCap).atom;
    } else {
        rep.uniqueCellIsAtom = carriers == 1;
    }
    rep.holds = carriers == 1 && othersNull && !rep.tailCarriesMass && rep.variationMatches &&
                (p.kind != PartitionKind::countableTruncated || rep.uniqueCellIsAtom);
    if (!rep.holds) {
        rep.detail = carriers != 1 ? "mass carried by " + std::to_string(carriers) + " cells"
                     : rep.tailCarriesMass ? "mass still in the tail at this truncation"
                     : !rep.variationMatches ? "variation disagrees with the mass"
                                             : "carrying cell is not an atom";
    }
    return rep;
}

} // namespace svi
