#include "svi/integral.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "svi/errors.hpp"

namespace svi {

std::string statusName(IntegralStatus s) {
    switch (s) {
    case IntegralStatus::converged: return "converged";
    case IntegralStatus::notIntegrable: return "not-integrable";
    case IntegralStatus::tailMassNotSummable: return "tail-mass-not-summable";
    case IntegralStatus::gaugeTooFine: return "gauge-too-fine";
    case IntegralStatus::inconclusive: return "inconclusive";
    }
    return "unknown";
}

RiemannSum riemannSum(const Multifunction& f, const SetFunction& mu, const TaggedPartition& tp) {
    const auto& cells = tp.base.cells;
    if (tp.tags.size() != cells.size())
        throw std::invalid_argument("riemann sum: one tag per cell required");
    Box acc = Box::zero(f.dim);
    for (std::size_t i = 0; i < cells.size(); ++i)
        acc = minkowskiSum(acc, scale(mu(cells[i]), f(tp.tags[i])));
    RiemannSum out;
    out.value = std::move(acc);
    if (tp.base.kind == PartitionKind::countableTruncated && tp.base.tailSet &&
        !tp.base.tailSet->isEmpty())
        out.tailBound = f.bound * mu(*tp.base.tailSet);
    return out;
}

namespace {

std::vector<double> repTags(const Partition& p) {
    std::vector<double> tags;
    tags.reserve(p.cells.size());
    for (const auto& c : p.cells) tags.push_back(c.repPoint());
    return tags;
}

std::vector<double> sampledTags(const Partition& p, Rng& rng) {
    std::vector<double> tags;
    tags.reserve(p.cells.size());
    for (const auto& c : p.cells) tags.push_back(c.samplePoint(rng));
    return tags;
}

Box tagSum(const Multifunction& f, const SetFunction& mu, const Partition& p,
           std::vector<double> tags) {
    TaggedPartition tp{p, std::move(tags), TagDiscipline::henstock};
    return riemannSum(f, mu, tp).value;
}

// worst movement of the sum when every tag is redrawn at random inside its cell
double tagOscillation(const Multifunction& f, const SetFunction& mu, const Partition& p,
                      const Box& canonical, int draws, Rng& rng) {
    double worst = 0.0;
    for (int k = 0; k < draws; ++k)
        worst = std::max(worst, hausdorff(tagSum(f, mu, p, sampledTags(p, rng)), canonical));
    return worst;
}

// the dyadic chain bottoms out at tick resolution; the finite chain reaches
// singletons on its own and any deeper level repeats them
int chainDepthCap(const SpaceModel& s, int configured) {
    return s.isDyadic() ? std::min(configured, s.maxDepth) : configured;
}

IntegralResult trivialOnEmpty(std::string method, std::size_t dim) {
    IntegralResult out;
    out.method = std::move(method);
    out.status = IntegralStatus::converged;
    out.value = Box::zero(dim);
    out.detail = "empty domain";
    return out;
}

} // namespace

IntegralResult gouldIntegral(const Multifunction& f, const SetFunction& mu,
                             const MeasurableSet& domain, const IntegratorConfig& cfg) {
    if (mu.space != domain.space())
        throw std::invalid_argument("gould: domain and mass live on different spaces");
    if (domain.isEmpty()) return trivialOnEmpty("gould", f.dim);

    IntegralResult out;
    out.method = "gould";
    Rng rng(cfg.seed);
    DivergenceRule rule = cfg.divergenceRule();
    rule.hardThreshold = cfg.divergenceFactor * std::max(f.bound, 1.0);
    const int cap = chainDepthCap(mu.space, cfg.maxDepth);

    std::vector<double> norms;
    Box prev;
    bool prevOk = false;
    for (int m = 0; m <= cap; ++m) {
        Partition p = Partition::finiteOf(domain.pieces(m));
        Box s = tagSum(f, mu, p, repTags(p));
        double delta = (m == 0) ? 0.0 : hausdorff(s, prev);
        double osc = tagOscillation(f, mu, p, s, cfg.tagSamplesPerCell, rng);
        norms.push_back(norm(s));
        out.trace.push_back({m, s, delta, osc, 0.0});
        out.value = s;
        out.usedDepth = m;
        out.errorEstimate = osc + delta;

        if (rule.diverging(norms)) {
            out.status = IntegralStatus::notIntegrable;
            out.detail = "partial sums blow up along the partition chain";
            return out;
        }

        bool ok = osc + delta < cfg.tol;
        if (ok && prevOk) {
            // candidate limit; it must survive random finer partitions with
            // random tags before it is believed
            double worst = 0.0;
            for (int t = 0; t < cfg.refinementTrials; ++t) {
                Partition r = randomRefinement(p, 3, rng);
                worst = std::max(worst, hausdorff(tagSum(f, mu, r, sampledTags(r, rng)), s));
            }
            if (worst <= cfg.tol) {
                out.status = IntegralStatus::converged;
                out.errorEstimate = delta + std::max(osc, worst);
                std::ostringstream d;
                d << "settled at depth " << m << " and held on " << cfg.refinementTrials
                  << " random finer partitions";
                out.detail = d.str();
                return out;
            }
            prevOk = false; // the settled look did not survive refinement
        } else {
            prevOk = ok;
        }
        prev = std::move(s);
    }
    out.status = IntegralStatus::inconclusive;
    out.detail = "no stable limit within the depth cap";
    return out;
}

namespace {

// shared engine behind the countable-partition limit: certify a chain
// candidate against truncations of one enumeration, possibly restricted to a
// subdomain
IntegralResult birkhoffCore(const Multifunction& f, const SetFunction& mu,
                            const MeasurableSet& domain,
                            const std::function<Partition(int)>& truncation, int maxTruncation,
                            const std::string& label, const IntegratorConfig& cfg) {
    IntegralResult out;
    out.method = "birkhoff-simple";

    IntegralResult cand = gouldIntegral(f, mu, domain, cfg);
    if (!cand.converged()) {
        out.status = cand.status;
        out.value = cand.value;
        out.errorEstimate = cand.errorEstimate;
        out.usedDepth = cand.usedDepth;
        out.detail = "no candidate value from the partition chain: " + cand.detail;
        return out;
    }
    const Box candidate = cand.value;

    // smallest truncation whose tail stays inside a quarter of the tolerance;
    // the search honors the configured depth budget, since shell n of a chain
    // enumeration sits at chain depth n
    const double budget = cfg.tol / 4.0;
    const int searchCap = std::min(maxTruncation, cfg.maxDepth + 1);
    int firstIndex = -1;
    double tailAtFirst = 0.0;
    for (int n = 1; n <= searchCap; ++n) {
        Partition p = truncation(n);
        double tb = (p.tailSet && !p.tailSet->isEmpty()) ? f.bound * mu(*p.tailSet) : 0.0;
        if (tb <= budget) {
            firstIndex = n;
            tailAtFirst = tb;
            break;
        }
    }
    if (firstIndex < 0) {
        out.status = IntegralStatus::tailMassNotSummable;
        out.value = candidate;
        out.detail = "no truncation of " + label +
                     " gets the tail mass under the budget within the depth limit";
        return out;
    }

    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    const int last = std::min(firstIndex + cfg.window, searchCap);
    const int refineCap = mu.space.maxDepth;
    double limsup = 0.0;
    Box prevSum = candidate;
    bool havePrev = false;

    for (int n = firstIndex; n <= last; ++n) {
        Partition p = truncation(n);
        double tb = (p.tailSet && !p.tailSet->isEmpty()) ? f.bound * mu(*p.tailSet) : 0.0;

        // A coarse enumerated cell lets the sum swing as much as F does on it,
        // so each truncation is certified with its cells subdivided as deep as
        // needed; subdividing a countable partition yields another one.
        bool certified = false;
        double shownDev = std::numeric_limits<double>::infinity();
        Box shownSum = candidate;
        for (int r = 0; r <= refineCap && !certified; ++r) {
            std::vector<MeasurableSet> cells;
            if (r == 0) {
                cells = p.cells;
            } else {
                for (const auto& c : p.cells) {
                    auto sub = c.pieces(r);
                    cells.insert(cells.end(), std::make_move_iterator(sub.begin()),
                                 std::make_move_iterator(sub.end()));
                }
            }
            Partition pr = Partition::truncatedOf(std::move(cells), *p.tailSet, p.generatorId);

            double worst = 0.0;
            Box canonical = candidate;
            for (int k = 0; k <= cfg.tagSamplesPerCell; ++k) {
                std::vector<double> tags = (k == 0) ? repTags(pr) : sampledTags(pr, rng);
                Box s = tagSum(f, mu, pr, std::move(tags));
                if (k == 0) canonical = s;
                worst = std::max(worst, hausdorff(s, candidate));
            }
            shownDev = std::min(shownDev, worst);
            if (worst <= cfg.tol) {
                certified = true;
                shownSum = canonical;
            }
        }

        if (!certified) {
            out.status = IntegralStatus::inconclusive;
            out.value = candidate;
            out.limsupEstimate = shownDev;
            out.usedDepth = n;
            std::ostringstream d;
            d << "truncation " << n << " keeps a tagged sum " << shownDev
              << " away from the candidate even at tick refinement";
            out.detail = d.str();
            return out;
        }

        limsup = std::max(limsup, shownDev);
        double delta = havePrev ? hausdorff(shownSum, prevSum) : 0.0;
        out.trace.push_back({n, shownSum, delta, shownDev, tb});
        prevSum = shownSum;
        havePrev = true;
    }

    out.status = IntegralStatus::converged;
    out.value = candidate;
    out.tailBound = tailAtFirst;
    out.limsupEstimate = limsup;
    out.usedDepth = firstIndex;
    out.errorEstimate = std::max(cand.errorEstimate, limsup + tailAtFirst);
    std::ostringstream d;
    d << "certified truncations " << firstIndex << ".." << last << " of " << label
      << " against the depth-" << cand.usedDepth << " chain value";
    out.detail = d.str();
    return out;
}

} // namespace

IntegralResult birkhoffSimpleIntegral(const Multifunction& f, const SetFunction& mu,
                                      const CountableGenerator& gen, const IntegratorConfig& cfg) {
    if (!mu.space.isDyadic())
        throw std::invalid_argument("birkhoff-simple: countable enumerations live on the dyadic model");
    return birkhoffCore(
        f, mu, MeasurableSet::full(mu.space), [&gen](int n) { return gen.truncate(n); },
        gen.maxTruncation(), gen.id(), cfg);
}

IntegralResult mcShaneIntegral(const Multifunction& f, const SetFunction& mu,
                               const MeasurableSet& domain, const IntegratorConfig& cfg) {
    if (!mu.space.isDyadic())
        throw std::invalid_argument("mcshane: gauges live on the dyadic model");
    if (mu.space != domain.space())
        throw std::invalid_argument("mcshane: domain and mass live on different spaces");
    if (!mu.declaredProps.monotone || !mu.declaredProps.pointwiseNonAtomic)
        throw HypothesisError(
            "mcshane: needs a monotone, pointwise non-atomic mass; a point atom defeats every collar budget");
    if (domain.isEmpty()) return trivialOnEmpty("mcshane", f.dim);

    IntegralResult out;
    out.method = "mcshane";

    IntegralResult cand = gouldIntegral(f, mu, domain, cfg);
    if (!cand.converged()) {
        out.status = cand.status;
        out.value = cand.value;
        out.errorEstimate = cand.errorEstimate;
        out.usedDepth = cand.usedDepth;
        out.trace = std::move(cand.trace);
        out.detail = "no candidate value from the partition chain: " + cand.detail;
        return out;
    }
    const Box candidate = cand.value;
    out.trace = cand.trace;

    // Delta*: uniform-width open windows. A pointwise non-atomic monotone
    // mass gives small windows small mass on its own, so fine cells with
    // near-cell tags reproduce the chain sums; the width starts at the scale
    // where the chain settled and is halved until the drawn sums track the
    // candidate or the tick resolution is reached.
    try {
        Rng rng(cfg.seed ^ 0xda942042e4dd58b5ull);
        double worst = std::numeric_limits<double>::infinity();
        double ut = 0.0;
        int scale = std::clamp(cand.usedDepth, 1, mu.space.maxDepth - 1);
        int usedScale = scale;
        for (; scale < mu.space.maxDepth; ++scale) {
            Gauge g = Gauge::uniformWidth(mu.space, std::ldexp(1.0, -scale));
            const int shift = mu.space.maxDepth - scale;
            usedScale = scale;
            worst = 0.0;
            ut = 0.0;
            for (int t = 0; t < cfg.mcshaneTrials; ++t) {
                for (TagDiscipline disc : {TagDiscipline::henstock, TagDiscipline::mcshane}) {
                    TaggedPartition tp = cousinFine(g, domain, disc, &rng);
                    RiemannSum rs = riemannSum(f, mu, tp);
                    worst = std::max(worst, hausdorff(rs.value, candidate));

                    if (disc == TagDiscipline::mcshane) {
                        // free tags allow one tag to serve several cells: give
                        // the cells sharing a window-scale chain cell one tag
                        // where the gauge admits it, so the merge below has
                        // work to do
                        std::unordered_map<std::uint64_t, double> groupTag;
                        std::vector<double> tags = tp.tags;
                        for (std::size_t i = 0; i < tp.base.cells.size(); ++i) {
                            std::uint64_t key = tp.base.cells[i].runs().front().first >> shift;
                            auto [it, inserted] = groupTag.try_emplace(key, tags[i]);
                            if (!inserted && g.admits(tp.base.cells[i], it->second))
                                tags[i] = it->second;
                        }
                        tp.tags = std::move(tags);
                        rs = riemannSum(f, mu, tp);
                        worst = std::max(worst, hausdorff(rs.value, candidate));
                    }

                    TaggedPartition merged = utMerge(tp);
                    ut = std::max(ut, hausdorff(riemannSum(f, mu, merged).value, rs.value));
                }
            }
            out.trace.push_back({scale, candidate, 0.0, worst, 0.0});
            if (worst <= 3.0 * cfg.tol) break;
        }

        out.value = candidate;
        out.limsupEstimate = worst;
        out.utAgreement = ut;
        out.usedDepth = usedScale;
        if (worst <= 3.0 * cfg.tol) {
            out.status = IntegralStatus::converged;
            out.errorEstimate = std::max(cand.errorEstimate, worst);
            std::ostringstream d;
            d << "held on " << cfg.mcshaneTrials
              << " gauge-fine partitions per tag discipline at window half-width 2^-" << usedScale;
            out.detail = d.str();
        } else {
            out.status = IntegralStatus::inconclusive;
            std::ostringstream d;
            d << "a gauge-fine partition strays " << worst
              << " from the chain value even at the finest window";
            out.detail = d.str();
        }
        return out;
    } catch (const GaugeTooFineError& e) {
        out.status = IntegralStatus::gaugeTooFine;
        out.value = candidate;
        out.usedDepth = cand.usedDepth;
        out.detail = e.what();
        return out;
    }
}

IntegralResult integrateOnSet(const std::string& method, const Multifunction& f,
                              const SetFunction& mu, const MeasurableSet& domain,
                              const IntegratorConfig& cfg) {
    if (method == "gould") return gouldIntegral(f, mu, domain, cfg);
    if (method == "mcshane") return mcShaneIntegral(f, mu, domain, cfg);
    if (method == "birkhoff-simple") {
        if (!mu.space.isDyadic())
            throw std::invalid_argument("birkhoff-simple: countable enumerations live on the dyadic model");
        if (mu.space != domain.space())
            throw std::invalid_argument("birkhoff-simple: domain and mass live on different spaces");
        if (domain.isEmpty()) return trivialOnEmpty("birkhoff-simple", f.dim);
        CountableGenerator gen = CountableGenerator::geometric(mu.space, 1, 1);
        if (domain == MeasurableSet::full(mu.space)) return birkhoffSimpleIntegral(f, mu, gen, cfg);
        // restriction: cut every enumerated cell and the tail down to the domain
        auto restricted = [&gen, &domain](int n) {
            Partition p = gen.truncate(n);
            std::vector<MeasurableSet> cells;
            for (const auto& c : p.cells) {
                MeasurableSet cut = c.intersectWith(domain);
                if (!cut.isEmpty()) cells.push_back(std::move(cut));
            }
            return Partition::truncatedOf(std::move(cells), p.tailSet->intersectWith(domain),
                                          p.generatorId);
        };
        return birkhoffCore(f, mu, domain, restricted, gen.maxTruncation(),
                            gen.id() + " cut to the domain", cfg);
    }
    throw std::invalid_argument("unknown integration method: " + method);
}

IntegralResult integrate(const std::string& method, const Multifunction& f, const SetFunction& mu,
                         const IntegratorConfig& cfg) {
    return integrateOnSet(method, f, mu, MeasurableSet::full(mu.space), cfg);
}

namespace {

// endpoints of every run, the representative, and a few random draws
double cellOscillation(const Multifunction& f, const MeasurableSet& c, Rng& rng) {
    std::vector<double> pts;
    pts.push_back(c.repPoint());
    if (c.space().isDyadic()) {
        double w = std::ldexp(1.0, -c.space().maxDepth);
        for (const auto& r : c.runs()) {
            pts.push_back((static_cast<double>(r.first) + 0.5) * w);
            pts.push_back((static_cast<double>(r.second) - 0.5) * w);
        }
    } else {
        for (int i = 0; i < 64 && i < c.space().points; ++i)
            if (c.mask() & (1ull << i)) pts.push_back(static_cast<double>(i));
    }
    for (int k = 0; k < 5; ++k) pts.push_back(c.samplePoint(rng));

    double osc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            osc = std::max(osc, hausdorff(f(pts[i]), f(pts[j])));
    return osc;
}

} // namespace

MeasurabilityWitness totallyMeasurableWitness(const Multifunction& f, const SetFunction& mu,
                                              const MeasurableSet& domain, double eps,
                                              int maxDepth, std::uint64_t seed) {
    if (mu.space != domain.space())
        throw std::invalid_argument("measurability witness: domain and mass live on different spaces");
    MeasurabilityWitness out;
    if (domain.isEmpty()) return out;

    Rng rng(seed);
    const int cap = chainDepthCap(mu.space, maxDepth);
    for (int m = 0; m <= cap; ++m) {
        std::vector<MeasurableSet> good;
        MeasurableSet bad = MeasurableSet::empty(mu.space);
        double worstGood = 0.0;
        for (auto& c : domain.pieces(m)) {
            double osc = cellOscillation(f, c, rng);
            if (osc < eps) {
                worstGood = std::max(worstGood, osc);
                good.push_back(std::move(c));
            } else {
                bad = bad.unionWith(c);
            }
        }
        double badMass = bad.isEmpty() ? 0.0 : mu(bad);
        out.exceptional = bad;
        out.exceptionalMass = badMass;
        out.oscBound = worstGood;
        out.depth = m;
        if (badMass < eps && !good.empty()) {
            out.totallyMeasurable = true;
            out.partition = Partition::finiteOf(std::move(good));
            return out;
        }
    }
    out.totallyMeasurable = false;
    return out;
}

} // namespace svi
