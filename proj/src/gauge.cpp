#include "svi/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "svi/errors.hpp"

namespace svi {

Gauge::Gauge(SpaceModel space, std::vector<Piece> pieces, std::vector<PointException> exceptions,
             OpenInterval fallback)
    : space_(space), pieces_(std::move(pieces)), exceptions_(std::move(exceptions)), fallback_(fallback) {
    if (!space_.isDyadic()) throw std::invalid_argument("gauge: dyadic model only");
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Piece& a, const Piece& b) { return a.begin < b.begin; });
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (pieces_[i].begin >= pieces_[i].end || pieces_[i].end > space_.ticks())
            throw std::invalid_argument("gauge: bad piece run");
        if (i > 0 && pieces_[i].begin < pieces_[i - 1].end)
            throw std::invalid_argument("gauge: overlapping piece runs");
    }
}

Gauge Gauge::uniformWidth(const SpaceModel& s, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gauge: width must be positive");
    int depth = 0;
    while (depth <= s.maxDepth && std::ldexp(1.0, -depth) >= width) ++depth;
    if (depth > s.maxDepth)
        throw GaugeTooFineError("gauge: width does not exceed one tick");
    std::vector<Piece> pieces;
    pieces.reserve(1ull << depth);
    double cw = std::ldexp(1.0, -depth);
    std::uint64_t run = s.ticks() >> depth;
    for (std::uint64_t k = 0; k < (1ull << depth); ++k) {
        // the largest window constant over the cell and inside every
        // point's (t - width, t + width)
        OpenInterval w{(k + 1) * cw - width, k * cw + width};
        pieces.push_back({k * run, (k + 1) * run, w});
    }
    return Gauge(s, std::move(pieces), {}, OpenInterval{-width, 1.0 + width});
}

OpenInterval Gauge::at(double t) const {
    for (const auto& e : exceptions_)
        if (e.point == t) return e.window;
    if (t >= 0.0 && t < 1.0) {
        std::uint64_t tick = tickOf(space_, t);
        auto it = std::upper_bound(pieces_.begin(), pieces_.end(), tick,
                                   [](std::uint64_t v, const Piece& p) { return v < p.begin; });
        if (it != pieces_.begin()) {
            --it;
            if (tick < it->end) return it->window;
        }
    }
    return fallback_;
}

bool Gauge::admits(const MeasurableSet& cell, double tag) const {
    if (cell.isEmpty()) return true;
    OpenInterval w = at(tag);
    const auto& rs = cell.runs();
    double tick = std::ldexp(1.0, -space_.maxDepth);
    double lo = rs.front().first * tick;
    double hi = rs.back().second * tick;
    return w.lo < lo && hi <= w.hi;
}

namespace {

struct FineBuilder {
    const Gauge& g;
    const SpaceModel& space;
    TagDiscipline discipline;
    Rng* rng;
    std::vector<MeasurableSet> cells;
    std::vector<double> tags;
    std::vector<DyadicCell> leftovers;

    bool tryTag(const MeasurableSet& cell, double t) {
        if (discipline != TagDiscipline::mcshane && !cell.containsPoint(t)) return false;
        return g.admits(cell, t);
    }

    bool place(const MeasurableSet& cell) {
        std::vector<double> candidates;
        const auto& run = cell.runs().front();
        double tick = std::ldexp(1.0, -space.maxDepth);
        // exceptions first: a point with a deliberately narrow window should
        // claim its own cell before any generic candidate does
        for (const auto& e : g.exceptions())
            if (cell.containsPoint(e.point)) candidates.push_back(e.point);
        if (discipline == TagDiscipline::mcshane)
            for (const auto& e : g.exceptions())
                if (!cell.containsPoint(e.point)) candidates.push_back(e.point);
        if (rng) {
            MeasurableSet copy = cell;
            for (int k = 0; k < 4; ++k) candidates.push_back(copy.samplePoint(*rng));
        }
        candidates.push_back(cell.repPoint());
        candidates.push_back(run.first * tick);
        if (rng && candidates.size() > 1) {
            // rotate so the scan starts at a random admissible-candidate slot
            std::size_t shift = static_cast<std::size_t>(rng->nextBelow(candidates.size()));
            std::rotate(candidates.begin(), candidates.begin() + shift, candidates.end());
        }
        for (double t : candidates)
            if (tryTag(cell, t)) {
                cells.push_back(cell);
                tags.push_back(t);
                return true;
            }
        return false;
    }

    void descend(const DyadicCell& c) {
        MeasurableSet cell = MeasurableSet::cell(space, c.depth, c.index);
        if (place(cell)) return;
        if (c.depth >= space.maxDepth) {
            leftovers.push_back(c);
            return;
        }
        descend({c.depth + 1, 2 * c.index});
        descend({c.depth + 1, 2 * c.index + 1});
    }
};

} // namespace

FinePartitionResult cousinFineOrTail(const Gauge& g, const MeasurableSet& domain,
                                     TagDiscipline discipline, Rng* rng) {
    if (discipline == TagDiscipline::univocal)
        throw std::invalid_argument("fine partition: univocal tagging is a post-processing step");
    FineBuilder b{g, g.space(), discipline, rng, {}, {}, {}};
    for (const auto& c : domain.cells()) b.descend(c);
    FinePartitionResult out;
    if (!b.cells.empty()) out.tagged.base = Partition::finiteOf(std::move(b.cells));
    out.tagged.tags = std::move(b.tags);
    out.tagged.discipline = discipline;
    out.uncovered = MeasurableSet::empty(g.space());
    for (const auto& c : b.leftovers)
        out.uncovered = out.uncovered.unionWith(MeasurableSet::cell(g.space(), c.depth, c.index));
    return out;
}

TaggedPartition cousinFine(const Gauge& g, const MeasurableSet& domain, TagDiscipline discipline,
                           Rng* rng) {
    FinePartitionResult r = cousinFineOrTail(g, domain, discipline, rng);
    if (!r.uncovered.isEmpty())
        throw GaugeTooFineError("fine partition: cells at tick resolution admit no tag");
    return std::move(r.tagged);
}

TaggedPartition utMerge(const TaggedPartition& tp) {
    TaggedPartition out;
    out.discipline = tp.discipline;
    std::vector<MeasurableSet> merged;
    std::vector<double> tags;
    for (std::size_t i = 0; i < tp.base.cells.size(); ++i) {
        double t = tp.tags[i];
        std::size_t j = 0;
        for (; j < tags.size(); ++j)
            if (tags[j] == t) break;
        if (j == tags.size()) {
            merged.push_back(tp.base.cells[i]);
            tags.push_back(t);
        } else {
            merged[j] = merged[j].unionWith(tp.base.cells[i]);
        }
    }
    out.base = Partition::finiteOf(std::move(merged));
    if (tp.base.kind == PartitionKind::countableTruncated) {
        out.base.kind = tp.base.kind;
        out.base.tailSet = tp.base.tailSet;
        out.base.generatorId = tp.base.generatorId;
    }
    out.tags = std::move(tags);
    return out;
}

namespace {

MeasurableSet paddedFootprint(const MeasurableSet& cell, std::uint64_t pad, const SpaceModel& s) {
    std::vector<MeasurableSet::Run> runs;
    for (const auto& [a, b] : cell.runs())
        runs.push_back({a > pad ? a - pad : 0, std::min(s.ticks(), b + pad)});
    return MeasurableSet::fromRuns(s, std::move(runs));
}

} // namespace

CollarGauge buildCollarGauge(const std::vector<MeasurableSet>& cells, const SetFunction& mu,
                             double eps, double bound) {
    if (cells.empty()) throw std::invalid_argument("collar gauge: no cells");
    const SpaceModel& s = mu.space;
    if (!s.isDyadic()) throw std::invalid_argument("collar gauge: dyadic model only");
    const double tick = std::ldexp(1.0, -s.maxDepth);
    const double jointBudget = eps / (3.0 * bound);

    auto overshoot = [&](const MeasurableSet& cell, std::uint64_t pad) {
        return mu(paddedFootprint(cell, pad, s).differenceWith(cell));
    };

    auto assemble = [&](const std::vector<std::uint64_t>& pads, std::vector<double> per,
                        double total, bool tightened) {
        std::vector<Gauge::Piece> pieces;
        for (std::size_t n = 0; n < cells.size(); ++n) {
            double pad = pads[n] * tick;
            for (const auto& [a, b] : cells[n].runs())
                pieces.push_back({a, b, OpenInterval{a * tick - pad, b * tick + pad}});
        }
        CollarGauge out{Gauge(s, std::move(pieces), {}, OpenInterval{-tick, 1.0 + tick}),
                        total, std::move(per), tightened};
        return out;
    };

    std::vector<std::uint64_t> pads(cells.size(), 1);
    std::vector<double> per(cells.size(), 0.0);
    double total = 0.0;
    for (std::size_t n = 0; n < cells.size(); ++n) {
        double budget = eps * std::ldexp(1.0, -2 * (static_cast<int>(n) + 1)) / bound;
        // widest pad within the per-cell budget, but at least one tick
        std::uint64_t lo = 1, hi = s.ticks();
        if (overshoot(cells[n], lo) > budget) {
            pads[n] = 1;
        } else {
            while (lo < hi) { // binary search on the monotone overshoot
                std::uint64_t mid = lo + (hi - lo + 1) / 2;
                if (overshoot(cells[n], mid) <= budget)
                    lo = mid;
                else
                    hi = mid - 1;
            }
            pads[n] = lo;
        }
        per[n] = overshoot(cells[n], pads[n]);
        total += per[n];
    }
    if (total <= jointBudget) return assemble(pads, per, total, false);

    // second tier: one-tick collars everywhere
    total = 0.0;
    for (std::size_t n = 0; n < cells.size(); ++n) {
        pads[n] = 1;
        per[n] = overshoot(cells[n], 1);
        total += per[n];
    }
    if (total <= jointBudget) return assemble(pads, per, total, true);
    throw GaugeTooFineError("collar gauge: one-tick collars already overshoot the joint budget");
}

} // namespace svi
