#include "svi/partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace svi {

Partition Partition::finiteOf(std::vector<MeasurableSet> cells) {
    if (cells.empty()) throw std::invalid_argument("partition: no cells");
    Partition p;
    p.kind = PartitionKind::finite;
    p.cells = std::move(cells);
    return p;
}

Partition Partition::truncatedOf(std::vector<MeasurableSet> cells, MeasurableSet tail, std::string generatorId) {
    Partition p;
    p.kind = PartitionKind::countableTruncated;
    p.cells = std::move(cells);
    p.tailSet = std::move(tail);
    p.generatorId = std::move(generatorId);
    return p;
}

MeasurableSet Partition::domain() const {
    MeasurableSet d = cells.empty() ? (tailSet ? MeasurableSet::empty(tailSet->space()) : MeasurableSet())
                                    : MeasurableSet::empty(cells[0].space());
    for (const auto& c : cells) d = d.unionWith(c);
    if (tailSet) d = d.unionWith(*tailSet);
    return d;
}

bool Partition::valid() const {
    std::vector<const MeasurableSet*> ps;
    for (const auto& c : cells) ps.push_back(&c);
    if (tailSet && !tailSet->isEmpty()) ps.push_back(&*tailSet);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (ps[i]->isEmpty()) return false;
        for (std::size_t j = i + 1; j < ps.size(); ++j)
            if (!ps[i]->disjointFrom(*ps[j])) return false;
    }
    return true;
}

std::string Partition::describe() const {
    std::string s = kind == PartitionKind::finite ? "finite[" : (generatorId + "[");
    s += std::to_string(cells.size());
    if (tailSet && !tailSet->isEmpty()) s += "+tail";
    return s + "]";
}

bool TaggedPartition::tagsConsistent() const {
    if (tags.size() != base.cells.size()) return false;
    if (discipline == TagDiscipline::mcshane) return true;
    for (std::size_t i = 0; i < tags.size(); ++i)
        if (!base.cells[i].containsPoint(tags[i])) {
            if (discipline == TagDiscipline::henstock) return false;
            // univocal partitions arise from merging, tag stays inside the merge
            return false;
        }
    if (discipline == TagDiscipline::univocal)
        for (std::size_t i = 0; i < tags.size(); ++i)
            for (std::size_t j = i + 1; j < tags.size(); ++j)
                if (tags[i] == tags[j]) return false;
    return true;
}

static std::vector<const MeasurableSet*> piecesOf(const Partition& p) {
    std::vector<const MeasurableSet*> ps;
    for (const auto& c : p.cells) ps.push_back(&c);
    if (p.tailSet && !p.tailSet->isEmpty()) ps.push_back(&*p.tailSet);
    return ps;
}

bool isFiner(const Partition& p2, const Partition& p1) {
    auto fine = piecesOf(p2);
    auto coarse = piecesOf(p1);
    for (const auto* f : fine) {
        bool inside = false;
        for (const auto* c : coarse)
            if (f->subsetOf(*c)) {
                inside = true;
                break;
            }
        if (!inside) return false;
    }
    return true;
}

Partition commonRefinement(const Partition& a, const Partition& b) {
    std::vector<MeasurableSet> cells;
    for (const auto& x : a.cells)
        for (const auto& y : b.cells) {
            MeasurableSet c = x.intersectWith(y);
            if (!c.isEmpty()) cells.push_back(std::move(c));
        }
    bool aTail = a.tailSet && !a.tailSet->isEmpty();
    bool bTail = b.tailSet && !b.tailSet->isEmpty();
    if (!aTail && !bTail) return Partition::finiteOf(std::move(cells));
    // unenumerated mass is whatever either tail still covers
    MeasurableSet tail = aTail ? *a.tailSet : *b.tailSet;
    if (aTail && bTail) tail = a.tailSet->unionWith(*b.tailSet);
    // listed cells must not leak into the tail
    for (auto& c : cells) c = c.differenceWith(tail);
    std::erase_if(cells, [](const MeasurableSet& c) { return c.isEmpty(); });
    std::string gid = aTail ? a.generatorId : b.generatorId;
    return Partition::truncatedOf(std::move(cells), std::move(tail), std::move(gid));
}

std::vector<Partition> dyadicChain(const MeasurableSet& domain, int maxDepth) {
    if (domain.isEmpty()) throw std::invalid_argument("dyadicChain: empty domain");
    std::vector<Partition> chain;
    for (int m = 0; m <= maxDepth; ++m)
        chain.push_back(Partition::finiteOf(domain.pieces(m)));
    return chain;
}

Partition randomRefinement(const Partition& base, int extraDepth, Rng& rng) {
    std::vector<MeasurableSet> cells;
    for (const auto& c : base.cells) {
        int extra = static_cast<int>(rng.nextBelow(static_cast<std::uint64_t>(extraDepth) + 1));
        if (c.space().isDyadic()) {
            int deepest = 0;
            for (const auto& dc : c.cells()) deepest = std::max(deepest, dc.depth);
            extra = std::min(extra, c.space().maxDepth - deepest);
            int target = deepest + extra;
            for (auto& p : c.pieces(target)) cells.push_back(std::move(p));
        } else {
            for (auto& p : c.pieces(extra == 0 ? 0 : 30)) cells.push_back(std::move(p)); // finite: split to singletons or keep
        }
    }
    if (base.kind == PartitionKind::countableTruncated)
        return Partition::truncatedOf(std::move(cells), *base.tailSet, base.generatorId);
    return Partition::finiteOf(std::move(cells));
}

CountableGenerator CountableGenerator::geometric(const SpaceModel& s, std::int64_t num, std::int64_t den) {
    if (!s.isDyadic()) throw std::invalid_argument("generator: dyadic model only");
    CountableGenerator g;
    g.id_ = "geometric(" + std::to_string(num) + (den == 1 ? "" : "/" + std::to_string(den)) + ")";
    MeasurableSet prev = MeasurableSet::full(s);
    for (int m = 1; m <= s.maxDepth; ++m) {
        MeasurableSet cur = MeasurableSet::cellAtRational(s, m, num, den);
        g.chainCells_.push_back(prev);
        g.shells_.push_back(prev.differenceWith(cur));
        prev = cur;
    }
    g.chainCells_.push_back(prev); // tail after all shells: the deepest chain cell
    g.shells_.push_back(prev);     // final enumeration step completes the partition
    g.chainCells_.push_back(MeasurableSet::empty(s));
    return g;
}

CountableGenerator CountableGenerator::dyadicTail(const SpaceModel& s, int depthPerIndex) {
    if (!s.isDyadic()) throw std::invalid_argument("generator: dyadic model only");
    if (depthPerIndex < 1) throw std::invalid_argument("generator: depthPerIndex >= 1");
    CountableGenerator g;
    g.id_ = "dyadicTail(" + std::to_string(depthPerIndex) + ")";
    MeasurableSet prev = MeasurableSet::full(s);
    for (int m = depthPerIndex; m <= s.maxDepth; m += depthPerIndex) {
        MeasurableSet cur = MeasurableSet::cellAtRational(s, m, 1, 1);
        g.chainCells_.push_back(prev);
        g.shells_.push_back(prev.differenceWith(cur));
        prev = cur;
    }
    g.chainCells_.push_back(prev);
    g.shells_.push_back(prev);
    g.chainCells_.push_back(MeasurableSet::empty(s));
    return g;
}

Partition CountableGenerator::truncate(int n) const {
    if (n < 1 || n > maxTruncation()) throw std::invalid_argument("generator: truncation out of range");
    std::vector<MeasurableSet> cells(shells_.begin(), shells_.begin() + n);
    return Partition::truncatedOf(std::move(cells), chainCells_[n], id_);
}

} // namespace svi
