#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svi/rng.hpp"
#include "svi/space.hpp"

namespace svi {

enum class PartitionKind { finite, countableTruncated };

// Finite partition of a domain set, or a truncation of a countable one: the
// listed cells plus an explicit tail set holding everything not yet
// enumerated. Cells are pairwise disjoint and cells + tail cover the domain.
struct Partition {
    PartitionKind kind = PartitionKind::finite;
    std::vector<MeasurableSet> cells;
    std::optional<MeasurableSet> tailSet;
    std::string generatorId;

    static Partition finiteOf(std::vector<MeasurableSet> cells);
    static Partition truncatedOf(std::vector<MeasurableSet> cells, MeasurableSet tail, std::string generatorId);

    MeasurableSet domain() const;
    bool valid() const; // disjointness and coverage
    std::string describe() const;
};

enum class TagDiscipline { henstock, mcshane, univocal };

// Partition with one tag per cell. Under the henstock discipline every tag
// lies in its own cell; mcshane frees the tags; univocal additionally means
// no two cells share a tag (produced by merging).
struct TaggedPartition {
    Partition base;
    std::vector<double> tags;
    TagDiscipline discipline = TagDiscipline::henstock;

    bool tagsConsistent() const;
};

// P2 refines P1: every piece of P2 lies inside some piece of P1 (tails count
// as pieces for truncated partitions)
bool isFiner(const Partition& p2, const Partition& p1);

// pairwise nonempty intersections; refines both arguments
Partition commonRefinement(const Partition& a, const Partition& b);

// chain of uniform depth-m partitions of the domain, m = 0..maxDepth
std::vector<Partition> dyadicChain(const MeasurableSet& domain, int maxDepth);

// random partition refining `base`: each cell is independently subdivided by
// up to extraDepth levels
Partition randomRefinement(const Partition& base, int extraDepth, Rng& rng);

// Generator of one countable partition of the dyadic space, enumerated as
// shells of the nested cell chain around an accumulation point x0 = num/den:
// shell n is cellAt(n*step, x0) minus cellAt((n+1)*step, x0), and the last
// enumerated cell is the deepest chain cell itself. truncate(N) returns the
// first N cells with the rest of the chain as the tail; at N = shellCount()
// the enumeration is complete and the tail is empty.
class CountableGenerator {
public:
    static CountableGenerator geometric(const SpaceModel& s, std::int64_t num, std::int64_t den);
    static CountableGenerator dyadicTail(const SpaceModel& s, int depthPerIndex);

    int shellCount() const { return static_cast<int>(shells_.size()); }
    int maxTruncation() const { return shellCount(); }
    Partition truncate(int n) const;
    const std::string& id() const { return id_; }

private:
    std::string id_;
    std::vector<MeasurableSet> shells_;
    std::vector<MeasurableSet> chainCells_; // chainCells_[n] = tail after n shells
};

} // namespace svi
