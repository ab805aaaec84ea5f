#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "svi/rng.hpp"

namespace svi {

enum class SpaceKind { DyadicUnitInterval, FiniteSpace };

// The two ambient measurable spaces. The dyadic model is [0,1) with the
// algebra generated by half-open dyadic cells [k*2^-m, (k+1)*2^-m), m <=
// maxDepth; positions are held as integer ticks at resolution 2^-maxDepth so
// set algebra and Lebesgue mass are exact. The finite model is {0,...,n-1}
// with the full power set held as a bitmask.
struct SpaceModel {
    SpaceKind kind = SpaceKind::DyadicUnitInterval;
    int maxDepth = 0; // dyadic resolution exponent
    int points = 0;   // finite cardinality

    static SpaceModel dyadic(int maxDepth);
    static SpaceModel finite(int n);

    std::uint64_t ticks() const { return 1ull << maxDepth; }
    bool isDyadic() const { return kind == SpaceKind::DyadicUnitInterval; }
    bool isFinite() const { return kind == SpaceKind::FiniteSpace; }
    std::string describe() const;

    friend bool operator==(const SpaceModel&, const SpaceModel&) = default;
};

struct DyadicCell {
    int depth = 0;
    std::uint64_t index = 0;
    friend bool operator==(const DyadicCell&, const DyadicCell&) = default;
};

// A set of the ambient algebra in canonical form. Dyadic sets are kept as
// sorted, merged, half-open tick runs, so equal sets compare equal; the
// maximal-dyadic-cell decomposition is derived on demand. Finite sets are a
// bitmask. All operations stay inside one space model.
class MeasurableSet {
public:
    using Run = std::pair<std::uint64_t, std::uint64_t>; // [begin,end) ticks

    MeasurableSet() = default;

    static MeasurableSet empty(const SpaceModel& s);
    static MeasurableSet full(const SpaceModel& s);
    static MeasurableSet cell(const SpaceModel& s, int depth, std::uint64_t index);
    static MeasurableSet fromRuns(const SpaceModel& s, std::vector<Run> runs);
    static MeasurableSet fromMask(const SpaceModel& s, std::uint64_t mask);
    // cell of given depth containing the point p = num/den in [0,1]
    static MeasurableSet cellAtRational(const SpaceModel& s, int depth, std::int64_t num, std::int64_t den);
    static MeasurableSet cellAtPoint(const SpaceModel& s, int depth, double t);

    const SpaceModel& space() const { return space_; }
    bool isEmpty() const;
    bool operator==(const MeasurableSet& o) const;
    bool operator!=(const MeasurableSet& o) const { return !(*this == o); }

    MeasurableSet unionWith(const MeasurableSet& o) const;
    MeasurableSet intersectWith(const MeasurableSet& o) const;
    MeasurableSet differenceWith(const MeasurableSet& o) const;
    MeasurableSet complement() const;
    bool subsetOf(const MeasurableSet& o) const;
    bool disjointFrom(const MeasurableSet& o) const;

    bool containsPoint(double t) const;
    bool containsRational(std::int64_t num, std::int64_t den) const;

    // exact Lebesgue mass (dyadic model only)
    double lebesgue() const;
    std::uint64_t tickCount() const;

    // maximal dyadic cell decomposition (canonical, unique)
    std::vector<DyadicCell> cells() const;
    const std::vector<Run>& runs() const { return runs_; }

    std::uint64_t mask() const { return mask_; }
    int elementCount() const;

    // nonempty intersections with the depth-d chain cells, in position order;
    // on the finite model the chain splits the index range into 2^d blocks
    std::vector<MeasurableSet> pieces(int depth) const;
    // streaming variant of pieces(), used where materializing the vector at
    // deep refinement levels would be wasteful
    void eachPiece(int depth, const std::function<void(MeasurableSet&&)>& fn) const;

    // deterministic representative point (midpoint of the largest run, lowest
    // index on the finite model)
    double repPoint() const;
    double samplePoint(Rng& rng) const;

    std::uint64_t hashKey() const;
    std::string describe() const;

private:
    SpaceModel space_;
    std::vector<Run> runs_; // dyadic payload
    std::uint64_t mask_ = 0; // finite payload
};

// tick position of a point, clamping 1.0 into the last cell
std::uint64_t tickOf(const SpaceModel& s, double t);

} // namespace svi
