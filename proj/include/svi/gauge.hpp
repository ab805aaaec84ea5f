#pragma once

#include <cstdint>
#include <vector>

#include "svi/partition.hpp"
#include "svi/rng.hpp"
#include "svi/set_function.hpp"
#include "svi/space.hpp"

namespace svi {

struct OpenInterval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double t) const { return lo < t && t < hi; }
    double width() const { return hi - lo; }
};

// An open window around every point of the interval, held as constant
// windows over disjoint tick runs plus finitely many point exceptions;
// exceptions are matched first, by exact position. A tagged cell is admitted
// when the half-open cell sits inside the window of its tag.
class Gauge {
public:
    struct Piece {
        std::uint64_t begin = 0; // tick run [begin, end)
        std::uint64_t end = 0;
        OpenInterval window;
    };
    struct PointException {
        double point = 0.0;
        OpenInterval window;
    };

    Gauge(SpaceModel space, std::vector<Piece> pieces, std::vector<PointException> exceptions,
          OpenInterval fallback);

    // window (t - width, t + width) shrunk to be constant on cells of the
    // coarsest depth finer than `width`; refuses widths at or below one tick
    static Gauge uniformWidth(const SpaceModel& s, double width);

    const SpaceModel& space() const { return space_; }
    OpenInterval at(double t) const;
    bool admits(const MeasurableSet& cell, double tag) const;

    std::size_t pieceCount() const { return pieces_.size(); }
    const std::vector<PointException>& exceptions() const { return exceptions_; }

private:
    SpaceModel space_;
    std::vector<Piece> pieces_; // sorted by begin, pairwise disjoint
    std::vector<PointException> exceptions_;
    OpenInterval fallback_;
};

// Delta-fine free- or cell-bound-tagged partition of the domain, found by
// repeated bisection: a cell that admits no tag splits into its two halves.
// Throws GaugeTooFineError when a cell at tick resolution still admits no
// tag. Pass rng to randomize the admissible tag choice; without it the
// first admissible candidate wins, deterministically.
TaggedPartition cousinFine(const Gauge& g, const MeasurableSet& domain, TagDiscipline discipline,
                           Rng* rng = nullptr);

struct FinePartitionResult {
    TaggedPartition tagged;
    MeasurableSet uncovered;
};

// As cousinFine, but tick-resolution cells that admit no tag are set aside
// instead of failing; the caller decides whether their joint mass is small
// enough to ignore.
FinePartitionResult cousinFineOrTail(const Gauge& g, const MeasurableSet& domain,
                                     TagDiscipline discipline, Rng* rng = nullptr);

// merge cells sharing a tag into one (possibly ragged) cell each
TaggedPartition utMerge(const TaggedPartition& tp);

struct CollarGauge {
    Gauge gauge;
    double collarMass = 0.0;      // joint overshoot of all collars
    std::vector<double> perCell;  // overshoot charged to each input cell
    bool tightened = false;       // second tier: every pad forced down to one tick
};

// Gauge hugging a partition: every run of cell n gets the window one collar
// wider than the run, the collar being the widest symmetric tick pad whose
// mass overshoot stays under a geometrically shrinking per-cell budget
// (eps * 4^-(n+1) / bound), and at least one tick. If the collars jointly
// overshoot more than eps / (3 * bound), all pads are retried at one tick;
// if even that overshoots, the construction refuses with GaugeTooFineError.
CollarGauge buildCollarGauge(const std::vector<MeasurableSet>& cells, const SetFunction& mu,
                             double eps, double bound);

} // namespace svi
