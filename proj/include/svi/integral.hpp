#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svi/box.hpp"
#include "svi/gauge.hpp"
#include "svi/multifunction.hpp"
#include "svi/partition.hpp"
#include "svi/set_function.hpp"
#include "svi/space.hpp"

namespace svi {

struct IntegratorConfig {
    double tol = 1e-3;
    int maxDepth = 16;          // deepest chain level the integrators will visit
    int tagSamplesPerCell = 8;  // random tag draws per oscillation probe
    int refinementTrials = 50;  // random finer partitions used to validate a limit
    int window = 64;            // truncation indices certified past the tail cutoff
    int mcshaneTrials = 50;     // gauge-fine partitions drawn per discipline
    std::uint64_t seed = 1;
    double divergenceFactor = 1e6; // hard blow-up threshold for partial sums

    DivergenceRule divergenceRule() const {
        DivergenceRule r;
        r.hardThreshold = divergenceFactor;
        return r;
    }
};

enum class IntegralStatus {
    converged,
    notIntegrable,       // partial sums blow up or oscillate without limit
    tailMassNotSummable, // no truncation gets the tail mass under the budget
    gaugeTooFine,        // the collar construction is not representable
    inconclusive         // no verdict within the configured depth
};

std::string statusName(IntegralStatus s);

struct TraceEntry {
    int depth = 0;               // chain depth, or truncation index
    Box value;                   // canonical-tag sum at this step
    double delta = 0.0;          // distance to the previous step's sum
    double tagOscillation = 0.0; // worst deviation over random tag draws
    double tailBound = 0.0;      // bound times the mass still in the tail
};

struct IntegralResult {
    std::string method;
    IntegralStatus status = IntegralStatus::inconclusive;
    Box value;
    double errorEstimate = 0.0;
    std::vector<TraceEntry> trace;
    double tailBound = 0.0;      // final truncation tail bound (countable methods)
    double limsupEstimate = 0.0; // worst deviation seen during certification
    double utAgreement = 0.0;    // sum shift caused by merging same-tag cells
    int usedDepth = 0;           // depth or truncation index where the value settled
    std::string detail;

    bool converged() const { return status == IntegralStatus::converged; }
};

struct RiemannSum {
    Box value;
    double tailBound = 0.0;
};

// sum of F(tag) scaled by mu(cell), cells in listed order; a truncated
// partition also reports bound * mu(tail)
RiemannSum riemannSum(const Multifunction& f, const SetFunction& mu, const TaggedPartition& tp);

// Limit of Riemann sums along the chain of dyadic partitions, accepted when
// the tag oscillation and the step-to-step movement stay under tol at two
// consecutive depths and the value survives a barrage of random finer
// partitions with random tags. On the finite model the chain bottoms out at
// singletons and the value is exact.
IntegralResult gouldIntegral(const Multifunction& f, const SetFunction& mu,
                             const MeasurableSet& domain, const IntegratorConfig& cfg);

// Countable-partition limit: the candidate value comes from the chain limit;
// the truncation index N is the first whose tail mass is within tol/(4*bound),
// and every truncation in a window past N must keep all randomly tagged
// partial sums near the candidate, refining the enumerated cells as far as
// needed (a coarse shell makes the sum oscillate as much as F does on it).
IntegralResult birkhoffSimpleIntegral(const Multifunction& f, const SetFunction& mu,
                                      const CountableGenerator& gen, const IntegratorConfig& cfg);

// Gauge-limit integral with free tags: a collar gauge is built around the
// chain partition the Gould loop stabilized at, and randomly drawn fine
// partitions under both tag disciplines must reproduce the candidate value.
// Demands a pointwise non-atomic, monotone mass: a point atom defeats any
// collar budget.
IntegralResult mcShaneIntegral(const Multifunction& f, const SetFunction& mu,
                               const MeasurableSet& domain, const IntegratorConfig& cfg);

// Dispatch by method name, run on the restriction to a measurable subdomain:
// "gould", "birkhoff-simple" (canonical right-end enumeration, its cells and
// tail intersected with the domain), or "mcshane".
IntegralResult integrateOnSet(const std::string& method, const Multifunction& f,
                              const SetFunction& mu, const MeasurableSet& domain,
                              const IntegratorConfig& cfg);

// whole-space convenience for the dispatch above
IntegralResult integrate(const std::string& method, const Multifunction& f, const SetFunction& mu,
                         const IntegratorConfig& cfg);

struct MeasurabilityWitness {
    bool totallyMeasurable = false;
    Partition partition;        // cells where F moves less than eps
    MeasurableSet exceptional;  // cells where it does not
    double exceptionalMass = 0.0;
    double oscBound = 0.0;      // worst oscillation outside the exceptional part
    int depth = 0;
};

// Chain-partition witness that F is a uniform limit of step maps away from a
// small-mass exceptional set; the oscillation on each cell is probed at the
// endpoints and random interior points
MeasurabilityWitness totallyMeasurableWitness(const Multifunction& f, const SetFunction& mu,
                                              const MeasurableSet& domain, double eps,
                                              int maxDepth, std::uint64_t seed = 1);

} // namespace svi
