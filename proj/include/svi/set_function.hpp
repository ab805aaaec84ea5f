#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "svi/partition.hpp"
#include "svi/space.hpp"

namespace svi {

// Structural properties a set function may declare about itself. Declared
// flags are a promise used to pick algorithms and theorem instances; classify
// re-checks them empirically.
struct SetFunctionProps {
    bool finitelyAdditive = false;
    bool countablyAdditive = false;
    bool monotone = false;
    bool nullAdditive = false;
    bool nullNullAdditive = false;
    bool sigmaNullNullAdditive = false;
    bool continuousFromBelow = false;
    bool pointwiseNonAtomic = false;
};

// Nonnegative monotone set function mu with mu(empty) = 0, given by an
// evaluator over measurable sets. Values need not be additive.
struct SetFunction {
    SpaceModel space;
    std::function<double(const MeasurableSet&)> evaluator;
    SetFunctionProps declaredProps;
    std::string catalogId;

    double operator()(const MeasurableSet& a) const { return evaluator(a); }
};

// Blow-up detection shared by the variation and refinement-limit loops: a
// depth-indexed sequence is flagged as diverging once it exceeds the hard
// threshold, or once the last `trendSteps` increments are positive with
// step-to-step growth above `growthRatio` (geometric blow-up never reaches
// the hard threshold within a 24-level space, so the trend test is what
// catches it in practice).
struct DivergenceRule {
    double hardThreshold = 1e6;
    double growthRatio = 1.05;
    int trendSteps = 4;

    bool diverging(const std::vector<double>& seq) const;
};

struct VariationResult {
    double value = 0.0;     // supremum at depthCap
    bool diverging = false; // blow-up along the depth sequence
    std::vector<double> depthSequence;
};

// Supremum of sums of mu over disjoint families inside E. Finite model:
// exact enumeration over set partitions (|E| <= 12). Dyadic model: families
// drawn from the dyadic subdivisions of E's maximal cells down to depthCap,
// computed exactly by the tree recursion best(c) = max(mu(c), best(left) +
// best(right)); extending a family by leftover cells never lowers the sum
// because mu >= 0, so antichains of the cell tree realize the supremum.
VariationResult variation(const SetFunction& mu, const MeasurableSet& e, int depthCap,
                          const DivergenceRule& rule = DivergenceRule{});

struct AtomCertificate {
    bool atom = false;
    // what the verdict is relative to: exhaustive enumeration or the
    // null-null-additive cell reduction at depthCap
    std::string method;
    int depthCap = 0;
    std::optional<MeasurableSet> witness; // a B violating the atom property
};

// A is an atom: mu(A) > 0 and every measurable B inside A has mu(B) = 0 or
// mu(A minus B) = 0. Finite model: all subsets of A (|A| <= 20). Dyadic
// model with monotone null-null-additive mu: exact relative to depthCap,
// since a violating union of cells must contain a violating single cell.
// Otherwise: exhaustive over unions of the depth-d pieces while their count
// stays <= 16, sampled unions beyond that.
AtomCertificate isAtom(const SetFunction& mu, const MeasurableSet& a, int depthCap,
                       std::uint64_t seed = 1);

struct PropertyCheck {
    std::string flag;
    bool declared = false;
    bool passed = false;
    std::string witness; // set description when the check failed
    int trials = 0;
};

struct ClassifyReport {
    std::string mu;
    std::vector<PropertyCheck> checks;
    bool agreesWithDeclared = true;
};

// Empirical re-check of every declared flag on sampled sets (canonical
// halves first, then random unions of cells). On finite spaces one extra
// check reports whether the space splits into finitely many atoms.
ClassifyReport classify(const SetFunction& mu, int trials, std::uint64_t seed);

enum class PsiStatus { converged, notIntegrable, inconclusive };

struct PsiEval {
    double value = 0.0;
    double certifiedError = 0.0;
    PsiStatus status = PsiStatus::converged;
    int depthUsed = 0;
};

// The additive companion of mu: Psi(A) is the refinement limit of the sums
// of mu over the depth-m pieces of A. The depth sequence is evaluated until
// successive values settle below tol with a consistent trend; when the last
// deltas are stably geometric the limit is taken by Aitken extrapolation,
// which is exact for exactly geometric tails and is what makes Psi of
// lambda-plus-lambda-squared come out as lambda to machine precision.
// Evaluations are memoized; reads are safe under concurrency.
class PsiFunction {
public:
    PsiFunction(SetFunction base, double tol, int depthCap,
                DivergenceRule rule = DivergenceRule{});

    PsiEval evaluate(const MeasurableSet& a) const;
    double operator()(const MeasurableSet& a) const; // throws NotIntegrableError
    double certifiedError() const;                   // worst error over evaluations so far

    const SetFunction& base() const { return base_; }
    double tol() const { return tol_; }
    int depthCap() const { return depthCap_; }

    // Psi wrapped as a set function (additive within 2*tol); countable
    // additivity is declared when the base is continuous from below
    SetFunction asSetFunction() const;

private:
    SetFunction base_;
    double tol_;
    int depthCap_;
    DivergenceRule rule_;
    struct Memo {
        std::mutex lock;
        std::unordered_map<std::uint64_t, PsiEval> values;
        double worstError = 0.0;
    };
    std::shared_ptr<Memo> memo_;
};

// one-shot Psi(A) with the same contract as PsiFunction::evaluate
PsiEval psiIntegral(const SetFunction& mu, const MeasurableSet& a, double tol, int depthCap);

// Smallest chain partition P with |Psi(domain) - sum of mu over P| <= eps,
// re-verified on `verifyTrials` random refinements of P (each must stay
// within eps). Throws NotIntegrableError when mu has no refinement limit.
Partition epsApproxPartition(const SetFunction& mu, const PsiFunction& psi,
                             const MeasurableSet& domain, double eps,
                             int verifyTrials, std::uint64_t seed);

// sum over cells C of P (restricted to A) of |Psi(C n A) - mu(C n A)|
double henstockResidual(const SetFunction& mu, const PsiFunction& psi,
                        const Partition& p, const MeasurableSet& a);

struct AtomCollapseReport {
    bool holds = false;
    int fullMassCell = -1;    // index of the unique cell carrying mu(A)
    bool tailCarriesMass = false;
    double variationValue = 0.0;
    bool variationMatches = false;
    bool uniqueCellIsAtom = false; // checked for truncated partitions only
    std::string detail;
};

// On an atom A of a monotone null-additive mu, any partition of A puts the
// whole mass mu(A) on exactly one cell and zero on the others; for countable
// partitions the carrying cell is itself an atom, and the variation of A
// equals mu(A). Throws HypothesisError when A is not an atom or mu lacks the
// declared properties.
AtomCollapseReport checkAtomCollapse(const SetFunction& mu, const MeasurableSet& a,
                                     const Partition& p, int depthCap);

} // namespace svi
