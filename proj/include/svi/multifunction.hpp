#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "svi/box.hpp"
#include "svi/rng.hpp"
#include "svi/space.hpp"

namespace svi {

// Box-valued map on the interval (points of the finite model pass as their
// index). The declared bound dominates |F(t)| everywhere; integrators lean
// on it for tail and collar budgets, so it can be re-probed empirically.
struct Multifunction {
    std::function<Box(double)> evaluator;
    double bound = 0.0;
    std::size_t dim = 1;
    bool continuous = false;
    std::string catalogId;
    std::optional<MeasurableSet> support; // degenerate {0} outside, when known

    Box operator()(double t) const { return evaluator(t); }

    bool checkBound(const SpaceModel& s, int samples, std::uint64_t seed) const {
        Rng rng(seed);
        for (int k = 0; k < samples; ++k) {
            double t = s.isFinite() ? static_cast<double>(rng.nextBelow(s.points))
                                    : rng.nextDouble();
            if (norm(evaluator(t)) > bound) return false;
        }
        return true;
    }
};

} // namespace svi
