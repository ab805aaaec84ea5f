#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "svi/errors.hpp"

namespace svi {

// Axis-aligned compact box in R^d under the sup norm. Boxes are the concrete
// model for the nonempty convex compact values a multifunction takes: they are
// closed under Minkowski sum, nonnegative scaling and hull-union, and the
// Hausdorff distance between two boxes has an exact coordinatewise formula, so
// every metric quantity here is computed in closed form rather than sampled.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    Box() = default;
    Box(std::vector<double> l, std::vector<double> h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo.empty() || lo.size() != hi.size())
            throw std::invalid_argument("box: lo/hi must be nonempty and equal length");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] <= hi[i]))
                throw std::invalid_argument("box: lo[i] <= hi[i] violated");
    }

    static Box interval(double l, double h) { return Box({l}, {h}); }
    static Box point(std::vector<double> p) { return Box(p, p); }
    static Box zero(std::size_t d) { return Box(std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)); }

    std::size_t dim() const { return lo.size(); }

    friend bool operator==(const Box& a, const Box& b) { return a.lo == b.lo && a.hi == b.hi; }
};

inline void requireSameDim(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("box: dimension mismatch");
}

// one-sided excess e(A,B) = sup_{a in A} dist(a, B); exact for boxes
inline double excess(const Box& a, const Box& b) {
    requireSameDim(a, b);
    double e = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        e = std::max(e, b.lo[i] - a.lo[i]);
        e = std::max(e, a.hi[i] - b.hi[i]);
    }
    return std::max(e, 0.0);
}

// Hausdorff distance h(A,B) = max of the two excesses
inline double hausdorff(const Box& a, const Box& b) {
    return std::max(excess(a, b), excess(b, a));
}

// |A| = h(A, {0}) = sup norm of the farthest corner
inline double norm(const Box& a) {
    double n = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        n = std::max(n, std::max(std::abs(a.lo[i]), std::abs(a.hi[i])));
    return n;
}

inline Box minkowskiSum(const Box& a, const Box& b) {
    requireSameDim(a, b);
    std::vector<double> lo(a.dim()), hi(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        lo[i] = a.lo[i] + b.lo[i];
        hi[i] = a.hi[i] + b.hi[i];
    }
    return Box(std::move(lo), std::move(hi));
}

// c >= 0 only: negative scaling does not preserve the box orientation and is
// never needed by the integrals (set-function values are nonnegative)
inline Box scale(double c, const Box& a) {
    if (c < 0.0) throw std::invalid_argument("scale: negative factor rejected");
    if (c == 0.0) return Box::zero(a.dim());
    std::vector<double> lo(a.dim()), hi(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        lo[i] = c * a.lo[i];
        hi[i] = c * a.hi[i];
    }
    return Box(std::move(lo), std::move(hi));
}

// smallest box containing A and B (boxes are not closed under plain union)
inline Box convexHullUnion(const Box& a, const Box& b) {
    requireSameDim(a, b);
    std::vector<double> lo(a.dim()), hi(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        lo[i] = std::min(a.lo[i], b.lo[i]);
        hi[i] = std::max(a.hi[i], b.hi[i]);
    }
    return Box(std::move(lo), std::move(hi));
}

// Image of a box under the support-function embedding into R^{2d}: first the
// d upper corners, then the d negated lower corners. The embedding is an
// isometry for the sup norms, is additive over Minkowski sum and nonnegative
// scaling, and sends hull-union to the coordinatewise max.
struct EmbeddedVector {
    std::vector<double> coords; // length 2d, coords[i] + coords[d+i] >= 0

    EmbeddedVector() = default;
    explicit EmbeddedVector(std::vector<double> c) : coords(std::move(c)) {
        if (coords.empty() || coords.size() % 2 != 0)
            throw std::invalid_argument("embedded vector: length must be 2d");
        std::size_t d = coords.size() / 2;
        for (std::size_t i = 0; i < d; ++i)
            if (!(coords[i] + coords[d + i] >= 0.0))
                throw std::invalid_argument("embedded vector: not the image of a box");
    }

    std::size_t dim() const { return coords.size() / 2; }
};

inline EmbeddedVector embed(const Box& a) {
    std::vector<double> c(2 * a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        c[i] = a.hi[i];
        c[a.dim() + i] = -a.lo[i];
    }
    return EmbeddedVector(std::move(c));
}

inline double supNormDistance(const EmbeddedVector& x, const EmbeddedVector& y) {
    if (x.coords.size() != y.coords.size())
        throw std::invalid_argument("embedded vector: dimension mismatch");
    double n = 0.0;
    for (std::size_t i = 0; i < x.coords.size(); ++i)
        n = std::max(n, std::abs(x.coords[i] - y.coords[i]));
    return n;
}

} // namespace svi
