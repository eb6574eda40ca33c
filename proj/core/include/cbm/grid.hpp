#pragma once

#include "cbm/model.hpp"

#include <unordered_map>
#include <vector>

namespace cbm {

/// One vertex of an interpolation stencil.
struct GridWeight {
    int index;
    double weight;
};

/// Regular lattice on the belief simplex with resolution K = 1/step.
///
/// For two-state U2 the points are (1 - g/K, g/K), g = 0..K, ordered by the
/// failure probability. For more states the points are all pi with K*pi
/// integral; off-grid beliefs are interpolated on the Freudenthal
/// triangulation of that lattice (barycentric weights, exact at grid points).
class BeliefGrid {
public:
    BeliefGrid(int L2, double step);

    int size() const { return static_cast<int>(points_.size()); }
    int L2() const { return L2_; }
    int resolution() const { return K_; }
    double step() const { return step_; }
    const Vector& point(int g) const { return points_[g]; }

    /// Index of the reset belief e^0.
    int reset_index() const { return reset_index_; }

    /// Grid vertices and weights whose combination reproduces `pi`.
    void stencil(const Vector& pi, std::vector<GridWeight>& out) const;
    std::vector<GridWeight> stencil(const Vector& pi) const;

    /// Index of the lattice point K*pi (pi must lie on the grid).
    int index_of(const Vector& pi) const;

    /// Piecewise-linear interpolation of per-point values.
    template <class Values>
    double interpolate(const Values& values, const Vector& pi) const {
        std::vector<GridWeight> st;
        stencil(pi, st);
        double v = 0.0;
        for (const auto& w : st) v += w.weight * values[w.index];
        return v;
    }

private:
    long long key(const std::vector<int>& tail) const;

    int L2_;
    int K_;
    double step_;
    std::vector<Vector> points_;
    std::unordered_map<long long, int> index_;
    int reset_index_ = 0;
};

} // namespace cbm
