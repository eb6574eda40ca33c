#include "cbm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace cbm {

BeliefGrid::BeliefGrid(int L2, double step) : L2_(L2), step_(step) {
    if (L2 < 1) throw ValidationError("belief grid needs at least two U2 states");
    if (!(step > 0.0) || step > 1.0) throw ValidationError("grid step must lie in (0, 1]");
    const double k = 1.0 / step;
    K_ = static_cast<int>(std::lround(k));
    if (std::abs(K_ * step - 1.0) > 1e-12) throw ValidationError("grid step must divide 1");

    if (L2 == 1) {
        points_.reserve(K_ + 1);
        for (int g = 0; g <= K_; ++g) {
            Vector p(2);
            const double u = static_cast<double>(g) / K_;
            p << 1.0 - u, u;
            points_.push_back(p);
        }
        reset_index_ = 0;
        return;
    }

    // Cumulative coordinates y_d = K * sum_{i >= d} pi(i), d = 1..L2, with
    // K >= y_1 >= ... >= y_L2 >= 0. Enumerated so that e^0 (all zeros) comes first.
    std::vector<int> y(L2, 0);
    std::function<void(int, int)> rec = [&](int d, int upper) {
        if (d == L2) {
            Vector p(L2 + 1);
            p[0] = static_cast<double>(K_ - y[0]) / K_;
            for (int i = 1; i < L2; ++i) p[i] = static_cast<double>(y[i - 1] - y[i]) / K_;
            p[L2] = static_cast<double>(y[L2 - 1]) / K_;
            index_.emplace(key(y), static_cast<int>(points_.size()));
            points_.push_back(p);
            return;
        }
        for (int v = 0; v <= upper; ++v) {
            y[d] = v;
            rec(d + 1, v);
        }
    };
    for (int v = 0; v <= K_; ++v) {
        y[0] = v;
        rec(1, v);
    }
    reset_index_ = index_.at(key(std::vector<int>(L2, 0)));
}

long long BeliefGrid::key(const std::vector<int>& tail) const {
    long long k = 0;
    for (int v : tail) k = k * (K_ + 1) + v;
    return k;
}

void BeliefGrid::stencil(const Vector& pi, std::vector<GridWeight>& out) const {
    out.clear();
    if (pi.size() != L2_ + 1) throw ValidationError("belief length does not match the grid");
    if (L2_ == 1) {
        const double x = std::clamp(pi[1], 0.0, 1.0) * K_;
        int i = static_cast<int>(std::floor(x));
        if (i >= K_) i = K_ - 1;
        const double w = x - i;
        out.push_back({i, 1.0 - w});
        if (w > 0.0) out.push_back({i + 1, w});
        return;
    }

    std::vector<double> x(L2_);
    double tail = 0.0;
    for (int d = L2_; d >= 1; --d) {
        tail += std::max(pi[d], 0.0);
        x[d - 1] = std::clamp(tail, 0.0, 1.0) * K_;
    }
    std::vector<int> base(L2_);
    std::vector<double> frac(L2_);
    for (int d = 0; d < L2_; ++d) {
        double f = std::floor(x[d]);
        if (f >= K_) f = K_ - 1; // beliefs at the far face still need a full cell
        base[d] = static_cast<int>(f);
        frac[d] = x[d] - f;
    }
    // Rounding can break y_1 >= y_2 >= ...; the lattice cell is defined by
    // the ordering of (base, frac), so repair tiny inversions.
    for (int d = 1; d < L2_; ++d) {
        if (base[d] > base[d - 1]) {
            base[d] = base[d - 1];
            frac[d] = std::min(frac[d], frac[d - 1]);
        } else if (base[d] == base[d - 1] && frac[d] > frac[d - 1]) {
            frac[d] = frac[d - 1];
        }
    }
    std::vector<int> order(L2_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });

    std::vector<int> vertex = base;
    double prev = 1.0;
    for (int m = 0; m <= L2_; ++m) {
        const double next = m < L2_ ? frac[order[m]] : 0.0;
        const double w = prev - next;
        if (w > 0.0) {
            const auto it = index_.find(key(vertex));
            if (it == index_.end()) throw NumericalError("belief outside the grid simplex");
            out.push_back({it->second, w});
        }
        if (m < L2_) vertex[order[m]] += 1;
        prev = next;
    }
}

std::vector<GridWeight> BeliefGrid::stencil(const Vector& pi) const {
    std::vector<GridWeight> out;
    stencil(pi, out);
    return out;
}

int BeliefGrid::index_of(const Vector& pi) const {
    if (pi.size() != L2_ + 1) throw ValidationError("belief length does not match the grid");
    if (L2_ == 1) return static_cast<int>(std::lround(pi[1] * K_));
    std::vector<int> y(L2_);
    double tail = 0.0;
    for (int d = L2_; d >= 1; --d) {
        tail += pi[d];
        y[d - 1] = static_cast<int>(std::lround(tail * K_));
    }
    const auto it = index_.find(key(y));
    if (it == index_.end()) throw ValidationError("belief is not a grid point");
    return it->second;
}

} // namespace cbm
