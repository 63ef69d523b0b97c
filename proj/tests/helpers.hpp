#ifndef NOISYICA_TEST_HELPERS_HPP
#define NOISYICA_TEST_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "noisyica/synth.hpp"
#include "noisyica/types.hpp"

namespace testutil {

using noisyica::Dataset;
using noisyica::Index;
using noisyica::Matrix;
using noisyica::Vector;

using ScalarField = std::function<double(const Vector&)>;

// Central-difference gradient, step 1e-5 scaled by (|u| + 1).
inline Vector fd_gradient(const ScalarField& f, const Vector& u, double h_base = 1e-5) {
    const double h = h_base * (u.norm() + 1.0);
    Vector g(u.size());
    for (Index i = 0; i < u.size(); ++i) {
        Vector up = u, dn = u;
        up(i) += h;
        dn(i) -= h;
        g(i) = (f(up) - f(dn)) / (2.0 * h);
    }
    return g;
}

// Second-order central differences for the Hessian.
inline Matrix fd_hessian(const ScalarField& f, const Vector& u, double h_base = 1e-4) {
    const double h = h_base * (u.norm() + 1.0);
    const Index k = u.size();
    Matrix H(k, k);
    const double f0 = f(u);
    for (Index i = 0; i < k; ++i) {
        Vector up = u, dn = u;
        up(i) += h;
        dn(i) -= h;
        H(i, i) = (f(up) - 2.0 * f0 + f(dn)) / (h * h);
        for (Index j = i + 1; j < k; ++j) {
            Vector pp = u, pm = u, mp = u, mm = u;
            pp(i) += h; pp(j) += h;
            pm(i) += h; pm(j) -= h;
            mp(i) -= h; mp(j) += h;
            mm(i) -= h; mm(j) -= h;
            H(i, j) = H(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
        }
    }
    return H;
}

// Dataset whose rows enumerate the full product of per-coordinate value
// grids; empirical cross-moments then factorize exactly.
inline Dataset product_grid_dataset(const std::vector<std::vector<double>>& grids,
                                    const Matrix& mixing) {
    const Index k = static_cast<Index>(grids.size());
    Index n = 1;
    for (const auto& g : grids) n *= static_cast<Index>(g.size());
    Matrix Z(n, k);
    for (Index row = 0; row < n; ++row) {
        Index rest = row;
        for (Index j = 0; j < k; ++j) {
            const auto& g = grids[static_cast<std::size_t>(j)];
            Z(row, j) = g[static_cast<std::size_t>(rest) % g.size()];
            rest /= static_cast<Index>(g.size());
        }
    }
    return Dataset(Z * mixing.transpose());
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t a = i; a <= j; ++a) r[order[a]] = avg;
        i = j + 1;
    }
    return r;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// Angle in degrees between lines spanned by u and v (sign-invariant).
inline double line_angle_deg(const Vector& u, const Vector& v) {
    const double c = std::abs(u.normalized().dot(v.normalized()));
    return std::acos(std::min(1.0, c)) * 180.0 / M_PI;
}

// Longest run of steps that contract the alpha-distance by 0.9, where steps
// already at the converged iterate's distance (the sample resolution of the
// fixed point) count as contracting. A trajectory that never contracts on
// its first step, escapes the column, or stalls above the floor scores 0.
// Distances after early convergence repeat the final value, since the map
// sits at its fixed point.
inline int contraction_streak(std::vector<double> dist, int want_steps) {
    while (static_cast<int>(dist.size()) < want_steps + 1) dist.push_back(dist.back());
    if (!(dist[1] < 0.9 * dist[0])) return 0;
    const double floor = 1.05 * dist.back();
    int best = 0, current = 0;
    for (std::size_t t = 0; t + 1 < dist.size(); ++t) {
        if (dist[t + 1] < 0.9 * dist[t] || dist[t + 1] <= floor) {
            ++current;
            best = std::max(best, current);
        } else {
            current = 0;
        }
    }
    return best;
}

// Sign-invariant distance of B^{-1} u from alpha* = e_target / |B e_target|.
inline std::vector<double> alpha_distances(const std::vector<Vector>& trace, const Matrix& B,
                                           noisyica::Index target) {
    const Matrix B_inv = B.inverse();
    Vector alpha_star = Vector::Zero(B.rows());
    alpha_star(target) = 1.0 / B.col(target).norm();
    std::vector<double> out;
    out.reserve(trace.size());
    for (const auto& u : trace) {
        const Vector a = B_inv * u;
        out.push_back(std::min((a - alpha_star).norm(), (a + alpha_star).norm()));
    }
    return out;
}

} // namespace testutil

#endif // NOISYICA_TEST_HELPERS_HPP
