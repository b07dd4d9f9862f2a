#pragma once

// Test-only reference computations. Each one takes a route that differs from
// the library's implementation path: explicit centering matrices instead of
// mean subtraction, geometric loss expansions instead of closed forms,
// tanh-sinh and trapezoid quadrature instead of adaptive Simpson.

#include "mdsplus/matrix.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

using mdsplus::Matrix;

inline Matrix centering_matrix(Eigen::Index n) {
    return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
}

inline Matrix similarity(const Matrix& delta) {
    const Matrix h = centering_matrix(delta.rows());
    return -0.5 * h * delta * h;
}

inline Matrix gram_of_centered(const Matrix& y) {
    const Matrix hy = centering_matrix(y.rows()) * y;
    return hy * hy.transpose();
}

inline Matrix brute_sq_distances(const Matrix& y) {
    Matrix d(y.rows(), y.rows());
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        for (Eigen::Index j = 0; j < y.rows(); ++j) {
            d(i, j) = (y.row(i) - y.row(j)).squaredNorm();
        }
    }
    return d;
}

/// Loss of one kept spike expanded geometrically: |x u - y u_hat|^2 after
/// alignment = x^2 + y^2 - 2 x y c, using the limiting location and cosine.
inline double kept_spike_loss(double x, double beta, double sigma) {
    const double z = x / sigma;
    const double y = sigma * std::sqrt((z + 1.0 / z) * (z + beta / z));
    const double c = std::sqrt((std::pow(z, 4) - beta) / (std::pow(z, 4) + beta * z * z));
    return x * x + y * y - 2.0 * x * y * c;
}

/// Loss of one spike under MDS+: |x u - x c u_hat|^2 = x^2 (1 - c^2).
inline double shrunk_spike_loss(double x, double beta, double sigma) {
    const double z = x / sigma;
    const double c2 = (std::pow(z, 4) - beta) / (std::pow(z, 4) + beta * z * z);
    return x * x * (1.0 - c2);
}

/// Double-exponential (tanh-sinh) quadrature on [a, b]; tolerant of
/// integrable endpoint singularities.
inline double tanh_sinh(const std::function<double(double)>& f, double a, double b, int levels = 8) {
    const double half = 0.5 * (b - a);
    auto term = [&](double t) {
        const double u = 0.5 * std::numbers::pi * std::sinh(t);
        const double cu = std::cosh(u);
        const double weight = 0.5 * std::numbers::pi * std::cosh(t) / (cu * cu);
        // Distance of the abscissa from each endpoint, computed without cancellation.
        const double gap = half * std::exp(-u) / cu;
        if (t == 0.0) return weight * f(a + half);
        double acc = 0.0;
        if (a + gap > a) acc += f(a + gap);
        if (b - gap < b) acc += f(b - gap);
        return weight * acc;
    };
    double h = 0.5;
    double sum = term(0.0);
    for (double t = h; t < 4.0; t += h) sum += term(t);
    for (int level = 1; level <= levels; ++level) {
        h *= 0.5;
        for (double t = h; t < 4.0; t += 2.0 * h) sum += term(t);
    }
    return sum * h * half;
}

/// Marcenko-Pastur density written out independently of the library.
inline double mp_density(double s, double beta) {
    const double lo = std::pow(1.0 - std::sqrt(beta), 2);
    const double hi = std::pow(1.0 + std::sqrt(beta), 2);
    if (s <= lo || s >= hi || s <= 0.0) return 0.0;
    return std::sqrt((hi - s) * (s - lo)) / (2.0 * std::numbers::pi * beta * s);
}

/// CDF by composite trapezoid in u = sqrt(s) with `points` nodes, which makes
/// the beta = 1 lower edge integrable without special handling.
inline double mp_cdf_trapezoid(double s, double beta, int points) {
    const double u_lo = 1.0 - std::sqrt(beta) > 0.0 ? 1.0 - std::sqrt(beta) : 0.0;
    const double u_hi = std::sqrt(s);
    if (u_hi <= u_lo) return 0.0;
    const double h = (u_hi - u_lo) / static_cast<double>(points - 1);
    auto g = [&](double u) { return mp_density(u * u, beta) * 2.0 * u; };
    double total = 0.5 * (g(u_lo) + g(u_hi));
    for (int i = 1; i < points - 1; ++i) total += g(u_lo + h * i);
    return total * h;
}

/// Median by bisection on the trapezoid CDF.
inline double mp_median_bisection(double beta, int points) {
    double lo = std::pow(1.0 - std::sqrt(beta), 2);
    double hi = std::pow(1.0 + std::sqrt(beta), 2);
    for (int i = 0; i < 45; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mp_cdf_trapezoid(mid, beta, points) < 0.5) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Minimum of ||HA - HB R||_F over a net of 2x2 rotations and reflections.
inline double procrustes_net_2d(const Matrix& a, const Matrix& b, int angles) {
    const Matrix h = centering_matrix(a.rows());
    const Matrix ha = h * a;
    const Matrix hb = h * b;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < angles; ++k) {
        const double t = 2.0 * std::numbers::pi * k / angles;
        Matrix rot(2, 2);
        rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
        Matrix refl(2, 2);
        refl << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
        best = std::min(best, (ha - hb * rot).norm());
        best = std::min(best, (ha - hb * refl).norm());
    }
    return best;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
}

inline Matrix random_orthogonal(Eigen::Index l, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(l, l, rng));
    return qr.householderQ() * Matrix::Identity(l, l);
}

}  // namespace oracle
