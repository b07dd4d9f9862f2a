#include "mdsplus/noise.hpp"

#include "mdsplus/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>

namespace mdsplus {

namespace {

constexpr double kQuadratureTolerance = 1e-13;
constexpr int kMaxDepth = 50;

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

void require_mp_beta(double beta, const char* what) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw PreconditionError(std::string(what) + ": beta must lie in (0, 1], got " +
                                std::to_string(beta));
    }
}

// d CDF / d theta under s = 1 + beta - 2 sqrt(beta) cos(theta).
double mp_angular_density(double theta, double beta) {
    if (beta == 1.0) {
        return (1.0 + std::cos(theta)) / std::numbers::pi;
    }
    const double s = 1.0 + beta - 2.0 * std::sqrt(beta) * std::cos(theta);
    const double sn = std::sin(theta);
    return 2.0 * sn * sn / (std::numbers::pi * s);
}

// Below this beta the closed form loses digits to cancellation; the integrand
// is smooth there, so quadrature is used instead.
constexpr double kClosedFormMinBeta = 0.05;

double mp_angular_cdf(double theta, double beta) {
    if (theta <= 0.0) {
        return 0.0;
    }
    theta = std::min(theta, std::numbers::pi);
    if (beta < kClosedFormMinBeta) {
        return adaptive_simpson([beta](double t) { return mp_angular_density(t, beta); }, 0.0, theta,
                                kQuadratureTolerance);
    }
    // sin^2/(a - b cos) = cos/b + a/b^2 + (1 - a^2/b^2)/(a - b cos), a = 1 + beta, b = 2 sqrt(beta).
    // Near beta = 1 the integrand spikes at theta = 0, so quadrature is avoided.
    const double root = std::sqrt(beta);
    const double a = 1.0 + beta;
    const double b = 2.0 * root;
    const double k = (1.0 + root) / (1.0 - root);
    double value = std::sin(theta) / b + a * theta / (b * b);
    if (beta < 1.0) {
        const double half = 0.5 * theta;
        value -= 2.0 * (1.0 - beta) / (b * b) * std::atan2(k * std::sin(half), std::cos(half));
    }
    return std::clamp(2.0 / std::numbers::pi * value, 0.0, 1.0);
}

double angle_of(double s, double beta) {
    const double c = (1.0 + beta - s) / (2.0 * std::sqrt(beta));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, kMaxDepth);
}

double mp_density(double s, double beta) {
    require_mp_beta(beta, "mp_density");
    const double root = std::sqrt(beta);
    const double lower = (1.0 - root) * (1.0 - root);
    const double upper = (1.0 + root) * (1.0 + root);
    if (s <= 0.0 || s < lower || s > upper) {
        return 0.0;
    }
    return std::sqrt(std::max((upper - s) * (s - lower), 0.0)) / (2.0 * std::numbers::pi * beta * s);
}

double mp_cdf(double s, double beta) {
    require_mp_beta(beta, "mp_cdf");
    const double root = std::sqrt(beta);
    if (s <= (1.0 - root) * (1.0 - root)) {
        return 0.0;
    }
    if (s >= (1.0 + root) * (1.0 + root)) {
        return 1.0;
    }
    return mp_angular_cdf(angle_of(s, beta), beta);
}

double quarter_circle_density(double y, double beta, double sigma) {
    require_mp_beta(beta, "quarter_circle_density");
    if (!(sigma > 0.0)) {
        throw PreconditionError("quarter_circle_density: sigma must be positive");
    }
    const double root = std::sqrt(beta);
    if (y <= 0.0 || y < sigma * (1.0 - root) || y > sigma * (1.0 + root)) {
        return 0.0;
    }
    const double s2 = sigma * sigma;
    const double inner = y * y - s2 - beta * s2;
    const double num = std::max(4.0 * beta * s2 * s2 - inner * inner, 0.0);
    return std::sqrt(num) / (std::numbers::pi * s2 * beta * y);
}

double mp_median(double beta) {
    require_mp_beta(beta, "mp_median");
    static std::shared_mutex mutex;
    static std::map<long long, double> cache;
    const auto key = static_cast<long long>(std::llround(beta * 1e12));
    {
        std::shared_lock lock(mutex);
        if (const auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
    }
    double lo = 0.0;
    double hi = std::numbers::pi;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mp_angular_cdf(mid, beta) < 0.5) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double theta = 0.5 * (lo + hi);
    const double median = 1.0 + beta - 2.0 * std::sqrt(beta) * std::cos(theta);
    std::unique_lock lock(mutex);
    cache.emplace(key, median);
    return median;
}

double estimate_sigma(std::vector<double> eigenvalues, std::size_t n, std::size_t p) {
    if (n < 8) {
        throw PreconditionError("too few samples to estimate noise (need n >= 8)");
    }
    if (p < 1) {
        throw PreconditionError("estimate_sigma: ambient dimension must be positive");
    }
    const std::size_t required = std::min(n, p);
    if (eigenvalues.size() < required) {
        throw PreconditionError("estimate_sigma: expected at least " + std::to_string(required) +
                                " eigenvalues, got " + std::to_string(eigenvalues.size()));
    }
    std::sort(eigenvalues.begin(), eigenvalues.end(), std::greater<>());
    const std::size_t m = std::min(n - 1, p);
    eigenvalues.resize(m);
    std::reverse(eigenvalues.begin(), eigenvalues.end());
    const double median = (m % 2 == 1)
                              ? eigenvalues[m / 2]
                              : 0.5 * (eigenvalues[m / 2 - 1] + eigenvalues[m / 2]);
    const double beta = static_cast<double>(n - 1) / static_cast<double>(p);
    const double calibration = beta <= 1.0 ? mp_median(beta) : beta * mp_median(1.0 / beta);
    return std::sqrt(std::max(median, 0.0) / calibration);
}

}  // namespace mdsplus
