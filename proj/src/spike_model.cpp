#include "mdsplus/spike_model.hpp"

#include "mdsplus/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mdsplus {

SpikeParams::SpikeParams(double beta, double sigma) : beta_(beta), sigma_(sigma) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw PreconditionError("beta must be a positive finite number, got " + std::to_string(beta));
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw PreconditionError("sigma must be a positive finite number, got " + std::to_string(sigma));
    }
}

SignalSpectrum::SignalSpectrum(std::vector<double> x) : x_(std::move(x)) {
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (!(x_[i] > 0.0) || !std::isfinite(x_[i])) {
            throw PreconditionError("signal values must be positive and finite");
        }
        if (i > 0 && !(x_[i] < x_[i - 1])) {
            throw PreconditionError("signal values must be strictly descending");
        }
    }
}

double bulk_edge(const SpikeParams& params) {
    return params.sigma() * (1.0 + std::sqrt(params.beta()));
}

double detection_threshold(const SpikeParams& params) {
    return params.sigma() * std::pow(params.beta(), 0.25);
}

std::size_t detectable_count(const SignalSpectrum& spectrum, const SpikeParams& params) {
    const double threshold = detection_threshold(params);
    return static_cast<std::size_t>(std::count_if(spectrum.values().begin(), spectrum.values().end(),
                                                  [&](double x) { return x > threshold; }));
}

namespace {

void require_detectable(double x, const SpikeParams& params, const char* what) {
    if (!(x >= detection_threshold(params))) {
        throw DomainError(std::string(what) + ": x=" + std::to_string(x) +
                          " is below the detection threshold sigma*beta^(1/4)");
    }
}

}  // namespace

double y_of_x(double x, const SpikeParams& params) {
    require_detectable(x, params, "y_of_x");
    const double z = x / params.sigma();
    const double beta = params.beta();
    return params.sigma() * std::sqrt((z + 1.0 / z) * (z + beta / z));
}

double c_of_x(double x, const SpikeParams& params) {
    require_detectable(x, params, "c_of_x");
    const double z2 = std::pow(x / params.sigma(), 2);
    const double beta = params.beta();
    const double num = std::max(z2 * z2 - beta, 0.0);
    return std::min(1.0, std::sqrt(num / (z2 * z2 + beta * z2)));
}

double x_of_y(double y, const SpikeParams& params) {
    const double edge = bulk_edge(params);
    if (!(y >= edge)) {
        throw DomainError("x_of_y: y=" + std::to_string(y) + " is below the bulk edge " +
                          std::to_string(edge));
    }
    const double beta = params.beta();
    const double w = std::pow(y / params.sigma(), 2) - 1.0 - beta;
    const double disc = std::max(w * w - 4.0 * beta, 0.0);
    return params.sigma() / std::sqrt(2.0) * std::sqrt(w + std::sqrt(disc));
}

double optimal_shrinker(double y, const SpikeParams& params) {
    if (y < 0.0 || std::isnan(y)) {
        throw PreconditionError("optimal_shrinker: y must be nonnegative");
    }
    if (y <= bulk_edge(params)) {
        return 0.0;
    }
    const double beta = params.beta();
    const double z2 = std::pow(x_of_y(y, params) / params.sigma(), 2);
    const double inner = z2 - beta - beta * (1.0 - beta) / (z2 + beta);
    return params.sigma() * std::sqrt(std::max(inner, 0.0));
}

double threshold_cubic(double a, double beta) {
    return -3.0 * a * a * a + a * a * (2.0 * beta + 1.0) + a * (beta * beta + 6.0 * beta) + beta * beta;
}

double threshold_cubic_root(double beta) {
    if (!(beta > 0.0)) {
        throw PreconditionError("threshold_cubic_root: beta must be positive");
    }
    // f(sqrt(beta)) > 0 and f -> -inf, so the root lies above sqrt(beta).
    double lo = std::sqrt(beta);
    double hi = lo + 1.0;
    while (threshold_cubic(hi, beta) >= 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (threshold_cubic(mid, beta) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double optimal_hard_threshold(const SpikeParams& params) {
    const double a = threshold_cubic_root(params.beta());
    const double root = std::sqrt(a);
    return params.sigma() * std::sqrt((root + 1.0 / root) * (root + params.beta() / root));
}

std::size_t optimal_embedding_dim(const std::vector<double>& eigenvalues, const SpikeParams& params) {
    const double lambda = optimal_hard_threshold(params);
    return static_cast<std::size_t>(std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](double d) {
        return d > 0.0 && std::sqrt(d) > lambda;
    }));
}

namespace {

// Loss of a kept spike under classical MDS: x^2 + y^2 - 2 x y c(x), written in
// closed form.
double kept_spike_mds_loss(double x, const SpikeParams& params) {
    const double s2 = params.sigma() * params.sigma();
    const double beta = params.beta();
    const double x2 = x * x;
    const double diff = std::sqrt(x2 + s2) - std::sqrt((x2 * x2 - beta * s2 * s2) / x2);
    return diff * diff + 2.0 * beta * s2 * s2 / x2 + beta * s2;
}

}  // namespace

double mds_asymptotic_loss(const SignalSpectrum& spectrum, std::size_t r, const SpikeParams& params) {
    const auto& x = spectrum.values();
    const std::size_t t = detectable_count(spectrum, params);
    const std::size_t kept = std::min(t, r);
    double loss = 0.0;
    for (std::size_t i = 0; i < kept; ++i) {
        loss += kept_spike_mds_loss(x[i], params);
    }
    for (std::size_t j = kept; j < x.size(); ++j) {
        loss += x[j] * x[j];
    }
    if (r > t) {
        const double edge = bulk_edge(params);
        loss += static_cast<double>(r - t) * edge * edge;
    }
    return loss;
}

double mdsplus_asymptotic_loss(const SignalSpectrum& spectrum, const SpikeParams& params) {
    const auto& x = spectrum.values();
    const std::size_t t = detectable_count(spectrum, params);
    const double s2 = params.sigma() * params.sigma();
    const double beta = params.beta();
    double sum = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
        sum += (1.0 - beta) / (x[i] * x[i] / s2 + beta);
    }
    double loss = beta * s2 * (sum + static_cast<double>(t));
    for (std::size_t j = t; j < x.size(); ++j) {
        loss += x[j] * x[j];
    }
    return loss;
}

double regret(const SignalSpectrum& spectrum, std::size_t r, const SpikeParams& params) {
    const auto& x = spectrum.values();
    const std::size_t t = detectable_count(spectrum, params);
    const double s2 = params.sigma() * params.sigma();
    const double beta = params.beta();
    double total = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
        const double z2 = x[i] * x[i] / s2;
        if (i < r) {
            const double x2 = x[i] * x[i];
            const double diff = std::sqrt(x2 + s2) - std::sqrt((x2 * x2 - beta * s2 * s2) / x2);
            total += diff * diff + beta * s2 * (z2 * (1.0 + beta) + 2.0 * beta) / (z2 * z2 + beta * z2);
        } else {
            total += s2 * (z2 * z2 - beta) / (z2 + beta);
        }
    }
    if (r > t) {
        const double edge = bulk_edge(params);
        total += static_cast<double>(r - t) * edge * edge;
    }
    return total;
}

}  // namespace mdsplus
