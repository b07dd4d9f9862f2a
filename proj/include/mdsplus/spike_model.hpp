#pragma once

#include <cstddef>
#include <vector>

namespace mdsplus {

/// Aspect ratio beta = (n-1)/p and noise level sigma (per-entry variance sigma^2/p).
class SpikeParams {
public:
    SpikeParams(double beta, double sigma);

    double beta() const { return beta_; }
    double sigma() const { return sigma_; }

private:
    double beta_;
    double sigma_;
};

/// Signal singular values x_1 > ... > x_d > 0.
class SignalSpectrum {
public:
    explicit SignalSpectrum(std::vector<double> x);

    const std::vector<double>& values() const { return x_; }
    std::size_t size() const { return x_.size(); }

private:
    std::vector<double> x_;
};

/// sigma * (1 + sqrt(beta)), the top of the noise-only singular value support.
double bulk_edge(const SpikeParams& params);

/// sigma * beta^(1/4). Signal values at or below it are undetectable.
double detection_threshold(const SpikeParams& params);

/// Number of spikes strictly above detection_threshold.
std::size_t detectable_count(const SignalSpectrum& spectrum, const SpikeParams& params);

/// Limiting observed singular value of a spike of size x.
/// Domain: x >= sigma * beta^(1/4); throws DomainError below.
double y_of_x(double x, const SpikeParams& params);

/// Limiting |cosine| between the observed and the true left singular vector.
double c_of_x(double x, const SpikeParams& params);

/// Inverse of y_of_x on [bulk_edge, inf).
double x_of_y(double y, const SpikeParams& params);

/// Optimal shrinker eta*(y) = x(y) c(x(y)) above the bulk edge, 0 otherwise.
double optimal_shrinker(double y, const SpikeParams& params);

/// The cubic whose unique positive root a = (x/sigma)^2 locates the optimal threshold.
double threshold_cubic(double a, double beta);

/// Unique positive root of threshold_cubic, found by bracketing from sqrt(beta) and bisection.
double threshold_cubic_root(double beta);

/// Optimal hard threshold lambda* on the singular value scale.
double optimal_hard_threshold(const SpikeParams& params);

/// #{i : sqrt(d_i) > lambda*}, for eigenvalues d_i of S (negative values never count).
std::size_t optimal_embedding_dim(const std::vector<double>& eigenvalues, const SpikeParams& params);

/// Asymptotic loss of classical MDS with embedding dimension r.
double mds_asymptotic_loss(const SignalSpectrum& spectrum, std::size_t r, const SpikeParams& params);

/// Asymptotic loss of MDS+ (optimal shrinkage).
double mdsplus_asymptotic_loss(const SignalSpectrum& spectrum, const SpikeParams& params);

/// Per-spike regret of classical MDS over MDS+, summed; never negative.
double regret(const SignalSpectrum& spectrum, std::size_t r, const SpikeParams& params);

}  // namespace mdsplus
