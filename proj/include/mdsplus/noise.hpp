#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mdsplus {

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

/// Marcenko-Pastur density with shape beta in (0, 1] and unit scale.
double mp_density(double s, double beta);

/// Marcenko-Pastur CDF, evaluated by quadrature after the substitution
/// s = 1 + beta - 2 sqrt(beta) cos(theta), which removes both edge singularities.
double mp_cdf(double s, double beta);

/// Density of noise-only singular values y = sigma * sqrt(s), s ~ MP(beta).
double quarter_circle_density(double y, double beta, double sigma);

/// Median of the Marcenko-Pastur law with shape beta. Results are cached per beta.
double mp_median(double beta);

/// Median-based noise level estimate from the top eigenvalues of S.
///
/// `eigenvalues` must hold at least min(n, p) values. The median is taken over
/// the min(n-1, p) largest, which excludes the structural zero that centering
/// introduces. beta = (n-1)/p; for beta > 1 the transposed-shape calibration
/// sqrt(s_med / (beta * mu_{1/beta})) is used.
double estimate_sigma(std::vector<double> eigenvalues, std::size_t n, std::size_t p);

}  // namespace mdsplus
