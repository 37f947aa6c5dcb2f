#pragma once

#include <span>

#include "hebart/rng.hpp"

namespace hebart {

// Sampling and log-density routines for the distributions the sampler
// needs. All samplers consume the RngStream deterministically, so a
// fixed (seed, stream) replays bit-identically. Parameter conventions:
//   normal  — precision (inverse variance)
//   gamma   — shape/rate, mean = shape/rate
//   weibull — scale lambda, shape nu
// Log densities throw outside the support instead of returning -inf.

// Draw from Normal(mean, 1/precision). Box-Muller; consumes exactly two
// uniforms per draw.
double sample_normal(double mean, double precision, RngStream& rng);
double normal_logpdf(double x, double mean, double precision);

// Marsaglia-Tsang squeeze-rejection; shapes below 1 are boosted via
// Gamma(shape + 1) * U^(1/shape).
double sample_gamma(double shape, double rate, RngStream& rng);
double gamma_logpdf(double x, double shape, double rate);

double sample_weibull(double scale, double shape, RngStream& rng);
double weibull_logpdf(double x, double scale, double shape);

// Uniform on [a, b).
double sample_uniform(double a, double b, RngStream& rng);

// Index drawn with probability proportional to weights[i].
std::size_t sample_multinomial_index(std::span<const double> weights, RngStream& rng);

}  // namespace hebart
