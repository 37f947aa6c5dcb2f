#include "hebart/distributions.hpp"

#include <cmath>

#include "hebart/util.hpp"

namespace hebart {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;
}

double sample_normal(double mean, double precision, RngStream& rng) {
  if (!(precision > 0.0) || !std::isfinite(precision)) {
    fail(ErrorKind::Numeric, "sample_normal: precision must be positive and finite");
  }
  double u1 = 1.0 - rng.uniform01();  // (0, 1]
  double u2 = rng.uniform01();
  double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  return mean + z / std::sqrt(precision);
}

double normal_logpdf(double x, double mean, double precision) {
  if (!(precision > 0.0)) fail(ErrorKind::Numeric, "normal_logpdf: precision must be positive");
  double d = x - mean;
  return 0.5 * std::log(precision) - 0.5 * kLogTwoPi - 0.5 * precision * d * d;
}

double sample_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    fail(ErrorKind::Numeric, "sample_gamma: shape and rate must be positive");
  }
  if (shape < 1.0) {
    double u = 1.0 - rng.uniform01();
    return sample_gamma(shape + 1.0, rate, rng) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = sample_normal(0.0, 1.0, rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = 1.0 - rng.uniform01();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
      return d * v / rate;
    }
  }
}

double gamma_logpdf(double x, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    fail(ErrorKind::Numeric, "gamma_logpdf: shape and rate must be positive");
  }
  if (!(x > 0.0)) fail(ErrorKind::Numeric, "gamma_logpdf: x outside support (x > 0)");
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double sample_weibull(double scale, double shape, RngStream& rng) {
  if (!(scale > 0.0) || !(shape > 0.0)) {
    fail(ErrorKind::Numeric, "sample_weibull: scale and shape must be positive");
  }
  double u = 1.0 - rng.uniform01();  // (0, 1]
  return scale * std::pow(-std::log(u), 1.0 / shape);
}

double weibull_logpdf(double x, double scale, double shape) {
  if (!(scale > 0.0) || !(shape > 0.0)) {
    fail(ErrorKind::Numeric, "weibull_logpdf: scale and shape must be positive");
  }
  if (!(x > 0.0)) fail(ErrorKind::Numeric, "weibull_logpdf: x outside support (x > 0)");
  double t = x / scale;
  return std::log(shape) - std::log(scale) + (shape - 1.0) * std::log(t) - std::pow(t, shape);
}

double sample_uniform(double a, double b, RngStream& rng) {
  if (!(a < b)) fail(ErrorKind::Numeric, "sample_uniform: requires a < b");
  return a + (b - a) * rng.uniform01();
}

std::size_t sample_multinomial_index(std::span<const double> weights, RngStream& rng) {
  if (weights.empty()) fail(ErrorKind::Numeric, "sample_multinomial_index: empty weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      fail(ErrorKind::Numeric, "sample_multinomial_index: weights must be finite and non-negative");
    }
    total += w;
  }
  if (!(total > 0.0)) fail(ErrorKind::Numeric, "sample_multinomial_index: weights sum to zero");
  double u = rng.uniform01() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    cum += weights[i];
    if (u < cum) return i;
  }
  return weights.size() - 1;
}

}  // namespace hebart
