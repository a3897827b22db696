#include "lcm/samplers.hpp"

#include <cmath>
#include <string>

#include "lcm/errors.hpp"
#include "lcm/partition.hpp"

namespace lcm {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

// Marsaglia-Tsang, shape >= 1, unit rate. Returns log of the draw.
double log_gamma_mt(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d) + std::log(v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d) + std::log(v);
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(seeded_engine(seed, stream)) {}

double RngStream::uniform() {
  for (;;) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double sample_log_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw ValidationError("sample_log_gamma: shape must be positive");
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ValidationError("sample_log_gamma: rate must be positive");
  const double log_rate = std::log(rate);
  for (;;) {
    double lw;
    if (shape >= 1.0) {
      lw = log_gamma_mt(shape, rng);
    } else {
      // Gamma(a) = Gamma(a + 1) * U^(1/a), kept in log space.
      lw = log_gamma_mt(shape + 1.0, rng) + std::log(rng.uniform()) / shape;
    }
    const double out = lw - log_rate;
    if (std::isfinite(out)) return out;
  }
}

double sample_logit_beta(double a, double b, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("sample_logit_beta: shapes must be positive");
  for (;;) {
    const double out = sample_log_gamma(a, 1.0, rng) - sample_log_gamma(b, 1.0, rng);
    if (std::isfinite(out)) return out;
  }
}

double sample_normal(double mean, double sd, RngStream& rng) {
  if (!(sd > 0.0) || !std::isfinite(sd)) throw ValidationError("sample_normal: sd must be positive");
  return mean + sd * rng.normal();
}

std::int64_t sample_poisson(double mean, RngStream& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw ValidationError("sample_poisson: mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double prod = rng.uniform();
    while (prod > limit) {
      ++k;
      prod *= rng.uniform();
    }
    return k;
  }
  // PTRS transformed rejection (Hormann 1993).
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - log_gamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

SliceResult slice_sample_1d(const std::function<double(double)>& log_density, double x0, double width,
                            int max_steps, RngStream& rng) {
  if (!(width > 0.0)) throw ValidationError("slice_sample_1d: width must be positive");
  const double f0 = log_density(x0);
  if (!std::isfinite(f0)) throw ValidationError("slice_sample_1d: log density at x0 is not finite");

  SliceResult result{x0, false};
  const double level = f0 + std::log(rng.uniform());

  double left = x0 - width * rng.uniform();
  double right = left + width;
  const int steps = max_steps > 0 ? max_steps : 1;
  int j = static_cast<int>(std::floor(steps * rng.uniform()));
  int k = steps - 1 - j;
  while (log_density(left) > level) {
    if (j <= 0) {
      result.warning = true;
      break;
    }
    left -= width;
    --j;
  }
  while (log_density(right) > level) {
    if (k <= 0) {
      result.warning = true;
      break;
    }
    right += width;
    --k;
  }

  for (int it = 0; it < 10000; ++it) {
    const double x1 = left + rng.uniform() * (right - left);
    if (log_density(x1) > level) {
      result.value = x1;
      return result;
    }
    if (x1 < x0) {
      left = x1;
    } else {
      right = x1;
    }
  }
  result.warning = true;
  return result;
}

}  // namespace lcm
