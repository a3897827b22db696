#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace lcm {

// Seeded substream. Equal (seed, stream) and call sequence give identical output.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 1, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();

  // Independent substream keyed on this stream's seed.
  RngStream substream(std::uint64_t stream) const { return RngStream(seed_, stream); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// log W with W ~ Gamma(shape, scale = 1/rate).
double sample_log_gamma(double shape, double rate, RngStream& rng);

// logit of a Beta(a, b) draw.
double sample_logit_beta(double a, double b, RngStream& rng);

double sample_normal(double mean, double sd, RngStream& rng);

// Counts.
std::int64_t sample_poisson(double mean, RngStream& rng);

struct SliceResult {
  double value = 0.0;
  // Stepping out or shrinkage hit its limit.
  bool warning = false;
};

// One stepping-out + shrinkage update (Neal 2003) of a univariate target.
SliceResult slice_sample_1d(const std::function<double(double)>& log_density, double x0, double width,
                            int max_steps, RngStream& rng);

}  // namespace lcm
