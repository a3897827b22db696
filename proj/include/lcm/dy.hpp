#pragma once

#include "lcm/partition.hpp"
#include "lcm/samplers.hpp"

namespace lcm {

// One draw from DY(alpha, kappa; psi).
double dy_sample(PartitionKind kind, DYParams params, RngStream& rng);

// log K + alpha y - kappa psi(y); -inf outside the support.
double dy_logpdf(PartitionKind kind, DYParams params, double y);

// dy_sample without the validity check, for hot loops over pre-validated pairs.
double dy_sample_unchecked(PartitionKind kind, double alpha, double kappa, RngStream& rng);

}  // namespace lcm
