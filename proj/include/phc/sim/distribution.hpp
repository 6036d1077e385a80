#pragma once

#include <string>
#include <variant>

#include "phc/sim/random.hpp"

namespace phc::sim {

struct Exponential {
  double mean;
};
/// Normal truncated from below; draws under the bound are redrawn.
struct Normal {
  double mean;
  double sd;
  double lower_bound;
};
struct Uniform {
  double min;
  double max;
};
struct Triangular {
  double low;
  double mode;
  double high;
};
struct Constant {
  double value;
};

using DistributionSpec = std::variant<Exponential, Normal, Uniform, Triangular, Constant>;

/// Throws std::invalid_argument when the parameters admit negative draws or
/// are degenerate in a way the sampler cannot honour.
void validate(const DistributionSpec& spec);

/// One draw, in minutes. The spec must be valid.
double sample(RandomStream& stream, const DistributionSpec& spec);

/// Exact mean of the distribution actually sampled (truncation included).
double mean(const DistributionSpec& spec);

/// Exact variance of the distribution actually sampled.
double variance(const DistributionSpec& spec);

/// Mean of the generating parameters before truncation.
double nominal_mean(const DistributionSpec& spec);

std::string describe(const DistributionSpec& spec);

}  // namespace phc::sim
