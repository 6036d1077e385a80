#include "phc/sim/distribution.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace phc::sim {
namespace {

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void validate(const DistributionSpec& spec) {
  std::visit(
      Overloaded{
          [](const Exponential& d) {
            require(std::isfinite(d.mean) && d.mean > 0.0, "exponential mean must be positive");
          },
          [](const Normal& d) {
            require(std::isfinite(d.mean) && d.mean > 0.0, "normal mean must be positive");
            require(std::isfinite(d.sd) && d.sd > 0.0, "normal sd must be positive");
            require(std::isfinite(d.lower_bound) && d.lower_bound >= 0.0,
                    "normal lower bound must be nonnegative");
            // Rejection sampling needs a reasonable acceptance rate.
            require(upper_tail((d.lower_bound - d.mean) / d.sd) > 1e-4,
                    "normal lower bound leaves almost no mass");
          },
          [](const Uniform& d) {
            require(std::isfinite(d.min) && std::isfinite(d.max), "uniform bounds must be finite");
            require(d.min >= 0.0, "uniform min must be nonnegative");
            require(d.min <= d.max, "uniform requires min <= max");
          },
          [](const Triangular& d) {
            require(std::isfinite(d.low) && std::isfinite(d.high), "triangular bounds must be finite");
            require(d.low >= 0.0, "triangular low must be nonnegative");
            require(d.low <= d.mode && d.mode <= d.high, "triangular requires low <= mode <= high");
          },
          [](const Constant& d) {
            require(std::isfinite(d.value) && d.value >= 0.0, "constant must be nonnegative");
          },
      },
      spec);
}

double sample(RandomStream& stream, const DistributionSpec& spec) {
  return std::visit(
      Overloaded{
          [&](const Exponential& d) { return -d.mean * std::log(stream.uniform01_open_low()); },
          [&](const Normal& d) {
            double x;
            do x = d.mean + d.sd * stream.standard_normal();
            while (x < d.lower_bound);
            return x;
          },
          [&](const Uniform& d) { return stream.uniform(d.min, d.max); },
          [&](const Triangular& d) {
            const double span = d.high - d.low;
            if (span <= 0.0) return d.low;
            const double u = stream.uniform01();
            const double split = (d.mode - d.low) / span;
            if (u < split) return d.low + std::sqrt(u * span * (d.mode - d.low));
            return d.high - std::sqrt((1.0 - u) * span * (d.high - d.mode));
          },
          [&](const Constant& d) { return d.value; },
      },
      spec);
}

double mean(const DistributionSpec& spec) {
  return std::visit(
      Overloaded{
          [](const Exponential& d) { return d.mean; },
          [](const Normal& d) {
            const double a = (d.lower_bound - d.mean) / d.sd;
            return d.mean + d.sd * phi(a) / upper_tail(a);
          },
          [](const Uniform& d) { return 0.5 * (d.min + d.max); },
          [](const Triangular& d) { return (d.low + d.mode + d.high) / 3.0; },
          [](const Constant& d) { return d.value; },
      },
      spec);
}

double variance(const DistributionSpec& spec) {
  return std::visit(
      Overloaded{
          [](const Exponential& d) { return d.mean * d.mean; },
          [](const Normal& d) {
            const double a = (d.lower_bound - d.mean) / d.sd;
            const double lambda = phi(a) / upper_tail(a);
            return d.sd * d.sd * (1.0 + a * lambda - lambda * lambda);
          },
          [](const Uniform& d) { return (d.max - d.min) * (d.max - d.min) / 12.0; },
          [](const Triangular& d) {
            const double a = d.low, b = d.high, c = d.mode;
            return (a * a + b * b + c * c - a * b - a * c - b * c) / 18.0;
          },
          [](const Constant&) { return 0.0; },
      },
      spec);
}

double nominal_mean(const DistributionSpec& spec) {
  if (const auto* n = std::get_if<Normal>(&spec)) return n->mean;
  return mean(spec);
}

std::string describe(const DistributionSpec& spec) {
  return std::visit(
      Overloaded{
          [](const Exponential& d) { return fmt::format("exponential(mean={})", d.mean); },
          [](const Normal& d) {
            return fmt::format("normal(mean={}, sd={}, lower_bound={})", d.mean, d.sd, d.lower_bound);
          },
          [](const Uniform& d) { return fmt::format("uniform({}, {})", d.min, d.max); },
          [](const Triangular& d) {
            return fmt::format("triangular({}, {}, {})", d.low, d.mode, d.high);
          },
          [](const Constant& d) { return fmt::format("constant({})", d.value); },
      },
      spec);
}

}  // namespace phc::sim
