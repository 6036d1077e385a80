#pragma once

#include <json.hpp>

#include "phc/harness/table.hpp"

namespace phc::harness {

/// Standalone queueing analytics for either explicit classes or a PHC
/// configuration's doctor.
///
/// {"classes": [{"arrival_rate": 0.25, "service_mean": 0.87, "service_variance": 0.04, "servers": 2}, ...],
///  "dominant": 0,
///  "setups": [{"service_mean": 45, "jobs_per_setup": 180, "service_variance": 0}],
///  "replications": [0.12, ...], "alpha": 0.05}
/// or
/// {"configuration": {"id": 1, "overrides": {...}}, "window_fraction": 0.353, "replications": [...]}
///
/// Without "setups" the non-dominant classes become setups at their arrival
/// ratios. Sample-dependent rows appear only with "replications".
/// Throws ScenarioError with the field path.
[[nodiscard]] ResultTable run_analytics(const nlohmann::json& input);

}  // namespace phc::harness
