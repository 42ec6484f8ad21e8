#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rssa/scenario.hpp"
#include "rssa/trial.hpp"

namespace rssa {

struct BatchRow {
    std::string trial;
    MethodId method{MethodId::kM4};
    std::optional<TrialMetrics> metrics;
    bool aborted{false};
    std::string error;
};

/// Runs every (scenario, method) pair, scenario-major. Trials are independent
/// and may run on up to `threads` workers; row order never depends on timing.
/// A failing trial is reported on its row and the batch continues.
std::vector<BatchRow> run_batch(std::span<const Scenario> scenarios,
                                std::span<const MethodId> methods, unsigned threads = 1);

inline constexpr const char* kMetricsCsvHeader =
    "trial,method,GOAL,VIOL,DIST,AVG_DIST,clipped_ticks,infeasible_ticks";

/// Fixed column order, %.9g floats. Failed rows leave the metric fields empty.
std::string metrics_csv(std::span<const BatchRow> rows);

BatchRow batch_row(const TrialRecord& record);

}  // namespace rssa
