#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "icon/events.hpp"

namespace icon {

/// Window after a focus change or portal crossing in which the first manipulation of code or
/// data counts as an interactive transition.
inline constexpr std::int64_t kInteractiveWindowMs = 5000;

struct MetricsReport {
    double completion_time_s = 0.0;
    std::size_t nav_transitions = 0;
    std::size_t interactive_transitions = 0;
    double nav_transitions_per_min = 0.0;
    double interactive_transitions_per_min = 0.0;
    std::size_t deletes = 0;
    std::size_t artifacts_left = 0;
    std::size_t error_score = 0;
    std::size_t portal_crossings = 0;
};

/// Ground truth maps answer keys to expected JSON values; reports for other keys are ignored.
/// Throws NoCompletionMarker when the log holds no TaskComplete event.
[[nodiscard]] MetricsReport compute_metrics(std::span<const Event> log, const nlohmann::json& ground_truth,
                                            std::int64_t window_ms = kInteractiveWindowMs);

[[nodiscard]] ojson metrics_to_json(const MetricsReport& m);

/// Two aligned columns, rates and times to three decimals.
[[nodiscard]] std::string metrics_to_text(const MetricsReport& m);

}  // namespace icon
