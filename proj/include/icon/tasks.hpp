#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icon/engine.hpp"
#include "icon/metrics.hpp"

namespace icon {

enum class TaskKind { Instructed, Exploratory };

/// Sepal widths outside [lo, hi] are the outliers the exploratory script filters away.
inline constexpr double kSepalWidthLow = 2.2;
inline constexpr double kSepalWidthHigh = 4.0;

struct TaskRun {
    std::vector<Event> log;
    MetricsReport metrics;
    nlohmann::json ground_truth;
    WorkspaceState final_state;
    std::string state_hash;
    /// Exploratory only: directed modularity of every swept (k_means, k_nn) pair, sweep order.
    std::vector<std::tuple<std::int64_t, std::int64_t, double>> sweep;
};

/// Expected answers computed straight from the bundled datasets and the notebook's declared
/// parameter ranges, without going through the engine.
[[nodiscard]] nlohmann::json task_ground_truth(TaskKind task, const Notebook& nb);

/// Plays the scripted study task against a fresh session on `nb` (the study fixture layout).
/// The script reads every answer off the artifacts it produces. Throws ScriptStepFailed naming
/// the step when a gesture is rejected or a check fails.
[[nodiscard]] TaskRun run_task(TaskKind task, Mode mode, const Notebook& nb);

/// Inclusive range from a cell's `NAME = value  # range: lo..hi` declaration.
[[nodiscard]] std::pair<std::int64_t, std::int64_t> declared_range(const Notebook& nb, std::string_view cell_id);

[[nodiscard]] std::string_view to_string(TaskKind t) noexcept;
[[nodiscard]] std::optional<TaskKind> task_kind_from_string(std::string_view s) noexcept;

}  // namespace icon
