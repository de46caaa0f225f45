#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "icon/events.hpp"
#include "icon/kernel.hpp"
#include "icon/workspace.hpp"

namespace icon {

struct EngineConfig {
    Mode mode = Mode::Unified;
    std::int64_t dwell_ms = kDefaultDwellMs;
};

/// Dwell threshold from ICON_DWELL_MS, or the default when unset or not a non-negative integer.
[[nodiscard]] std::int64_t dwell_threshold_from_env();

/// The workspace state machine for one session. Every command either applies completely and
/// yields at most one provenance event, or throws an icon::Error and leaves everything as it was.
///
/// Commands (JSON field names in parentheses):
///   edit_cell (cell, source)        execute (cell)
///   pull_out (cell, pose)           put_in (artifact, cell)          drop (artifact, pose)
///   enter_cell (cell)               exit_portal
///   grab (hand, item)               release (hand)
///   set_focus (region, dwell_ms)    move_user (pose)                 move_artifact (artifact, pose)
///   sort_table (table, column, direction)     filter_rows (table, column, comparator, threshold)
///   remove_filter (table, index)    select_column (table, column)
///   merge_columns (table, columns, pose)      add_axis (vis, table, column)
///   remove_axis (vis, axis)         remove_point (vis, index)        apply_to_table (vis, table)
///   delete (artifact)               report_answer (key, value)       complete
class Engine {
public:
    explicit Engine(Notebook nb, EngineConfig config = {}, std::unique_ptr<KernelBackend> kernel = nullptr);

    /// Resumes from persisted state. The log is taken as-is.
    Engine(WorkspaceState state, std::unique_ptr<KernelBackend> kernel, std::vector<Event> log);

    std::optional<Event> dispatch(const Command& cmd);

    [[nodiscard]] const WorkspaceState& state() const noexcept { return state_; }
    [[nodiscard]] const std::vector<Event>& log() const noexcept { return log_; }
    [[nodiscard]] const KernelBackend& kernel() const noexcept { return *kernel_; }

    /// Digest of the canonical workspace serialization plus the kernel environment digest.
    [[nodiscard]] std::string state_hash() const;

private:
    WorkspaceState state_;
    std::unique_ptr<KernelBackend> kernel_;
    std::vector<Event> log_;
};

/// Command that re-issues a logged event. Throws SchemaError for SessionStart.
[[nodiscard]] Command command_for_event(const Event& e);

[[nodiscard]] std::string state_hash(const WorkspaceState& s, const KernelBackend& kernel);

}  // namespace icon
