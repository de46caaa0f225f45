#pragma once

#include <memory>
#include <span>

#include "icon/engine.hpp"

namespace icon {

/// Rebuilds a session from its provenance log. A leading SessionStart supplies the mode and
/// dwell threshold; without one the session starts unified with the default threshold. Each
/// later entry is re-issued as a command and the event it produces must match the logged one
/// byte for byte. Any disagreement, an out-of-order timestamp or a misplaced SessionStart
/// throws CorruptLog naming the 1-based entry.
[[nodiscard]] Engine replay(std::span<const Event> log, const Notebook& nb,
                            std::unique_ptr<KernelBackend> kernel = nullptr);

/// Re-issues entries onto a running engine. `first_entry` numbers the first element for
/// error messages.
void replay_into(Engine& engine, std::span<const Event> events, std::size_t first_entry = 1);

}  // namespace icon
