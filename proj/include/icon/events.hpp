#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icon/json_codec.hpp"

namespace icon {

enum class EventKind {
    SessionStart,
    PullOut,
    PutInCreate,
    PutInUpdate,
    MergeVis,
    AddAxis,
    RemoveAxis,
    RemovePoint,
    ApplyToTable,
    Sort,
    Filter,
    RemoveFilter,
    SelectColumn,
    PortalCross,
    FocusChange,
    Grab,
    Release,
    MoveArtifact,
    MoveUser,
    Delete,
    Edit,
    Execute,
    AnswerReported,
    TaskComplete,
};

/// One line of the provenance log. The payload repeats the command's arguments followed by
/// whatever the engine decided, so a log line alone is enough to re-issue the command.
struct Event {
    std::int64_t t = 0;
    EventKind kind = EventKind::SessionStart;
    ojson payload = ojson::object();
};

[[nodiscard]] std::string_view to_string(EventKind k) noexcept;
[[nodiscard]] std::optional<EventKind> event_kind_from_string(std::string_view s) noexcept;

/// {"t":..., "kind":"...", ...payload}
[[nodiscard]] ojson event_to_json(const Event& e);
[[nodiscard]] std::string event_to_line(const Event& e);
/// Throws SchemaError on malformed input.
[[nodiscard]] Event event_from_json(const ojson& j);

[[nodiscard]] std::string log_to_ndjson(const std::vector<Event>& log);
/// Blank lines are skipped. Malformed lines throw CorruptLog with their 1-based line number.
[[nodiscard]] std::vector<Event> parse_log(std::string_view text);
[[nodiscard]] std::vector<Event> load_log(const std::string& path);
void save_log(const std::vector<Event>& log, const std::string& path);

/// A user gesture addressed to the engine: {"op": ..., "t": ..., ...args}.
struct Command {
    std::string op;
    std::int64_t t = 0;
    nlohmann::json args = nlohmann::json::object();

    // Argument accessors; a missing or mistyped field throws BadCommand.
    [[nodiscard]] std::string str(const char* key) const;
    [[nodiscard]] std::int64_t integer(const char* key) const;
    [[nodiscard]] const nlohmann::json& field(const char* key) const;
    [[nodiscard]] bool has(const char* key) const;
};

[[nodiscard]] Command command_from_json(const nlohmann::json& j);
[[nodiscard]] ojson command_to_json(const Command& c);

}  // namespace icon
