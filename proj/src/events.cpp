#include "icon/events.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "icon/error.hpp"

namespace icon {

namespace {

constexpr std::array<std::string_view, 24> kKindNames{
    "SessionStart", "PullOut",      "PutInCreate", "PutInUpdate", "MergeVis",     "AddAxis",
    "RemoveAxis",   "RemovePoint",  "ApplyToTable", "Sort",       "Filter",       "RemoveFilter",
    "SelectColumn", "PortalCross",  "FocusChange", "Grab",        "Release",      "MoveArtifact",
    "MoveUser",     "Delete",       "Edit",        "Execute",     "AnswerReported", "TaskComplete",
};

static_assert(kKindNames.size() == static_cast<std::size_t>(EventKind::TaskComplete) + 1);

}  // namespace

std::string_view to_string(EventKind k) noexcept { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<EventKind> event_kind_from_string(std::string_view s) noexcept {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == s) return static_cast<EventKind>(i);
    }
    return std::nullopt;
}

ojson event_to_json(const Event& e) {
    ojson j{{"t", e.t}, {"kind", to_string(e.kind)}};
    for (const auto& [key, value] : e.payload.items()) {
        if (key == "t" || key == "kind") throw SchemaError("event." + key, 0, "payload may not redefine '" + key + "'");
        j[key] = value;
    }
    return j;
}

std::string event_to_line(const Event& e) { return event_to_json(e).dump(); }

Event event_from_json(const ojson& j) {
    if (!j.is_object()) throw SchemaError("event", 0, "expected an object");
    const auto t = j.find("t");
    if (t == j.end() || !t->is_number_integer()) throw SchemaError("event.t", 0, "missing integer timestamp");
    const auto kind = j.find("kind");
    if (kind == j.end() || !kind->is_string()) throw SchemaError("event.kind", 0, "missing kind");
    const auto k = event_kind_from_string(kind->get<std::string>());
    if (!k) throw SchemaError("event.kind", 0, "unknown kind '" + kind->get<std::string>() + "'");
    Event e;
    e.t = t->get<std::int64_t>();
    e.kind = *k;
    for (const auto& [key, value] : j.items()) {
        if (key != "t" && key != "kind") e.payload[key] = value;
    }
    return e;
}

std::string log_to_ndjson(const std::vector<Event>& log) {
    std::string out;
    for (const auto& e : log) {
        out += event_to_line(e);
        out += '\n';
    }
    return out;
}

std::vector<Event> parse_log(std::string_view text) {
    std::vector<Event> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            out.push_back(event_from_json(ojson::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw CorruptLog(line_no, e.what());
        } catch (const Error& e) {
            throw CorruptLog(line_no, e.what());
        }
    }
    return out;
}

std::vector<Event> load_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_log(ss.str());
}

void save_log(const std::vector<Event>& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    out << log_to_ndjson(log);
    if (!out) fail(ErrorCode::IoError, "failed writing '" + path + "'");
}

const nlohmann::json& Command::field(const char* key) const {
    auto it = args.find(key);
    if (it == args.end()) fail(ErrorCode::BadCommand, op + ": missing field '" + key + "'");
    return *it;
}

bool Command::has(const char* key) const { return args.contains(key); }

std::string Command::str(const char* key) const {
    const auto& v = field(key);
    if (!v.is_string()) fail(ErrorCode::BadCommand, op + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

std::int64_t Command::integer(const char* key) const {
    const auto& v = field(key);
    if (!v.is_number_integer()) fail(ErrorCode::BadCommand, op + ": field '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

Command command_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(ErrorCode::BadCommand, "command must be an object");
    Command c;
    const auto op = j.find("op");
    if (op == j.end() || !op->is_string()) fail(ErrorCode::BadCommand, "command needs a string 'op'");
    c.op = op->get<std::string>();
    const auto t = j.find("t");
    if (t != j.end()) {
        if (!t->is_number_integer()) fail(ErrorCode::BadCommand, "'t' must be an integer (milliseconds)");
        c.t = t->get<std::int64_t>();
    }
    for (const auto& [key, value] : j.items()) {
        if (key != "op" && key != "t") c.args[key] = value;
    }
    return c;
}

ojson command_to_json(const Command& c) {
    ojson j{{"op", c.op}, {"t", c.t}};
    for (const auto& [key, value] : c.args.items()) j[key] = value;
    return j;
}

}  // namespace icon
