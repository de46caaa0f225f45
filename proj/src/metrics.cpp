#include "icon/metrics.hpp"

#include <cstdio>
#include <vector>

#include "icon/error.hpp"

namespace icon {

namespace {

bool empty_handed(const Event& e) {
    const auto it = e.payload.find("holding");
    return it == e.payload.end() || !it->is_array() || it->empty();
}

bool manipulates(EventKind k) {
    switch (k) {
        case EventKind::Edit:
        case EventKind::Execute:
        case EventKind::Sort:
        case EventKind::Filter:
        case EventKind::RemoveFilter:
        case EventKind::SelectColumn:
        case EventKind::RemovePoint:
        case EventKind::ApplyToTable:
            return true;
        default:
            return false;
    }
}

bool always_interactive(EventKind k) {
    switch (k) {
        case EventKind::PullOut:
        case EventKind::PutInCreate:
        case EventKind::PutInUpdate:
        case EventKind::MergeVis:
        case EventKind::AddAxis:
        case EventKind::RemoveAxis:
            return true;
        default:
            return false;
    }
}

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

MetricsReport compute_metrics(std::span<const Event> log, const nlohmann::json& ground_truth, std::int64_t window_ms) {
    MetricsReport m;
    std::optional<std::int64_t> completed_at;
    std::optional<std::int64_t> armed_at;
    std::int64_t created = 0;
    std::int64_t consumed = 0;

    for (const Event& e : log) {
        if (armed_at && e.t - *armed_at > window_ms) armed_at.reset();
        switch (e.kind) {
            case EventKind::FocusChange:
                ++m.nav_transitions;
                armed_at = e.t;
                break;
            case EventKind::PortalCross:
                ++m.portal_crossings;
                if (empty_handed(e)) ++m.nav_transitions;
                else ++m.interactive_transitions;
                if (e.payload.value("direction", std::string()) == "enter") ++created;
                armed_at = e.t;
                break;
            case EventKind::Delete:
                ++m.deletes;
                ++consumed;
                break;
            case EventKind::AnswerReported: {
                const auto key = e.payload.value("key", std::string());
                const auto it = ground_truth.find(key);
                if (it != ground_truth.end() && nlohmann::json(e.payload.value("value", ojson())) != *it) {
                    ++m.error_score;
                }
                break;
            }
            case EventKind::TaskComplete:
                completed_at = e.t;
                armed_at.reset();
                break;
            default:
                break;
        }
        if (always_interactive(e.kind)) ++m.interactive_transitions;
        if (e.kind == EventKind::PullOut || e.kind == EventKind::MergeVis) ++created;
        if (e.kind == EventKind::PutInCreate || e.kind == EventKind::PutInUpdate) ++consumed;
        if (manipulates(e.kind) && armed_at) {
            ++m.interactive_transitions;
            armed_at.reset();
        }
    }
    if (!completed_at) fail(ErrorCode::NoCompletionMarker, "log has no TaskComplete event");

    m.completion_time_s = static_cast<double>(*completed_at) / 1000.0;
    m.artifacts_left = created > consumed ? static_cast<std::size_t>(created - consumed) : 0;
    if (m.completion_time_s > 0.0) {
        const double minutes = m.completion_time_s / 60.0;
        m.nav_transitions_per_min = static_cast<double>(m.nav_transitions) / minutes;
        m.interactive_transitions_per_min = static_cast<double>(m.interactive_transitions) / minutes;
    }
    return m;
}

ojson metrics_to_json(const MetricsReport& m) {
    ojson j;
    j["completion_time_s"] = m.completion_time_s;
    j["nav_transitions_per_min"] = m.nav_transitions_per_min;
    j["interactive_transitions_per_min"] = m.interactive_transitions_per_min;
    j["deletes"] = m.deletes;
    j["artifacts_left"] = m.artifacts_left;
    j["error_score"] = m.error_score;
    j["nav_transitions"] = m.nav_transitions;
    j["interactive_transitions"] = m.interactive_transitions;
    j["portal_crossings"] = m.portal_crossings;
    return j;
}

std::string metrics_to_text(const MetricsReport& m) {
    const std::vector<std::pair<std::string, std::string>> rows{
        {"completion_time_s", fixed3(m.completion_time_s)},
        {"nav_transitions_per_min", fixed3(m.nav_transitions_per_min)},
        {"interactive_transitions_per_min", fixed3(m.interactive_transitions_per_min)},
        {"deletes", std::to_string(m.deletes)},
        {"artifacts_left", std::to_string(m.artifacts_left)},
        {"error_score", std::to_string(m.error_score)},
        {"nav_transitions", std::to_string(m.nav_transitions)},
        {"interactive_transitions", std::to_string(m.interactive_transitions)},
        {"portal_crossings", std::to_string(m.portal_crossings)},
    };
    std::size_t name_w = 6, value_w = 5;
    for (const auto& [n, v] : rows) {
        name_w = std::max(name_w, n.size());
        value_w = std::max(value_w, v.size());
    }
    std::string out = "metric" + std::string(name_w - 6 + 2, ' ') + std::string(value_w - 5, ' ') + "value\n";
    for (const auto& [n, v] : rows) {
        out += n + std::string(name_w - n.size() + 2, ' ') + std::string(value_w - v.size(), ' ') + v + "\n";
    }
    return out;
}

}  // namespace icon
