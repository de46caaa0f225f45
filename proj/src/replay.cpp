#include "icon/replay.hpp"

#include "icon/error.hpp"

namespace icon {

void replay_into(Engine& engine, std::span<const Event> events, std::size_t first_entry) {
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& logged = events[i];
        const std::size_t entry = first_entry + i;
        if (logged.kind == EventKind::SessionStart) throw CorruptLog(entry, "SessionStart in the middle of a log");
        if (logged.t < engine.state().last_t) {
            throw CorruptLog(entry, "timestamp " + std::to_string(logged.t) + " precedes " +
                                        std::to_string(engine.state().last_t));
        }
        std::optional<Event> produced;
        try {
            produced = engine.dispatch(command_for_event(logged));
        } catch (const CorruptLog&) {
            throw;
        } catch (const Error& e) {
            throw CorruptLog(entry, std::string(to_string(e.code())) + ": " + e.what());
        }
        if (!produced) throw CorruptLog(entry, "command produced no event");
        const auto expected = event_to_line(logged);
        const auto actual = event_to_line(*produced);
        if (expected != actual) throw CorruptLog(entry, "replay diverged: logged " + expected + " but got " + actual);
    }
}

Engine replay(std::span<const Event> log, const Notebook& nb, std::unique_ptr<KernelBackend> kernel) {
    EngineConfig config;
    std::size_t start = 0;
    if (!log.empty() && log.front().kind == EventKind::SessionStart) {
        const auto& p = log.front().payload;
        try {
            const auto mode = mode_from_string(p.at("mode").get<std::string>());
            if (!mode) throw CorruptLog(1, "unknown mode");
            config.mode = *mode;
            config.dwell_ms = p.at("dwell_ms").get<std::int64_t>();
            if (const auto id = p.find("notebook"); id != p.end() && id->get<std::string>() != nb.id) {
                throw CorruptLog(1, "log was recorded against notebook '" + id->get<std::string>() + "', not '" +
                                        nb.id + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw CorruptLog(1, std::string("bad SessionStart: ") + e.what());
        }
        if (log.front().t != 0) throw CorruptLog(1, "SessionStart must be at t=0");
        start = 1;
    }
    Engine engine(nb, config, std::move(kernel));
    replay_into(engine, log.subspan(start), start + 1);
    return engine;
}

}  // namespace icon
