#include "icon/session.hpp"

#include <fstream>
#include <sstream>

#include "icon/error.hpp"
#include "icon/replay.hpp"

namespace icon {

namespace {

constexpr const char* kFormat = "icon-session";
constexpr int kVersion = 1;

const ojson& member(const ojson& j, const char* key, const std::string& origin) {
    const auto it = j.find(key);
    if (it == j.end()) throw SchemaError(origin, 0, std::string("missing '") + key + "'");
    return *it;
}

}  // namespace

ojson session_to_json(const Notebook& opened, const Engine& engine) {
    ojson log = ojson::array();
    for (const auto& e : engine.log()) log.push_back(event_to_json(e));
    return {{"format", kFormat},
            {"version", kVersion},
            {"notebook", notebook_to_json(opened)},
            {"workspace", workspace_to_json(engine.state())},
            {"kernel", engine.kernel().snapshot()},
            {"kernel_digest", engine.kernel().digest()},
            {"cursor", engine.log().size()},
            {"log", std::move(log)}};
}

LoadedSession session_from_json(const ojson& j, const std::string& origin, std::unique_ptr<KernelBackend> kernel) {
    if (!j.is_object()) throw SchemaError(origin, 0, "expected a session object");
    if (member(j, "format", origin) != kFormat) throw SchemaError(origin, 0, "not a session file");
    if (member(j, "version", origin) != kVersion) throw SchemaError(origin, 0, "unsupported session version");

    Notebook opened = parse_notebook(member(j, "notebook", origin).dump(), origin + ":notebook");
    WorkspaceState state = workspace_from_json(nlohmann::json(member(j, "workspace", origin)), origin + ":workspace");

    if (!kernel) kernel = std::make_unique<MockKernel>();
    try {
        kernel->restore(nlohmann::json(member(j, "kernel", origin)));
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        throw SchemaError(origin + ":kernel", 0, e.what());
    }
    if (member(j, "kernel_digest", origin) != kernel->digest()) {
        throw SchemaError(origin + ":kernel_digest", 0, "kernel snapshot does not match its digest");
    }

    const auto& cursor_json = member(j, "cursor", origin);
    const auto& log_json = member(j, "log", origin);
    if (!cursor_json.is_number_unsigned() || !log_json.is_array()) throw SchemaError(origin, 0, "bad cursor or log");
    const auto cursor = cursor_json.get<std::size_t>();
    if (cursor == 0 || cursor > log_json.size()) throw SchemaError(origin + ":cursor", 0, "cursor outside the log");

    std::vector<Event> log;
    for (std::size_t i = 0; i < log_json.size(); ++i) {
        try {
            log.push_back(event_from_json(log_json[i]));
        } catch (const Error& e) {
            throw SchemaError(origin + ":log[" + std::to_string(i) + "]", 0, e.what());
        }
    }
    if (log.front().kind != EventKind::SessionStart) throw SchemaError(origin + ":log[0]", 0, "log must open with SessionStart");
    if (log.front().payload.value("notebook", std::string()) != opened.id) {
        throw SchemaError(origin + ":log[0]", 0, "log belongs to another notebook");
    }
    if (state.last_t != log[cursor - 1].t) throw SchemaError(origin + ":cursor", 0, "workspace does not sit at the cursor");

    std::vector<Event> head(log.begin(), log.begin() + static_cast<std::ptrdiff_t>(cursor));
    Engine engine(std::move(state), std::move(kernel), std::move(head));
    replay_into(engine, std::span<const Event>(log).subspan(cursor), cursor + 1);
    return {std::move(opened), std::move(engine)};
}

void save_session_file(const Notebook& opened, const Engine& engine, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
        out << session_to_json(opened, engine).dump(1) << '\n';
        if (!out) fail(ErrorCode::IoError, "failed writing '" + path + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) fail(ErrorCode::IoError, "cannot replace '" + path + "'");
}

LoadedSession load_session_file(const std::string& path, std::unique_ptr<KernelBackend> kernel) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    ojson j;
    try {
        j = ojson::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        const std::string text = ss.str();
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
        throw SchemaError(path, line, "invalid JSON");
    }
    return session_from_json(j, path, std::move(kernel));
}

Session::Session(std::string id, Notebook opened, Engine engine)
    : id_(std::move(id)), opened_(std::move(opened)), engine_(std::move(engine)) {}

DispatchReply Session::dispatch(const Command& cmd) {
    DispatchReply reply;
    std::lock_guard lock(mu_);
    try {
        if (auto e = engine_.dispatch(cmd)) reply.events.push_back(std::move(*e));
    } catch (const Error& e) {
        reply.error = e.code();
        reply.message = e.what();
        return reply;
    }
    const std::size_t first = engine_.log().size() - reply.events.size();
    for (std::size_t i = 0; i < reply.events.size(); ++i) {
        for (const auto& [token, fn] : subscribers_) fn(reply.events[i], first + i);
    }
    return reply;
}

std::pair<std::uint64_t, std::size_t> Session::subscribe(Subscriber fn) {
    std::lock_guard lock(mu_);
    const auto token = next_token_++;
    subscribers_.emplace(token, std::move(fn));
    return {token, engine_.log().size()};
}

void Session::unsubscribe(std::uint64_t token) {
    std::lock_guard lock(mu_);
    subscribers_.erase(token);
}

ojson Session::to_json() const {
    std::lock_guard lock(mu_);
    return session_to_json(opened_, engine_);
}

void Session::save(const std::string& path) const {
    std::lock_guard lock(mu_);
    save_session_file(opened_, engine_, path);
}

std::optional<std::string> Session::take_warning() {
    std::lock_guard lock(mu_);
    auto w = engine_.kernel().warning();
    if (w.empty() || w == delivered_warning_) return std::nullopt;
    delivered_warning_ = w;
    return w;
}

SessionManager::SessionManager(KernelFactory kernels) : kernels_(std::move(kernels)) {
    if (!kernels_) kernels_ = [] { return std::make_unique<MockKernel>(); };
}

std::shared_ptr<Session> SessionManager::open_file(const std::string& notebook_path, EngineConfig config) {
    return open(load_notebook(notebook_path), config);
}

std::shared_ptr<Session> SessionManager::open(Notebook nb, EngineConfig config) {
    Engine engine(nb, config, kernels_());
    return adopt(std::move(nb), std::move(engine));
}

std::shared_ptr<Session> SessionManager::load(const std::string& session_path) {
    auto loaded = load_session_file(session_path, kernels_());
    return adopt(std::move(loaded.notebook), std::move(loaded.engine));
}

std::shared_ptr<Session> SessionManager::adopt(Notebook opened, Engine engine) {
    std::lock_guard lock(mu_);
    const std::string id = "s" + std::to_string(next_id_++);
    auto s = std::make_shared<Session>(id, std::move(opened), std::move(engine));
    sessions_.emplace(id, s);
    return s;
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) const {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) fail(ErrorCode::UnknownSession, "no session '" + id + "'");
    return it->second;
}

void SessionManager::close(const std::string& id) {
    std::lock_guard lock(mu_);
    if (sessions_.erase(id) == 0) fail(ErrorCode::UnknownSession, "no session '" + id + "'");
}

std::vector<std::string> SessionManager::ids() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) out.push_back(id);
    return out;
}

Endpoint::Endpoint(SessionManager& sessions, std::string session_id, std::function<void(std::string)> send)
    : sessions_(sessions), current_(std::move(session_id)), send_(std::move(send)) {}

Endpoint::~Endpoint() { drop_subscription(); }

void Endpoint::drop_subscription() {
    if (subscribed_) subscribed_->unsubscribe(token_);
    subscribed_.reset();
    token_ = 0;
}

void Endpoint::on_frame(std::string_view text) {
    const auto frame = nlohmann::json::parse(text, nullptr, false);
    ojson reply;
    if (frame.is_discarded() || !frame.is_object()) {
        reply = {{"seq", nullptr},
                 {"ok", false},
                 {"error", {{"code", to_string(ErrorCode::ProtocolError)}, {"message", "frame is not a JSON object"}}}};
    } else {
        reply = handle(frame);
    }
    send_(reply.dump());
}

ojson Endpoint::handle(const nlohmann::json& frame) {
    ojson reply{{"seq", frame.contains("seq") ? frame.at("seq") : nlohmann::json(nullptr)}};
    try {
        if (const auto it = frame.find("session"); it != frame.end()) {
            if (!it->is_string()) fail(ErrorCode::ProtocolError, "'session' must be a string");
            (void)sessions_.get(it->get<std::string>());
            current_ = it->get<std::string>();
        }
        auto session = sessions_.get(current_);

        if (const auto it = frame.find("command"); it != frame.end()) {
            const auto result = session->dispatch(command_from_json(*it));
            ojson events = ojson::array();
            for (const auto& e : result.events) events.push_back(event_to_json(e));
            if (result.ok()) {
                reply["ok"] = true;
            } else {
                reply["ok"] = false;
                reply["error"] = {{"code", to_string(*result.error)}, {"message", result.message}};
            }
            reply["events"] = std::move(events);
            if (auto w = session->take_warning()) reply["warning"] = *w;
            return reply;
        }
        if (frame.value("subscribe", false)) {
            drop_subscription();
            const std::string sid = session->id();
            auto send = send_;
            const auto [token, cursor] = session->subscribe([send, sid](const Event& e, std::size_t index) {
                send(ojson{{"session", sid}, {"index", index}, {"event", event_to_json(e)}}.dump());
            });
            subscribed_ = session;
            token_ = token;
            reply["ok"] = true;
            reply["session"] = sid;
            reply["cursor"] = cursor;
            return reply;
        }
        if (frame.value("unsubscribe", false)) {
            drop_subscription();
            reply["ok"] = true;
            return reply;
        }
        if (frame.value("state", false)) {
            session->inspect([&](const Engine& engine) {
                reply["ok"] = true;
                reply["session"] = session->id();
                reply["state"] = workspace_to_json(engine.state());
                reply["cursor"] = engine.log().size();
                reply["hash"] = engine.state_hash();
                return 0;
            });
            return reply;
        }
        if (const auto it = frame.find("open"); it != frame.end()) {
            EngineConfig config;
            config.dwell_ms = session->inspect([](const Engine& e) { return e.state().dwell_threshold_ms; });
            if (it->is_object() && it->contains("mode")) {
                const auto mode = mode_from_string(it->at("mode").get<std::string>());
                if (!mode) fail(ErrorCode::BadCommand, "unknown mode");
                config.mode = *mode;
            }
            auto fresh = sessions_.open(session->opened(), config);
            current_ = fresh->id();
            reply["ok"] = true;
            reply["session"] = current_;
            return reply;
        }
        fail(ErrorCode::ProtocolError, "frame carries no command, subscribe, unsubscribe, state or open");
    } catch (const Error& e) {
        reply["ok"] = false;
        reply["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
    } catch (const nlohmann::json::exception& e) {
        reply["ok"] = false;
        reply["error"] = {{"code", to_string(ErrorCode::ProtocolError)}, {"message", e.what()}};
    }
    return reply;
}

}  // namespace icon
