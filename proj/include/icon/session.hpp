#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "icon/engine.hpp"
#include "icon/error.hpp"

namespace icon {

using KernelFactory = std::function<std::unique_ptr<KernelBackend>()>;

// Session file (one JSON object):
//   {"format":"icon-session","version":1,
//    "notebook":   notebook as the session opened it,
//    "workspace":  state after the first `cursor` log entries,
//    "kernel":     backend snapshot at that point, "kernel_digest": its digest,
//    "cursor":     n, "log": [event, ...]}
// Entries past the cursor are re-applied on load, so a snapshot plus an appended tail is valid.

struct LoadedSession {
    Notebook notebook;
    Engine engine;
};

[[nodiscard]] ojson session_to_json(const Notebook& opened, const Engine& engine);

/// Throws SchemaError for malformed files or states that break an invariant (dangling links),
/// CorruptLog when the tail after the cursor does not replay.
[[nodiscard]] LoadedSession session_from_json(const ojson& j, const std::string& origin,
                                              std::unique_ptr<KernelBackend> kernel = nullptr);

void save_session_file(const Notebook& opened, const Engine& engine, const std::string& path);
[[nodiscard]] LoadedSession load_session_file(const std::string& path, std::unique_ptr<KernelBackend> kernel = nullptr);

struct DispatchReply {
    std::vector<Event> events;
    std::optional<ErrorCode> error;
    std::string message;
    [[nodiscard]] bool ok() const noexcept { return !error; }
};

/// One notebook plus one workspace, shared by any number of connections. Commands run one at a
/// time in arrival order; subscribers see every event in log order.
class Session {
public:
    /// Called with the event and its 0-based log index while the session lock is held, so it
    /// must not block or call back into the session.
    using Subscriber = std::function<void(const Event& event, std::size_t index)>;

    Session(std::string id, Notebook opened, Engine engine);

    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    /// The notebook as the session first opened it.
    [[nodiscard]] const Notebook& opened() const noexcept { return opened_; }

    DispatchReply dispatch(const Command& cmd);

    /// Returns a token for unsubscribe and the log length at the moment of subscribing; the
    /// subscriber receives exactly the events from that index on.
    std::pair<std::uint64_t, std::size_t> subscribe(Subscriber fn);
    void unsubscribe(std::uint64_t token);

    /// Runs fn against the engine under the session lock.
    template <class Fn>
    auto inspect(Fn&& fn) const {
        std::lock_guard lock(mu_);
        return fn(static_cast<const Engine&>(engine_));
    }

    [[nodiscard]] ojson to_json() const;
    void save(const std::string& path) const;

    /// Last kernel warning not yet delivered, if any.
    [[nodiscard]] std::optional<std::string> take_warning();

private:
    std::string id_;
    Notebook opened_;
    mutable std::mutex mu_;
    Engine engine_;
    std::map<std::uint64_t, Subscriber> subscribers_;
    std::uint64_t next_token_ = 1;
    std::string delivered_warning_;
};

class SessionManager {
public:
    explicit SessionManager(KernelFactory kernels = nullptr);

    /// Throws SchemaError when the notebook file does not parse.
    std::shared_ptr<Session> open_file(const std::string& notebook_path, EngineConfig config = {});
    std::shared_ptr<Session> open(Notebook nb, EngineConfig config = {});
    std::shared_ptr<Session> load(const std::string& session_path);

    /// Throws UnknownSession.
    [[nodiscard]] std::shared_ptr<Session> get(const std::string& id) const;
    void close(const std::string& id);
    [[nodiscard]] std::vector<std::string> ids() const;

private:
    std::shared_ptr<Session> adopt(Notebook opened, Engine engine);

    KernelFactory kernels_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

/// One client's side of the message channel, independent of transport. Frames in:
///   {"seq":n,"command":{"op":...,"t":...,...}}     -> {"seq":n,"ok":true,"events":[...]}
///                                                     {"seq":n,"ok":false,"error":{"code","message"},"events":[]}
///   {"seq":n,"subscribe":true}                     -> {"seq":n,"ok":true,"cursor":k}, then
///                                                     {"session":id,"index":i,"event":{...}} per event
///   {"seq":n,"unsubscribe":true}
///   {"seq":n,"state":true}                         -> {"seq":n,"ok":true,"state":{...},"cursor":k,"hash":h}
///   {"seq":n,"open":{"mode":"separated"}}          -> {"seq":n,"ok":true,"session":id}  (and switches to it)
/// Any frame may name a "session"; otherwise the endpoint's current one is used.
class Endpoint {
public:
    /// `send` must be safe to call from any thread and must not block.
    Endpoint(SessionManager& sessions, std::string session_id, std::function<void(std::string)> send);
    ~Endpoint();
    Endpoint(const Endpoint&) = delete;
    Endpoint& operator=(const Endpoint&) = delete;

    void on_frame(std::string_view text);

private:
    ojson handle(const nlohmann::json& frame);
    void drop_subscription();

    SessionManager& sessions_;
    std::string current_;
    std::function<void(std::string)> send_;
    std::shared_ptr<Session> subscribed_;
    std::uint64_t token_ = 0;
};

}  // namespace icon
