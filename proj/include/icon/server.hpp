#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "icon/session.hpp"

namespace icon {

/// WebSocket front end for Endpoint: every text message is one frame, every reply or streamed
/// event goes back as one text message. A connection starts on `default_session`.
class MessageServer {
public:
    /// Binds immediately; port 0 picks a free one.
    MessageServer(SessionManager& sessions, std::string default_session, const std::string& address = "127.0.0.1",
                  std::uint16_t port = 0, int threads = 2);
    ~MessageServer();
    MessageServer(const MessageServer&) = delete;
    MessageServer& operator=(const MessageServer&) = delete;

    [[nodiscard]] std::uint16_t port() const noexcept;

    /// Serves on background threads until stop().
    void start();
    /// Blocks the calling thread until stop() (or SIGINT/SIGTERM when `handle_signals`).
    void run(bool handle_signals = false);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace icon
