#include "icon/server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <deque>
#include <iostream>
#include <thread>

#include "icon/error.hpp"

namespace icon {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, SessionManager& sessions, std::string session)
        : ws_(std::move(socket)), sessions_(sessions), session_(std::move(session)) {}

    void start() {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(beast::bind_front_handler(&Connection::on_accept, shared_from_this()));
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) return;
        std::weak_ptr<Connection> self = shared_from_this();
        auto executor = ws_.get_executor();
        endpoint_ = std::make_unique<Endpoint>(sessions_, session_, [self, executor](std::string text) {
            asio::post(executor, [self, text = std::move(text)]() mutable {
                if (auto c = self.lock()) c->enqueue(std::move(text));
            });
        });
        read();
    }

    void read() { ws_.async_read(buffer_, beast::bind_front_handler(&Connection::on_read, shared_from_this())); }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            endpoint_.reset();
            return;
        }
        const std::string text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        endpoint_->on_frame(text);
        read();
    }

    void enqueue(std::string text) {
        outbox_.push_back(std::move(text));
        if (outbox_.size() == 1) write();
    }

    void write() {
        ws_.text(true);
        ws_.async_write(asio::buffer(outbox_.front()), beast::bind_front_handler(&Connection::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        if (ec) {
            outbox_.clear();
            return;
        }
        outbox_.pop_front();
        if (!outbox_.empty()) write();
    }

    websocket::stream<beast::tcp_stream> ws_;
    SessionManager& sessions_;
    std::string session_;
    beast::flat_buffer buffer_;
    std::deque<std::string> outbox_;
    std::unique_ptr<Endpoint> endpoint_;
};

}  // namespace

struct MessageServer::Impl {
    Impl(SessionManager& s, std::string session, int n)
        : sessions(s), default_session(std::move(session)), threads(std::max(1, n)), acceptor(io) {}

    void accept() {
        acceptor.async_accept(asio::make_strand(io), [this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            std::make_shared<Connection>(std::move(socket), sessions, default_session)->start();
            accept();
        });
    }

    SessionManager& sessions;
    std::string default_session;
    int threads;
    asio::io_context io;
    tcp::acceptor acceptor;
    std::vector<std::thread> pool;
    std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
};

MessageServer::MessageServer(SessionManager& sessions, std::string default_session, const std::string& address,
                             std::uint16_t port, int threads)
    : impl_(std::make_unique<Impl>(sessions, std::move(default_session), threads)) {
    (void)sessions.get(impl_->default_session);
    try {
        const tcp::endpoint where(asio::ip::make_address(address), port);
        impl_->acceptor.open(where.protocol());
        impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
        impl_->acceptor.bind(where);
        impl_->acceptor.listen();
    } catch (const boost::system::system_error& e) {
        fail(ErrorCode::IoError, "cannot listen on " + address + ":" + std::to_string(port) + ": " + e.what());
    }
    impl_->accept();
}

MessageServer::~MessageServer() { stop(); }

std::uint16_t MessageServer::port() const noexcept { return impl_->acceptor.local_endpoint().port(); }

void MessageServer::start() {
    impl_->work.emplace(impl_->io.get_executor());
    for (int i = 0; i < impl_->threads; ++i) impl_->pool.emplace_back([this] { impl_->io.run(); });
}

void MessageServer::run(bool handle_signals) {
    std::optional<asio::signal_set> signals;
    if (handle_signals) {
        signals.emplace(impl_->io, SIGINT, SIGTERM);
        signals->async_wait([this](beast::error_code, int) { impl_->io.stop(); });
    }
    for (int i = 1; i < impl_->threads; ++i) impl_->pool.emplace_back([this] { impl_->io.run(); });
    impl_->io.run();
    stop();
}

void MessageServer::stop() {
    impl_->work.reset();
    impl_->io.stop();
    for (auto& t : impl_->pool) {
        if (t.joinable() && t.get_id() != std::this_thread::get_id()) t.join();
    }
    impl_->pool.clear();
}

}  // namespace icon
