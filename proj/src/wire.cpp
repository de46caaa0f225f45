#include "icon/wire.hpp"

#include <boost/process.hpp>
#include <csignal>
#include <ctime>
#include <istream>
#include <mutex>
#include <ostream>

#include "icon/error.hpp"

namespace icon {

namespace bp = boost::process;

namespace {

// Writing to a child that already exited raises SIGPIPE; keep it pending on this thread and
// discard it so the failure shows up as a bad stream instead.
class PipeSignalGuard {
public:
    PipeSignalGuard() {
        sigemptyset(&pipe_);
        sigaddset(&pipe_, SIGPIPE);
        sigset_t pending;
        sigpending(&pending);
        already_pending_ = sigismember(&pending, SIGPIPE) == 1;
        pthread_sigmask(SIG_BLOCK, &pipe_, &old_);
    }
    ~PipeSignalGuard() {
        if (!already_pending_) {
            sigset_t pending;
            sigpending(&pending);
            if (sigismember(&pending, SIGPIPE) == 1) {
                const timespec zero{0, 0};
                (void)sigtimedwait(&pipe_, nullptr, &zero);
            }
        }
        pthread_sigmask(SIG_SETMASK, &old_, nullptr);
    }
    PipeSignalGuard(const PipeSignalGuard&) = delete;
    PipeSignalGuard& operator=(const PipeSignalGuard&) = delete;

private:
    sigset_t pipe_{};
    sigset_t old_{};
    bool already_pending_ = false;
};

const std::string& text_field(const nlohmann::json& req, const char* key) {
    const auto it = req.find(key);
    if (it == req.end() || !it->is_string()) fail(ErrorCode::ProtocolError, std::string("missing string '") + key + "'");
    return it->get_ref<const std::string&>();
}

ojson dispatch_request(KernelBackend& kernel, const nlohmann::json& req) {
    const auto& op = text_field(req, "op");
    ojson out{{"ok", true}};
    if (op == "execute") {
        const auto result = exec_result_to_json(kernel.execute(text_field(req, "cell_id"), text_field(req, "source")));
        for (const auto& [k, v] : result.items()) out[k] = v;
    } else if (op == "extract_table") {
        out["table"] = table_to_json(*kernel.extract_table(text_field(req, "var")));
    } else if (op == "extract_plot") {
        out["plot"] = plot_to_json(*kernel.extract_plot(text_field(req, "cell_id")));
    } else if (op == "reset") {
        kernel.reset();
    } else {
        fail(ErrorCode::ProtocolError, "unknown op '" + op + "'");
    }
    return out;
}

}  // namespace

ojson handle_kernel_request(KernelBackend& kernel, const nlohmann::json& request) {
    ojson head = ojson::object();
    if (request.is_object() && request.contains("id")) head["id"] = request.at("id");
    else head["id"] = nullptr;
    try {
        if (!request.is_object()) fail(ErrorCode::ProtocolError, "request must be an object");
        auto body = dispatch_request(kernel, request);
        for (auto& [k, v] : body.items()) head[k] = v;
    } catch (const Error& e) {
        head["ok"] = false;
        head["error"] = e.what();
        head["code"] = to_string(e.code());
    } catch (const std::exception& e) {
        head["ok"] = false;
        head["error"] = e.what();
        head["code"] = to_string(ErrorCode::ProtocolError);
    }
    return head;
}

void serve_kernel(std::istream& in, std::ostream& out, KernelBackend& kernel) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto req = nlohmann::json::parse(line, nullptr, false);
        const auto resp = req.is_discarded()
                              ? ojson{{"id", nullptr}, {"ok", false}, {"error", "unparseable request"}, {"code", "ProtocolError"}}
                              : handle_kernel_request(kernel, req);
        out << resp.dump() << '\n' << std::flush;
    }
}

struct ProcessKernel::Channel {
    std::mutex mu;
    bp::opstream to_child;
    bp::ipstream from_child;
    bp::child child;
    std::int64_t next_id = 1;
    // What the environment on the other side currently holds.
    Journal applied;
    std::unique_ptr<MockKernel> local;
    std::string warning;

    ~Channel() {
        PipeSignalGuard guard;
        to_child.pipe().close();
        from_child.pipe().close();
        std::error_code ec;
        if (child.valid() && child.running(ec)) child.terminate(ec);
    }

    struct Down : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    ojson roundtrip(const ojson& body) {
        if (local) return handle_kernel_request(*local, body);
        ojson req = body;
        const auto id = next_id++;
        req["id"] = id;
        {
            PipeSignalGuard guard;
            to_child << req.dump() << '\n' << std::flush;
        }
        if (!to_child) throw Down("kernel process stopped accepting requests");
        std::string line;
        if (!std::getline(from_child, line)) throw Down("kernel process closed its output");
        ojson resp = ojson::parse(line, nullptr, false);
        if (resp.is_discarded() || !resp.is_object()) throw Down("kernel process sent an unparseable response");
        if (resp.value("id", std::int64_t{-1}) != id || !resp.contains("ok") || !resp.at("ok").is_boolean()) {
            throw Down("kernel process answered out of turn");
        }
        return resp;
    }

    void fall_back(const std::string& why) {
        warning = "external kernel unavailable (" + why + "); continuing on the built-in kernel";
        local = std::make_unique<MockKernel>();
        applied.clear();
        PipeSignalGuard guard;
        to_child.pipe().close();
        std::error_code ec;
        if (child.valid() && child.running(ec)) child.terminate(ec);
    }

    void sync(const Journal& want) {
        const bool extends = applied.size() <= want.size() && std::equal(applied.begin(), applied.end(), want.begin());
        if (!extends) {
            (void)roundtrip({{"op", "reset"}});
            applied.clear();
        }
        for (std::size_t i = applied.size(); i < want.size(); ++i) {
            (void)roundtrip({{"op", "execute"}, {"cell_id", want[i].first}, {"source", want[i].second}});
            applied.push_back(want[i]);
        }
    }
};

std::unique_ptr<ProcessKernel> ProcessKernel::launch(const std::vector<std::string>& argv) {
    if (argv.empty()) fail(ErrorCode::IoError, "empty kernel command");
    auto ch = std::make_shared<Channel>();
    try {
        const auto exe = argv[0].find('/') == std::string::npos ? bp::search_path(argv[0]) : boost::filesystem::path(argv[0]);
        if (exe.empty()) fail(ErrorCode::IoError, "kernel command '" + argv[0] + "' not found");
        ch->child = bp::child(exe, std::vector<std::string>(argv.begin() + 1, argv.end()), bp::std_in < ch->to_child,
                              bp::std_out > ch->from_child);
    } catch (const bp::process_error& e) {
        fail(ErrorCode::IoError, "cannot start kernel '" + argv[0] + "': " + e.what());
    }
    return std::unique_ptr<ProcessKernel>(new ProcessKernel(std::move(ch)));
}

ojson ProcessKernel::call(ojson request) const {
    std::lock_guard lock(channel_->mu);
    try {
        channel_->sync(journal_);
        return channel_->roundtrip(request);
    } catch (const Channel::Down& e) {
        channel_->fall_back(e.what());
    }
    channel_->sync(journal_);
    return channel_->roundtrip(request);
}

namespace {

[[noreturn]] void rethrow(const ojson& resp) {
    const auto code = error_code_from_string(resp.value("code", std::string()));
    fail(code.value_or(ErrorCode::KernelError), resp.value("error", std::string("kernel request failed")));
}

}  // namespace

ExecResult ProcessKernel::execute(std::string_view cell_id, std::string_view source) {
    const auto resp = call({{"op", "execute"}, {"cell_id", cell_id}, {"source", source}});
    if (!resp.at("ok").get<bool>()) rethrow(resp);
    auto result = exec_result_from_json(resp);
    if (result.ok) {
        journal_.emplace_back(cell_id, source);
        std::lock_guard lock(channel_->mu);
        channel_->applied = journal_;
    }
    return result;
}

std::shared_ptr<const TableExtract> ProcessKernel::extract_table(std::string_view var) const {
    const auto resp = call({{"op", "extract_table"}, {"var", var}});
    if (!resp.at("ok").get<bool>()) rethrow(resp);
    return std::make_shared<const TableExtract>(table_from_json(resp.at("table")));
}

std::shared_ptr<const PlotExtract> ProcessKernel::extract_plot(std::string_view cell_id) const {
    const auto resp = call({{"op", "extract_plot"}, {"cell_id", cell_id}});
    if (!resp.at("ok").get<bool>()) rethrow(resp);
    return std::make_shared<const PlotExtract>(plot_from_json(resp.at("plot")));
}

void ProcessKernel::reset() { journal_.clear(); }

std::unique_ptr<KernelBackend> ProcessKernel::clone() const {
    auto copy = std::unique_ptr<ProcessKernel>(new ProcessKernel(channel_));
    copy->journal_ = journal_;
    return copy;
}

std::string ProcessKernel::digest() const { return fnv1a_hex(snapshot().dump()); }

ojson ProcessKernel::snapshot() const {
    ojson entries = ojson::array();
    for (const auto& [cell, src] : journal_) entries.push_back({cell, src});
    return {{"journal", entries}};
}

void ProcessKernel::restore(const nlohmann::json& snapshot) {
    const auto it = snapshot.find("journal");
    if (!snapshot.is_object() || it == snapshot.end() || !it->is_array()) {
        throw SchemaError("kernel.journal", 0, "expected a journal of executed cells");
    }
    Journal next;
    for (const auto& e : *it) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
            throw SchemaError("kernel.journal", 0, "entries are [cell_id, source] pairs");
        }
        next.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    journal_ = std::move(next);
}

std::string ProcessKernel::warning() const {
    std::lock_guard lock(channel_->mu);
    return channel_->warning;
}

bool ProcessKernel::on_fallback() const {
    std::lock_guard lock(channel_->mu);
    return channel_->local != nullptr;
}

}  // namespace icon
