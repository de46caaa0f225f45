#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "icon/datasets.hpp"
#include "icon/error.hpp"
#include "icon/metrics.hpp"
#include "icon/replay.hpp"
#include "icon/server.hpp"
#include "icon/session.hpp"
#include "icon/tasks.hpp"
#include "icon/wire.hpp"

namespace {

using namespace icon;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    out << text;
    if (!out) fail(ErrorCode::IoError, "failed writing '" + path + "'");
}

Notebook notebook_or_fixture(const std::string& path) {
    if (path.empty()) return parse_notebook(embedded_file("study_notebook.json"), "study_notebook.json");
    return load_notebook(path);
}

Mode parse_mode(const std::string& s) {
    const auto m = mode_from_string(s);
    if (!m) fail(ErrorCode::BadCommand, "unknown mode '" + s + "'");
    return *m;
}

KernelFactory kernel_factory(const std::string& adapter) {
    if (adapter.empty()) return nullptr;
    return [adapter]() -> std::unique_ptr<KernelBackend> {
        std::istringstream words(adapter);
        std::vector<std::string> argv;
        for (std::string w; words >> w;) argv.push_back(w);
        return ProcessKernel::launch(argv);
    };
}

int validate(const std::string& path) {
    const std::string text = read_file(path);
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("format")) {
        const auto loaded = load_session_file(path);
        std::cout << path << ": session ok, " << loaded.engine.log().size() << " events, state "
                  << loaded.engine.state_hash() << "\n";
        return 0;
    }
    if (j.is_discarded() || j.is_object()) {
        const Notebook nb = parse_notebook(text, path);
        std::cout << path << ": notebook ok, " << nb.windows.size() << " windows, " << nb.cell_count() << " cells\n";
        return 0;
    }
    fail(ErrorCode::SchemaError, path + ": neither a notebook nor a session");
}

int replay_cmd(const std::string& log_path, const std::string& notebook_path, const std::string& metrics_out,
               const std::string& task) {
    const auto log = load_log(log_path);
    const Engine engine = replay(log, notebook_or_fixture(notebook_path));
    std::cout << "replayed " << log.size() << " events, state " << engine.state_hash() << "\n";
    nlohmann::json truth = nlohmann::json::object();
    if (!task.empty()) {
        const auto kind = task_kind_from_string(task);
        if (!kind) fail(ErrorCode::BadCommand, "unknown task '" + task + "'");
        truth = task_ground_truth(*kind, engine.state().notebook);
    }
    if (!metrics_out.empty()) {
        const auto m = compute_metrics(log, truth);
        write_file(metrics_out, metrics_to_json(m).dump(2) + "\n");
        std::cout << metrics_to_text(m);
    }
    return 0;
}

int task_cmd(const std::string& task, const std::string& mode, const std::string& out, const std::string& metrics_out,
             const std::string& notebook_path) {
    const auto kind = task_kind_from_string(task);
    if (!kind) fail(ErrorCode::BadCommand, "unknown task '" + task + "'");
    const auto run = run_task(*kind, parse_mode(mode), notebook_or_fixture(notebook_path));
    if (!out.empty()) save_log(run.log, out);
    if (!metrics_out.empty()) write_file(metrics_out, metrics_to_json(run.metrics).dump(2) + "\n");
    std::cout << metrics_to_text(run.metrics);
    return 0;
}

int serve(std::uint16_t port, const std::string& address, const std::string& notebook_path, const std::string& mode,
          const std::string& resume, const std::string& save_to, const std::string& adapter) {
    SessionManager sessions(kernel_factory(adapter));
    std::shared_ptr<Session> session;
    if (!resume.empty()) {
        session = sessions.load(resume);
    } else {
        session = sessions.open(notebook_or_fixture(notebook_path), EngineConfig{parse_mode(mode), dwell_threshold_from_env()});
    }
    MessageServer server(sessions, session->id(), address, port);
    std::cout << "listening on ws://" << address << ":" << server.port() << " session " << session->id() << std::endl;
    server.run(true);
    if (!save_to.empty()) {
        session->save(save_to);
        std::cout << "saved " << save_to << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Immersive notebook workspace engine"};
    app.require_subcommand(1);

    auto* serve_cmd = app.add_subcommand("serve", "Host a session over WebSocket");
    std::uint16_t port = 8765;
    std::string address = "127.0.0.1", notebook, mode = "unified", resume, save_to, adapter;
    serve_cmd->add_option("--port", port, "TCP port (0 picks one)");
    serve_cmd->add_option("--address", address, "Listen address");
    serve_cmd->add_option("--notebook", notebook, "Notebook file (default: bundled study notebook)");
    serve_cmd->add_option("--mode", mode, "unified or separated");
    serve_cmd->add_option("--resume", resume, "Session file to continue from");
    serve_cmd->add_option("--save", save_to, "Write the session here on shutdown");
    serve_cmd->add_option("--kernel-adapter", adapter, "External kernel command speaking the wire protocol");

    auto* validate_cmd = app.add_subcommand("validate", "Check a notebook or session file");
    std::string validate_path;
    validate_cmd->add_option("file", validate_path)->required();

    auto* replay_sub = app.add_subcommand("replay", "Re-run a provenance log and report metrics");
    std::string log_path, replay_nb, metrics_out, ground_truth_task;
    replay_sub->add_option("log", log_path)->required();
    replay_sub->add_option("--notebook", replay_nb, "Notebook the session opened (default: bundled study notebook)");
    replay_sub->add_option("--metrics", metrics_out, "Write the metrics report as JSON");
    replay_sub->add_option("--task", ground_truth_task, "Score answers against this task's ground truth");

    auto* task_sub = app.add_subcommand("task", "Scripted study tasks");
    task_sub->require_subcommand(1);
    auto* task_run = task_sub->add_subcommand("run", "Play a task script");
    std::string task_name, task_mode = "unified", task_out, task_metrics, task_nb;
    task_run->add_option("task", task_name, "instructed or exploratory")->required();
    task_run->add_option("--mode", task_mode, "unified or separated");
    task_run->add_option("--out", task_out, "Write the event log (NDJSON)");
    task_run->add_option("--metrics", task_metrics, "Write the metrics report as JSON");
    task_run->add_option("--notebook", task_nb, "Notebook laid out like the study fixture");

    app.add_subcommand("kernel", "Serve the built-in kernel over the stdio wire protocol");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve_cmd) return serve(port, address, notebook, mode, resume, save_to, adapter);
        if (*validate_cmd) return validate(validate_path);
        if (*replay_sub) return replay_cmd(log_path, replay_nb, metrics_out, ground_truth_task);
        if (*task_run) return task_cmd(task_name, task_mode, task_out, task_metrics, task_nb);
        if (app.got_subcommand("kernel")) {
            MockKernel kernel;
            serve_kernel(std::cin, std::cout, kernel);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << to_string(e.code()) << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
