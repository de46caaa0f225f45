#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "icon/kernel.hpp"

namespace icon {

// Kernel wire protocol: one JSON object per line in each direction.
//   {"id":1,"op":"execute","cell_id":"c03","source":"..."}  -> {"id":1,"ok":true,"cell_id":...,"status":...}
//   {"id":2,"op":"extract_table","var":"wine"}               -> {"id":2,"ok":true,"table":{...}}
//   {"id":3,"op":"extract_plot","cell_id":"c07"}             -> {"id":3,"ok":true,"plot":{...}}
//   {"id":4,"op":"reset"}                                    -> {"id":4,"ok":true}
// Failures answer {"id":n,"ok":false,"error":"message","code":"UnknownVariable"}.

/// Answers one request against `kernel`. Never throws; malformed requests get ProtocolError.
[[nodiscard]] ojson handle_kernel_request(KernelBackend& kernel, const nlohmann::json& request);

/// Request loop until EOF on `in`. Each response is flushed before the next line is read.
void serve_kernel(std::istream& in, std::ostream& out, KernelBackend& kernel);

/// Backend that drives an external process speaking the wire protocol.
///
/// The process environment is one shared resource, so each instance keeps its own journal of
/// successful executions and the process is reset and replayed whenever a different instance
/// (a clone the engine threw away, say) touched it last. If the process dies or answers
/// garbage, the channel switches to an in-process MockKernel, replays the journal there and
/// records a warning.
class ProcessKernel final : public KernelBackend {
public:
    using Journal = std::vector<std::pair<std::string, std::string>>;

    /// Launches `argv[0]` with the remaining arguments. Throws IoError if it cannot start.
    static std::unique_ptr<ProcessKernel> launch(const std::vector<std::string>& argv);

    ExecResult execute(std::string_view cell_id, std::string_view source) override;
    [[nodiscard]] std::shared_ptr<const TableExtract> extract_table(std::string_view var) const override;
    [[nodiscard]] std::shared_ptr<const PlotExtract> extract_plot(std::string_view cell_id) const override;
    void reset() override;
    [[nodiscard]] std::unique_ptr<KernelBackend> clone() const override;
    [[nodiscard]] std::string digest() const override;
    /// {"journal":[[cell_id, source], ...]}
    [[nodiscard]] ojson snapshot() const override;
    void restore(const nlohmann::json& snapshot) override;
    [[nodiscard]] std::string warning() const override;

    [[nodiscard]] bool on_fallback() const;

    struct Channel;

private:
    explicit ProcessKernel(std::shared_ptr<Channel> channel) : channel_(std::move(channel)) {}

    ojson call(ojson request) const;

    std::shared_ptr<Channel> channel_;
    Journal journal_;
};

}  // namespace icon
