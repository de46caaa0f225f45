#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "icon/json_codec.hpp"
#include "icon/table.hpp"

namespace icon {

/// Static render summary of a cell's plot, as a notebook would show it inline.
struct DisplayDescriptor {
    PlotKind kind = PlotKind::Scatter2D;
    std::vector<std::string> axis_names;
    std::size_t point_count = 0;
    friend bool operator==(const DisplayDescriptor&, const DisplayDescriptor&) = default;
};

struct ExecResult {
    std::string cell_id;
    bool ok = true;
    std::string error;  // set iff !ok
    std::vector<std::string> defined_vars;  // empty iff !ok
    std::optional<DisplayDescriptor> display;
    friend bool operator==(const ExecResult&, const ExecResult&) = default;
};

[[nodiscard]] ojson exec_result_to_json(const ExecResult& r);
[[nodiscard]] ExecResult exec_result_from_json(const nlohmann::json& j);

/// Number of Lloyd iterations the kmeans builtin runs at most.
inline constexpr int kKernelKMeansIterations = 100;

/// Execution substrate behind the engine. Implementations are driven from one thread at a time.
class KernelBackend {
public:
    virtual ~KernelBackend() = default;

    /// Runs every statement of `source` against the variable environment. A failing cell
    /// leaves the environment untouched and reports the failure in the result.
    virtual ExecResult execute(std::string_view cell_id, std::string_view source) = 0;

    /// Throws UnknownVariable / NotTabular.
    [[nodiscard]] virtual std::shared_ptr<const TableExtract> extract_table(std::string_view var) const = 0;

    /// Plot displayed by the cell's last successful run. Throws NotExecuted.
    [[nodiscard]] virtual std::shared_ptr<const PlotExtract> extract_plot(std::string_view cell_id) const = 0;

    virtual void reset() = 0;

    /// Independent copy of the environment, used to make engine commands atomic.
    [[nodiscard]] virtual std::unique_ptr<KernelBackend> clone() const = 0;

    /// Stable digest of the environment for state hashing.
    [[nodiscard]] virtual std::string digest() const = 0;

    /// Canonical environment snapshot (persisted with sessions).
    [[nodiscard]] virtual ojson snapshot() const = 0;
    virtual void restore(const nlohmann::json& snapshot) = 0;

    /// Degradation notice for the session to surface (e.g. an external backend fell back).
    [[nodiscard]] virtual std::string warning() const { return {}; }
};

/// Deterministic in-process interpreter for the cell grammar, with wine/iris datasets and the
/// kmeans / knn_graph builtins.
class MockKernel final : public KernelBackend {
public:
    using Labels = std::vector<std::int64_t>;
    using KernelValue = std::variant<std::shared_ptr<const TableExtract>, double, std::shared_ptr<const Labels>>;

    ExecResult execute(std::string_view cell_id, std::string_view source) override;
    [[nodiscard]] std::shared_ptr<const TableExtract> extract_table(std::string_view var) const override;
    [[nodiscard]] std::shared_ptr<const PlotExtract> extract_plot(std::string_view cell_id) const override;
    void reset() override;
    [[nodiscard]] std::unique_ptr<KernelBackend> clone() const override;
    [[nodiscard]] std::string digest() const override;
    [[nodiscard]] ojson snapshot() const override;
    void restore(const nlohmann::json& snapshot) override;

    [[nodiscard]] const std::map<std::string, KernelValue, std::less<>>& environment() const noexcept { return env_; }

private:
    std::map<std::string, KernelValue, std::less<>> env_;
    std::map<std::string, std::shared_ptr<const PlotExtract>, std::less<>> displays_;
};

}  // namespace icon
