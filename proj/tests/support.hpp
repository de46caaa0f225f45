#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "icon/artifacts.hpp"
#include "icon/error.hpp"
#include "icon/grammar.hpp"
#include "icon/notebook.hpp"
#include "icon/table.hpp"
#include "json.hpp"

namespace icon::test {

using Rng = std::mt19937_64;

[[nodiscard]] Notebook study_notebook();
/// The fixture file as written, including its hand-assigned "kind" labels.
[[nodiscard]] nlohmann::json study_notebook_labels();

/// Path of a file under the repository's data/ directory.
[[nodiscard]] std::string data_path(const std::string& relative);

/// Plain comma-split CSV reader used as an oracle against the library's dataset loader.
/// Every field that std::stod consumes completely is a number.
struct CsvOracle {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> cells;
};
[[nodiscard]] CsvOracle read_csv_oracle(const std::string& path);

/// Code of the icon::Error thrown by fn; nullopt when it returns normally.
template <class Fn>
std::optional<ErrorCode> error_code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

/// One window holding the given cells (id, source), kinds classified.
[[nodiscard]] Notebook notebook_of(const std::vector<std::pair<std::string, std::string>>& cells);

/// Generates code for the artifact into an Empty cell, runs it in a fresh mock kernel and
/// compares the re-extraction against the artifact. Returns an empty string on success,
/// otherwise a description of the mismatch.
[[nodiscard]] std::string codegen_round_trip_failure(const Artifact& artifact);

// Generators. Everything they produce is valid input for the component under test.
[[nodiscard]] std::string random_identifier(Rng& rng);
[[nodiscard]] std::string random_text(Rng& rng, std::size_t max_len);
[[nodiscard]] double random_double(Rng& rng, bool allow_special);
[[nodiscard]] Statement random_statement(Rng& rng);
[[nodiscard]] CellAst random_ast(Rng& rng, std::size_t max_statements);

/// Random table of at most max_rows x max_cols (at least one column) with unique column names
/// and mixed dtypes.
[[nodiscard]] TableExtract random_table(Rng& rng, std::size_t max_rows, std::size_t max_cols,
                                        bool allow_special = true);

/// Table artifact over a random table with random sorts, filters and exclusions applied.
[[nodiscard]] TableArtifact random_table_artifact(Rng& rng, std::size_t max_rows, std::size_t max_cols);

/// 2D or 3D scatter artifact with random points, colors and point removals.
[[nodiscard]] VisArtifact random_scatter_artifact(Rng& rng, std::size_t max_points);

}  // namespace icon::test
