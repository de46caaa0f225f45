#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "icon/cluster.hpp"

// Slow, obviously-correct reference computations shared by the unit tests and the acceptance run.
namespace icon::test {

[[nodiscard]] double sse_of(const std::vector<Point>& pts, const std::vector<std::int64_t>& labels, std::int64_t k);

/// Minimal-SSE 2-partition by enumerating every assignment.
[[nodiscard]] std::vector<std::int64_t> brute_force_two_partition(const std::vector<Point>& pts);

[[nodiscard]] bool same_partition(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b);

/// Exhaustive neighbor search: every other point ordered by (squared distance, index).
[[nodiscard]] std::vector<Edge> knn_oracle(const std::vector<Point>& pts, std::size_t k);

/// Every CSV field parsed as a number (both bundled datasets are all-numeric).
[[nodiscard]] std::vector<std::vector<double>> csv_numbers(const std::string& file);

/// Fixture ranges as written in the parameter cells.
inline constexpr std::pair<std::int64_t, std::int64_t> kKMeansRange{2, 6};
inline constexpr std::pair<std::int64_t, std::int64_t> kKnnRange{2, 8};

struct SweepOracle {
    std::size_t removed = 0;
    std::map<std::pair<std::int64_t, std::int64_t>, double> score;
    std::int64_t km = 0;
    std::int64_t kn = 0;
};

/// Exploratory task recomputed from the iris CSV: drop rows outside the sepal-width band,
/// cluster with plain Lloyd iterations, build the KNN adjacency matrix and score Newman's
/// directed modularity for every parameter pair. Ties keep the first pair in sweep order.
[[nodiscard]] const SweepOracle& exploratory_sweep_oracle();

}  // namespace icon::test
