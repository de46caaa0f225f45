#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace icon {

using Point = std::vector<double>;
using Edge = std::pair<std::size_t, std::size_t>;

struct KMeansResult {
    std::vector<std::int64_t> labels;
    std::vector<Point> centroids;
    /// Within-cluster sum of squares after each assignment step.
    std::vector<double> sse_history;
    int iterations = 0;
};

/// Lloyd's algorithm seeded by farthest-first traversal from the first point (seeds kept in
/// input order, so k = |points| labels every point by its index). Distance ties go to the lowest centroid
/// index; an emptied cluster keeps its previous centroid. Stops early once assignments settle.
/// Throws KTooLarge when k exceeds the point count, BadIndex for k < 1 or iters < 1.
[[nodiscard]] KMeansResult kmeans_fit(std::span<const Point> points, std::int64_t k, int iters);

[[nodiscard]] std::vector<std::int64_t> kmeans(std::span<const Point> points, std::int64_t k, int iters = 100);

/// Each point gets k out-edges to its nearest neighbors (Euclidean, ties to the lower index),
/// listed in source order then by increasing distance. Throws KTooLarge unless k < |points|.
[[nodiscard]] std::vector<Edge> knn_graph(std::span<const Point> points, std::int64_t k);

[[nodiscard]] double squared_distance(const Point& a, const Point& b) noexcept;

/// Newman modularity of a directed graph under a labeling; 0 for an edgeless graph.
[[nodiscard]] double directed_modularity(std::span<const Edge> edges, std::span<const std::int64_t> labels);

}  // namespace icon
