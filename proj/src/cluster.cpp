#include "icon/cluster.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "icon/error.hpp"

namespace icon {

double squared_distance(const Point& a, const Point& b) noexcept {
    double sum = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        sum += diff * diff;
    }
    return sum;
}

namespace {

std::int64_t nearest(const Point& p, const std::vector<Point>& centroids) {
    std::int64_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<std::int64_t>(c);
        }
    }
    return best;
}

double sse(std::span<const Point> points, const std::vector<std::int64_t>& labels, const std::vector<Point>& centroids) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        total += squared_distance(points[i], centroids[static_cast<std::size_t>(labels[i])]);
    }
    return total;
}

// Farthest-first traversal from point 0; each pick maximizes the distance to the nearest
// chosen seed, ties to the lower index. Seeds are returned in input order.
std::vector<std::size_t> seed_indices(std::span<const Point> points, std::size_t k) {
    std::vector<std::size_t> seeds{0};
    std::vector<double> gap(points.size(), std::numeric_limits<double>::infinity());
    std::vector<bool> chosen(points.size(), false);
    chosen[0] = true;
    while (seeds.size() < k) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            gap[i] = std::min(gap[i], squared_distance(points[i], points[seeds.back()]));
        }
        std::size_t pick = points.size();
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (chosen[i]) continue;
            if (pick == points.size() || gap[i] > gap[pick]) pick = i;
        }
        chosen[pick] = true;
        seeds.push_back(pick);
    }
    std::sort(seeds.begin(), seeds.end());
    return seeds;
}

}  // namespace

KMeansResult kmeans_fit(std::span<const Point> points, std::int64_t k, int iters) {
    if (k < 1) {
        fail(ErrorCode::BadIndex, "k must be at least 1");
    }
    if (static_cast<std::size_t>(k) > points.size()) {
        fail(ErrorCode::KTooLarge, "k = " + std::to_string(k) + " exceeds " + std::to_string(points.size()) + " points");
    }
    if (iters < 1) {
        fail(ErrorCode::BadIndex, "iters must be at least 1");
    }
    const std::size_t dim = points.front().size();

    KMeansResult r;
    for (auto i : seed_indices(points, static_cast<std::size_t>(k))) r.centroids.push_back(points[i]);
    r.labels.assign(points.size(), -1);

    for (int it = 0; it < iters; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto label = nearest(points[i], r.centroids);
            if (label != r.labels[i]) {
                r.labels[i] = label;
                changed = true;
            }
        }
        r.sse_history.push_back(sse(points, r.labels, r.centroids));
        r.iterations = it + 1;
        if (!changed) {
            break;
        }

        std::vector<Point> sums(static_cast<std::size_t>(k), Point(dim, 0.0));
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto c = static_cast<std::size_t>(r.labels[i]);
            ++counts[c];
            for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points[i][d];
        }
        for (std::size_t c = 0; c < sums.size(); ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t d = 0; d < dim; ++d) {
                r.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
            }
        }
    }
    return r;
}

std::vector<std::int64_t> kmeans(std::span<const Point> points, std::int64_t k, int iters) {
    return kmeans_fit(points, k, iters).labels;
}

std::vector<Edge> knn_graph(std::span<const Point> points, std::int64_t k) {
    if (k < 0) {
        fail(ErrorCode::BadIndex, "k must be non-negative");
    }
    if (static_cast<std::size_t>(k) >= points.size() && k > 0) {
        fail(ErrorCode::KTooLarge,
             "k = " + std::to_string(k) + " needs more than " + std::to_string(points.size()) + " points");
    }
    const auto kk = static_cast<std::size_t>(k);
    std::vector<Edge> edges;
    edges.reserve(points.size() * kk);
    std::vector<std::pair<double, std::size_t>> cand;
    for (std::size_t i = 0; i < points.size() && kk > 0; ++i) {
        cand.clear();
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j != i) cand.emplace_back(squared_distance(points[i], points[j]), j);
        }
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk), cand.end());
        for (std::size_t n = 0; n < kk; ++n) edges.emplace_back(i, cand[n].second);
    }
    return edges;
}

double directed_modularity(std::span<const Edge> edges, std::span<const std::int64_t> labels) {
    if (edges.empty()) {
        return 0.0;
    }
    const auto m = static_cast<double>(edges.size());
    std::vector<double> out_deg(labels.size(), 0.0);
    std::vector<double> in_deg(labels.size(), 0.0);
    double within = 0.0;
    for (const auto& [from, to] : edges) {
        out_deg[from] += 1.0;
        in_deg[to] += 1.0;
        if (labels[from] == labels[to]) within += 1.0;
    }
    // Sum over communities of (total out-degree * total in-degree), grouped by label.
    std::vector<std::pair<std::int64_t, std::size_t>> order;
    order.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) order.emplace_back(labels[i], i);
    std::sort(order.begin(), order.end());
    double expected = 0.0;
    for (std::size_t s = 0; s < order.size();) {
        double out_sum = 0.0;
        double in_sum = 0.0;
        std::size_t e = s;
        while (e < order.size() && order[e].first == order[s].first) {
            out_sum += out_deg[order[e].second];
            in_sum += in_deg[order[e].second];
            ++e;
        }
        expected += out_sum * in_sum;
        s = e;
    }
    return within / m - expected / (m * m);
}

}  // namespace icon
