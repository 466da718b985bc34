#include "acts/analysis.hpp"

#include "acts/csv.hpp"
#include "acts/errors.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>

namespace acts {

std::vector<Point> extract_queries(const ActsModel& model, const Dataset& data, std::size_t history_end) {
    return model.queries(data, history_end);
}

namespace {

double squared_distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

std::vector<Point> plus_plus_seeds(const std::vector<Point>& points, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = points.size();
    std::vector<Point> centroids;
    centroids.push_back(points[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(points[i], centroids.back()));
            total += nearest[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double r = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (pick = 0; pick + 1 < n; ++pick) {
                r -= nearest[pick];
                if (r < 0.0) break;
            }
        } else {
            // Every point already coincides with a centroid.
            pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        }
        centroids.push_back(points[pick]);
    }
    return centroids;
}

ClusterAssignment lloyd(const std::vector<Point>& points, std::vector<Point> centroids, std::size_t max_iterations) {
    const std::size_t n = points.size(), k = centroids.size(), dim = points.front().size();
    ClusterAssignment out;
    out.labels.assign(n, k);
    for (std::size_t it = 0; it < max_iterations; ++it) {
        bool changed = false;
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = squared_distance(points[i], centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (out.labels[i] != best) changed = true;
            out.labels[i] = best;
            sse += best_d;
        }
        out.sse_trace.push_back(sse);
        out.iterations = it + 1;
        if (!changed) break;
        std::vector<Point> sums(k, Point(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < dim; ++j) sums[out.labels[i]][j] += points[i][j];
            ++counts[out.labels[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            // An emptied cluster keeps its old centroid.
            if (counts[c] == 0) continue;
            for (std::size_t j = 0; j < dim; ++j) centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
        }
    }
    out.sse = out.sse_trace.back();
    out.centroids = std::move(centroids);
    return out;
}

}  // namespace

ClusterAssignment kmeans(const std::vector<Point>& points, std::size_t k, std::uint64_t seed,
                         const KMeansOptions& options) {
    if (points.empty()) throw UsageError("kmeans needs at least one point");
    if (k == 0 || k > points.size()) {
        throw UsageError("K must lie in [1, " + std::to_string(points.size()) + "], got " + std::to_string(k));
    }
    const std::size_t dim = points.front().size();
    for (const auto& p : points) {
        if (p.size() != dim) throw ShapeError("kmeans points must share one dimension");
    }
    std::mt19937_64 rng(seed);
    ClusterAssignment best;
    best.sse = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::max<std::size_t>(1, options.restarts); ++r) {
        auto run = lloyd(points, plus_plus_seeds(points, k, rng), options.max_iterations);
        if (run.sse < best.sse) best = std::move(run);
    }
    return best;
}

std::vector<double> elbow_curve(const std::vector<Point>& points, std::size_t k_max, std::size_t seeds,
                                std::uint64_t base_seed) {
    if (k_max == 0 || k_max > points.size()) throw UsageError("K_max must lie in [1, number of points]");
    std::vector<double> out;
    for (std::size_t k = 1; k <= k_max; ++k) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < std::max<std::size_t>(1, seeds); ++s) {
            best = std::min(best, kmeans(points, k, base_seed + s).sse);
        }
        // A larger K can always match the smaller one's partition.
        if (!out.empty()) best = std::min(best, out.back());
        out.push_back(best);
    }
    return out;
}

double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (a.size() != b.size()) throw ShapeError("label vectors differ in length");
    const std::size_t n = a.size();
    if (n < 2) return 1.0;
    std::map<std::pair<std::size_t, std::size_t>, double> table;
    std::map<std::size_t, double> rows, cols;
    for (std::size_t i = 0; i < n; ++i) {
        table[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
    double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (const auto& [key, c] : table) index += pairs(c);
    for (const auto& [key, c] : rows) sum_rows += pairs(c);
    for (const auto& [key, c] : cols) sum_cols += pairs(c);
    const double expected = sum_rows * sum_cols / pairs(static_cast<double>(n));
    const double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected) return 1.0;  // both partitions trivial
    return (index - expected) / (max_index - expected);
}

std::string clusters_csv(const std::vector<std::string>& regions, const ClusterAssignment& assignment) {
    if (regions.size() != assignment.labels.size()) throw ShapeError("one region name per label expected");
    std::string out = "region,cluster\n";
    for (std::size_t i = 0; i < regions.size(); ++i) {
        out += csv::quote_if_needed(regions[i]) + ',' + std::to_string(assignment.labels[i]) + '\n';
    }
    return out;
}

std::string elbow_csv(const std::vector<double>& sse) {
    std::string out = "K,sse\n";
    for (std::size_t k = 0; k < sse.size(); ++k) out += std::to_string(k + 1) + ',' + csv::format_double(sse[k]) + '\n';
    return out;
}

}  // namespace acts
