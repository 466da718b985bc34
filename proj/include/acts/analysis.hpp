#pragma once

#include "acts/dataset.hpp"
#include "acts/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace acts {

using Point = std::vector<double>;

/// Query vector of every region from its segment ending on 1-based day `history_end`.
std::vector<Point> extract_queries(const ActsModel& model, const Dataset& data, std::size_t history_end);

struct ClusterAssignment {
    std::vector<std::size_t> labels;  // per point, in [0, K)
    std::vector<Point> centroids;
    double sse = 0.0;
    std::vector<double> sse_trace;  // after each Lloyd assignment step
    std::size_t iterations = 0;
};

struct KMeansOptions {
    std::size_t restarts = 10;
    std::size_t max_iterations = 300;
};

/// k-means++ seeding then Lloyd iterations; the restart with the lowest sse wins.
ClusterAssignment kmeans(const std::vector<Point>& points, std::size_t k, std::uint64_t seed,
                         const KMeansOptions& options = {});

/// Best-of-`seeds` sse for K = 1..k_max, made non-increasing in K.
std::vector<double> elbow_curve(const std::vector<Point>& points, std::size_t k_max, std::size_t seeds = 10,
                                std::uint64_t base_seed = 1);

double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

/// `region,cluster`
std::string clusters_csv(const std::vector<std::string>& regions, const ClusterAssignment& assignment);
/// `K,sse`
std::string elbow_csv(const std::vector<double>& sse);

}  // namespace acts
