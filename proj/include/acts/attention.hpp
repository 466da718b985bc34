#pragma once

#include "acts/autodiff.hpp"
#include "acts/embedding.hpp"

#include <random>
#include <span>
#include <vector>

namespace acts {

/// Projection matrices of the attention block (no biases).
struct AttnParams {
    ad::Param query;          // d x d
    ad::Param key;            // d x d
    ad::Param value;          // d x d
    ad::Param feature_query;  // d x m
    ad::Param feature_key;    // d x m
    ad::Param output;         // H x d

    AttnParams() = default;
    AttnParams(std::size_t hidden, std::size_t static_dims, std::size_t horizon);

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every matrix.
    void randomize(std::mt19937_64& rng);

    std::size_t hidden() const { return query.shape().rows; }
    std::size_t static_dims() const { return feature_query.shape().cols; }
    std::size_t horizon() const { return output.shape().rows; }
};

struct QKV {
    std::vector<double> q;
    std::vector<double> k;
    std::vector<double> v;
};

/**
 * q = W_Q p + W_uq u, k = W_K p + W_uk u, v = W_V g.
 * An empty `u` drops the feature terms.
 */
QKV project_qkv(std::span<const double> p, std::span<const double> g, std::span<const double> u,
                const AttnParams& params);

struct AttentionResult {
    std::vector<double> value;
    std::vector<double> weights;
};

/// Softmax of raw inner products <q, k_r> over the rows; weighted sum of values.
AttentionResult attend(std::span<const double> query, const std::vector<std::vector<double>>& keys,
                       const std::vector<std::vector<double>>& values);

/// max(0, trend_t) + max(0, residual_t) per day.
std::vector<double> combine_clipped(std::span<const double> trend, std::span<const double> residual);
/// max(0, sum trend) + max(0, sum residual) over one week.
double combine_clipped_weekly(std::span<const double> trend, std::span<const double> residual);

/**
 * Final daily forecast from an attended value: W_out v, inverse-normalized
 * with the target's scale, added to the clipped trend.
 */
std::vector<double> assemble_forecast(std::span<const double> attended, const SegmentScale& scale,
                                      std::span<const double> trend, const AttnParams& params);

}  // namespace acts
