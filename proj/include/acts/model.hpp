#pragma once

#include "acts/attention.hpp"
#include "acts/autodiff.hpp"
#include "acts/dataset.hpp"
#include "acts/embedding.hpp"

#include "json.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace acts {

/// Component switches; all on is the full model, one off names an ablation.
struct ModelVariant {
    bool detrend_on = true;
    bool normalize_on = true;
    bool inter_series_on = true;
    bool features_on = true;

    /// "full", "d", "n", "i" or "f".
    static ModelVariant parse(std::string_view tag);
    std::string tag() const;
    bool operator==(const ModelVariant&) const = default;
};

struct ModelShape {
    std::size_t regions = 1;
    std::size_t hidden = 16;
    std::size_t segment_length = 7;
    std::size_t horizon = 7;
    std::size_t week_offset = 1;
    std::size_t kernel_width = 3;
    std::size_t static_dims = 0;
    std::size_t dynamic_dims = 0;
    bool weekly = false;
};

/// One forecasting problem: predict week `week_offset` after 1-based day `history_end`.
struct Target {
    std::size_t region = 0;
    std::size_t history_end = 0;
    std::size_t week_offset = 1;
};

struct RegionForecast {
    std::size_t region = 0;
    std::size_t history_end = 0;
    std::size_t week_offset = 1;
    std::vector<double> trend;     // linear extrapolation per day (0 without detrending)
    std::vector<double> residual;  // attention estimate per day
    std::vector<double> daily;     // clipped per-day sum
    double weekly = 0.0;           // clipped weekly sum
    std::vector<double> attention;
    std::vector<WindowPair> references;
};

/**
 * The inter-series attention forecaster: per-region Holt detrending, conv
 * encoders over normalized residual windows, and one attention head from
 * the target's latest segment onto every reference window.
 */
class ActsModel {
public:
    ActsModel() = default;
    ActsModel(const ModelShape& shape, const ModelVariant& variant);

    /// Holt rows from the data (a0 = x_1, b0 = x_2 - x_1), everything else random.
    void initialize(const Dataset& data, std::uint64_t seed);

    const ModelShape& shape() const { return shape_; }
    const ModelVariant& variant() const { return variant_; }

    std::vector<ad::Param*> parameters();
    std::vector<const ad::Param*> parameters() const;

    /// Mean per-target MAE (daily) or absolute weekly error, unclipped.
    ad::Var loss(ad::Tape& tape, const Dataset& data, std::span<const Target> batch);

    /// Forecast for `region` given the whole of `data` as history.
    RegionForecast forecast(const Dataset& data, std::size_t region, std::size_t week_offset = 0) const;
    std::vector<RegionForecast> forecast_all(const Dataset& data, std::size_t week_offset = 0) const;

    /// Query vector of every region's last segment ending at `history_end`.
    std::vector<std::vector<double>> queries(const Dataset& data, std::size_t history_end) const;

    /// Smallest history length with a non-empty reference set.
    std::size_t min_history(std::size_t week_offset) const;

    nlohmann::json to_json() const;
    static ActsModel from_json(const nlohmann::json& j);

    ad::Param holt;                 // regions x 4: a0, b0, raw_alpha, raw_beta
    ad::Param segment_kernels;      // d x (width * (1 + m_r))
    ad::Param development_kernels;  // d x width
    AttnParams attn;

private:
    struct Bound;
    struct Graph;
    struct Prediction;

    Bound bind(ad::Tape& tape);
    Graph build_graph(ad::Tape& tape, const Bound& b, const Dataset& data, std::size_t history_limit,
                      std::size_t last_window_end, std::size_t week_offset) const;
    Prediction predict(ad::Tape& tape, const Bound& b, const Graph& g, const Dataset& data, const Target& target,
                       std::vector<double>* weights) const;
    void check_data(const Dataset& data) const;
    bool uses_static() const { return variant_.features_on && shape_.static_dims > 0; }
    bool uses_dynamic() const { return variant_.features_on && shape_.dynamic_dims > 0; }

    ModelShape shape_;
    ModelVariant variant_;
};

}  // namespace acts
