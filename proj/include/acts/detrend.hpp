#pragma once

#include "acts/autodiff.hpp"

#include <span>
#include <vector>

namespace acts {

double logistic(double x);
double logit(double p);

/// Holt smoother parameters; the smoothing coefficients live in logit space.
struct HoltParams {
    double a0 = 0.0;  // initial level
    double b0 = 0.0;  // initial slope per day
    double raw_alpha = 0.0;
    double raw_beta = 0.0;

    double alpha() const { return logistic(raw_alpha); }
    double beta() const { return logistic(raw_beta); }

    static HoltParams from_coefficients(double a0, double b0, double alpha, double beta);
    /// a0 = x_1, b0 = x_2 - x_1 (0 for a single point), alpha = beta = 0.5.
    static HoltParams initial_for(std::span<const double> series);
};

/// Levels, slopes and residuals for t = 1..T (stored 0-based).
struct TrendState {
    std::vector<double> levels;
    std::vector<double> slopes;
    std::vector<double> residuals;
};

/**
 * a_t = alpha x_t + (1 - alpha)(a_{t-1} + b_{t-1})
 * b_t = beta (a_t - a_{t-1}) + (1 - beta) b_{t-1}
 * residual_t = x_t - a_t
 */
TrendState holt_filter(std::span<const double> series, const HoltParams& params);

/// a_T + h b_T.
inline double holt_extrapolate(double level, double slope, double h) { return level + h * slope; }

/**
 * Differentiable Holt filter. `params` is an N x 4 node of
 * (a0, b0, raw_alpha, raw_beta) rows; `region` selects the row.
 * Returns a 2 x n node: levels in row 0, slopes in row 1.
 */
ad::Var holt_filter(ad::Var params, std::size_t region, std::span<const double> series);

/**
 * Linear trend values a_T + h b_T for h = first_step .. first_step + count - 1,
 * read from the 2 x n output of holt_filter at 1-based history end T.
 */
ad::Var trend_extrapolate(ad::Var levels_slopes, std::size_t history_end, std::size_t first_step, std::size_t count);

}  // namespace acts
