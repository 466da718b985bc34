#pragma once

#include "acts/autodiff.hpp"

#include <span>
#include <vector>

namespace acts {

/// Ranges with magnitude at or below this are treated as flat windows.
inline constexpr double kDegenerateRange = 1e-8;

/// Cumulative-sum constants of one residual window.
struct SegmentScale {
    double c_first = 0.0;
    double range = 0.0;
    double c_last = 0.0;

    bool degenerate() const { return range == 0.0; }
};

struct NormalizedSegment {
    std::vector<double> values;
    SegmentScale scale;
};

/**
 * Min-max scaling of the window's cumulative sum so the endpoints land on
 * 0 and 1. A flat window (|range| <= kDegenerateRange) yields the uniform
 * ramp (j - 1) / (l - 1) with range 0.
 */
NormalizedSegment cum_minmax_normalize(std::span<const double> residual_segment);

/**
 * Normalizes residuals following a segment with that segment's scale,
 * continuing its cumulative sum from the value 1:
 * c_j = 1 + (x_1 + ... + x_j) / range. Zero for a degenerate scale.
 */
std::vector<double> normalize_continuation(std::span<const double> continuation, const SegmentScale& scale);

/// Maps normalized cumulative predictions back to daily residual increments.
std::vector<double> inverse_normalize(std::span<const double> predicted, const SegmentScale& scale);

/**
 * Differentiable normalization of residuals[seg_begin, seg_begin + seg_len)
 * followed by its continuation residuals[cont_begin, cont_begin + cont_len).
 * Output is (seg_len + cont_len) x 1.
 */
ad::Var normalize_window(ad::Var residuals, std::size_t seg_begin, std::size_t seg_len, std::size_t cont_begin,
                         std::size_t cont_len, SegmentScale* scale_out = nullptr);

/// Differentiable inverse_normalize using the scale of residuals[seg_begin, seg_begin + seg_len).
ad::Var inverse_normalize(ad::Var predicted, ad::Var residuals, std::size_t seg_begin, std::size_t seg_len);

/// Convolution widths and channel counts of the two encoders.
struct ConvEncoder {
    std::size_t width = 3;
    std::size_t channels = 1;
    std::size_t hidden = 16;

    std::size_t kernel_cols() const { return width * channels; }
};

/**
 * AvgPool(Conv([c; r])) over a window. `features` is l x m_r row-major
 * dynamic features (empty when absent); `kernels` is hidden x (width * (1 + m_r)).
 */
ad::Var segment_embed(ad::Var normalized, std::span<const double> features, ad::Var kernels, const ConvEncoder& enc);

/// AvgPool(Conv(c)) over a normalized continuation.
ad::Var development_embed(ad::Var continuation, ad::Var kernels, const ConvEncoder& enc);

}  // namespace acts
