#include "acts/embedding.hpp"

#include "acts/errors.hpp"

#include <cmath>

namespace acts {

namespace {

SegmentScale scale_of(std::span<const double> segment) {
    SegmentScale s;
    s.c_first = segment[0];
    double c = segment[0];
    for (std::size_t j = 1; j < segment.size(); ++j) c += segment[j];
    s.c_last = c;
    s.range = c - s.c_first;
    if (std::fabs(s.range) <= kDegenerateRange) s.range = 0.0;
    return s;
}

}  // namespace

NormalizedSegment cum_minmax_normalize(std::span<const double> residual_segment) {
    const std::size_t l = residual_segment.size();
    if (l < 2) throw ShapeError("normalization needs a window of at least 2 days");
    NormalizedSegment out;
    out.scale = scale_of(residual_segment);
    out.values.resize(l);
    if (out.scale.degenerate()) {
        for (std::size_t j = 0; j < l; ++j) out.values[j] = static_cast<double>(j) / static_cast<double>(l - 1);
        return out;
    }
    double c = residual_segment[0];
    out.values[0] = 0.0;
    for (std::size_t j = 1; j < l; ++j) {
        c += residual_segment[j];
        out.values[j] = (c - out.scale.c_first) / out.scale.range;
    }
    out.values[l - 1] = 1.0;
    return out;
}

std::vector<double> normalize_continuation(std::span<const double> continuation, const SegmentScale& scale) {
    std::vector<double> out(continuation.size(), 0.0);
    if (scale.degenerate()) return out;
    double acc = 0.0;
    for (std::size_t j = 0; j < continuation.size(); ++j) {
        acc += continuation[j];
        out[j] = 1.0 + acc / scale.range;
    }
    return out;
}

std::vector<double> inverse_normalize(std::span<const double> predicted, const SegmentScale& scale) {
    std::vector<double> out(predicted.size(), 0.0);
    if (scale.degenerate()) return out;
    double prev = scale.c_last;
    for (std::size_t j = 0; j < predicted.size(); ++j) {
        const double cum = scale.c_first + predicted[j] * scale.range;
        out[j] = cum - prev;
        prev = cum;
    }
    return out;
}

ad::Var normalize_window(ad::Var residuals, std::size_t seg_begin, std::size_t seg_len, std::size_t cont_begin,
                         std::size_t cont_len, SegmentScale* scale_out) {
    auto r = residuals.value();
    if (seg_begin + seg_len > r.size() || (cont_len > 0 && cont_begin + cont_len > r.size())) {
        throw UsageError("normalize_window: window reaches past the available residuals");
    }
    auto seg = r.subspan(seg_begin, seg_len);
    auto normalized = cum_minmax_normalize(seg);
    auto cont = normalize_continuation(r.subspan(cont_len > 0 ? cont_begin : 0, cont_len), normalized.scale);
    if (scale_out != nullptr) *scale_out = normalized.scale;
    std::vector<double> out = std::move(normalized.values);
    out.insert(out.end(), cont.begin(), cont.end());
    const SegmentScale scale = normalized.scale;
    const std::size_t total = out.size();
    if (scale.degenerate()) return residuals.tape()->constant(std::move(out), {total, 1});

    std::vector<double> values = out;
    return residuals.tape()->record(
        std::move(out), {total, 1},
        [residuals, seg_begin, seg_len, cont_begin, cont_len, range = scale.range,
         values = std::move(values)](ad::Tape& t, std::span<const double> g) {
            // Segment: c_j = S_j / R with S_j = x_1 + ... + x_j (x_0 excluded) and R = S_{l-1}.
            // Continuation: c_j = 1 + T_j / R.  dc/dR = -(c - offset) / R.
            auto gr = t.grad(residuals);
            double g_range = 0.0;
            for (std::size_t j = 0; j < seg_len; ++j) g_range -= g[j] * values[j] / range;
            for (std::size_t j = 0; j < cont_len; ++j) g_range -= g[seg_len + j] * (values[seg_len + j] - 1.0) / range;
            // Suffix sums distribute dc_j/dx_m = 1/R for m <= j.
            double acc = 0.0;
            for (std::size_t j = seg_len; j-- > 1;) {
                acc += g[j] / range;
                gr[seg_begin + j] += acc + g_range;
            }
            acc = 0.0;
            for (std::size_t j = cont_len; j-- > 0;) {
                acc += g[seg_len + j] / range;
                gr[cont_begin + j] += acc;
            }
        });
}

ad::Var inverse_normalize(ad::Var predicted, ad::Var residuals, std::size_t seg_begin, std::size_t seg_len) {
    auto r = residuals.value();
    if (seg_begin + seg_len > r.size() || seg_len < 2) throw UsageError("inverse_normalize: bad segment");
    const SegmentScale scale = scale_of(r.subspan(seg_begin, seg_len));
    auto p = predicted.value();
    auto out = inverse_normalize(p, scale);
    const std::size_t n = out.size();
    if (scale.degenerate()) return predicted.tape()->constant(std::move(out), {n, 1});
    return predicted.tape()->record(
        std::move(out), {n, 1},
        [predicted, residuals, seg_begin, seg_len, range = scale.range](ad::Tape& t, std::span<const double> g) {
            // y_j = R (p_j - p_{j-1}) with p_{-1} = 1.
            auto pv = t.value(predicted);
            auto gp = t.grad(predicted);
            double g_range = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
                const double prev = j == 0 ? 1.0 : pv[j - 1];
                g_range += g[j] * (pv[j] - prev);
                gp[j] += g[j] * range;
                if (j > 0) gp[j - 1] -= g[j] * range;
            }
            auto gr = t.grad(residuals);
            for (std::size_t j = 1; j < seg_len; ++j) gr[seg_begin + j] += g_range;
        });
}

ad::Var segment_embed(ad::Var normalized, std::span<const double> features, ad::Var kernels, const ConvEncoder& enc) {
    const std::size_t l = normalized.size();
    ad::Var input = normalized;
    if (!features.empty()) {
        if (features.size() % l != 0) throw ShapeError("segment_embed: features do not tile the window");
        const std::size_t m = features.size() / l;
        input = ad::hstack(normalized, normalized.tape()->constant({features.begin(), features.end()}, {l, m}));
    }
    if (input.shape().cols != enc.channels) {
        throw ShapeError("segment_embed: " + std::to_string(input.shape().cols) + " channels, encoder expects " +
                         std::to_string(enc.channels));
    }
    return ad::avg_pool(ad::conv1d(input, kernels, enc.width));
}

ad::Var development_embed(ad::Var continuation, ad::Var kernels, const ConvEncoder& enc) {
    if (enc.channels != 1) throw ShapeError("development encoder takes a single channel");
    return ad::avg_pool(ad::conv1d(continuation, kernels, enc.width));
}

}  // namespace acts
