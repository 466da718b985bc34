#include "acts/detrend.hpp"

#include "acts/errors.hpp"

#include <cmath>

namespace acts {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

HoltParams HoltParams::from_coefficients(double a0, double b0, double alpha, double beta) {
    return {a0, b0, logit(alpha), logit(beta)};
}

HoltParams HoltParams::initial_for(std::span<const double> series) {
    HoltParams p;
    if (!series.empty()) p.a0 = series[0];
    if (series.size() >= 2) p.b0 = series[1] - series[0];
    return p;
}

TrendState holt_filter(std::span<const double> series, const HoltParams& params) {
    const double alpha = params.alpha(), beta = params.beta();
    TrendState s;
    s.levels.resize(series.size());
    s.slopes.resize(series.size());
    s.residuals.resize(series.size());
    double a_prev = params.a0, b_prev = params.b0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        const double a = alpha * series[t] + (1.0 - alpha) * (a_prev + b_prev);
        const double b = beta * (a - a_prev) + (1.0 - beta) * b_prev;
        s.levels[t] = a;
        s.slopes[t] = b;
        s.residuals[t] = series[t] - a;
        a_prev = a;
        b_prev = b;
    }
    return s;
}

ad::Var holt_filter(ad::Var params, std::size_t region, std::span<const double> series) {
    const auto shape = params.shape();
    if (shape.cols != 4 || region >= shape.rows) {
        throw ShapeError("holt_filter: params " + ad::to_string(shape) + " has no row " + std::to_string(region));
    }
    const std::size_t n = series.size();
    if (n == 0) throw ShapeError("holt_filter: empty series");
    auto pv = params.value();
    const HoltParams hp{pv[region * 4], pv[region * 4 + 1], pv[region * 4 + 2], pv[region * 4 + 3]};
    auto state = holt_filter(series, hp);
    std::vector<double> out(2 * n);
    std::copy(state.levels.begin(), state.levels.end(), out.begin());
    std::copy(state.slopes.begin(), state.slopes.end(), out.begin() + static_cast<std::ptrdiff_t>(n));

    std::vector<double> x(series.begin(), series.end());
    return params.tape()->record(
        std::move(out), {2, n},
        [params, region, hp, x = std::move(x), levels = std::move(state.levels),
         slopes = std::move(state.slopes)](ad::Tape& t, std::span<const double> g) {
            const std::size_t n = x.size();
            const double alpha = hp.alpha(), beta = hp.beta();
            double carry_a = 0.0, carry_b = 0.0;  // adjoints flowing into (a_{t-1}, b_{t-1})
            double g_alpha = 0.0, g_beta = 0.0;
            for (std::size_t s = n; s-- > 0;) {
                const double a_prev = s == 0 ? hp.a0 : levels[s - 1];
                const double b_prev = s == 0 ? hp.b0 : slopes[s - 1];
                double adj_a = g[s] + carry_a;
                const double adj_b = g[n + s] + carry_b;
                // b_s = beta (a_s - a_prev) + (1 - beta) b_prev
                adj_a += beta * adj_b;
                double next_a = -beta * adj_b;
                double next_b = (1.0 - beta) * adj_b;
                g_beta += (levels[s] - a_prev - b_prev) * adj_b;
                // a_s = alpha x_s + (1 - alpha)(a_prev + b_prev)
                next_a += (1.0 - alpha) * adj_a;
                next_b += (1.0 - alpha) * adj_a;
                g_alpha += (x[s] - a_prev - b_prev) * adj_a;
                carry_a = next_a;
                carry_b = next_b;
            }
            auto gp = t.grad(params);
            gp[region * 4] += carry_a;
            gp[region * 4 + 1] += carry_b;
            gp[region * 4 + 2] += g_alpha * alpha * (1.0 - alpha);
            gp[region * 4 + 3] += g_beta * beta * (1.0 - beta);
        });
}

ad::Var trend_extrapolate(ad::Var levels_slopes, std::size_t history_end, std::size_t first_step, std::size_t count) {
    const auto shape = levels_slopes.shape();
    if (shape.rows != 2 || history_end == 0 || history_end > shape.cols) {
        throw ShapeError("trend_extrapolate: history end " + std::to_string(history_end) + " outside " +
                         ad::to_string(shape));
    }
    const std::size_t n = shape.cols, idx = history_end - 1;
    auto v = levels_slopes.value();
    const double a = v[idx], b = v[n + idx];
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) out[j] = holt_extrapolate(a, b, static_cast<double>(first_step + j));
    return levels_slopes.tape()->record(std::move(out), {count, 1},
                                        [levels_slopes, n, idx, first_step](ad::Tape& t, std::span<const double> g) {
                                            auto gl = t.grad(levels_slopes);
                                            for (std::size_t j = 0; j < g.size(); ++j) {
                                                gl[idx] += g[j];
                                                gl[n + idx] += g[j] * static_cast<double>(first_step + j);
                                            }
                                        });
}

}  // namespace acts
