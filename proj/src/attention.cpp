#include "acts/attention.hpp"

#include "acts/errors.hpp"

#include <algorithm>
#include <cmath>

namespace acts {

namespace {

void fill_uniform(ad::Param& p, std::size_t fan_in, std::mt19937_64& rng) {
    if (p.size() == 0) return;
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : p.values()) v = dist(rng);
}

std::vector<double> matvec(const ad::Param& m, std::span<const double> x) {
    const auto s = m.shape();
    if (x.size() != s.cols) {
        throw ShapeError("'" + m.name() + "' is " + ad::to_string(s) + " but input has " + std::to_string(x.size()) +
                         " entries");
    }
    std::vector<double> out(s.rows, 0.0);
    for (std::size_t r = 0; r < s.rows; ++r) {
        for (std::size_t c = 0; c < s.cols; ++c) out[r] += m[r * s.cols + c] * x[c];
    }
    return out;
}

}  // namespace

AttnParams::AttnParams(std::size_t hidden, std::size_t static_dims, std::size_t horizon)
    : query("attn.query", {hidden, hidden}),
      key("attn.key", {hidden, hidden}),
      value("attn.value", {hidden, hidden}),
      feature_query("attn.feature_query", {hidden, static_dims}),
      feature_key("attn.feature_key", {hidden, static_dims}),
      output("attn.output", {horizon, hidden}) {}

void AttnParams::randomize(std::mt19937_64& rng) {
    const std::size_t d = hidden(), m = static_dims();
    fill_uniform(query, d, rng);
    fill_uniform(key, d, rng);
    fill_uniform(value, d, rng);
    fill_uniform(feature_query, m, rng);
    fill_uniform(feature_key, m, rng);
    fill_uniform(output, d, rng);
}

QKV project_qkv(std::span<const double> p, std::span<const double> g, std::span<const double> u,
                const AttnParams& params) {
    QKV out{matvec(params.query, p), matvec(params.key, p), matvec(params.value, g)};
    if (!u.empty()) {
        auto fq = matvec(params.feature_query, u);
        auto fk = matvec(params.feature_key, u);
        for (std::size_t j = 0; j < out.q.size(); ++j) {
            out.q[j] += fq[j];
            out.k[j] += fk[j];
        }
    }
    return out;
}

AttentionResult attend(std::span<const double> query, const std::vector<std::vector<double>>& keys,
                       const std::vector<std::vector<double>>& values) {
    if (keys.empty()) {
        throw UsageError("no reference windows to attend over; supply a longer history or a shorter segment length");
    }
    if (keys.size() != values.size()) throw ShapeError("attend: key and value counts differ");
    const std::size_t d = query.size(), dv = values.front().size();
    std::vector<double> flat_k, flat_v;
    flat_k.reserve(keys.size() * d);
    flat_v.reserve(values.size() * dv);
    for (std::size_t r = 0; r < keys.size(); ++r) {
        if (keys[r].size() != d || values[r].size() != dv) throw ShapeError("attend: ragged keys or values");
        flat_k.insert(flat_k.end(), keys[r].begin(), keys[r].end());
        flat_v.insert(flat_v.end(), values[r].begin(), values[r].end());
    }
    ad::Tape tape;
    auto q = tape.constant({query.begin(), query.end()});
    auto k = tape.constant(std::move(flat_k), {keys.size(), d});
    auto v = tape.constant(std::move(flat_v), {values.size(), dv});
    std::vector<std::size_t> rows(keys.size());
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
    AttentionResult result;
    auto out = ad::attend(q, k, v, rows, &result.weights);
    result.value.assign(out.value().begin(), out.value().end());
    return result;
}

std::vector<double> combine_clipped(std::span<const double> trend, std::span<const double> residual) {
    if (trend.size() != residual.size()) throw ShapeError("trend and residual horizons differ");
    std::vector<double> out(trend.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::max(0.0, trend[j]) + std::max(0.0, residual[j]);
    return out;
}

double combine_clipped_weekly(std::span<const double> trend, std::span<const double> residual) {
    double t = 0.0, r = 0.0;
    for (double v : trend) t += v;
    for (double v : residual) r += v;
    return std::max(0.0, t) + std::max(0.0, r);
}

std::vector<double> assemble_forecast(std::span<const double> attended, const SegmentScale& scale,
                                      std::span<const double> trend, const AttnParams& params) {
    auto predicted = matvec(params.output, attended);
    if (trend.size() != predicted.size()) throw ShapeError("assemble_forecast: trend must cover the horizon");
    return combine_clipped(trend, inverse_normalize(predicted, scale));
}

}  // namespace acts
