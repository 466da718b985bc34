#include "acts/model.hpp"

#include "acts/detrend.hpp"
#include "acts/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace acts {

ModelVariant ModelVariant::parse(std::string_view tag) {
    ModelVariant v;
    if (tag == "full") return v;
    if (tag == "d") v.detrend_on = false;
    else if (tag == "n") v.normalize_on = false;
    else if (tag == "i") v.inter_series_on = false;
    else if (tag == "f") v.features_on = false;
    else throw ConfigError("unknown variant '" + std::string(tag) + "' (expected full|d|n|i|f)");
    return v;
}

std::string ModelVariant::tag() const {
    std::string t;
    if (!detrend_on) t += 'd';
    if (!normalize_on) t += 'n';
    if (!inter_series_on) t += 'i';
    if (!features_on) t += 'f';
    return t.empty() ? "full" : t;
}

struct ActsModel::Bound {
    ad::Var holt, seg, dev, wq, wk, wv, wuq, wuk, wout;
};

struct ActsModel::Graph {
    std::vector<ad::Var> levels_slopes;  // per region, 2 x history_limit
    std::vector<ad::Var> residuals;      // per region
    ad::Var keys, values;                // one row per window, time-major
    std::size_t last_window_end = 0;
    std::size_t week_offset = 1;
    bool has_windows = false;
};

struct ActsModel::Prediction {
    ad::Var trend;
    ad::Var residual;
};

ActsModel::ActsModel(const ModelShape& shape, const ModelVariant& variant) : shape_(shape), variant_(variant) {
    if (shape_.segment_length < 2) throw ConfigError("segment length must be at least 2");
    if (shape_.kernel_width == 0 || shape_.kernel_width > shape_.segment_length ||
        shape_.kernel_width > shape_.horizon) {
        throw ConfigError("kernel width must be in [1, min(segment length, horizon)]");
    }
    if (shape_.hidden == 0 || shape_.horizon == 0 || shape_.week_offset == 0 || shape_.regions == 0) {
        throw ConfigError("model dimensions must be positive");
    }
    if (!variant_.features_on) {
        shape_.static_dims = 0;
        shape_.dynamic_dims = 0;
    }
    const std::size_t d = shape_.hidden, w = shape_.kernel_width;
    holt = ad::Param("holt", {shape_.regions, 4});
    segment_kernels = ad::Param("segment_kernels", {d, w * (1 + shape_.dynamic_dims)});
    development_kernels = ad::Param("development_kernels", {d, w});
    attn = AttnParams(d, shape_.static_dims, shape_.horizon);
}

void ActsModel::initialize(const Dataset& data, std::uint64_t seed) {
    check_data(data);
    for (std::size_t i = 0; i < shape_.regions; ++i) {
        auto hp = HoltParams::initial_for(data.values(i));
        holt[i * 4] = hp.a0;
        holt[i * 4 + 1] = hp.b0;
        holt[i * 4 + 2] = hp.raw_alpha;
        holt[i * 4 + 3] = hp.raw_beta;
    }
    std::mt19937_64 rng(seed);
    auto fill = [&](ad::Param& p, std::size_t fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (auto& v : p.values()) v = dist(rng);
    };
    fill(segment_kernels, segment_kernels.shape().cols);
    fill(development_kernels, development_kernels.shape().cols);
    attn.randomize(rng);
}

std::vector<ad::Param*> ActsModel::parameters() {
    return {&holt,      &segment_kernels, &development_kernels, &attn.query,      &attn.key,
            &attn.value, &attn.feature_query, &attn.feature_key, &attn.output};
}

std::vector<const ad::Param*> ActsModel::parameters() const {
    auto ps = const_cast<ActsModel*>(this)->parameters();
    return {ps.begin(), ps.end()};
}

std::size_t ActsModel::min_history(std::size_t week_offset) const {
    return shape_.segment_length + week_offset * shape_.horizon;
}

void ActsModel::check_data(const Dataset& data) const {
    if (data.regions() != shape_.regions) {
        throw ShapeError("model has " + std::to_string(shape_.regions) + " regions, data has " +
                         std::to_string(data.regions()));
    }
    if (uses_static() && data.static_dims() != shape_.static_dims) {
        throw ShapeError("model expects " + std::to_string(shape_.static_dims) + " static features");
    }
    if (uses_dynamic() && data.dynamic_dims() != shape_.dynamic_dims) {
        throw ShapeError("model expects " + std::to_string(shape_.dynamic_dims) + " dynamic features");
    }
}

ActsModel::Bound ActsModel::bind(ad::Tape& tape) {
    return {tape.param(holt),       tape.param(segment_kernels), tape.param(development_kernels),
            tape.param(attn.query), tape.param(attn.key),        tape.param(attn.value),
            tape.param(attn.feature_query), tape.param(attn.feature_key), tape.param(attn.output)};
}

ActsModel::Graph ActsModel::build_graph(ad::Tape& tape, const Bound& b, const Dataset& data,
                                        std::size_t history_limit, std::size_t last_window_end,
                                        std::size_t week_offset) const {
    const std::size_t n = shape_.regions, l = shape_.segment_length, H = shape_.horizon;
    Graph g;
    g.week_offset = week_offset;
    g.last_window_end = last_window_end;
    for (std::size_t i = 0; i < n; ++i) {
        auto x = data.values(i).first(history_limit);
        auto observed = tape.constant({x.begin(), x.end()});
        if (variant_.detrend_on) {
            auto ls = holt_filter(b.holt, i, x);
            g.levels_slopes.push_back(ls);
            g.residuals.push_back(ad::sub(observed, ad::row(ls, 0)));
        } else {
            g.residuals.push_back(observed);
        }
    }
    if (last_window_end < l) return g;

    const ConvEncoder seg_enc{shape_.kernel_width, 1 + (uses_dynamic() ? shape_.dynamic_dims : 0), shape_.hidden};
    const ConvEncoder dev_enc{shape_.kernel_width, 1, shape_.hidden};
    const std::size_t gap = (week_offset - 1) * H;
    std::vector<ad::Var> seg_rows, dev_rows;
    std::vector<double> static_rows;
    std::vector<double> feats;
    for (std::size_t t = l; t <= last_window_end; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            ad::Var seg, cont;
            if (variant_.normalize_on) {
                auto win = normalize_window(g.residuals[i], t - l, l, t + gap, H);
                seg = ad::slice(win, 0, l);
                cont = ad::slice(win, l, H);
            } else {
                seg = ad::slice(g.residuals[i], t - l, l);
                cont = ad::slice(g.residuals[i], t + gap, H);
            }
            feats.clear();
            if (uses_dynamic()) {
                for (std::size_t s = t - l; s < t; ++s) {
                    auto r = data.dynamic_features(i, s);
                    feats.insert(feats.end(), r.begin(), r.end());
                }
            }
            seg_rows.push_back(segment_embed(seg, feats, b.seg, seg_enc));
            dev_rows.push_back(development_embed(cont, b.dev, dev_enc));
            if (uses_static()) {
                auto u = data.static_features(i);
                static_rows.insert(static_rows.end(), u.begin(), u.end());
            }
        }
    }
    auto p = ad::stack_rows(seg_rows);
    auto dev = ad::stack_rows(dev_rows);
    g.keys = ad::matmul_nt(p, b.wk);
    if (uses_static()) {
        auto u = tape.constant(std::move(static_rows), {seg_rows.size(), shape_.static_dims});
        g.keys = ad::add(g.keys, ad::matmul_nt(u, b.wuk));
    }
    g.values = ad::matmul_nt(dev, b.wv);
    g.has_windows = true;
    return g;
}

ActsModel::Prediction ActsModel::predict(ad::Tape& tape, const Bound& b, const Graph& g, const Dataset& data,
                                         const Target& target, std::vector<double>* weights) const {
    const std::size_t n = shape_.regions, l = shape_.segment_length, H = shape_.horizon;
    const std::size_t k = target.week_offset, T = target.history_end;
    if (T < min_history(k)) {
        throw UsageError("history of " + std::to_string(T) + " days leaves no reference windows for week " +
                         std::to_string(k) + "; supply a longer history or a smaller segment length");
    }
    const std::size_t last_t = T - k * H;
    if (!g.has_windows || last_t > g.last_window_end || g.week_offset != k) {
        throw UsageError("graph does not cover the reference windows of this target");
    }

    const auto& res = g.residuals[target.region];
    ad::Var seg = variant_.normalize_on ? normalize_window(res, T - l, l, 0, 0) : ad::slice(res, T - l, l);
    std::vector<double> feats;
    if (uses_dynamic()) {
        for (std::size_t s = T - l; s < T; ++s) {
            auto r = data.dynamic_features(target.region, s);
            feats.insert(feats.end(), r.begin(), r.end());
        }
    }
    const ConvEncoder seg_enc{shape_.kernel_width, 1 + (uses_dynamic() ? shape_.dynamic_dims : 0), shape_.hidden};
    auto p = segment_embed(seg, feats, b.seg, seg_enc);
    auto q = ad::matvec(b.wq, p);
    if (uses_static()) {
        auto u = data.static_features(target.region);
        q = ad::add(q, ad::matvec(b.wuq, tape.constant({u.begin(), u.end()})));
    }

    std::vector<std::size_t> rows;
    if (variant_.inter_series_on) {
        rows.resize((last_t - l + 1) * n);
        for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
    } else {
        for (std::size_t t = l; t <= last_t; ++t) rows.push_back((t - l) * n + target.region);
    }
    auto attended = ad::attend(q, g.keys, g.values, rows, weights);
    auto predicted = ad::matvec(b.wout, attended);

    Prediction out;
    out.residual = variant_.normalize_on ? inverse_normalize(predicted, res, T - l, l) : predicted;
    if (variant_.detrend_on) {
        out.trend = trend_extrapolate(g.levels_slopes[target.region], T, (k - 1) * H + 1, H);
    } else {
        out.trend = tape.constant(std::vector<double>(H, 0.0));
    }
    return out;
}

ad::Var ActsModel::loss(ad::Tape& tape, const Dataset& data, std::span<const Target> batch) {
    if (batch.empty()) throw UsageError("loss over an empty batch");
    check_data(data);
    const std::size_t H = shape_.horizon;
    auto b = bind(tape);

    std::map<std::size_t, std::vector<const Target*>> by_offset;
    for (const auto& t : batch) by_offset[t.week_offset].push_back(&t);

    std::vector<ad::Var> terms;
    for (const auto& [k, targets] : by_offset) {
        std::size_t limit = 0;
        for (const auto* t : targets) {
            if (t->history_end + k * H > data.days()) throw UsageError("target truth extends past the data");
            limit = std::max(limit, t->history_end);
        }
        auto g = build_graph(tape, b, data, limit, limit >= k * H ? limit - k * H : 0, k);
        for (const auto* t : targets) {
            auto pred = predict(tape, b, g, data, *t, nullptr);
            auto y = ad::add(pred.trend, pred.residual);
            auto truth_span = data.values(t->region).subspan(t->history_end + (k - 1) * H, H);
            std::vector<double> truth(truth_span.begin(), truth_span.end());
            if (shape_.weekly) {
                double week = 0.0;
                for (double v : truth) week += v;
                terms.push_back(ad::abs(ad::add_scalar(ad::sum(y), -week)));
            } else {
                terms.push_back(ad::mean(ad::abs(ad::sub(y, tape.constant(std::move(truth))))));
            }
        }
    }
    ad::Var total = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) total = ad::add(total, terms[i]);
    return ad::scale(total, 1.0 / static_cast<double>(terms.size()));
}

RegionForecast ActsModel::forecast(const Dataset& data, std::size_t region, std::size_t week_offset) const {
    const std::size_t k = week_offset == 0 ? shape_.week_offset : week_offset;
    auto all = forecast_all(data, k);
    return all.at(region);
}

std::vector<RegionForecast> ActsModel::forecast_all(const Dataset& data, std::size_t week_offset) const {
    check_data(data);
    const std::size_t k = week_offset == 0 ? shape_.week_offset : week_offset;
    const std::size_t T = data.days(), H = shape_.horizon, l = shape_.segment_length, n = shape_.regions;
    if (T < min_history(k)) {
        throw UsageError("history of " + std::to_string(T) + " days leaves no reference windows; need at least " +
                         std::to_string(min_history(k)));
    }
    // Forward-only: params are bound to the tape but backward is never run.
    auto& self = const_cast<ActsModel&>(*this);
    ad::Tape tape;
    auto b = self.bind(tape);
    auto g = build_graph(tape, b, data, T, T - k * H, k);
    std::vector<RegionForecast> out;
    for (std::size_t i = 0; i < n; ++i) {
        RegionForecast f;
        f.region = i;
        f.history_end = T;
        f.week_offset = k;
        auto pred = predict(tape, b, g, data, {i, T, k}, &f.attention);
        f.trend.assign(pred.trend.value().begin(), pred.trend.value().end());
        f.residual.assign(pred.residual.value().begin(), pred.residual.value().end());
        f.daily = combine_clipped(f.trend, f.residual);
        f.weekly = combine_clipped_weekly(f.trend, f.residual);
        for (std::size_t t = l; t + k * H <= T; ++t) {
            if (variant_.inter_series_on) {
                for (std::size_t r = 0; r < n; ++r) f.references.push_back({r, t});
            } else {
                f.references.push_back({i, t});
            }
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<std::vector<double>> ActsModel::queries(const Dataset& data, std::size_t history_end) const {
    check_data(data);
    const std::size_t l = shape_.segment_length;
    if (history_end < l || history_end > data.days()) {
        throw UsageError("query day " + std::to_string(history_end) + " must lie in [" + std::to_string(l) + ", " +
                         std::to_string(data.days()) + "]");
    }
    auto& self = const_cast<ActsModel&>(*this);
    ad::Tape tape;
    auto b = self.bind(tape);
    auto g = build_graph(tape, b, data, history_end, 0, shape_.week_offset);
    const ConvEncoder seg_enc{shape_.kernel_width, 1 + (uses_dynamic() ? shape_.dynamic_dims : 0), shape_.hidden};
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < shape_.regions; ++i) {
        const auto& res = g.residuals[i];
        auto seg = variant_.normalize_on ? normalize_window(res, history_end - l, l, 0, 0)
                                         : ad::slice(res, history_end - l, l);
        std::vector<double> feats;
        if (uses_dynamic()) {
            for (std::size_t s = history_end - l; s < history_end; ++s) {
                auto r = data.dynamic_features(i, s);
                feats.insert(feats.end(), r.begin(), r.end());
            }
        }
        auto p = segment_embed(seg, feats, b.seg, seg_enc);
        auto q = ad::matvec(b.wq, p);
        if (uses_static()) {
            auto u = data.static_features(i);
            q = ad::add(q, ad::matvec(b.wuq, tape.constant({u.begin(), u.end()})));
        }
        out.emplace_back(q.value().begin(), q.value().end());
    }
    return out;
}

nlohmann::json ActsModel::to_json() const {
    nlohmann::json j;
    j["shape"] = {{"regions", shape_.regions},
                  {"hidden", shape_.hidden},
                  {"segment_length", shape_.segment_length},
                  {"horizon", shape_.horizon},
                  {"week_offset", shape_.week_offset},
                  {"kernel_width", shape_.kernel_width},
                  {"static_dims", shape_.static_dims},
                  {"dynamic_dims", shape_.dynamic_dims},
                  {"weekly", shape_.weekly}};
    j["variant"] = variant_.tag();
    auto& params = j["params"];
    for (const auto* p : parameters()) {
        params[p->name()] = {{"shape", {p->shape().rows, p->shape().cols}},
                             {"values", std::vector<double>(p->values().begin(), p->values().end())}};
    }
    return j;
}

ActsModel ActsModel::from_json(const nlohmann::json& j) {
    try {
        const auto& s = j.at("shape");
        ModelShape shape;
        shape.regions = s.at("regions").get<std::size_t>();
        shape.hidden = s.at("hidden").get<std::size_t>();
        shape.segment_length = s.at("segment_length").get<std::size_t>();
        shape.horizon = s.at("horizon").get<std::size_t>();
        shape.week_offset = s.at("week_offset").get<std::size_t>();
        shape.kernel_width = s.at("kernel_width").get<std::size_t>();
        shape.static_dims = s.at("static_dims").get<std::size_t>();
        shape.dynamic_dims = s.at("dynamic_dims").get<std::size_t>();
        shape.weekly = s.at("weekly").get<bool>();
        ActsModel model(shape, ModelVariant::parse(j.at("variant").get<std::string>()));
        const auto& params = j.at("params");
        for (auto* p : model.parameters()) {
            const auto& entry = params.at(p->name());
            auto values = entry.at("values").get<std::vector<double>>();
            if (values.size() != p->size()) throw FormatError("param '" + p->name() + "' has the wrong size");
            std::copy(values.begin(), values.end(), p->values().begin());
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed model: ") + e.what());
    }
}

}  // namespace acts
