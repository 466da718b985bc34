#include "acts/trainer.hpp"

#include "acts/csv.hpp"
#include "acts/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace acts {

nlohmann::json TrainConfig::to_json() const {
    return {{"hidden", hidden},         {"segment_length", segment_length},
            {"horizon", horizon},       {"week_offset", week_offset},
            {"kernel_width", kernel_width}, {"lr", lr},
            {"iters", iters},           {"batch", batch},
            {"seed", seed},             {"patience", patience},
            {"eval_every", eval_every}, {"variant", variant.tag()},
            {"shared_weeks", shared_weeks}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("training config must be an object");
    static const std::set<std::string> known{"hidden", "segment_length", "horizon",    "week_offset", "kernel_width",
                                             "lr",     "iters",          "batch",      "seed",        "patience",
                                             "eval_every", "variant",    "shared_weeks"};
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw ConfigError("unknown training config key '" + key + "'");
    }
    TrainConfig c;
    try {
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
        };
        get("hidden", c.hidden);
        get("segment_length", c.segment_length);
        get("horizon", c.horizon);
        get("week_offset", c.week_offset);
        get("kernel_width", c.kernel_width);
        get("lr", c.lr);
        get("iters", c.iters);
        get("batch", c.batch);
        get("seed", c.seed);
        get("patience", c.patience);
        get("eval_every", c.eval_every);
        get("shared_weeks", c.shared_weeks);
        if (j.contains("variant")) c.variant = ModelVariant::parse(j.at("variant").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad training config value: ") + e.what());
    }
    return c;
}

void TrainConfig::validate() const {
    if (hidden == 0) throw ConfigError("hidden size must be positive");
    if (segment_length < 2) throw ConfigError("segment length must be at least 2");
    if (horizon == 0) throw ConfigError("horizon must be positive");
    if (week_offset == 0) throw ConfigError("week offset must be at least 1");
    if (kernel_width == 0 || kernel_width > segment_length || kernel_width > horizon) {
        throw ConfigError("kernel width must be in [1, min(segment length, horizon)]");
    }
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("learning rate must be positive");
    if (batch == 0) throw ConfigError("batch size must be positive");
    if (eval_every == 0) throw ConfigError("eval_every must be positive");
}

Adam::Adam(std::vector<ad::Param*> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (auto* p : params_) {
        m_.emplace_back(p->size(), 0.0);
        v_.emplace_back(p->size(), 0.0);
    }
}

void Adam::zero_grad() {
    for (auto* p : params_) p->zero_grad();
}

void Adam::step() {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t k = 0; k < params_.size(); ++k) {
        auto values = params_[k]->values();
        auto grad = params_[k]->grad();
        auto& m = m_[k];
        auto& v = v_[k];
        for (std::size_t i = 0; i < values.size(); ++i) {
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * grad[i];
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * grad[i] * grad[i];
            values[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
        }
    }
}

std::vector<std::size_t> trained_offsets(const TrainConfig& config) {
    if (config.shared_weeks == 0) return {config.week_offset};
    std::vector<std::size_t> ks;
    for (std::size_t k = 1; k <= config.shared_weeks; ++k) ks.push_back(k);
    return ks;
}

std::vector<Target> training_targets(std::size_t regions, std::size_t train_end, const TrainConfig& config,
                                     std::size_t week_offset) {
    std::vector<Target> out;
    const std::size_t reach = week_offset * config.horizon;
    const std::size_t lo = config.segment_length + reach;
    if (train_end < reach) return out;
    const std::size_t hi = train_end - reach;
    for (std::size_t T = lo; T <= hi; ++T) {
        for (std::size_t i = 0; i < regions; ++i) out.push_back({i, T, week_offset});
    }
    return out;
}

std::vector<Target> validation_targets(std::size_t regions, std::size_t days, const TrainConfig& config,
                                       std::size_t week_offset) {
    const std::size_t reach = week_offset * config.horizon;
    if (days < reach || days - reach < config.segment_length + reach) {
        throw ConfigError("history too short to validate week " + std::to_string(week_offset) +
                          "; supply a longer history or a smaller segment length");
    }
    std::vector<Target> out;
    for (std::size_t i = 0; i < regions; ++i) out.push_back({i, days - reach, week_offset});
    return out;
}

ModelShape model_shape(const Dataset& data, const TrainConfig& config) {
    ModelShape s;
    s.regions = data.regions();
    s.hidden = config.hidden;
    s.segment_length = config.segment_length;
    s.horizon = config.horizon;
    s.week_offset = config.week_offset;
    s.kernel_width = config.kernel_width;
    s.static_dims = data.static_dims();
    s.dynamic_dims = data.dynamic_dims();
    s.weekly = is_weekly(data.kind());
    return s;
}

double evaluate_loss(ActsModel& model, const Dataset& data, std::span<const Target> targets) {
    ad::Tape tape;
    return model.loss(tape, data, targets).item();
}

namespace {

using Snapshot = std::vector<std::vector<double>>;

Snapshot snapshot(const ActsModel& model) {
    Snapshot s;
    for (const auto* p : model.parameters()) s.emplace_back(p->values().begin(), p->values().end());
    return s;
}

void restore(ActsModel& model, const Snapshot& s) {
    auto params = model.parameters();
    for (std::size_t k = 0; k < params.size(); ++k) std::copy(s[k].begin(), s[k].end(), params[k]->values().begin());
}

[[noreturn]] void diverged(const ActsModel& model, std::size_t iteration, const std::string& what) {
    std::ostringstream msg;
    msg << what << " at iteration " << iteration << "; parameter norms:";
    for (const auto* p : model.parameters()) msg << ' ' << p->name() << '=' << p->norm();
    throw DivergenceError(msg.str());
}

}  // namespace

TrainResult train(const Dataset& data, const TrainConfig& config) {
    config.validate();
    const auto split = train_val_split(data, config.segment_length);
    const Dataset train_view = data.prefix(split.train_end);

    std::vector<Target> pool, val;
    for (auto k : trained_offsets(config)) {
        auto t = training_targets(data.regions(), split.train_end, config, k);
        pool.insert(pool.end(), t.begin(), t.end());
        auto v = validation_targets(data.regions(), data.days(), config, k);
        val.insert(val.end(), v.begin(), v.end());
    }
    if (pool.empty()) {
        throw ConfigError("no training windows: " + std::to_string(split.train_end) +
                          " training days are too few for this segment length and week offset");
    }

    ActsModel model(model_shape(data, config), config.variant);
    model.initialize(train_view, config.seed);
    Adam optimizer(model.parameters(), config.lr);
    std::mt19937_64 rng(config.seed * 0x9E3779B97F4A7C15ULL + 1);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);

    TrainResult result;
    const auto started = std::chrono::steady_clock::now();
    Snapshot best = snapshot(model);
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t stale = 0;
    std::vector<Target> batch(config.batch);

    for (std::size_t it = 0; it <= config.iters; ++it) {
        for (auto& b : batch) b = pool[pick(rng)];
        optimizer.zero_grad();
        ad::Tape tape;
        auto loss = model.loss(tape, train_view, batch);
        TracePoint point{it, loss.item(), std::nullopt};
        if (!std::isfinite(point.train_loss)) diverged(model, it, "non-finite training loss");

        bool stop = false;
        if (it % config.eval_every == 0 || it == config.iters) {
            const double v = evaluate_loss(model, data, val);
            if (!std::isfinite(v)) diverged(model, it, "non-finite validation loss");
            point.val_loss = v;
            if (v < best_val) {
                best_val = v;
                best = snapshot(model);
                result.best_iteration = it;
                stale = 0;
            } else if (++stale >= config.patience) {
                stop = it < config.iters;
            }
        }
        result.trace.push_back(point);
        result.iterations_run = it;
        if (stop) {
            result.stopped_early = true;
            break;
        }
        if (it == config.iters) break;

        tape.backward(loss);
        optimizer.step();
        for (const auto* p : model.parameters()) {
            if (!p->finite()) diverged(model, it, "non-finite parameter '" + p->name() + "'");
        }
    }

    restore(model, best);
    result.model = std::move(model);
    result.best_val = best_val;
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

nlohmann::json checkpoint_to_json(const Checkpoint& c) {
    return {{"format", "acts-checkpoint"},
            {"version", Checkpoint::kVersion},
            {"task", std::string(to_string(c.task))},
            {"issue_date", c.issue_date},
            {"data_fingerprint", hex64(c.data_fingerprint)},
            {"seed", c.config.seed},
            {"best_val", c.best_val},
            {"regions", c.regions},
            {"config", c.config.to_json()},
            {"model", c.model.to_json()}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != "acts-checkpoint") throw FormatError("not a checkpoint file");
        const int version = j.at("version").get<int>();
        if (version != Checkpoint::kVersion) {
            throw FormatError("unsupported checkpoint version " + std::to_string(version));
        }
        Checkpoint c;
        c.task = parse_incidence_kind(j.at("task").get<std::string>());
        c.issue_date = j.at("issue_date").get<std::string>();
        c.data_fingerprint = std::stoull(j.at("data_fingerprint").get<std::string>(), nullptr, 16);
        c.best_val = j.at("best_val").is_null() ? 0.0 : j.at("best_val").get<double>();
        c.regions = j.at("regions").get<std::vector<std::string>>();
        c.config = TrainConfig::from_json(j.at("config"));
        c.model = ActsModel::from_json(j.at("model"));
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    csv::write_atomic(path, checkpoint_to_json(checkpoint).dump(1) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    auto text = csv::read_text(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
    return checkpoint_from_json(j);
}

std::string trace_csv(std::span<const TracePoint> trace) {
    std::string out = "iteration,train_loss,val_loss\n";
    for (const auto& p : trace) {
        out += std::to_string(p.iteration);
        out += ',';
        out += csv::format_double(p.train_loss);
        out += ',';
        if (p.val_loss) out += csv::format_double(*p.val_loss);
        out += '\n';
    }
    return out;
}

std::vector<TrainConfig> HyperGrid::expand(const TrainConfig& base) const {
    std::vector<TrainConfig> out;
    for (auto d : hidden) {
        for (auto l : segment_length) {
            for (auto r : lr) {
                for (auto n : iters) {
                    TrainConfig c = base;
                    c.hidden = d;
                    c.segment_length = l;
                    c.lr = r;
                    c.iters = n;
                    out.push_back(c);
                }
            }
        }
    }
    return out;
}

std::vector<TuneEntry> tune(const Dataset& data, const TrainConfig& base, const HyperGrid& grid, std::size_t jobs) {
    auto configs = grid.expand(base);
    std::vector<TuneEntry> entries(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            entries[i].config = configs[i];
            try {
                entries[i].val_loss = train(data, configs[i]).best_val;
            } catch (const std::exception& e) {
                entries[i].error = e.what();
            }
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(jobs, configs.size()));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    return entries;
}

const TuneEntry& best_entry(std::span<const TuneEntry> entries) {
    const TuneEntry* best = nullptr;
    for (const auto& e : entries) {
        if (!e.error.empty()) continue;
        if (best == nullptr || e.val_loss < best->val_loss) best = &e;
    }
    if (best == nullptr) throw ConfigError("every grid point failed to train");
    return *best;
}

}  // namespace acts
