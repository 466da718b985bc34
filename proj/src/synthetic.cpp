#include "acts/synthetic.hpp"

#include "acts/errors.hpp"
#include "acts/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace acts {

void SynthSpec::validate() const {
    if (regions < 2) throw ConfigError("synthetic benchmark needs a target and at least one donor");
    if (donor_lag + segment_length + horizon > days) throw ConfigError("lag + segment + horizon exceeds the span");
    if (donor_lag < horizon) throw ConfigError("donor lag must be at least one horizon so the donor is observed");
    if (!(gamma_min > 0.0) || gamma_max < gamma_min || gamma < 0.0) throw ConfigError("gamma must be positive");
    if (noise < 0.0) throw ConfigError("noise must be non-negative");
}

namespace {

struct Wave {
    double center, width, height;
};

/// Bell of a logistic growth curve's derivative, peak 1 at the center.
double bell(double t, const Wave& w) {
    const double s = 1.0 / (1.0 + std::exp(-(t - w.center) / w.width));
    return w.height * 4.0 * s * (1.0 - s);
}

double pattern_at(double t, const std::vector<Wave>& waves, double scale) {
    double v = 0.0;
    for (const auto& w : waves) v += bell(t, w);
    return scale * v;
}

}  // namespace

SyntheticBenchmark generate(const SynthSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    const auto L = static_cast<double>(spec.days);
    const double event = spec.event_day > 0 ? static_cast<double>(spec.event_day)
                                            : L + std::floor(static_cast<double>(spec.horizon) / 2.0);

    SyntheticBenchmark b;
    b.donor = 1 + std::uniform_int_distribution<std::size_t>(0, spec.regions - 2)(rng);
    b.donor_lag = spec.donor_lag;
    b.gamma = spec.gamma > 0.0 ? spec.gamma : std::exp(uniform(std::log(spec.gamma_min), std::log(spec.gamma_max)));

    std::vector<std::vector<Wave>> waves(spec.regions);
    std::vector<double> trend_base(spec.regions), trend_slope(spec.regions);
    b.scale.resize(spec.regions);
    for (std::size_t i = 0; i < spec.regions; ++i) {
        b.scale[i] = std::exp(uniform(std::log(50.0), std::log(500.0)));
        const int count = 1 + static_cast<int>(uniform(0.0, 3.0));
        for (int w = 0; w < count; ++w) {
            waves[i].push_back({uniform(-10.0, L + 10.0), uniform(3.0, 9.0), uniform(0.3, 1.0)});
        }
        trend_base[i] = uniform(0.2, 0.6);
        trend_slope[i] = uniform(-spec.trend_strength, spec.trend_strength) * trend_base[i];
    }
    // The donor carries a full-height wave that the target reaches inside the final week.
    const Wave shared{event - static_cast<double>(spec.donor_lag), uniform(4.0, 8.0), 1.0};
    waves[b.donor].push_back(shared);
    b.scale[b.target] = b.gamma * b.scale[b.donor];

    const double lag = static_cast<double>(spec.donor_lag);
    b.pattern.assign(spec.regions, std::vector<double>(spec.days));
    b.trend.assign(spec.regions, std::vector<double>(spec.days));
    for (std::size_t i = 0; i < spec.regions; ++i) {
        // The target is the donor's curve evaluated lag days earlier, scaled by gamma.
        const std::size_t src = i == b.target ? b.donor : i;
        const double factor = i == b.target ? b.gamma : 1.0;
        const double shift = i == b.target ? lag : 0.0;
        for (std::size_t d = 0; d < spec.days; ++d) {
            const double t = static_cast<double>(d + 1) - shift;
            b.trend[i][d] = factor * b.scale[src] * (trend_base[src] + trend_slope[src] * t / L);
            b.pattern[i][d] = factor * pattern_at(t, waves[src], b.scale[src]);
        }
    }

    std::vector<IncidenceSeries> series;
    const Date start(2020, 3, 1);
    for (std::size_t i = 0; i < spec.regions; ++i) {
        std::normal_distribution<double> noise(0.0, spec.noise * b.scale[i]);
        IncidenceSeries s;
        s.region.name = i == b.target ? "target" : "region_" + std::to_string(i);
        s.start_date = start;
        s.kind = IncidenceKind::hospitalizations;
        s.values.resize(spec.days);
        for (std::size_t d = 0; d < spec.days; ++d) {
            const double eps = spec.noise > 0.0 ? noise(rng) : 0.0;
            s.values[d] = std::max(0.0, b.trend[i][d] + b.pattern[i][d] + eps);
        }
        series.push_back(std::move(s));
    }
    b.data = Dataset(std::move(series));
    return b;
}

std::vector<double> copy_oracle(const SyntheticBenchmark& bench, std::size_t history_end, std::size_t horizon) {
    if (bench.donor_lag < horizon || history_end + horizon > bench.data.days() || history_end < bench.donor_lag) {
        throw UsageError("copy oracle needs the donor observed over the whole horizon");
    }
    const auto donor = bench.data.values(bench.donor);
    std::vector<double> out(horizon);
    for (std::size_t j = 0; j < horizon; ++j) out[j] = bench.gamma * donor[history_end + j - bench.donor_lag];
    return out;
}

BenchmarkSummary run_transfer_benchmark(const SynthSpec& spec, std::span<const std::uint64_t> seeds,
                                        const TrainConfig& config, std::span<const ModelVariant> variants) {
    spec.validate();
    BenchmarkSummary summary;
    std::map<std::string, std::vector<double>> by_variant;
    std::vector<double> oracle;
    for (auto seed : seeds) {
        const auto bench = generate(spec, seed);
        const std::size_t history_end = spec.days - spec.horizon;
        const Dataset history = bench.data.prefix(history_end);
        const auto truth = bench.data.values(bench.target).subspan(history_end, spec.horizon);
        BenchmarkRun run;
        run.seed = seed;
        run.copy_oracle_wape = wape(copy_oracle(bench, history_end, spec.horizon), truth);
        for (const auto& v : variants) {
            TrainConfig c = config;
            c.variant = v;
            c.week_offset = 1;
            c.segment_length = spec.segment_length;
            c.horizon = spec.horizon;
            auto trained = train(history, c);
            const auto f = trained.model.forecast(history, bench.target, 1);
            run.wape[v.tag()] = wape(f.daily, truth);
            run.final_loss[v.tag()] = trained.best_val;
            by_variant[v.tag()].push_back(run.wape[v.tag()]);
        }
        oracle.push_back(run.copy_oracle_wape);
        summary.runs.push_back(std::move(run));
    }
    summary.median_copy_oracle = median(oracle);
    for (auto& [tag, xs] : by_variant) summary.median_wape[tag] = median(xs);
    return summary;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace acts
