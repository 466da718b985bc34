#pragma once

#include "acts/dataset.hpp"
#include "acts/model.hpp"
#include "acts/trainer.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace acts {

/**
 * Controlled datasets where region 0 replays a donor region's curve, scaled
 * by gamma and delayed by `donor_lag` days, with its own noise. Curves are a
 * linear trend plus derivatives of logistic growth curves; the donor always
 * carries one wave that the target reaches in its final week.
 */
struct SynthSpec {
    std::size_t regions = 20;
    std::size_t days = 120;
    std::size_t donor_lag = 11;
    double noise = 0.05;  // Gaussian sd as a fraction of each region's scale
    double gamma_min = 0.5;
    double gamma_max = 2.0;
    /// Fixes gamma when positive (overrides the range).
    double gamma = 0.0;
    /// Per-region trend slope bound, as a fraction of scale over the whole span.
    double trend_strength = 0.5;
    std::size_t segment_length = 7;
    std::size_t horizon = 7;
    /// 1-based day of the target's peak; 0 places it half a horizon after the final day,
    /// so the last week holds the steep part of the rise.
    std::size_t event_day = 0;

    void validate() const;
};

struct SyntheticBenchmark {
    Dataset data;
    std::size_t target = 0;
    std::size_t donor = 0;
    std::size_t donor_lag = 0;
    double gamma = 1.0;
    std::vector<double> scale;                 // per region
    std::vector<std::vector<double>> pattern;  // noiseless wave component
    std::vector<std::vector<double>> trend;    // noiseless trend component
};

SyntheticBenchmark generate(const SynthSpec& spec, std::uint64_t seed);

/// Forecast of the target over [history_end + 1, history_end + horizon]: gamma
/// times the donor's observed values `donor_lag` days earlier.
std::vector<double> copy_oracle(const SyntheticBenchmark& bench, std::size_t history_end, std::size_t horizon);

struct BenchmarkRun {
    std::uint64_t seed = 0;
    double copy_oracle_wape = 0.0;
    std::map<std::string, double> wape;  // by variant tag
    std::map<std::string, double> final_loss;
};

struct BenchmarkSummary {
    std::vector<BenchmarkRun> runs;
    double median_copy_oracle = 0.0;
    std::map<std::string, double> median_wape;
};

/**
 * For each seed: generate, train every variant on the first L - H days,
 * forecast the target's final week, and score daily WAPE against truth.
 */
BenchmarkSummary run_transfer_benchmark(const SynthSpec& spec, std::span<const std::uint64_t> seeds,
                                        const TrainConfig& config, std::span<const ModelVariant> variants);

double median(std::vector<double> values);

}  // namespace acts
