#pragma once

#include "acts/dataset.hpp"
#include "acts/model.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace acts {

struct TrainConfig {
    std::size_t hidden = 16;
    std::size_t segment_length = 7;
    std::size_t horizon = 7;
    std::size_t week_offset = 1;
    std::size_t kernel_width = 3;
    double lr = 0.005;
    std::size_t iters = 600;
    std::size_t batch = 64;
    std::uint64_t seed = 1;
    std::size_t patience = 5;     // evaluations without improvement before stopping
    std::size_t eval_every = 50;  // iterations between validation checks
    ModelVariant variant;
    /// When > 0, one model is trained over week offsets 1..shared_weeks.
    std::size_t shared_weeks = 0;

    nlohmann::json to_json() const;
    /// Unknown keys are rejected; absent keys keep their defaults.
    static TrainConfig from_json(const nlohmann::json& j);
    void validate() const;
};

/// Adaptive moment estimation over a fixed parameter set.
class Adam {
public:
    Adam(std::vector<ad::Param*> params, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
    void step();
    void zero_grad();

private:
    std::vector<ad::Param*> params_;
    std::vector<std::vector<double>> m_, v_;
    double lr_, beta1_, beta2_, eps_;
    std::size_t t_ = 0;
};

struct TracePoint {
    std::size_t iteration = 0;
    double train_loss = 0.0;
    std::optional<double> val_loss;
};

struct TrainResult {
    ActsModel model;  // best-validation parameters
    std::vector<TracePoint> trace;
    double best_val = 0.0;
    std::size_t best_iteration = 0;
    std::size_t iterations_run = 0;
    bool stopped_early = false;
    double seconds = 0.0;
};

/// Week offsets a config trains: {week_offset} or 1..shared_weeks.
std::vector<std::size_t> trained_offsets(const TrainConfig& config);

/// Every (i, T) whose forecast week lies inside the first `train_end` days
/// and whose reference set is non-empty.
std::vector<Target> training_targets(std::size_t regions, std::size_t train_end, const TrainConfig& config,
                                     std::size_t week_offset);

/// One target per region whose forecast week is the final validation week.
std::vector<Target> validation_targets(std::size_t regions, std::size_t days, const TrainConfig& config,
                                       std::size_t week_offset);

ModelShape model_shape(const Dataset& data, const TrainConfig& config);

/// Loss with no gradient bookkeeping beyond the tape itself.
double evaluate_loss(ActsModel& model, const Dataset& data, std::span<const Target> targets);

/**
 * Joint training of all parameters on the first L - 7 days with the last
 * 7 days held out. Deterministic given config.seed.
 */
TrainResult train(const Dataset& data, const TrainConfig& config);

struct Checkpoint {
    static constexpr int kVersion = 1;

    ActsModel model;
    TrainConfig config;
    std::uint64_t data_fingerprint = 0;
    std::vector<std::string> regions;
    IncidenceKind task = IncidenceKind::cases;
    std::string issue_date;
    double best_val = 0.0;
};

nlohmann::json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// `iteration,train_loss,val_loss`; val_loss is blank between evaluations.
std::string trace_csv(std::span<const TracePoint> trace);

struct HyperGrid {
    std::vector<std::size_t> hidden{16, 32};
    std::vector<std::size_t> segment_length{7, 14};
    std::vector<double> lr{0.001, 0.005, 0.01};
    std::vector<std::size_t> iters{600, 1200, 1800};

    std::vector<TrainConfig> expand(const TrainConfig& base) const;
};

struct TuneEntry {
    TrainConfig config;
    double val_loss = 0.0;
    std::string error;  // non-empty when the run failed
};

/// Trains every grid point (up to `jobs` at once); entries keep grid order.
std::vector<TuneEntry> tune(const Dataset& data, const TrainConfig& base, const HyperGrid& grid, std::size_t jobs);
/// Lowest validation loss among successful entries.
const TuneEntry& best_entry(std::span<const TuneEntry> entries);

}  // namespace acts
