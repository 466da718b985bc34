#pragma once

#include "acts/calendar.hpp"
#include "acts/dataset.hpp"
#include "acts/model.hpp"
#include "acts/trainer.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace acts {

/// sum |f - x| / sum |x|; throws DataError when every truth is zero.
double wape(std::span<const double> forecasts, std::span<const double> truths);

/// Consecutive non-overlapping 7-day sums.
std::vector<double> weekly_aggregate(std::span<const double> daily);

struct ForecastRecord {
    std::string region;
    Date issue_date;
    std::size_t week_offset = 1;
    std::vector<Date> target_end_dates;  // one per value
    std::vector<double> values;          // H daily values, or one weekly value
    std::string variant;
};

/// Records for every region from a model whose history ends at `data`'s last day.
std::vector<ForecastRecord> make_records(const ActsModel& model, const Dataset& data, std::size_t week_offset,
                                         bool weekly);

struct MetricReport {
    IncidenceKind task = IncidenceKind::cases;
    Date issue_date;
    std::size_t regions = 0;
    std::vector<std::optional<double>> wape_per_week;  // index k - 1
    std::optional<double> pooled;                      // set only when every week is scored
};

/// Pooled errors over regions and weeks divided by pooled truths.
MetricReport score_records(std::span<const ForecastRecord> records, const Dataset& truth, IncidenceKind task,
                           Date issue_date, std::size_t weeks);

struct ProtocolConfig {
    TrainConfig base;
    std::size_t weeks = 4;
    /// Optional per-week override; entry k - 1 is used for week k.
    std::vector<TrainConfig> per_week;
    /// Per-week models trained at once; results do not depend on it.
    std::size_t jobs = 1;

    TrainConfig for_week(std::size_t k) const;
};

struct ProtocolResult {
    std::vector<ForecastRecord> records;
    MetricReport metrics;
    std::vector<Checkpoint> checkpoints;
};

/**
 * Trains one model per week offset on data through `issue_date` only,
 * forecasts every region, and scores against later data when present.
 */
ProtocolResult run_protocol(const Dataset& dataset, Date issue_date, IncidenceKind task, const ProtocolConfig& config);

/// `region,issue_date,target_end_date,week_offset,value`
std::string forecasts_csv(std::span<const ForecastRecord> records);
/// `task,issue_date,week_offset,wape`; week_offset "all" holds the pooled value.
std::string metrics_csv(const MetricReport& report);
/// `region,window_end_date,weight`
std::string attention_csv(const RegionForecast& forecast, const Dataset& data);

}  // namespace acts
