#pragma once

#include "acts/calendar.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace acts {

enum class IncidenceKind { cases, hospitalizations, deaths };

std::string_view to_string(IncidenceKind kind);
/// Accepts "cases", "hosp"/"hospitalizations", "deaths".
IncidenceKind parse_incidence_kind(std::string_view text);

/// Cases and deaths are scored on weekly sums, hospitalizations daily.
inline bool is_weekly(IncidenceKind kind) { return kind != IncidenceKind::hospitalizations; }

struct RegionId {
    std::size_t index = 0;
    std::string name;
};

struct IncidenceSeries {
    RegionId region;
    Date start_date;
    std::vector<double> values;
    IncidenceKind kind = IncidenceKind::cases;
};

/// Non-fatal findings from ingestion; every fill or clamp is counted here.
struct LoadReport {
    std::size_t zero_filled = 0;
    std::size_t clamped = 0;
    std::vector<std::string> warnings;
};

/**
 * N aligned incidence series sharing one calendar, plus optional per-region
 * static features (z-scored) and per-day dynamic features.
 *
 * Immutable once built; `prefix` produces the truncated view used whenever
 * a computation must not see data after a given day.
 */
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<IncidenceSeries> series, bool cumulative = false);

    std::size_t regions() const { return series_.size(); }
    std::size_t days() const { return days_; }
    Date start_date() const { return start_; }
    Date date_at(std::size_t day_index) const { return start_ + static_cast<long>(day_index); }
    Date last_date() const { return date_at(days_ - 1); }
    /// 0-based day index of `date`, if inside the calendar.
    std::optional<std::size_t> index_of(Date date) const;

    const IncidenceSeries& series(std::size_t region) const { return series_.at(region); }
    std::span<const double> values(std::size_t region) const { return series_.at(region).values; }
    const std::string& name(std::size_t region) const { return series_.at(region).region.name; }
    std::optional<std::size_t> find_region(std::string_view name) const;
    IncidenceKind kind() const { return series_.empty() ? IncidenceKind::cases : series_.front().kind; }
    bool cumulative() const { return cumulative_; }

    std::size_t static_dims() const { return static_dims_; }
    std::size_t dynamic_dims() const { return dynamic_dims_; }
    std::span<const double> static_features(std::size_t region) const;
    std::span<const double> dynamic_features(std::size_t region, std::size_t day) const;

    /// Replaces static features; rows are z-scored per column.
    Dataset with_static_features(std::vector<std::vector<double>> rows) const;
    /// Replaces dynamic features: one days() x m matrix (row-major) per region.
    Dataset with_dynamic_features(std::vector<std::vector<double>> per_region, std::size_t dims) const;
    Dataset without_features() const;

    /// The first `days` days of every series and feature.
    Dataset prefix(std::size_t days) const;
    /// Only the listed regions, re-indexed densely in the given order.
    Dataset subset(std::span<const std::size_t> regions) const;

    /// FNV-1a over names, dates, values, and features.
    std::uint64_t fingerprint() const;
    /// fingerprint() as 16 lowercase hex digits.
    std::string fingerprint_hex() const;

private:
    std::vector<IncidenceSeries> series_;
    std::size_t days_ = 0;
    Date start_;
    bool cumulative_ = false;
    std::size_t static_dims_ = 0;
    std::vector<double> static_;  // regions x static_dims
    std::size_t dynamic_dims_ = 0;
    std::vector<std::vector<double>> dynamic_;  // per region: days x dynamic_dims
};

/// Parses long (region,date,value) or JHU wide CSV text; format is detected
/// from the header. Wide files are marked cumulative.
Dataset parse_incidence_csv(std::string_view text, IncidenceKind kind, LoadReport* report = nullptr);
Dataset load_incidence_csv(const std::filesystem::path& path, IncidenceKind kind, LoadReport* report = nullptr);

struct DiffResult {
    std::vector<double> values;
    std::size_t clamped = 0;
};

/// Daily increments from a cumulative sequence; negative dips clamp to 0.
DiffResult diff_cumulative(std::span<const double> cumulative);

/// Converts a cumulative dataset to daily incidence (no-op when already daily).
Dataset to_incidence(const Dataset& dataset, LoadReport* report = nullptr);

std::string to_long_csv(const Dataset& dataset);

std::string hex64(std::uint64_t value);

/// `region,<feature>...`
Dataset attach_static_features(const Dataset& dataset, std::string_view csv_text);
/// `region,date,<feature>...`; days absent from the file are zero-filled.
Dataset attach_dynamic_features(const Dataset& dataset, std::string_view csv_text, LoadReport* report = nullptr);

struct WindowPair {
    std::size_t region = 0;
    std::size_t end = 0;  // 1-based end day t of the window
};

struct WindowIndex {
    std::vector<WindowPair> pairs;
    std::size_t segment_length = 0;
    std::size_t horizon = 0;
    std::size_t week_offset = 1;
};

/// All (i, t) with t in [l, T - kH]; empty (with a warning) when l > T.
WindowIndex make_windows(const Dataset& dataset, std::size_t segment_length, std::size_t horizon,
                         std::size_t week_offset, std::size_t last_day, LoadReport* report = nullptr);

inline constexpr std::size_t kValidationDays = 7;

struct TrainValSplit {
    std::size_t train_end = 0;         // last 1-based training day
    std::size_t validation_first = 0;  // 1-based
    std::size_t validation_last = 0;   // 1-based, equals L
};

TrainValSplit train_val_split(const Dataset& dataset, std::size_t segment_length);

}  // namespace acts
