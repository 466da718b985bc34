#include "acts/evaluator.hpp"

#include "acts/csv.hpp"
#include "acts/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace acts {

double wape(std::span<const double> forecasts, std::span<const double> truths) {
    if (forecasts.size() != truths.size() || forecasts.empty()) {
        throw ShapeError("wape needs equal, non-empty forecast and truth sequences");
    }
    double err = 0.0, denom = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        err += std::fabs(forecasts[i] - truths[i]);
        denom += std::fabs(truths[i]);
    }
    if (denom == 0.0) throw DataError("wape is undefined when every truth is zero");
    return err / denom;
}

std::vector<double> weekly_aggregate(std::span<const double> daily) {
    if (daily.size() % 7 != 0) {
        throw ShapeError("weekly aggregation needs a multiple of 7 days, got " + std::to_string(daily.size()));
    }
    std::vector<double> out(daily.size() / 7, 0.0);
    for (std::size_t i = 0; i < daily.size(); ++i) out[i / 7] += daily[i];
    return out;
}

std::vector<ForecastRecord> make_records(const ActsModel& model, const Dataset& data, std::size_t week_offset,
                                         bool weekly) {
    const std::size_t H = model.shape().horizon;
    const Date issue = data.last_date();
    std::vector<ForecastRecord> out;
    for (const auto& f : model.forecast_all(data, week_offset)) {
        ForecastRecord r;
        r.region = data.name(f.region);
        r.issue_date = issue;
        r.week_offset = week_offset;
        r.variant = model.variant().tag();
        const long first = static_cast<long>((week_offset - 1) * H) + 1;
        if (weekly) {
            r.values = {f.weekly};
            r.target_end_dates = {issue + first + static_cast<long>(H) - 1};
        } else {
            r.values = f.daily;
            for (std::size_t j = 0; j < H; ++j) r.target_end_dates.push_back(issue + first + static_cast<long>(j));
        }
        out.push_back(std::move(r));
    }
    return out;
}

MetricReport score_records(std::span<const ForecastRecord> records, const Dataset& truth, IncidenceKind task,
                           Date issue_date, std::size_t weeks) {
    MetricReport report;
    report.task = task;
    report.issue_date = issue_date;
    report.regions = truth.regions();
    report.wape_per_week.assign(weeks, std::nullopt);
    std::vector<double> err(weeks, 0.0), denom(weeks, 0.0);
    std::vector<bool> complete(weeks, true), any(weeks, false);
    for (const auto& r : records) {
        if (r.week_offset == 0 || r.week_offset > weeks) continue;
        const std::size_t k = r.week_offset - 1;
        auto region = truth.find_region(r.region);
        if (!region) {
            complete[k] = false;
            continue;
        }
        any[k] = true;
        auto values = truth.values(*region);
        for (std::size_t j = 0; j < r.values.size(); ++j) {
            double actual = 0.0;
            bool ok = true;
            if (is_weekly(task)) {
                for (long back = 0; back < 7; ++back) {
                    auto idx = truth.index_of(r.target_end_dates[j] - back);
                    if (!idx) {
                        ok = false;
                        break;
                    }
                    actual += values[*idx];
                }
            } else {
                auto idx = truth.index_of(r.target_end_dates[j]);
                ok = idx.has_value();
                if (ok) actual = values[*idx];
            }
            if (!ok) {
                complete[k] = false;
                continue;
            }
            err[k] += std::fabs(r.values[j] - actual);
            denom[k] += std::fabs(actual);
        }
    }
    double pooled_err = 0.0, pooled_denom = 0.0;
    bool all = true;
    for (std::size_t k = 0; k < weeks; ++k) {
        if (any[k] && complete[k] && denom[k] > 0.0) {
            report.wape_per_week[k] = err[k] / denom[k];
            pooled_err += err[k];
            pooled_denom += denom[k];
        } else {
            all = false;
        }
    }
    if (all && pooled_denom > 0.0) report.pooled = pooled_err / pooled_denom;
    return report;
}

TrainConfig ProtocolConfig::for_week(std::size_t k) const {
    TrainConfig c = k <= per_week.size() ? per_week[k - 1] : base;
    c.week_offset = k;
    return c;
}

ProtocolResult run_protocol(const Dataset& dataset, Date issue_date, IncidenceKind task, const ProtocolConfig& config) {
    auto issue_idx = dataset.index_of(issue_date);
    if (!issue_idx) throw ConfigError("issue date " + issue_date.iso() + " is outside the data calendar");
    if (config.weeks == 0) throw ConfigError("at least one week offset is required");
    // Training and forecasting only ever see this prefix.
    const Dataset history = dataset.prefix(*issue_idx + 1);
    const bool weekly = is_weekly(task);

    std::vector<TrainConfig> configs;
    if (config.base.shared_weeks > 0) {
        TrainConfig c = config.base;
        c.shared_weeks = std::max(c.shared_weeks, config.weeks);
        configs.push_back(c);
    } else {
        for (std::size_t k = 1; k <= config.weeks; ++k) configs.push_back(config.for_week(k));
    }
    for (const auto& c : configs) c.validate();

    std::vector<std::optional<TrainResult>> trained(configs.size());
    std::vector<std::exception_ptr> failures(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                trained[i] = train(history, configs[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, configs.size());
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    ProtocolResult result;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        auto& model = trained[i]->model;
        for (auto k : trained_offsets(configs[i])) {
            if (k > config.weeks) continue;
            auto recs = make_records(model, history, k, weekly);
            result.records.insert(result.records.end(), recs.begin(), recs.end());
        }
        Checkpoint cp;
        cp.config = configs[i];
        cp.best_val = trained[i]->best_val;
        cp.model = std::move(model);
        cp.data_fingerprint = history.fingerprint();
        for (std::size_t r = 0; r < history.regions(); ++r) cp.regions.push_back(history.name(r));
        cp.task = task;
        cp.issue_date = issue_date.iso();
        result.checkpoints.push_back(std::move(cp));
    }
    result.metrics = score_records(result.records, dataset, task, issue_date, config.weeks);
    return result;
}

std::string forecasts_csv(std::span<const ForecastRecord> records) {
    std::string out = "region,issue_date,target_end_date,week_offset,value\n";
    for (const auto& r : records) {
        for (std::size_t j = 0; j < r.values.size(); ++j) {
            out += csv::quote_if_needed(r.region);
            out += ',' + r.issue_date.iso() + ',' + r.target_end_dates[j].iso() + ',' + std::to_string(r.week_offset) +
                   ',' + csv::format_double(r.values[j]) + '\n';
        }
    }
    return out;
}

std::string metrics_csv(const MetricReport& report) {
    std::string out = "task,issue_date,week_offset,wape\n";
    const std::string prefix = std::string(to_string(report.task)) + ',' + report.issue_date.iso() + ',';
    for (std::size_t k = 0; k < report.wape_per_week.size(); ++k) {
        if (report.wape_per_week[k]) {
            out += prefix + std::to_string(k + 1) + ',' + csv::format_double(*report.wape_per_week[k]) + '\n';
        }
    }
    if (report.pooled) out += prefix + "all," + csv::format_double(*report.pooled) + '\n';
    return out;
}

std::string attention_csv(const RegionForecast& forecast, const Dataset& data) {
    std::string out = "region,window_end_date,weight\n";
    for (std::size_t r = 0; r < forecast.references.size(); ++r) {
        const auto& ref = forecast.references[r];
        out += csv::quote_if_needed(data.name(ref.region)) + ',' + data.date_at(ref.end - 1).iso() + ',' +
               csv::format_double(forecast.attention[r]) + '\n';
    }
    return out;
}

}  // namespace acts
