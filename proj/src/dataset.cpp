#include "acts/dataset.hpp"

#include "acts/csv.hpp"
#include "acts/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <unordered_map>

namespace acts {

std::string_view to_string(IncidenceKind kind) {
    switch (kind) {
        case IncidenceKind::cases: return "cases";
        case IncidenceKind::hospitalizations: return "hosp";
        case IncidenceKind::deaths: return "deaths";
    }
    return "cases";
}

IncidenceKind parse_incidence_kind(std::string_view text) {
    if (text == "cases") return IncidenceKind::cases;
    if (text == "hosp" || text == "hospitalizations") return IncidenceKind::hospitalizations;
    if (text == "deaths") return IncidenceKind::deaths;
    throw ConfigError("unknown task kind '" + std::string(text) + "' (expected cases|hosp|deaths)");
}

Dataset::Dataset(std::vector<IncidenceSeries> series, bool cumulative)
    : series_(std::move(series)), cumulative_(cumulative) {
    if (series_.empty()) throw DataError("dataset needs at least one region");
    days_ = series_.front().values.size();
    start_ = series_.front().start_date;
    for (std::size_t i = 0; i < series_.size(); ++i) {
        auto& s = series_[i];
        s.region.index = i;
        if (s.region.name.empty()) throw DataError("region " + std::to_string(i) + " has an empty name");
        if (s.values.size() != days_ || s.start_date != start_) {
            throw DataError("region '" + s.region.name + "' is not aligned to the common calendar");
        }
        for (double v : s.values) {
            if (!std::isfinite(v) || v < 0.0) {
                throw DataError("region '" + s.region.name + "' has a negative or non-finite value");
            }
        }
    }
    if (days_ == 0) throw DataError("dataset has no days");
}

std::optional<std::size_t> Dataset::index_of(Date date) const {
    long off = date - start_;
    if (off < 0 || static_cast<std::size_t>(off) >= days_) return std::nullopt;
    return static_cast<std::size_t>(off);
}

std::optional<std::size_t> Dataset::find_region(std::string_view name) const {
    for (const auto& s : series_) {
        if (s.region.name == name) return s.region.index;
    }
    return std::nullopt;
}

std::span<const double> Dataset::static_features(std::size_t region) const {
    if (static_dims_ == 0) return {};
    return std::span<const double>(static_).subspan(region * static_dims_, static_dims_);
}

std::span<const double> Dataset::dynamic_features(std::size_t region, std::size_t day) const {
    if (dynamic_dims_ == 0) return {};
    if (day >= days_) throw UsageError("dynamic feature day " + std::to_string(day) + " beyond dataset end");
    return std::span<const double>(dynamic_.at(region)).subspan(day * dynamic_dims_, dynamic_dims_);
}

Dataset Dataset::with_static_features(std::vector<std::vector<double>> rows) const {
    if (rows.size() != regions()) throw DataError("static features must have one row per region");
    const std::size_t m = rows.empty() ? 0 : rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != m) throw DataError("static feature rows differ in length");
        for (double v : r) {
            if (!std::isfinite(v)) throw DataError("non-finite static feature");
        }
    }
    Dataset out = *this;
    out.static_dims_ = m;
    out.static_.assign(regions() * m, 0.0);
    for (std::size_t f = 0; f < m; ++f) {
        double mean = 0.0;
        for (const auto& r : rows) mean += r[f];
        mean /= static_cast<double>(rows.size());
        double var = 0.0;
        for (const auto& r : rows) var += (r[f] - mean) * (r[f] - mean);
        double sd = std::sqrt(var / static_cast<double>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out.static_[i * m + f] = sd > 0.0 ? (rows[i][f] - mean) / sd : 0.0;
        }
    }
    return out;
}

Dataset Dataset::with_dynamic_features(std::vector<std::vector<double>> per_region, std::size_t dims) const {
    if (per_region.size() != regions()) throw DataError("dynamic features must cover every region");
    for (const auto& r : per_region) {
        if (r.size() != days_ * dims) throw DataError("dynamic features must cover every day");
        for (double v : r) {
            if (!std::isfinite(v)) throw DataError("non-finite dynamic feature");
        }
    }
    Dataset out = *this;
    out.dynamic_dims_ = dims;
    out.dynamic_ = std::move(per_region);
    if (dims == 0) out.dynamic_.clear();
    return out;
}

Dataset Dataset::without_features() const {
    Dataset out = *this;
    out.static_dims_ = 0;
    out.static_.clear();
    out.dynamic_dims_ = 0;
    out.dynamic_.clear();
    return out;
}

Dataset Dataset::prefix(std::size_t days) const {
    if (days == 0 || days > days_) {
        throw UsageError("prefix of " + std::to_string(days) + " days requested from a " + std::to_string(days_) +
                         "-day dataset");
    }
    Dataset out = *this;
    out.days_ = days;
    for (auto& s : out.series_) s.values.resize(days);
    for (auto& r : out.dynamic_) r.resize(days * dynamic_dims_);
    return out;
}

Dataset Dataset::subset(std::span<const std::size_t> regions) const {
    std::vector<IncidenceSeries> picked;
    for (auto r : regions) picked.push_back(series_.at(r));
    Dataset out(std::move(picked), cumulative_);
    out.static_dims_ = static_dims_;
    out.dynamic_dims_ = dynamic_dims_;
    for (auto r : regions) {
        auto u = static_features(r);
        out.static_.insert(out.static_.end(), u.begin(), u.end());
        if (dynamic_dims_ > 0) out.dynamic_.push_back(dynamic_.at(r));
    }
    return out;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string Dataset::fingerprint_hex() const { return hex64(fingerprint()); }

std::uint64_t Dataset::fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix_bytes = [&](const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    auto mix_double = [&](double v) { mix_bytes(&v, sizeof v); };
    auto start = start_.iso();
    mix_bytes(start.data(), start.size());
    for (const auto& s : series_) {
        mix_bytes(s.region.name.data(), s.region.name.size());
        for (double v : s.values) mix_double(v);
    }
    for (double v : static_) mix_double(v);
    for (const auto& r : dynamic_) {
        for (double v : r) mix_double(v);
    }
    return h;
}

namespace {

bool header_is_long(const csv::Row& header) {
    return header.fields.size() == 3 && header.fields[0] == "region" && header.fields[1] == "date" &&
           header.fields[2] == "value";
}

Dataset build_from_map(const std::vector<std::string>& order,
                       const std::unordered_map<std::string, std::map<Date, double>>& by_region,
                       IncidenceKind kind, bool cumulative, LoadReport* report) {
    Date lo = by_region.at(order.front()).begin()->first;
    Date hi = lo;
    for (const auto& name : order) {
        const auto& m = by_region.at(name);
        lo = std::min(lo, m.begin()->first);
        hi = std::max(hi, m.rbegin()->first);
    }
    const auto days = static_cast<std::size_t>(hi - lo) + 1;
    std::vector<IncidenceSeries> series;
    std::size_t filled = 0;
    for (const auto& name : order) {
        IncidenceSeries s;
        s.region.name = name;
        s.start_date = lo;
        s.kind = kind;
        s.values.assign(days, 0.0);
        std::vector<bool> seen(days, false);
        for (const auto& [date, v] : by_region.at(name)) {
            auto idx = static_cast<std::size_t>(date - lo);
            s.values[idx] = v;
            seen[idx] = true;
        }
        filled += static_cast<std::size_t>(std::count(seen.begin(), seen.end(), false));
        series.push_back(std::move(s));
    }
    if (report != nullptr && filled > 0) {
        report->zero_filled += filled;
        report->warnings.push_back(std::to_string(filled) + " missing region-days zero-filled");
    }
    return Dataset(std::move(series), cumulative);
}

}  // namespace

Dataset parse_incidence_csv(std::string_view text, IncidenceKind kind, LoadReport* report) {
    auto rows = csv::parse(text);
    if (rows.empty()) throw FormatError("line 1: empty incidence file");
    const auto& header = rows.front();

    std::vector<std::string> order;
    std::unordered_map<std::string, std::map<Date, double>> by_region;
    auto insert = [&](const std::string& region, Date date, double v, std::size_t line) {
        if (region.empty()) throw FormatError("line " + std::to_string(line) + ": empty region name");
        auto [it, fresh] = by_region.try_emplace(region);
        if (fresh) order.push_back(region);
        if (!it->second.emplace(date, v).second) {
            throw DataError("line " + std::to_string(line) + ": duplicate entry for (" + region + ", " +
                            date.iso() + ")");
        }
    };

    bool cumulative = false;
    if (header_is_long(header)) {
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.fields.size() != 3) {
                throw FormatError("line " + std::to_string(row.line) + ": expected 3 fields, got " +
                                  std::to_string(row.fields.size()));
            }
            auto date = Date::parse(row.fields[1]);
            if (!date) throw FormatError("line " + std::to_string(row.line) + ": bad date '" + row.fields[1] + "'");
            double v = csv::parse_double(row.fields[2], row.line);
            if (v < 0.0) throw DataError("line " + std::to_string(row.line) + ": negative incidence value");
            insert(row.fields[0], *date, v, row.line);
        }
    } else {
        if (header.fields.size() < 2) throw FormatError("line 1: unrecognized header");
        std::vector<Date> dates;
        for (std::size_t c = 1; c < header.fields.size(); ++c) {
            auto d = Date::parse(header.fields[c]);
            if (!d) {
                throw FormatError("line 1: header is neither 'region,date,value' nor a wide date header (column '" +
                                  header.fields[c] + "')");
            }
            dates.push_back(*d);
        }
        cumulative = true;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.fields.size() != header.fields.size()) {
                throw FormatError("line " + std::to_string(row.line) + ": expected " +
                                  std::to_string(header.fields.size()) + " fields, got " +
                                  std::to_string(row.fields.size()));
            }
            for (std::size_t c = 1; c < row.fields.size(); ++c) {
                insert(row.fields[0], dates[c - 1], csv::parse_double(row.fields[c], row.line), row.line);
            }
        }
    }
    if (order.empty()) throw FormatError("line " + std::to_string(rows.back().line) + ": no data rows");
    return build_from_map(order, by_region, kind, cumulative, report);
}

Dataset load_incidence_csv(const std::filesystem::path& path, IncidenceKind kind, LoadReport* report) {
    return parse_incidence_csv(csv::read_text(path), kind, report);
}

DiffResult diff_cumulative(std::span<const double> cumulative) {
    DiffResult out;
    out.values.reserve(cumulative.size());
    for (std::size_t t = 0; t < cumulative.size(); ++t) {
        if (t == 0) {
            out.values.push_back(cumulative[0]);
            continue;
        }
        double inc = cumulative[t] - cumulative[t - 1];
        if (inc < 0.0) {
            ++out.clamped;
            inc = 0.0;
        }
        out.values.push_back(inc);
    }
    return out;
}

Dataset to_incidence(const Dataset& dataset, LoadReport* report) {
    if (!dataset.cumulative()) return dataset;
    std::vector<IncidenceSeries> series;
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < dataset.regions(); ++i) {
        auto s = dataset.series(i);
        auto diff = diff_cumulative(s.values);
        clamped += diff.clamped;
        s.values = std::move(diff.values);
        series.push_back(std::move(s));
    }
    if (report != nullptr && clamped > 0) {
        report->clamped += clamped;
        report->warnings.push_back(std::to_string(clamped) + " negative daily increments clamped to 0");
    }
    return Dataset(std::move(series), false);
}

std::string to_long_csv(const Dataset& dataset) {
    std::string out = "region,date,value\n";
    for (std::size_t i = 0; i < dataset.regions(); ++i) {
        const auto name = csv::quote_if_needed(dataset.name(i));
        auto values = dataset.values(i);
        for (std::size_t t = 0; t < dataset.days(); ++t) {
            out += name;
            out += ',';
            out += dataset.date_at(t).iso();
            out += ',';
            out += csv::format_double(values[t]);
            out += '\n';
        }
    }
    return out;
}

Dataset attach_static_features(const Dataset& dataset, std::string_view csv_text) {
    auto rows = csv::parse(csv_text);
    if (rows.empty() || rows.front().fields.empty() || rows.front().fields[0] != "region") {
        throw FormatError("line 1: static feature header must start with 'region'");
    }
    const std::size_t m = rows.front().fields.size() - 1;
    std::vector<std::vector<double>> table(dataset.regions());
    std::vector<bool> seen(dataset.regions(), false);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != m + 1) throw FormatError("line " + std::to_string(row.line) + ": wrong field count");
        auto idx = dataset.find_region(row.fields[0]);
        if (!idx) continue;
        if (seen[*idx]) throw DataError("line " + std::to_string(row.line) + ": duplicate region " + row.fields[0]);
        seen[*idx] = true;
        for (std::size_t c = 1; c <= m; ++c) table[*idx].push_back(csv::parse_double(row.fields[c], row.line));
    }
    for (std::size_t i = 0; i < dataset.regions(); ++i) {
        if (!seen[i]) throw DataError("static features missing for region '" + dataset.name(i) + "'");
    }
    return dataset.with_static_features(std::move(table));
}

Dataset attach_dynamic_features(const Dataset& dataset, std::string_view csv_text, LoadReport* report) {
    auto rows = csv::parse(csv_text);
    if (rows.empty() || rows.front().fields.size() < 3 || rows.front().fields[0] != "region" ||
        rows.front().fields[1] != "date") {
        throw FormatError("line 1: dynamic feature header must start with 'region,date'");
    }
    const std::size_t m = rows.front().fields.size() - 2;
    std::vector<std::vector<double>> per_region(dataset.regions(), std::vector<double>(dataset.days() * m, 0.0));
    std::vector<std::vector<bool>> seen(dataset.regions(), std::vector<bool>(dataset.days(), false));
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != m + 2) throw FormatError("line " + std::to_string(row.line) + ": wrong field count");
        auto idx = dataset.find_region(row.fields[0]);
        if (!idx) continue;
        auto date = Date::parse(row.fields[1]);
        if (!date) throw FormatError("line " + std::to_string(row.line) + ": bad date '" + row.fields[1] + "'");
        auto day = dataset.index_of(*date);
        if (!day) continue;
        if (seen[*idx][*day]) throw DataError("line " + std::to_string(row.line) + ": duplicate (region,date)");
        seen[*idx][*day] = true;
        for (std::size_t c = 0; c < m; ++c) {
            per_region[*idx][*day * m + c] = csv::parse_double(row.fields[c + 2], row.line);
        }
    }
    std::size_t filled = 0;
    for (const auto& s : seen) filled += static_cast<std::size_t>(std::count(s.begin(), s.end(), false));
    if (report != nullptr && filled > 0) {
        report->zero_filled += filled;
        report->warnings.push_back(std::to_string(filled) + " missing dynamic-feature days zero-filled");
    }
    return dataset.with_dynamic_features(std::move(per_region), m);
}

WindowIndex make_windows(const Dataset& dataset, std::size_t segment_length, std::size_t horizon,
                         std::size_t week_offset, std::size_t last_day, LoadReport* report) {
    if (segment_length < 2) throw ConfigError("segment length must be at least 2");
    if (horizon < 1) throw ConfigError("horizon must be at least 1");
    if (week_offset < 1) throw ConfigError("week offset must be at least 1");
    if (last_day > dataset.days()) throw ConfigError("last usable day beyond dataset length");
    WindowIndex idx{{}, segment_length, horizon, week_offset};
    if (segment_length > last_day && report != nullptr) {
        report->warnings.push_back("segment length exceeds history; no windows");
    }
    const std::size_t reach = week_offset * horizon;
    if (last_day < reach) return idx;
    const std::size_t hi = last_day - reach;
    for (std::size_t t = segment_length; t <= hi; ++t) {
        for (std::size_t i = 0; i < dataset.regions(); ++i) idx.pairs.push_back({i, t});
    }
    return idx;
}

TrainValSplit train_val_split(const Dataset& dataset, std::size_t segment_length) {
    const std::size_t L = dataset.days();
    if (L < 8 + segment_length) {
        throw ConfigError("dataset has " + std::to_string(L) + " days; at least " +
                          std::to_string(8 + segment_length) + " are needed for a 7-day validation split");
    }
    return {L - kValidationDays, L - kValidationDays + 1, L};
}

}  // namespace acts
