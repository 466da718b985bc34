#include "acts/cli.hpp"

#include "acts/analysis.hpp"
#include "acts/csv.hpp"
#include "acts/errors.hpp"
#include "acts/evaluator.hpp"
#include "acts/synthetic.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

namespace fs = std::filesystem;
using nlohmann::json;

namespace acts {

json RunConfig::to_json() const {
    json j = {{"data", data},
              {"features_static", features_static},
              {"features_dynamic", features_dynamic},
              {"out", out},
              {"weeks", weeks},
              {"jobs", jobs},
              {"train", train.to_json()}};
    j["task"] = task ? json(std::string(to_string(*task))) : json(nullptr);
    j["issue_date"] = issue_date ? json(issue_date->iso()) : json(nullptr);
    return j;
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known{"data", "features_static", "features_dynamic", "task", "issue_date",
                                             "out",  "weeks",           "jobs",             "train"};
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    RunConfig c;
    try {
        auto text = [&](const char* key, std::string& field) {
            if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<std::string>();
        };
        text("data", c.data);
        text("features_static", c.features_static);
        text("features_dynamic", c.features_dynamic);
        text("out", c.out);
        if (j.contains("task") && !j.at("task").is_null()) c.task = parse_incidence_kind(j.at("task").get<std::string>());
        if (j.contains("issue_date") && !j.at("issue_date").is_null()) {
            c.issue_date = Date::parse_or_throw(j.at("issue_date").get<std::string>());
        }
        if (j.contains("weeks")) c.weeks = j.at("weeks").get<std::size_t>();
        if (j.contains("jobs")) c.jobs = j.at("jobs").get<std::size_t>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    if (j.contains("train")) c.train = TrainConfig::from_json(j.at("train"));
    return c;
}

namespace {

struct Flags {
    std::string config, data, features_static, features_dynamic, task, issue_date, out, variant;
    std::size_t segment_len = 0, hidden = 0, iters = 0, week_offset = 0, weeks = 0, jobs = 0;
    double lr = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::string> checkpoints;
    std::string target;
    std::size_t clusters = 4, k_max = 10;
    bool benchmark = false;
    std::size_t seeds = 10, regions = 20, days = 120;
};

enum Groups : unsigned { kData = 1, kModel = 2, kRun = 4 };

void add_options(CLI::App* app, Flags& f, unsigned groups) {
    app->add_option("--config", f.config, "JSON config; flags override its values");
    app->add_option("--out", f.out, "Output directory");
    if (groups & kData) {
        app->add_option("--data", f.data, "Incidence CSV (long region,date,value or wide cumulative)");
        app->add_option("--features-static", f.features_static, "Static features CSV: region,<feature>...");
        app->add_option("--features-dynamic", f.features_dynamic, "Dynamic features CSV: region,date,<feature>...");
        app->add_option("--task", f.task, "cases|hosp|deaths");
        app->add_option("--issue-date", f.issue_date, "Last day of data the model may see");
    }
    if (groups & kModel) {
        app->add_option("--segment-len", f.segment_len, "Segment length l");
        app->add_option("--hidden", f.hidden, "Hidden size d");
        app->add_option("--lr", f.lr, "Learning rate");
        app->add_option("--iters", f.iters, "Maximum iterations");
        app->add_option("--seed", f.seed, "Random seed");
        app->add_option("--variant", f.variant, "full|d|n|i|f");
        app->add_option("--week-offset", f.week_offset, "Week offset k");
    }
    if (groups & kRun) {
        app->add_option("--weeks", f.weeks, "Week offsets to forecast (1..weeks)");
        app->add_option("--jobs", f.jobs, "Concurrent training runs");
    }
}

bool given(const CLI::App& app, const char* name) {
    const auto* opt = app.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

/// Values of the flags actually passed, shaped like a config document.
json flag_overlay(const CLI::App& app, const Flags& f) {
    json j = json::object();
    json t = json::object();
    if (given(app, "--data")) j["data"] = f.data;
    if (given(app, "--features-static")) j["features_static"] = f.features_static;
    if (given(app, "--features-dynamic")) j["features_dynamic"] = f.features_dynamic;
    if (given(app, "--task")) j["task"] = f.task;
    if (given(app, "--issue-date")) j["issue_date"] = f.issue_date;
    if (given(app, "--out")) j["out"] = f.out;
    if (given(app, "--weeks")) j["weeks"] = f.weeks;
    if (given(app, "--jobs")) j["jobs"] = f.jobs;
    if (given(app, "--segment-len")) t["segment_length"] = f.segment_len;
    if (given(app, "--hidden")) t["hidden"] = f.hidden;
    if (given(app, "--lr")) t["lr"] = f.lr;
    if (given(app, "--iters")) t["iters"] = f.iters;
    if (given(app, "--seed")) t["seed"] = f.seed;
    if (given(app, "--variant")) t["variant"] = f.variant;
    if (given(app, "--week-offset")) t["week_offset"] = f.week_offset;
    if (!t.empty()) j["train"] = t;
    return j;
}

RunConfig resolve(const CLI::App& app, const Flags& f) {
    json doc = json::object();
    if (!f.config.empty()) {
        const auto text = csv::read_text(f.config);
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError("config " + f.config + " is not valid JSON: " + e.what());
        }
        if (!doc.is_object()) throw ConfigError("config " + f.config + " must hold a JSON object");
    }
    doc.merge_patch(flag_overlay(app, f));
    auto rc = RunConfig::from_json(doc);
    rc.train.validate();
    return rc;
}

void require_file(const std::string& path, const char* flag) {
    if (path.empty()) throw UsageError(std::string(flag) + " is required");
    if (!fs::is_regular_file(path)) throw IoError(std::string("cannot open ") + flag + " file '" + path + "'");
}

IncidenceKind require_task(const RunConfig& rc) {
    if (!rc.task) throw UsageError("--task is required (cases|hosp|deaths)");
    return *rc.task;
}

fs::path prepare_out(const RunConfig& rc) {
    if (rc.out.empty()) throw UsageError("--out is required");
    std::error_code ec;
    fs::create_directories(rc.out, ec);
    if (ec || !fs::is_directory(rc.out)) throw IoError("cannot create output directory '" + rc.out + "'");
    return rc.out;
}

void check_inputs(const RunConfig& rc) {
    require_file(rc.data, "--data");
    if (!rc.features_static.empty()) require_file(rc.features_static, "--features-static");
    if (!rc.features_dynamic.empty()) require_file(rc.features_dynamic, "--features-dynamic");
}

Dataset load_dataset(const RunConfig& rc, IncidenceKind task, std::ostream& err, LoadReport* report_out = nullptr) {
    LoadReport report;
    auto data = to_incidence(load_incidence_csv(rc.data, task, &report), &report);
    if (!rc.features_static.empty()) data = attach_static_features(data, csv::read_text(rc.features_static));
    if (!rc.features_dynamic.empty()) {
        data = attach_dynamic_features(data, csv::read_text(rc.features_dynamic), &report);
    }
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    if (report_out) *report_out = report;
    return data;
}

Dataset history_through(const Dataset& data, std::optional<Date> issue) {
    if (!issue) return data;
    auto idx = data.index_of(*issue);
    if (!idx) {
        throw ConfigError("issue date " + issue->iso() + " is outside the data (" + data.start_date().iso() + " to " +
                          data.last_date().iso() + ")");
    }
    return data.prefix(*idx + 1);
}

void write_manifest(const fs::path& dir, std::string_view command, const RunConfig& rc, const std::string& data_hash,
                    const std::vector<std::string>& outputs, json extra = json::object()) {
    json m = {{"tool", "acts"},
              {"version", kToolVersion},
              {"command", command},
              {"config", rc.to_json()},
              {"seed", rc.train.seed},
              {"data_hash", data_hash},
              {"outputs", outputs}};
    for (auto& [k, v] : extra.items()) m[k] = v;
    csv::write_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

std::vector<std::string> region_names(const Dataset& data) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < data.regions(); ++i) out.push_back(data.name(i));
    return out;
}

void print_metrics(std::ostream& out, const MetricReport& m, std::string_view label) {
    bool any = false;
    for (std::size_t k = 0; k < m.wape_per_week.size(); ++k) {
        if (!m.wape_per_week[k]) continue;
        any = true;
        out << label << " week " << (k + 1) << " WAPE " << csv::format_double(*m.wape_per_week[k]) << '\n';
    }
    if (m.pooled) out << label << " pooled WAPE " << csv::format_double(*m.pooled) << '\n';
    if (!any) out << label << " metrics unavailable: no ground truth after the issue date\n";
}

void cmd_ingest(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    check_inputs(rc);
    const auto task = require_task(rc);
    const auto dir = prepare_out(rc);
    LoadReport report;
    const auto data = load_dataset(rc, task, err, &report);
    csv::write_atomic(dir / "incidence.csv", to_long_csv(data));
    json summary = {{"regions", data.regions()},
                    {"days", data.days()},
                    {"first_date", data.start_date().iso()},
                    {"last_date", data.last_date().iso()},
                    {"zero_filled", report.zero_filled},
                    {"clamped", report.clamped},
                    {"static_dims", data.static_dims()},
                    {"dynamic_dims", data.dynamic_dims()},
                    {"warnings", report.warnings}};
    csv::write_atomic(dir / "ingest.json", summary.dump(2) + "\n");
    write_manifest(dir, "ingest", rc, data.fingerprint_hex(), {"incidence.csv", "ingest.json"});
    out << "ingested " << data.regions() << " regions x " << data.days() << " days (" << report.zero_filled
        << " zero-filled, " << report.clamped << " clamped)\n";
}

Checkpoint make_checkpoint(TrainResult& result, const TrainConfig& config, const Dataset& history,
                           IncidenceKind task) {
    Checkpoint cp;
    cp.model = std::move(result.model);
    cp.config = config;
    cp.data_fingerprint = history.fingerprint();
    cp.regions = region_names(history);
    cp.task = task;
    cp.issue_date = history.last_date().iso();
    cp.best_val = result.best_val;
    return cp;
}

void cmd_train(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    check_inputs(rc);
    const auto task = require_task(rc);
    const auto dir = prepare_out(rc);
    const auto history = history_through(load_dataset(rc, task, err), rc.issue_date);
    auto result = train(history, rc.train);
    const auto iterations = result.iterations_run;
    const auto best_iteration = result.best_iteration;
    const auto trace = trace_csv(result.trace);
    const auto cp = make_checkpoint(result, rc.train, history, task);
    save_checkpoint(dir / "checkpoint.json", cp);
    csv::write_atomic(dir / "trace.csv", trace);
    write_manifest(dir, "train", rc, history.fingerprint_hex(), {"checkpoint.json", "trace.csv"});
    out << "trained " << cp.model.variant().tag() << " for " << iterations << " iterations; best validation loss "
        << csv::format_double(cp.best_val) << " at iteration " << best_iteration << '\n';
}

void cmd_tune(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    check_inputs(rc);
    const auto task = require_task(rc);
    const auto dir = prepare_out(rc);
    const auto history = history_through(load_dataset(rc, task, err), rc.issue_date);
    const auto entries = tune(history, rc.train, HyperGrid{}, rc.jobs);
    std::string table = "hidden,segment_length,lr,iters,val_loss,error\n";
    for (const auto& e : entries) {
        table += std::to_string(e.config.hidden) + ',' + std::to_string(e.config.segment_length) + ',' +
                 csv::format_double(e.config.lr) + ',' + std::to_string(e.config.iters) + ',' +
                 (e.error.empty() ? csv::format_double(e.val_loss) : std::string()) + ',' +
                 csv::quote_if_needed(e.error) + '\n';
    }
    const auto& best = best_entry(entries);
    RunConfig chosen = rc;
    chosen.train = best.config;
    csv::write_atomic(dir / "tune.csv", table);
    csv::write_atomic(dir / "best_config.json", chosen.to_json().dump(2) + "\n");
    write_manifest(dir, "tune", rc, history.fingerprint_hex(), {"tune.csv", "best_config.json"});
    out << "best of " << entries.size() << ": hidden " << best.config.hidden << ", segment length "
        << best.config.segment_length << ", lr " << csv::format_double(best.config.lr) << ", iters "
        << best.config.iters << " (validation loss " << csv::format_double(best.val_loss) << ")\n";
}

std::vector<Checkpoint> load_checkpoints(const Flags& f) {
    if (f.checkpoints.empty()) throw UsageError("--checkpoint is required");
    std::vector<Checkpoint> out;
    for (const auto& p : f.checkpoints) {
        require_file(p, "--checkpoint");
        out.push_back(load_checkpoint(p));
    }
    return out;
}

/// Task and issue date default to the checkpoint's; explicit values must agree on the task.
RunConfig with_checkpoint_defaults(RunConfig rc, const Checkpoint& cp) {
    if (rc.task && *rc.task != cp.task) {
        throw ConfigError("--task " + std::string(to_string(*rc.task)) + " does not match the checkpoint's task " +
                          std::string(to_string(cp.task)));
    }
    rc.task = cp.task;
    if (!rc.issue_date) rc.issue_date = Date::parse_or_throw(cp.issue_date);
    return rc;
}

void check_regions(const Checkpoint& cp, const Dataset& data) {
    if (cp.regions != region_names(data)) {
        throw ShapeError("checkpoint regions differ from the data's regions (names or order)");
    }
}

void cmd_forecast(const RunConfig& base, const Flags& f, std::ostream& out, std::ostream& err) {
    const auto checkpoints = load_checkpoints(f);
    const auto rc = with_checkpoint_defaults(base, checkpoints.front());
    check_inputs(rc);
    const auto dir = prepare_out(rc);
    const auto history = history_through(load_dataset(rc, *rc.task, err), rc.issue_date);
    std::vector<ForecastRecord> records;
    std::vector<std::string> outputs{"forecasts.csv"};
    for (const auto& cp : checkpoints) {
        if (cp.task != *rc.task) throw ConfigError("checkpoints mix tasks");
        check_regions(cp, history);
        if (cp.issue_date == history.last_date().iso() && cp.data_fingerprint != history.fingerprint()) {
            err << "warning: data through " << cp.issue_date << " differs from the data the checkpoint was trained on\n";
        }
        for (auto k : trained_offsets(cp.config)) {
            auto recs = make_records(cp.model, history, k, is_weekly(cp.task));
            records.insert(records.end(), recs.begin(), recs.end());
            if (!f.target.empty()) {
                auto region = history.find_region(f.target);
                if (!region) throw ConfigError("--target region '" + f.target + "' is not in the data");
                const auto name = "attention_week" + std::to_string(k) + ".csv";
                csv::write_atomic(dir / name, attention_csv(cp.model.forecast(history, *region, k), history));
                outputs.push_back(name);
            }
        }
    }
    csv::write_atomic(dir / "forecasts.csv", forecasts_csv(records));
    write_manifest(dir, "forecast", rc, history.fingerprint_hex(), outputs, {{"checkpoints", f.checkpoints}});
    out << "wrote " << records.size() << " forecast records for issue date " << history.last_date().iso() << '\n';
}

void write_protocol(const fs::path& dir, const ProtocolResult& result, std::vector<std::string>& outputs) {
    csv::write_atomic(dir / "forecasts.csv", forecasts_csv(result.records));
    csv::write_atomic(dir / "metrics.csv", metrics_csv(result.metrics));
    outputs.insert(outputs.end(), {"forecasts.csv", "metrics.csv"});
    fs::create_directories(dir / "checkpoints");
    for (const auto& cp : result.checkpoints) {
        const auto name = cp.config.shared_weeks > 0 ? std::string("checkpoints/shared.json")
                                                     : "checkpoints/week" + std::to_string(cp.config.week_offset) +
                                                           ".json";
        save_checkpoint(dir / name, cp);
        outputs.push_back(name);
    }
}

void cmd_evaluate(const RunConfig& rc, std::string_view command, std::ostream& out, std::ostream& err) {
    check_inputs(rc);
    const auto task = require_task(rc);
    if (!rc.issue_date) throw UsageError("--issue-date is required");
    const auto dir = prepare_out(rc);
    const auto data = load_dataset(rc, task, err);
    ProtocolConfig pc;
    pc.base = rc.train;
    pc.weeks = rc.weeks;
    pc.jobs = rc.jobs;
    const auto result = run_protocol(data, *rc.issue_date, task, pc);
    std::vector<std::string> outputs;
    write_protocol(dir, result, outputs);
    write_manifest(dir, command, rc, history_through(data, rc.issue_date).fingerprint_hex(), outputs);
    print_metrics(out, result.metrics, rc.train.variant.tag());
}

void cmd_ablate_benchmark(const RunConfig& rc, const Flags& f, std::ostream& out) {
    const auto dir = prepare_out(rc);
    SynthSpec spec;
    spec.regions = f.regions;
    spec.days = f.days;
    spec.segment_length = rc.train.segment_length;
    spec.horizon = rc.train.horizon;
    std::vector<std::uint64_t> seeds;
    for (std::size_t s = 0; s < f.seeds; ++s) seeds.push_back(rc.train.seed + s);
    const std::vector<ModelVariant> variants{rc.train.variant};
    const auto summary = run_transfer_benchmark(spec, seeds, rc.train, variants);
    const auto tag = rc.train.variant.tag();
    std::string table = "seed,variant,wape,copy_oracle_wape\n";
    for (const auto& run : summary.runs) {
        table += std::to_string(run.seed) + ',' + tag + ',' + csv::format_double(run.wape.at(tag)) + ',' +
                 csv::format_double(run.copy_oracle_wape) + '\n';
    }
    csv::write_atomic(dir / "benchmark.csv", table);
    write_manifest(dir, "ablate", rc, "synthetic", {"benchmark.csv"},
                   {{"benchmark", {{"seeds", seeds}, {"regions", spec.regions}, {"days", spec.days}}}});
    out << tag << " median WAPE " << csv::format_double(summary.median_wape.at(tag)) << " over " << seeds.size()
        << " seeds (copy oracle " << csv::format_double(summary.median_copy_oracle) << ")\n";
}

void cmd_cluster(const RunConfig& base, const Flags& f, std::ostream& out, std::ostream& err) {
    const auto checkpoints = load_checkpoints(f);
    if (checkpoints.size() != 1) throw UsageError("cluster takes exactly one --checkpoint");
    const auto& cp = checkpoints.front();
    const auto rc = with_checkpoint_defaults(base, cp);
    check_inputs(rc);
    const auto dir = prepare_out(rc);
    const auto history = history_through(load_dataset(rc, *rc.task, err), rc.issue_date);
    check_regions(cp, history);
    const auto queries = extract_queries(cp.model, history, history.days());
    const auto assignment = kmeans(queries, f.clusters, rc.train.seed);
    const auto k_max = std::min(f.k_max, queries.size());
    const auto elbow = elbow_curve(queries, k_max, 10, rc.train.seed);
    csv::write_atomic(dir / "clusters.csv", clusters_csv(region_names(history), assignment));
    csv::write_atomic(dir / "elbow.csv", elbow_csv(elbow));
    write_manifest(dir, "cluster", rc, history.fingerprint_hex(), {"clusters.csv", "elbow.csv"},
                   {{"checkpoints", f.checkpoints}, {"clusters", f.clusters}});
    out << "clustered " << queries.size() << " regions into " << f.clusters << " groups (sse "
        << csv::format_double(assignment.sse) << ")\n";
}

void cmd_synth(const RunConfig& rc, const Flags& f, std::ostream& out) {
    const auto dir = prepare_out(rc);
    SynthSpec spec;
    spec.regions = f.regions;
    spec.days = f.days;
    const auto bench = generate(spec, rc.train.seed);
    csv::write_atomic(dir / "incidence.csv", to_long_csv(bench.data));
    json truth = {{"target", bench.data.name(bench.target)},
                  {"donor", bench.data.name(bench.donor)},
                  {"donor_lag", bench.donor_lag},
                  {"gamma", bench.gamma}};
    csv::write_atomic(dir / "synth.json", truth.dump(2) + "\n");
    write_manifest(dir, "synth", rc, bench.data.fingerprint_hex(), {"incidence.csv", "synth.json"},
                   {{"synth", {{"regions", spec.regions}, {"days", spec.days}}}});
    out << "wrote " << spec.regions << " regions x " << spec.days << " days; target replays "
        << bench.data.name(bench.donor) << " " << bench.donor_lag << " days later\n";
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Inter-series attention forecaster for regional incidence", "acts"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    Flags f;

    auto* ingest = app.add_subcommand("ingest", "Validate and canonicalize an incidence file");
    add_options(ingest, f, kData);
    auto* train_cmd = app.add_subcommand("train", "Train one model on data through the issue date");
    add_options(train_cmd, f, kData | kModel);
    auto* tune_cmd = app.add_subcommand("tune", "Grid-search hyperparameters by validation loss");
    add_options(tune_cmd, f, kData | kModel | kRun);
    auto* forecast = app.add_subcommand("forecast", "Forecast every region from saved checkpoints");
    add_options(forecast, f, kData);
    forecast->add_option("--checkpoint", f.checkpoints, "Checkpoint file(s)");
    forecast->add_option("--target", f.target, "Also export attention weights for this region");
    auto* evaluate = app.add_subcommand("evaluate", "Train per-week models, forecast, and score WAPE");
    add_options(evaluate, f, kData | kModel | kRun);
    auto* ablate = app.add_subcommand("ablate", "Evaluate one ablation variant");
    add_options(ablate, f, kData | kModel | kRun);
    ablate->add_flag("--benchmark", f.benchmark, "Run on the synthetic pattern-transfer benchmark instead of --data");
    ablate->add_option("--seeds", f.seeds, "Benchmark seeds (starting at --seed)");
    auto* cluster = app.add_subcommand("cluster", "K-means over per-region query vectors");
    add_options(cluster, f, kData);
    cluster->add_option("--checkpoint", f.checkpoints, "Checkpoint file");
    cluster->add_option("--clusters", f.clusters, "K");
    cluster->add_option("--k-max", f.k_max, "Largest K on the elbow curve");
    cluster->add_option("--seed", f.seed, "Random seed");
    auto* synth = app.add_subcommand("synth", "Write a synthetic pattern-transfer dataset");
    add_options(synth, f, 0);
    synth->add_option("--seed", f.seed, "Random seed");
    for (auto* sub : {ablate, synth}) {
        sub->add_option("--regions", f.regions, "Synthetic regions");
        sub->add_option("--days", f.days, "Synthetic days");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const auto rc = resolve(*sub, f);
        if (sub == ingest) cmd_ingest(rc, out, err);
        else if (sub == train_cmd) cmd_train(rc, out, err);
        else if (sub == tune_cmd) cmd_tune(rc, out, err);
        else if (sub == forecast) cmd_forecast(rc, f, out, err);
        else if (sub == evaluate) cmd_evaluate(rc, "evaluate", out, err);
        else if (sub == ablate && f.benchmark) cmd_ablate_benchmark(rc, f, out);
        else if (sub == ablate) cmd_evaluate(rc, "ablate", out, err);
        else if (sub == cluster) cmd_cluster(rc, f, out, err);
        else if (sub == synth) cmd_synth(rc, f, out);
        return 0;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace acts
