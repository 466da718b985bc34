// Acceptance checks: one PASS/FAIL/SKIP line per criterion, non-zero exit on any failure.
#include "acts/analysis.hpp"
#include "acts/attention.hpp"
#include "acts/cli.hpp"
#include "acts/csv.hpp"
#include "acts/detrend.hpp"
#include "acts/embedding.hpp"
#include "acts/errors.hpp"
#include "acts/evaluator.hpp"
#include "acts/synthetic.hpp"
#include "acts/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

using namespace acts;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Verdict {
    enum Kind { pass, fail, skip } kind = fail;
    std::string detail;
};

ad::Param random_param(const std::string& name, ad::Shape shape, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(shape.size());
    for (auto& x : v) x = dist(rng);
    return ad::Param(name, shape, std::move(v));
}

ad::Var weighted(ad::Tape& t, ad::Var v) {
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.25 + 0.13 * static_cast<double>(i % 5);
    return ad::dot(v, t.constant(std::move(w), v.shape()));
}

Verdict gradient_correctness() {
    const auto start = Clock::now();
    std::mt19937_64 rng(1);
    auto a = random_param("a", {3, 4}, rng), b = random_param("b", {3, 4}, rng);
    auto v = random_param("v", {4, 1}, rng), m = random_param("m", {5, 4}, rng);
    auto seq = random_param("seq", {6, 2}, rng), kern = random_param("kern", {3, 6}, rng);
    auto keys = random_param("keys", {6, 4}, rng), vals = random_param("vals", {6, 3}, rng);
    ad::Param away("away", {4, 1}, std::vector<double>{0.7, -0.4, 1.3, -2.1});
    ad::Param resid("resid", {14, 1}, std::vector<double>{1.2, 0.7, 2.2, 1.9, 0.4, 3.1, 1.5, 0.8, 2.6, 1.1, 0.9,
                                                          1.7, 2.4, 0.6});
    ad::Param holt("holt", {1, 4}, std::vector<double>{3.0, 0.8, 0.3, -0.6});
    const std::vector<double> series{4, 6, 5, 9, 12, 11, 15, 13};
    const std::vector<std::size_t> rows{0, 2, 3, 5};

    using P = std::vector<ad::Param*>;
    const std::vector<std::pair<ad::LossBuilder, P>> ops{
        {[&](ad::Tape& t) { return weighted(t, ad::add(t.param(a), t.param(b))); }, P{&a, &b}},
        {[&](ad::Tape& t) { return weighted(t, ad::sub(t.param(a), t.param(b))); }, P{&a, &b}},
        {[&](ad::Tape& t) { return weighted(t, ad::mul(t.param(a), t.param(b))); }, P{&a, &b}},
        {[&](ad::Tape& t) { return weighted(t, ad::scale(t.param(a), -1.5)); }, P{&a}},
        {[&](ad::Tape& t) { return weighted(t, ad::add_scalar(t.param(a), 0.5)); }, P{&a}},
        {[&](ad::Tape& t) { return weighted(t, ad::abs(t.param(away))); }, P{&away}},
        {[&](ad::Tape& t) { return weighted(t, ad::logistic(t.param(a))); }, P{&a}},
        {[&](ad::Tape& t) { return ad::mul(ad::sum(t.param(a)), ad::mean(t.param(b))); }, P{&a, &b}},
        {[&](ad::Tape& t) { return ad::dot(t.param(a), t.param(b)); }, P{&a, &b}},
        {[&](ad::Tape& t) { return weighted(t, ad::cumsum(t.param(v))); }, P{&v}},
        {[&](ad::Tape& t) { return weighted(t, ad::slice(t.param(a), 3, 6)); }, P{&a}},
        {[&](ad::Tape& t) { return weighted(t, ad::concat(t.param(v), t.param(away))); }, P{&v, &away}},
        {[&](ad::Tape& t) { return weighted(t, ad::row(t.param(a), 2)); }, P{&a}},
        {[&](ad::Tape& t) {
             std::vector<ad::Var> r{t.param(v), t.param(away)};
             return weighted(t, ad::stack_rows(r));
         },
         P{&v, &away}},
        {[&](ad::Tape& t) { return weighted(t, ad::hstack(t.param(a), t.param(b))); }, P{&a, &b}},
        {[&](ad::Tape& t) { return weighted(t, ad::matvec(t.param(a), t.param(v))); }, P{&a, &v}},
        {[&](ad::Tape& t) { return weighted(t, ad::matmul_nt(t.param(m), t.param(a))); }, P{&m, &a}},
        {[&](ad::Tape& t) { return weighted(t, ad::conv1d(t.param(seq), t.param(kern), 3)); }, P{&seq, &kern}},
        {[&](ad::Tape& t) { return weighted(t, ad::avg_pool(t.param(seq))); }, P{&seq}},
        {[&](ad::Tape& t) { return weighted(t, ad::softmax(t.param(v))); }, P{&v}},
        {[&](ad::Tape& t) { return weighted(t, ad::attend(t.param(v), t.param(keys), t.param(vals), rows)); },
         P{&v, &keys, &vals}},
        {[&](ad::Tape& t) { return weighted(t, normalize_window(t.param(resid), 0, 7, 7, 5)); }, P{&resid}},
        {[&](ad::Tape& t) {
             auto pred = ad::slice(t.param(resid), 7, 7);
             return weighted(t, inverse_normalize(pred, t.param(resid), 0, 7));
         },
         P{&resid}},
        {[&](ad::Tape& t) {
             auto ls = holt_filter(t.param(holt), 0, series);
             return weighted(t, trend_extrapolate(ls, 6, 1, 7));
         },
         P{&holt}},
    };
    double worst = 0.0;
    for (const auto& [loss, params] : ops) worst = std::max(worst, ad::grad_check(loss, params));

    SynthSpec spec;
    spec.regions = 3;
    spec.days = 40;
    const auto data = generate(spec, 1).data;
    ModelShape shape;
    shape.regions = 3;
    shape.hidden = 8;
    ActsModel model(shape, {});
    model.initialize(data, 1);
    std::vector<Target> batch;
    for (std::size_t T = 14; T <= 33; T += 3) batch.push_back({T % 3, T, 1});
    const double joint = ad::grad_check([&](ad::Tape& t) { return model.loss(t, data, batch); }, model.parameters());
    const double secs = seconds_since(start);
    const bool ok = worst < 1e-4 && joint < 1e-4 && secs < 30.0;
    return {ok ? Verdict::pass : Verdict::fail, "max op error " + fmt(worst) + ", joint loss error " + fmt(joint) +
                                                    " (tol 1e-4), " + fmt(secs) + " s (limit 30)"};
}

Verdict holt_oracle() {
    const auto s = holt_filter(std::vector<double>{1, 2, 3}, HoltParams::from_coefficients(1.0, 1.0, 0.5, 0.5));
    const double err = std::max({std::fabs(s.levels[0] - 1.5), std::fabs(s.levels[1] - 2.125),
                                 std::fabs(s.slopes[0] - 0.75), std::fabs(s.slopes[1] - 0.6875)});
    bool constant_exact = true;
    for (double c : {0.0, 3.0, 17.25, 1e4}) {
        const std::vector<double> x(60, c);
        for (double r : holt_filter(x, HoltParams::initial_for(x)).residuals) constant_exact &= r == 0.0;
    }
    const bool ok = err <= 1e-12 && constant_exact;
    return {ok ? Verdict::pass : Verdict::fail,
            "recurrence error " + fmt(err) + " (tol 1e-12), constant residuals exactly 0: " +
                (constant_exact ? "yes" : "no")};
}

Verdict normalization_contract() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> value(-100.0, 100.0);
    std::uniform_int_distribution<int> length(2, 28);
    std::size_t endpoint_failures = 0, degenerate = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> seg(static_cast<std::size_t>(length(rng))), cont(7);
        for (auto& v : seg) v = value(rng);
        for (auto& v : cont) v = value(rng);
        const auto n = cum_minmax_normalize(seg);
        if (n.scale.degenerate()) {
            ++degenerate;
            continue;
        }
        if (n.values.front() != 0.0 || n.values.back() != 1.0) ++endpoint_failures;
        const auto back = inverse_normalize(normalize_continuation(cont, n.scale), n.scale);
        for (std::size_t j = 0; j < cont.size(); ++j) worst = std::max(worst, std::fabs(back[j] - cont[j]));
    }
    const bool ok = endpoint_failures == 0 && worst <= 1e-9;
    return {ok ? Verdict::pass : Verdict::fail, std::to_string(endpoint_failures) + " endpoint failures, round-trip error " +
                                                    fmt(worst) + " (tol 1e-9), " + std::to_string(degenerate) +
                                                    " degenerate windows"};
}

Verdict attention_contract() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    auto vec = [&](std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) x = u(rng);
        return v;
    };
    double sum_err = 0.0, perm_err = 0.0, identity_err = 0.0;
    bool negative = false;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 50);
        const auto q = vec(8);
        std::vector<std::vector<double>> keys, values;
        for (std::size_t r = 0; r < n; ++r) {
            keys.push_back(vec(8));
            values.push_back(vec(4));
        }
        const auto out = attend(q, keys, values);
        for (double w : out.weights) negative |= w < 0.0;
        sum_err = std::max(sum_err, std::fabs(std::accumulate(out.weights.begin(), out.weights.end(), 0.0) - 1.0));
        if (n == 1) {
            for (std::size_t c = 0; c < 4; ++c) identity_err = std::max(identity_err, std::fabs(out.value[c] - values[0][c]));
        }
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::vector<double>> pk, pv;
        for (auto r : perm) {
            pk.push_back(keys[r]);
            pv.push_back(values[r]);
        }
        const auto shuffled = attend(q, pk, pv);
        for (std::size_t c = 0; c < 4; ++c) perm_err = std::max(perm_err, std::fabs(shuffled.value[c] - out.value[c]));
    }
    const bool ok = !negative && sum_err <= 1e-9 && identity_err == 0.0 && perm_err <= 1e-12;
    return {ok ? Verdict::pass : Verdict::fail, std::string("negative weights: ") + (negative ? "yes" : "no") +
                                                    ", sum error " + fmt(sum_err) + ", single-window error " +
                                                    fmt(identity_err) + ", permutation error " + fmt(perm_err)};
}

std::vector<std::uint64_t> benchmark_seeds() {
    std::vector<std::uint64_t> seeds(10);
    std::iota(seeds.begin(), seeds.end(), 1);
    return seeds;
}

struct TransferResults {
    BenchmarkSummary main;       // full and i
    BenchmarkSummary ablations;  // d, n, f
    double main_seconds = 0.0;
};

TransferResults run_transfer() {
    TransferResults r;
    const SynthSpec spec;
    const TrainConfig config;
    const auto seeds = benchmark_seeds();
    const std::vector<ModelVariant> main{ModelVariant::parse("full"), ModelVariant::parse("i")};
    const auto start = Clock::now();
    r.main = run_transfer_benchmark(spec, seeds, config, main);
    r.main_seconds = seconds_since(start);
    const std::vector<ModelVariant> rest{ModelVariant::parse("d"), ModelVariant::parse("n"), ModelVariant::parse("f")};
    r.ablations = run_transfer_benchmark(spec, seeds, config, rest);
    return r;
}

Verdict pattern_transfer(const TransferResults& r) {
    const double full = r.main.median_wape.at("full"), own = r.main.median_wape.at("i");
    const double oracle = r.main.median_copy_oracle;
    const double gain = own > 0.0 ? (own - full) / own : 0.0;
    const bool ok = gain >= 0.2 && full <= 2.0 * oracle && r.main_seconds < 600.0;
    return {ok ? Verdict::pass : Verdict::fail,
            "median WAPE full " + fmt(full) + ", i " + fmt(own) + " (gain " + fmt(100.0 * gain) +
                "%, need >= 20%), copy oracle " + fmt(oracle) + " (full/oracle " + fmt(full / oracle) +
                ", need <= 2), " + fmt(r.main_seconds) + " s (limit 600)"};
}

Verdict ablation_harness(const TransferResults& r) {
    bool finite = true;
    for (const auto* s : {&r.main, &r.ablations}) {
        for (const auto& run : s->runs) {
            for (const auto& [tag, loss] : run.final_loss) finite &= std::isfinite(loss) && std::isfinite(run.wape.at(tag));
        }
    }
    const double full = r.main.median_wape.at("full");
    std::string detail = "median WAPE full " + fmt(full);
    bool ordered = true;
    for (const char* tag : {"d", "n", "i", "f"}) {
        const double m = tag == std::string("i") ? r.main.median_wape.at(tag) : r.ablations.median_wape.at(tag);
        detail += std::string(", ") + tag + " " + fmt(m);
        ordered &= full <= m;
    }
    detail += std::string(", losses finite: ") + (finite ? "yes" : "no");
    return {finite && ordered ? Verdict::pass : Verdict::fail, detail};
}

Verdict real_data() {
    const char* path = std::getenv("ACTS_REAL_DATA");
    if (path == nullptr || *path == '\0') return {Verdict::skip, "set ACTS_REAL_DATA to a deaths CSV to run"};
    try {
        auto data = to_incidence(load_incidence_csv(path, IncidenceKind::deaths));
        if (const char* stat = std::getenv("ACTS_REAL_STATIC"); stat != nullptr && *stat != '\0') {
            data = attach_static_features(data, csv::read_text(stat));
        }
        const Date issue(2020, 8, 30);
        const auto idx = data.index_of(issue);
        if (!idx) return {Verdict::fail, "data does not cover 2020-08-30"};
        const std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
        const auto start = Clock::now();
        ProtocolConfig protocol;
        protocol.jobs = jobs;
        for (std::size_t k = 1; k <= protocol.weeks; ++k) {
            TrainConfig base;
            base.week_offset = k;
            const auto entries = tune(data.prefix(*idx + 1), base, HyperGrid{}, jobs);
            protocol.per_week.push_back(best_entry(entries).config);
        }
        const auto result = run_protocol(data, issue, IncidenceKind::deaths, protocol);
        const double secs = seconds_since(start);
        if (!result.metrics.pooled) return {Verdict::fail, "truth for the four weeks after 2020-08-30 is missing"};
        const double w = *result.metrics.pooled;
        const bool ok = w <= 0.45 && secs < 1800.0 && data.regions() == 51;
        return {ok ? Verdict::pass : Verdict::fail, "pooled 4-week WAPE " + fmt(w) + " (need <= 0.45) over " +
                                                        std::to_string(data.regions()) + " regions, " + fmt(secs) +
                                                        " s (limit 1800)"};
    } catch (const std::exception& e) {
        return {Verdict::fail, e.what()};
    }
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "acts");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_command(static_cast<int>(argv.size()), argv.data(), out, err);
}

Verdict determinism() {
    const auto dir = fs::temp_directory_path() / ("acts_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto p = [&](const std::string& name) { return (dir / name).string(); };
    Verdict v;
    try {
        if (cli({"synth", "--out", p("synth"), "--regions", "6", "--days", "70", "--seed", "2"}) != 0) {
            throw std::runtime_error("synth failed");
        }
        const std::string data = p("synth") + "/incidence.csv";
        std::vector<std::string> outputs;
        for (const char* run : {"a", "b"}) {
            const std::string base = p(run);
            const std::vector<std::string> common{"--data", data, "--task", "hosp", "--issue-date", "2020-04-30"};
            std::vector<std::string> train{"train", "--out", base + "/train", "--iters", "100", "--seed", "7"};
            train.insert(train.end(), common.begin(), common.end());
            std::vector<std::string> forecast{"forecast", "--out", base + "/forecast", "--checkpoint",
                                              base + "/train/checkpoint.json"};
            forecast.insert(forecast.end(), common.begin(), common.end());
            if (cli(train) != 0 || cli(forecast) != 0) throw std::runtime_error("train or forecast failed");
            outputs.push_back(csv::read_text(base + "/forecast/forecasts.csv"));
        }
        const bool same = outputs[0] == outputs[1] && !outputs[0].empty();
        v = {same ? Verdict::pass : Verdict::fail,
             std::string("forecast CSVs ") + (same ? "byte-identical" : "differ") + " (" +
                 std::to_string(outputs[0].size()) + " bytes)"};
    } catch (const std::exception& e) {
        v = {Verdict::fail, e.what()};
    }
    fs::remove_all(dir);
    return v;
}

Verdict clustering() {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> noise(0.0, 0.5);
    const std::vector<Point> centers{{0, 0, 0, 0}, {8, 0, 0, 0}, {0, 8, 0, 0}, {0, 0, 8, 0}};
    std::vector<Point> points;
    std::vector<std::size_t> truth;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (int i = 0; i < 30; ++i) {
            Point p = centers[c];
            for (auto& x : p) x += noise(rng);
            points.push_back(std::move(p));
            truth.push_back(c);
        }
    }
    const double ari = adjusted_rand_index(truth, kmeans(points, 4, 1).labels);
    const auto elbow = elbow_curve(points, 8);
    bool monotone = true;
    for (std::size_t k = 1; k < elbow.size(); ++k) monotone &= elbow[k] <= elbow[k - 1];
    // Sharp drop: going from 3 to 4 clusters removes far more error than any later step.
    const double drop_at_4 = elbow[2] - elbow[3];
    double later = 0.0;
    for (std::size_t k = 4; k < elbow.size(); ++k) later = std::max(later, elbow[k - 1] - elbow[k]);
    const bool sharp = drop_at_4 > 5.0 * later;
    const bool ok = std::fabs(ari - 1.0) < 1e-12 && monotone && sharp;
    return {ok ? Verdict::pass : Verdict::fail, "ARI " + fmt(ari) + ", elbow non-increasing: " +
                                                    (monotone ? "yes" : "no") + ", drop at K=4 " + fmt(drop_at_4) +
                                                    " vs largest later drop " + fmt(later)};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, const Verdict& v) {
        const char* tag = v.kind == Verdict::pass ? "PASS" : v.kind == Verdict::skip ? "SKIP" : "FAIL";
        if (v.kind == Verdict::fail) ++failures;
        std::printf("%s criterion %d (%s): %s\n", tag, id, name, v.detail.c_str());
        std::fflush(stdout);
    };
    auto guarded = [](const std::function<Verdict()>& f) -> Verdict {
        try {
            return f();
        } catch (const std::exception& e) {
            return {Verdict::fail, std::string("threw: ") + e.what()};
        }
    };
    report(1, "gradient correctness", guarded(gradient_correctness));
    report(2, "holt oracle", guarded(holt_oracle));
    report(3, "normalization contract", guarded(normalization_contract));
    report(4, "attention contract", guarded(attention_contract));
    std::optional<TransferResults> transfer;
    const Verdict transfer_error = guarded([&] {
        transfer = run_transfer();
        return Verdict{Verdict::pass, ""};
    });
    if (transfer) {
        report(5, "pattern-transfer benchmark", pattern_transfer(*transfer));
    } else {
        report(5, "pattern-transfer benchmark", transfer_error);
    }
    report(6, "real-data smoke test", guarded(real_data));
    if (transfer) {
        report(7, "ablation harness", ablation_harness(*transfer));
    } else {
        report(7, "ablation harness", transfer_error);
    }
    report(8, "determinism", guarded(determinism));
    report(9, "clustering", guarded(clustering));
    return failures == 0 ? 0 : 1;
}
