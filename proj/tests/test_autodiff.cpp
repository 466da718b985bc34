#include "doctest.h"

#include "acts/autodiff.hpp"
#include "acts/errors.hpp"

#include <cmath>
#include <random>

using namespace acts;
using namespace acts::ad;

namespace {

constexpr double kTol = 1e-4;

Param random_param(const std::string& name, Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(shape.size());
    for (auto& x : v) x = dist(rng);
    return Param(name, shape, std::move(v));
}

std::vector<double> values_of(Var v) { return {v.value().begin(), v.value().end()}; }

/// Weighted sum so every output coordinate gets a distinct gradient.
Var probe(Tape& tape, Var v) {
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.3 + 0.17 * static_cast<double>(i % 7);
    return dot(v, tape.constant(std::move(w), v.shape()));
}

}  // namespace

TEST_CASE("conv1d by hand") {
    Tape tape;
    auto x = tape.constant({1, 3, 5});
    CHECK(values_of(conv1d(x, tape.constant({1}, {1, 1}), 1)) == std::vector<double>{1, 3, 5});
    CHECK(values_of(conv1d(x, tape.constant({0.5, 0.5}, {1, 2}), 2)) == std::vector<double>{2, 4});
    CHECK(values_of(conv1d(x, tape.constant({1, 0}, {1, 2}), 2)) == std::vector<double>{1, 3});
    CHECK_THROWS_AS(conv1d(tape.constant({1}), tape.constant({1, 1}, {1, 2}), 2), ShapeError);
}

TEST_CASE("average pooling over time") {
    Tape tape;
    CHECK(values_of(avg_pool(tape.constant({2, 4}, {2, 1}))) == std::vector<double>{3});
    CHECK(values_of(avg_pool(tape.constant({7}, {1, 1}))) == std::vector<double>{7});
    CHECK(values_of(avg_pool(tape.constant({1, 0, 3, 2}, {2, 2}))) == std::vector<double>{2, 1});
    CHECK_THROWS_AS(avg_pool(tape.constant({}, {0, 1})), ShapeError);
}

TEST_CASE("softmax values") {
    CHECK(softmax_values(std::vector<double>{0, 0}) == std::vector<double>{0.5, 0.5});
    const auto w = softmax_values(std::vector<double>{std::log(2.0), 0.0});
    CHECK(w[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(softmax_values(std::vector<double>{}), ShapeError);
}

TEST_CASE("softmax sums to one and ignores additive shifts") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> score(-30.0, 30.0), shift(-1e3, 1e3);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> s(1 + trial % 40);
        for (auto& x : s) x = score(rng);
        const auto base = softmax_values(s);
        double total = 0.0;
        for (double p : base) {
            CHECK(p >= 0.0);
            total += p;
        }
        CHECK(std::fabs(total - 1.0) <= 1e-12);
        const double c = shift(rng);
        auto shifted = s;
        for (auto& x : shifted) x += c;
        const auto moved = softmax_values(shifted);
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::fabs(moved[i] - base[i]) <= 1e-12);
    }
    // On a dyadic grid the shifted differences are exact, so values match bit for bit.
    const std::vector<double> s{0.125, -2.5, 3.75, 1.0};
    for (double c : {-512.0, 0.25, 96.5}) {
        auto shifted = s;
        for (auto& x : shifted) x += c;
        CHECK(softmax_values(shifted) == softmax_values(s));
    }
}

TEST_CASE("backward on simple functions") {
    Param p("p", {1, 1}, 3.0);
    {
        Tape tape;
        tape.backward(tape.param(p));
        CHECK(p.grad()[0] == 1.0);
    }
    p.zero_grad();
    {
        Tape tape;
        auto v = tape.param(p);
        tape.backward(mul(v, v));
        CHECK(p.grad()[0] == 6.0);
    }
    Param s = random_param("s", {5, 1}, 2);
    Tape tape;
    tape.backward(sum(softmax(tape.param(s))));
    for (double g : s.grad()) CHECK(std::fabs(g) < 1e-15);
    CHECK_THROWS_AS(tape.backward(tape.param(s)), UsageError);
}

TEST_CASE("param gradients accumulate across backward calls") {
    Param p("p", {1, 1}, 2.0);
    for (int i = 0; i < 3; ++i) {
        Tape tape;
        tape.backward(scale(tape.param(p), 4.0));
    }
    CHECK(p.grad()[0] == 12.0);
}

TEST_CASE("backward of a sum equals the sum of separate backwards") {
    Param a = random_param("a", {4, 1}, 8), b = random_param("b", {4, 1}, 9);
    auto f = [&](Tape& t) { return sum(mul(logistic(t.param(a)), t.param(b))); };
    auto g = [&](Tape& t) { return dot(cumsum(t.param(a)), t.param(a)); };
    {
        Tape tape;
        tape.backward(add(f(tape), g(tape)));
    }
    const std::vector<double> joint_a(a.grad().begin(), a.grad().end()), joint_b(b.grad().begin(), b.grad().end());
    a.zero_grad();
    b.zero_grad();
    {
        Tape tape;
        tape.backward(f(tape));
    }
    {
        Tape tape;
        tape.backward(g(tape));
    }
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a.grad()[i] == doctest::Approx(joint_a[i]).epsilon(1e-14));
        CHECK(b.grad()[i] == doctest::Approx(joint_b[i]).epsilon(1e-14));
    }
}

TEST_CASE("finite differences on polynomials") {
    Param p = random_param("p", {3, 1}, 4);
    std::vector<Param*> ps{&p};
    const auto quad = [&](Tape& t) {
        auto v = t.param(p);
        return add(dot(v, v), scale(sum(v), 3.0));
    };
    CHECK(grad_check(quad, ps) < 1e-8);
    const auto linear = [&](Tape& t) { return scale(sum(t.param(p)), -2.0); };
    CHECK(grad_check(linear, ps) < 1e-10);
}

TEST_CASE("every op passes the finite-difference check") {
    Param a = random_param("a", {3, 4}, 21), b = random_param("b", {3, 4}, 22);
    Param v = random_param("v", {4, 1}, 23), k = random_param("k", {5, 4}, 24);
    Param seq = random_param("seq", {6, 2}, 25), kern = random_param("kern", {3, 6}, 26);
    Param q = random_param("q", {4, 1}, 27), keys = random_param("keys", {6, 4}, 28);
    Param vals = random_param("vals", {6, 3}, 29);
    // Keep |.| away from its kink so central differences stay one-sided-free.
    Param away("away", {4, 1}, std::vector<double>{0.7, -0.4, 1.3, -2.1});

    struct Case {
        const char* name;
        LossBuilder loss;
        std::vector<Param*> params;
    };
    const std::vector<std::size_t> subset{0, 2, 3, 5};
    std::vector<Case> cases{
        {"add", [&](Tape& t) { return probe(t, add(t.param(a), t.param(b))); }, {&a, &b}},
        {"sub", [&](Tape& t) { return probe(t, sub(t.param(a), t.param(b))); }, {&a, &b}},
        {"mul", [&](Tape& t) { return probe(t, mul(t.param(a), t.param(b))); }, {&a, &b}},
        {"scale", [&](Tape& t) { return probe(t, scale(t.param(a), -1.7)); }, {&a}},
        {"add_scalar", [&](Tape& t) { return probe(t, add_scalar(t.param(a), 0.3)); }, {&a}},
        {"abs", [&](Tape& t) { return probe(t, abs(t.param(away))); }, {&away}},
        {"logistic", [&](Tape& t) { return probe(t, logistic(t.param(a))); }, {&a}},
        {"sum", [&](Tape& t) { return mul(sum(t.param(a)), sum(t.param(a))); }, {&a}},
        {"mean", [&](Tape& t) { return mul(mean(t.param(a)), sum(t.param(b))); }, {&a, &b}},
        {"dot", [&](Tape& t) { return dot(t.param(a), t.param(b)); }, {&a, &b}},
        {"cumsum", [&](Tape& t) { return probe(t, cumsum(t.param(v))); }, {&v}},
        {"slice", [&](Tape& t) { return probe(t, slice(t.param(a), 2, 5)); }, {&a}},
        {"concat", [&](Tape& t) { return probe(t, concat(t.param(v), t.param(q))); }, {&v, &q}},
        {"row", [&](Tape& t) { return probe(t, row(t.param(a), 1)); }, {&a}},
        {"stack_rows",
         [&](Tape& t) {
             std::vector<Var> rows{t.param(v), t.param(q), t.param(v)};
             return probe(t, stack_rows(rows));
         },
         {&v, &q}},
        {"hstack", [&](Tape& t) { return probe(t, hstack(t.param(a), t.param(b))); }, {&a, &b}},
        {"matvec", [&](Tape& t) { return probe(t, matvec(t.param(a), t.param(v))); }, {&a, &v}},
        {"matmul_nt", [&](Tape& t) { return probe(t, matmul_nt(t.param(k), t.param(a))); }, {&k, &a}},
        {"conv1d", [&](Tape& t) { return probe(t, conv1d(t.param(seq), t.param(kern), 3)); }, {&seq, &kern}},
        {"avg_pool", [&](Tape& t) { return probe(t, avg_pool(t.param(seq))); }, {&seq}},
        {"softmax", [&](Tape& t) { return probe(t, softmax(t.param(v))); }, {&v}},
        {"attend",
         [&](Tape& t) { return probe(t, attend(t.param(q), t.param(keys), t.param(vals), subset)); },
         {&q, &keys, &vals}},
    };
    for (auto& c : cases) {
        CAPTURE(c.name);
        CHECK(grad_check(c.loss, c.params) < kTol);
    }
}

TEST_CASE("attention weights come back with the result") {
    Tape tape;
    auto q = tape.constant({1, 0});
    auto keys = tape.constant({std::log(2.0), 0, 0, 0}, {2, 2});
    auto vals = tape.constant({3, 0}, {2, 1});
    std::vector<double> weights;
    const std::vector<std::size_t> rows{0, 1};
    auto out = attend(q, keys, vals, rows, &weights);
    CHECK(out.item() == doctest::Approx(2.0).epsilon(1e-14));
    REQUIRE(weights.size() == 2);
    CHECK(weights[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(attend(q, keys, vals, std::vector<std::size_t>{}), UsageError);
}
