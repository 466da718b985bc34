#include "acts/autodiff.hpp"

#include "acts/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace acts::ad {

std::string to_string(Shape shape) {
    return std::to_string(shape.rows) + "x" + std::to_string(shape.cols);
}

Param::Param(std::string name, Shape shape, double fill)
    : name_(std::move(name)), shape_(shape), values_(shape.size(), fill), grad_(shape.size(), 0.0) {}

Param::Param(std::string name, Shape shape, std::vector<double> values)
    : name_(std::move(name)), shape_(shape), values_(std::move(values)), grad_(shape.size(), 0.0) {
    if (values_.size() != shape_.size()) {
        throw ShapeError("param '" + name_ + "': " + std::to_string(values_.size()) + " values for shape " +
                         to_string(shape_));
    }
}

void Param::zero_grad() { std::fill(grad_.begin(), grad_.end(), 0.0); }

bool Param::finite() const {
    auto ok = [](double v) { return std::isfinite(v); };
    return std::all_of(values_.begin(), values_.end(), ok) && std::all_of(grad_.begin(), grad_.end(), ok);
}

double Param::norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
}

Shape Var::shape() const { return tape_->shape(*this); }
std::span<const double> Var::value() const { return tape_->value(*this); }

double Var::item() const {
    auto v = value();
    if (v.size() != 1) throw ShapeError("item() on a node of shape " + to_string(shape()));
    return v[0];
}

Var Tape::constant(std::vector<double> values, Shape shape) {
    if (values.size() != shape.size()) throw ShapeError("constant does not match shape " + to_string(shape));
    return record(std::move(values), shape, {});
}

Var Tape::constant(std::vector<double> values) {
    Shape s{values.size(), 1};
    return record(std::move(values), s, {});
}

Var Tape::scalar(double value) { return record({value}, {1, 1}, {}); }

Var Tape::param(Param& p) {
    std::vector<double> v(p.values().begin(), p.values().end());
    Param* target = &p;
    return record(std::move(v), p.shape(), [target](Tape&, std::span<const double> g) {
        auto pg = target->grad();
        for (std::size_t i = 0; i < g.size(); ++i) pg[i] += g[i];
    });
}

Var Tape::record(std::vector<double> value, Shape shape, BackwardFn backward) {
    nodes_.push_back(Node{shape, std::move(value), {}, std::move(backward)});
    return Var(this, nodes_.size() - 1);
}

std::span<double> Tape::grad(std::size_t id) {
    auto& n = nodes_.at(id);
    if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
    return n.grad;
}

std::span<double> Tape::grad(Var v) { return grad(v.id()); }

void Tape::backward(Var root) {
    if (root.tape() != this) throw UsageError("backward root belongs to another tape");
    if (nodes_.at(root.id()).value.size() != 1) {
        throw UsageError("backward needs a scalar root, got shape " + to_string(nodes_[root.id()].shape));
    }
    for (auto& n : nodes_) n.grad.clear();
    grad(root.id())[0] = 1.0;
    for (std::size_t i = root.id() + 1; i-- > 0;) {
        auto& n = nodes_[i];
        if (n.grad.empty() || !n.backward) continue;
        n.backward(*this, n.grad);
    }
}

namespace {

void require_same(Var a, Var b, const char* op) {
    if (a.tape() != b.tape()) throw UsageError(std::string(op) + ": operands on different tapes");
    if (a.size() != b.size()) {
        throw ShapeError(std::string(op) + ": shape " + to_string(a.shape()) + " vs " + to_string(b.shape()));
    }
}

}  // namespace

Var add(Var a, Var b) {
    require_same(a, b, "add");
    auto av = a.value(), bv = b.value();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
    return a.tape()->record(std::move(out), a.shape(), [a, b](Tape& t, std::span<const double> g) {
        auto ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        auto gb = t.grad(b);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
    });
}

Var sub(Var a, Var b) {
    require_same(a, b, "sub");
    auto av = a.value(), bv = b.value();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
    return a.tape()->record(std::move(out), a.shape(), [a, b](Tape& t, std::span<const double> g) {
        auto ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        auto gb = t.grad(b);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    });
}

Var mul(Var a, Var b) {
    require_same(a, b, "mul");
    auto av = a.value(), bv = b.value();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
    return a.tape()->record(std::move(out), a.shape(), [a, b](Tape& t, std::span<const double> g) {
        auto av = t.value(a), bv = t.value(b);
        auto ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
        auto gb = t.grad(b);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    });
}

Var scale(Var a, double factor) {
    auto av = a.value();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * factor;
    return a.tape()->record(std::move(out), a.shape(), [a, factor](Tape& t, std::span<const double> g) {
        auto ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
    });
}

Var add_scalar(Var a, double offset) {
    auto av = a.value();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + offset;
    return a.tape()->record(std::move(out), a.shape(), [a](Tape& t, std::span<const double> g) {
        auto ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    });
}

Var abs(Var a) {
    auto av = a.value();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::fabs(av[i]);
    return a.tape()->record(std::move(out), a.shape(), [a](Tape& t, std::span<const double> g) {
        auto av = t.value(a);
        auto ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) {
            double s = av[i] > 0.0 ? 1.0 : (av[i] < 0.0 ? -1.0 : 0.0);
            ga[i] += g[i] * s;
        }
    });
}

Var logistic(Var a) {
    auto av = a.value();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-av[i]));
    std::vector<double> y = out;
    return a.tape()->record(std::move(out), a.shape(), [a, y = std::move(y)](Tape& t, std::span<const double> g) {
        auto ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
    });
}

Var sum(Var a) {
    auto av = a.value();
    double s = std::accumulate(av.begin(), av.end(), 0.0);
    return a.tape()->record({s}, {1, 1}, [a](Tape& t, std::span<const double> g) {
        auto ga = t.grad(a);
        for (double& v : ga) v += g[0];
    });
}

Var mean(Var a) {
    if (a.size() == 0) throw ShapeError("mean of an empty node");
    return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

Var dot(Var a, Var b) {
    require_same(a, b, "dot");
    auto av = a.value(), bv = b.value();
    double s = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
    return a.tape()->record({s}, {1, 1}, [a, b](Tape& t, std::span<const double> g) {
        auto av = t.value(a), bv = t.value(b);
        auto ga = t.grad(a);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[0] * bv[i];
        auto gb = t.grad(b);
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[0] * av[i];
    });
}

Var cumsum(Var a) {
    auto av = a.value();
    std::vector<double> out(av.size());
    std::partial_sum(av.begin(), av.end(), out.begin());
    return a.tape()->record(std::move(out), a.shape(), [a](Tape& t, std::span<const double> g) {
        auto ga = t.grad(a);
        double acc = 0.0;
        for (std::size_t i = g.size(); i-- > 0;) {
            acc += g[i];
            ga[i] += acc;
        }
    });
}

Var slice(Var a, std::size_t begin, std::size_t len) {
    if (begin + len > a.size()) {
        throw ShapeError("slice [" + std::to_string(begin) + ", " + std::to_string(begin + len) + ") of size " +
                         std::to_string(a.size()));
    }
    auto av = a.value();
    std::vector<double> out(av.begin() + static_cast<std::ptrdiff_t>(begin),
                            av.begin() + static_cast<std::ptrdiff_t>(begin + len));
    return a.tape()->record(std::move(out), {len, 1}, [a, begin](Tape& t, std::span<const double> g) {
        auto ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[begin + i] += g[i];
    });
}

Var concat(Var a, Var b) {
    if (a.tape() != b.tape()) throw UsageError("concat: operands on different tapes");
    auto av = a.value(), bv = b.value();
    std::vector<double> out(av.begin(), av.end());
    out.insert(out.end(), bv.begin(), bv.end());
    const std::size_t na = av.size();
    Shape s{out.size(), 1};
    return a.tape()->record(std::move(out), s, [a, b, na](Tape& t, std::span<const double> g) {
        auto ga = t.grad(a);
        for (std::size_t i = 0; i < na; ++i) ga[i] += g[i];
        auto gb = t.grad(b);
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[na + i];
    });
}

Var row(Var m, std::size_t r) {
    auto s = m.shape();
    if (r >= s.rows) throw ShapeError("row " + std::to_string(r) + " of " + to_string(s));
    Var out = slice(m, r * s.cols, s.cols);
    return out;
}

Var stack_rows(std::span<const Var> rows) {
    if (rows.empty()) throw ShapeError("stack_rows of nothing");
    Tape* tape = rows.front().tape();
    const std::size_t d = rows.front().size();
    std::vector<double> out;
    out.reserve(rows.size() * d);
    for (const auto& r : rows) {
        if (r.size() != d || r.tape() != tape) throw ShapeError("stack_rows: rows differ in size or tape");
        auto v = r.value();
        out.insert(out.end(), v.begin(), v.end());
    }
    std::vector<Var> parents(rows.begin(), rows.end());
    return tape->record(std::move(out), {rows.size(), d},
                        [parents = std::move(parents), d](Tape& t, std::span<const double> g) {
                            for (std::size_t r = 0; r < parents.size(); ++r) {
                                auto gr = t.grad(parents[r]);
                                for (std::size_t j = 0; j < d; ++j) gr[j] += g[r * d + j];
                            }
                        });
}

Var hstack(Var a, Var b) {
    auto sa = a.shape(), sb = b.shape();
    if (sa.rows != sb.rows) throw ShapeError("hstack: " + to_string(sa) + " vs " + to_string(sb));
    const std::size_t n = sa.rows, ca = sa.cols, cb = sb.cols;
    auto av = a.value(), bv = b.value();
    std::vector<double> out(n * (ca + cb));
    for (std::size_t r = 0; r < n; ++r) {
        std::copy_n(av.begin() + static_cast<std::ptrdiff_t>(r * ca), ca,
                    out.begin() + static_cast<std::ptrdiff_t>(r * (ca + cb)));
        std::copy_n(bv.begin() + static_cast<std::ptrdiff_t>(r * cb), cb,
                    out.begin() + static_cast<std::ptrdiff_t>(r * (ca + cb) + ca));
    }
    return a.tape()->record(std::move(out), {n, ca + cb}, [a, b, n, ca, cb](Tape& t, std::span<const double> g) {
        auto ga = t.grad(a);
        auto gb = t.grad(b);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < ca; ++c) ga[r * ca + c] += g[r * (ca + cb) + c];
            for (std::size_t c = 0; c < cb; ++c) gb[r * cb + c] += g[r * (ca + cb) + ca + c];
        }
    });
}

Var matvec(Var m, Var v) {
    auto s = m.shape();
    if (v.size() != s.cols) throw ShapeError("matvec: " + to_string(s) + " times " + to_string(v.shape()));
    auto mv = m.value(), vv = v.value();
    std::vector<double> out(s.rows, 0.0);
    for (std::size_t r = 0; r < s.rows; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < s.cols; ++c) acc += mv[r * s.cols + c] * vv[c];
        out[r] = acc;
    }
    return m.tape()->record(std::move(out), {s.rows, 1}, [m, v, s](Tape& t, std::span<const double> g) {
        auto mv = t.value(m), vv = t.value(v);
        auto gm = t.grad(m);
        auto gv = t.grad(v);
        for (std::size_t r = 0; r < s.rows; ++r) {
            const double gr = g[r];
            if (gr == 0.0) continue;
            for (std::size_t c = 0; c < s.cols; ++c) {
                gm[r * s.cols + c] += gr * vv[c];
                gv[c] += gr * mv[r * s.cols + c];
            }
        }
    });
}

Var matmul_nt(Var a, Var b) {
    auto sa = a.shape(), sb = b.shape();
    if (sa.cols != sb.cols) throw ShapeError("matmul_nt: " + to_string(sa) + " times (" + to_string(sb) + ")^T");
    const std::size_t n = sa.rows, p = sa.cols, q = sb.rows;
    auto av = a.value(), bv = b.value();
    std::vector<double> out(n * q, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < q; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < p; ++k) acc += av[i * p + k] * bv[j * p + k];
            out[i * q + j] = acc;
        }
    }
    return a.tape()->record(std::move(out), {n, q}, [a, b, n, p, q](Tape& t, std::span<const double> g) {
        auto av = t.value(a), bv = t.value(b);
        auto ga = t.grad(a);
        auto gb = t.grad(b);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < q; ++j) {
                const double gij = g[i * q + j];
                if (gij == 0.0) continue;
                for (std::size_t k = 0; k < p; ++k) {
                    ga[i * p + k] += gij * bv[j * p + k];
                    gb[j * p + k] += gij * av[i * p + k];
                }
            }
        }
    });
}

Var conv1d(Var input, Var kernels, std::size_t width) {
    auto si = input.shape(), sk = kernels.shape();
    const std::size_t len = si.rows, cin = si.cols, d = sk.rows;
    if (width == 0 || sk.cols != width * cin) {
        throw ShapeError("conv1d: kernels " + to_string(sk) + " do not match width " + std::to_string(width) +
                         " over " + std::to_string(cin) + " channels");
    }
    if (len < width) {
        throw ShapeError("conv1d: input length " + std::to_string(len) + " shorter than kernel width " +
                         std::to_string(width));
    }
    const std::size_t out_len = len - width + 1;
    const std::size_t span = width * cin;
    auto iv = input.value(), kv = kernels.value();
    std::vector<double> out(out_len * d, 0.0);
    for (std::size_t t = 0; t < out_len; ++t) {
        const double* window = iv.data() + t * cin;  // rows t..t+width-1 are contiguous
        for (std::size_t f = 0; f < d; ++f) {
            const double* k = kv.data() + f * span;
            double acc = 0.0;
            for (std::size_t j = 0; j < span; ++j) acc += k[j] * window[j];
            out[t * d + f] = acc;
        }
    }
    return input.tape()->record(
        std::move(out), {out_len, d}, [input, kernels, out_len, d, span, cin](Tape& t, std::span<const double> g) {
            auto iv = t.value(input), kv = t.value(kernels);
            auto gi = t.grad(input);
            auto gk = t.grad(kernels);
            for (std::size_t s = 0; s < out_len; ++s) {
                const double* window = iv.data() + s * cin;
                double* gwin = gi.data() + s * cin;
                for (std::size_t f = 0; f < d; ++f) {
                    const double go = g[s * d + f];
                    if (go == 0.0) continue;
                    const double* k = kv.data() + f * span;
                    double* gkf = gk.data() + f * span;
                    for (std::size_t j = 0; j < span; ++j) {
                        gkf[j] += go * window[j];
                        gwin[j] += go * k[j];
                    }
                }
            }
        });
}

Var avg_pool(Var sequence) {
    auto s = sequence.shape();
    if (s.rows == 0 || s.cols == 0) throw ShapeError("avg_pool of an empty sequence");
    auto v = sequence.value();
    std::vector<double> out(s.cols, 0.0);
    for (std::size_t t = 0; t < s.rows; ++t) {
        for (std::size_t c = 0; c < s.cols; ++c) out[c] += v[t * s.cols + c];
    }
    const double inv = 1.0 / static_cast<double>(s.rows);
    for (double& x : out) x *= inv;
    return sequence.tape()->record(std::move(out), {s.cols, 1}, [sequence, s, inv](Tape& t, std::span<const double> g) {
        auto gs = t.grad(sequence);
        for (std::size_t r = 0; r < s.rows; ++r) {
            for (std::size_t c = 0; c < s.cols; ++c) gs[r * s.cols + c] += g[c] * inv;
        }
    });
}

std::vector<double> softmax_values(std::span<const double> scores) {
    if (scores.empty()) throw ShapeError("softmax of an empty vector");
    const double mx = *std::max_element(scores.begin(), scores.end());
    std::vector<double> out(scores.size());
    double z = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp(scores[i] - mx);
        z += out[i];
    }
    for (double& v : out) v /= z;
    return out;
}

Var softmax(Var scores) {
    auto w = softmax_values(scores.value());
    Tape& tape = *scores.tape();
    auto weights = w;
    return tape.record(std::move(w), scores.shape(),
                       [scores, weights = std::move(weights)](Tape& t, std::span<const double> g) {
                           double inner = 0.0;
                           for (std::size_t i = 0; i < g.size(); ++i) inner += g[i] * weights[i];
                           auto gs = t.grad(scores);
                           for (std::size_t i = 0; i < g.size(); ++i) gs[i] += weights[i] * (g[i] - inner);
                       });
}

Var attend(Var query, Var keys, Var values, std::span<const std::size_t> rows, std::vector<double>* weights_out) {
    if (rows.empty()) throw UsageError("attention over an empty reference set");
    auto sk = keys.shape(), sv = values.shape();
    const std::size_t d = sk.cols, dv = sv.cols;
    if (query.size() != d || sk.rows != sv.rows) {
        throw ShapeError("attend: query " + to_string(query.shape()) + ", keys " + to_string(sk) + ", values " +
                         to_string(sv));
    }
    auto qv = query.value(), kv = keys.value(), vv = values.value();
    std::vector<double> scores(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= sk.rows) throw ShapeError("attend: row index out of range");
        const double* k = kv.data() + rows[r] * d;
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += qv[j] * k[j];
        scores[r] = s;
    }
    auto weights = softmax_values(scores);
    std::vector<double> out(dv, 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double* v = vv.data() + rows[r] * dv;
        for (std::size_t j = 0; j < dv; ++j) out[j] += weights[r] * v[j];
    }
    if (weights_out != nullptr) *weights_out = weights;
    std::vector<std::size_t> idx(rows.begin(), rows.end());
    return query.tape()->record(
        std::move(out), {dv, 1},
        [query, keys, values, idx = std::move(idx), weights = std::move(weights), d, dv](Tape& t,
                                                                                          std::span<const double> g) {
            auto qv = t.value(query), kv = t.value(keys), vv = t.value(values);
            auto gq = t.grad(query);
            auto gk = t.grad(keys);
            auto gv = t.grad(values);
            // dL/dw_r = <g, v_r>; softmax Jacobian folds into scores.
            std::vector<double> gw(idx.size());
            double inner = 0.0;
            for (std::size_t r = 0; r < idx.size(); ++r) {
                const double* v = vv.data() + idx[r] * dv;
                double* gvr = gv.data() + idx[r] * dv;
                double s = 0.0;
                for (std::size_t j = 0; j < dv; ++j) {
                    s += g[j] * v[j];
                    gvr[j] += weights[r] * g[j];
                }
                gw[r] = s;
                inner += weights[r] * s;
            }
            for (std::size_t r = 0; r < idx.size(); ++r) {
                const double gs = weights[r] * (gw[r] - inner);
                const double* k = kv.data() + idx[r] * d;
                double* gkr = gk.data() + idx[r] * d;
                for (std::size_t j = 0; j < d; ++j) {
                    gq[j] += gs * k[j];
                    gkr[j] += gs * qv[j];
                }
            }
        });
}

double grad_check(const LossBuilder& loss, std::span<Param* const> params, double step) {
    for (auto* p : params) p->zero_grad();
    {
        Tape tape;
        Var root = loss(tape);
        tape.backward(root);
    }
    auto evaluate = [&] {
        Tape tape;
        return loss(tape).item();
    };
    double worst = 0.0;
    for (auto* p : params) {
        std::vector<double> analytic(p->grad().begin(), p->grad().end());
        for (std::size_t i = 0; i < p->size(); ++i) {
            const double original = (*p)[i];
            (*p)[i] = original + step;
            const double up = evaluate();
            (*p)[i] = original - step;
            const double down = evaluate();
            (*p)[i] = original;
            const double numeric = (up - down) / (2.0 * step);
            worst = std::max(worst, std::fabs(analytic[i] - numeric) / std::max(1.0, std::fabs(numeric)));
        }
    }
    return worst;
}

}  // namespace acts::ad
