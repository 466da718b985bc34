#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

/**
 * Minimal reverse-mode differentiation over dense double buffers.
 *
 * A Tape records nodes in creation order, so parents always precede
 * children and one reverse sweep suffices. Values are row-major matrices;
 * vectors are n x 1. Each op stores a closure that maps the node's output
 * gradient onto its parents' gradients.
 */
namespace acts::ad {

struct Shape {
    std::size_t rows = 1;
    std::size_t cols = 1;

    std::size_t size() const { return rows * cols; }
    bool operator==(const Shape&) const = default;
};

std::string to_string(Shape shape);

/// A named learnable buffer with a gradient of the same shape.
class Param {
public:
    Param() = default;
    Param(std::string name, Shape shape, double fill = 0.0);
    Param(std::string name, Shape shape, std::vector<double> values);

    const std::string& name() const { return name_; }
    Shape shape() const { return shape_; }
    std::size_t size() const { return values_.size(); }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::span<double> grad() { return grad_; }
    std::span<const double> grad() const { return grad_; }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    void zero_grad();
    bool finite() const;
    double norm() const;

private:
    std::string name_;
    Shape shape_;
    std::vector<double> values_;
    std::vector<double> grad_;
};

class Tape;

/// Handle to a node on a tape; cheap to copy.
class Var {
public:
    Var() = default;

    Tape* tape() const { return tape_; }
    std::size_t id() const { return id_; }
    Shape shape() const;
    std::size_t size() const { return shape().size(); }
    std::span<const double> value() const;
    double operator[](std::size_t i) const { return value()[i]; }
    /// Value of a 1-element node.
    double item() const;

private:
    friend class Tape;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

class Tape {
public:
    using BackwardFn = std::function<void(Tape&, std::span<const double> out_grad)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(std::vector<double> values, Shape shape);
    Var constant(std::vector<double> values);
    Var scalar(double value);
    /// Leaf bound to `param`: backward adds this node's gradient into param.grad().
    Var param(Param& param);

    /// Appends a node; `backward` may be empty for nodes without parents.
    Var record(std::vector<double> value, Shape shape, BackwardFn backward);

    /// Reverse sweep from a scalar root. Node gradients are reset first;
    /// Param gradients accumulate across calls.
    void backward(Var root);

    std::span<const double> value(Var v) const { return nodes_.at(v.id()).value; }
    Shape shape(Var v) const { return nodes_.at(v.id()).shape; }
    /// Gradient buffer of a node, allocated on first touch.
    std::span<double> grad(Var v);
    std::span<double> grad(std::size_t id);

    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Shape shape;
        std::vector<double> value;
        std::vector<double> grad;
        BackwardFn backward;
    };

    std::vector<Node> nodes_;
};

// Elementwise arithmetic (equal shapes).
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var add_scalar(Var a, double offset);
Var abs(Var a);  // subgradient 0 at 0
Var logistic(Var a);

Var sum(Var a);
Var mean(Var a);
Var dot(Var a, Var b);
Var cumsum(Var a);

/// Flat slice [begin, begin + len) as an len x 1 vector.
Var slice(Var a, std::size_t begin, std::size_t len);
/// Flat concatenation as a column vector.
Var concat(Var a, Var b);
/// Row r of a matrix as a cols x 1 vector.
Var row(Var m, std::size_t r);
/// Stacks equally sized vectors as rows of an n x d matrix.
Var stack_rows(std::span<const Var> rows);
/// Column-wise join of two matrices with equal row counts.
Var hstack(Var a, Var b);

/// M (r x c) times v (c entries) -> r x 1.
Var matvec(Var m, Var v);
/// A (n x p) times B^T where B is q x p -> n x q.
Var matmul_nt(Var a, Var b);

/**
 * Valid 1-D convolution. `input` is len x c_in (time-major); `kernels` is
 * d x (width * c_in) with kernel[f][j][ch] at f * width * c_in + j * c_in + ch.
 * Output is (len - width + 1) x d.
 */
Var conv1d(Var input, Var kernels, std::size_t width);
/// Mean over the time (row) axis: n x d -> d x 1.
Var avg_pool(Var sequence);

Var softmax(Var scores);

/**
 * Dot-product attention of one query over a subset of rows:
 * weights = softmax(K[rows] q), result = sum_r weights_r V[rows_r].
 * `weights_out`, when given, receives the attention weights.
 */
Var attend(Var query, Var keys, Var values, std::span<const std::size_t> rows,
           std::vector<double>* weights_out = nullptr);

/// Forward-only softmax with max subtraction.
std::vector<double> softmax_values(std::span<const double> scores);

using LossBuilder = std::function<Var(Tape&)>;

/**
 * Compares reverse-mode gradients of `loss` against central differences
 * over every coordinate of every param. Returns
 * max |analytic - numeric| / max(1, |numeric|).
 */
double grad_check(const LossBuilder& loss, std::span<Param* const> params, double step = 1e-5);

}  // namespace acts::ad
