// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

// Minimal reverse-mode differentiation engine.
//
// A Tensor is a reference-counted handle onto a dense row-major array of
// doubles plus a same-shaped gradient buffer. Copies alias the same storage,
// which is how parameters are shared between a model and its optimizer. Use
// clone() for a deep copy.
//
// Every differentiable operation takes the Tape it records onto. A tape is
// replayed once, in reverse recording order, by Tape::backward(). Tapes are
// single-threaded; independent tapes never share mutable state other than the
// gradient buffers of the leaves they touch.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace cdnet {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {
struct TensorStorage;
}

class Tensor {
public:
    /// A scalar zero that does not require a gradient.
    Tensor();
    Tensor(std::vector<double> values, Shape shape, bool requires_grad = false);

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);
    static Tensor vector(std::vector<double> values, bool requires_grad = false);

    const Shape& shape() const;
    std::size_t rank() const { return shape().size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t size() const;
    bool is_scalar() const { return size() == 1; }

    std::span<const double> values() const;
    /// Writable views; a const handle still shares its storage.
    std::span<double> mutable_values() const;
    std::span<const double> grad() const;
    std::span<double> mutable_grad() const;
    double item() const;

    bool requires_grad() const;
    void set_requires_grad(bool flag);
    void zero_grad() const;

    /// Deep copy of shape, values and flag; the gradient starts at zero.
    Tensor clone() const;
    /// Deep copy of the values that never requires a gradient.
    Tensor detach() const;
    bool aliases(const Tensor& other) const { return data_ == other.data_; }

    /// Id of the tape that produced this tensor, 0 for leaves.
    std::uint64_t producer() const;

private:
    friend class Tape;
    explicit Tensor(std::shared_ptr<detail::TensorStorage> data);

    std::shared_ptr<detail::TensorStorage> data_;
};

enum class GradMode { Enabled, Disabled };

class Tape {
public:
    explicit Tape(GradMode mode = GradMode::Enabled);
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;
    Tape(Tape&&) = default;
    Tape& operator=(Tape&&) = default;
    ~Tape();

    /// Accumulates d(root)/d(t) into the gradient of every tensor on the tape
    /// that requires one. The root must be a scalar produced on this tape, and
    /// a tape can be replayed only once.
    void backward(const Tensor& root);

    bool grad_enabled() const { return mode_ == GradMode::Enabled; }
    bool consumed() const { return consumed_; }
    std::size_t recorded() const { return adjoints_.size(); }
    std::uint64_t id() const { return id_; }

    /// Creates an output tensor owned by this tape. The output requires a
    /// gradient only when recording is enabled and `track` is true.
    Tensor output(Shape shape, std::vector<double> values, bool track);
    void record(std::function<void()> adjoint);

private:
    std::uint64_t id_;
    GradMode mode_;
    bool consumed_ = false;
    std::vector<std::function<void()>> adjoints_;
};

enum class Padding { Same, Valid };

// Elementwise arithmetic on equal shapes.
Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor div(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& a, double factor);
Tensor add_scalar(Tape& tape, const Tensor& a, double offset);

Tensor relu(Tape& tape, const Tensor& x);
Tensor exp(Tape& tape, const Tensor& x);
/// Natural log of max(x, floor). The gradient is zero where the floor binds.
Tensor log(Tape& tape, const Tensor& x, double floor = 0.0);

/// Sum of all elements, as a scalar.
Tensor sum(Tape& tape, const Tensor& x);
Tensor mean(Tape& tape, const Tensor& x);
/// Sum of several tensors with one shape.
Tensor add_n(Tape& tape, std::span<const Tensor> terms);
Tensor dot(Tape& tape, const Tensor& a, const Tensor& b);
Tensor squared_distance(Tape& tape, const Tensor& a, const Tensor& b);

Tensor reshape(Tape& tape, const Tensor& x, Shape shape);
/// Element `index` of x as a scalar.
Tensor select(Tape& tape, const Tensor& x, std::size_t index);
/// x / sqrt(|x|^2 + eps).
Tensor l2_normalize(Tape& tape, const Tensor& x, double eps = 1e-12);
Tensor softmax(Tape& tape, const Tensor& logits);

/// Cross-correlation of input [c_in x L] with kernels [c_out x c_in x k] plus
/// a per-channel bias. Same padding zero-pads to keep the length; valid
/// padding yields L - k + 1 outputs.
Tensor conv1d(Tape& tape, const Tensor& input, const Tensor& kernels, const Tensor& bias,
              Padding padding);
/// weights [m x n] times input [n] plus bias [m].
Tensor dense(Tape& tape, const Tensor& input, const Tensor& weights, const Tensor& bias);
/// Mean over the length axis of [c x L], giving [c].
Tensor global_average_pool(Tape& tape, const Tensor& input);

}  // namespace cdnet
