// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cdnet/error.hpp"

namespace cdnet {

namespace detail {

struct TensorStorage {
    Shape shape;
    std::vector<double> values;
    std::vector<double> grad;
    bool requires_grad = false;
    std::uint64_t producer = 0;
};

}  // namespace detail

namespace {

std::atomic<std::uint64_t> next_tape_id{1};

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
    }
}

// Four accumulators so the compiler can keep independent FMA chains.
double dot_kernel(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) {
        s0 += a[i] * b[i];
    }
    return (s0 + s1) + (s2 + s3);
}

void axpy_kernel(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

}  // namespace

std::size_t shape_size(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        out << (i ? " x " : "") << shape[i];
    }
    out << ']';
    return out.str();
}

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor() : Tensor(std::vector<double>{0.0}, Shape{1}) {}

Tensor::Tensor(std::shared_ptr<detail::TensorStorage> data) : data_(std::move(data)) {}

Tensor::Tensor(std::vector<double> values, Shape shape, bool requires_grad)
    : data_(std::make_shared<detail::TensorStorage>()) {
    if (shape.empty()) {
        shape = Shape{1};
    }
    for (auto d : shape) {
        if (d == 0) {
            throw ShapeError("tensor dimensions must be positive, got " + shape_string(shape));
        }
    }
    if (shape_size(shape) != values.size()) {
        throw ShapeError("tensor of shape " + shape_string(shape) + " needs " +
                         std::to_string(shape_size(shape)) + " values, got " +
                         std::to_string(values.size()));
    }
    data_->grad.assign(values.size(), 0.0);
    data_->values = std::move(values);
    data_->shape = std::move(shape);
    data_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    const auto n = shape_size(shape);
    return Tensor(std::vector<double>(n, 0.0), std::move(shape), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return Tensor(std::vector<double>{value}, Shape{1}, requires_grad);
}

Tensor Tensor::vector(std::vector<double> values, bool requires_grad) {
    const auto n = values.size();
    return Tensor(std::move(values), Shape{n}, requires_grad);
}

const Shape& Tensor::shape() const { return data_->shape; }

std::size_t Tensor::dim(std::size_t axis) const {
    if (axis >= data_->shape.size()) {
        throw ShapeError("axis " + std::to_string(axis) + " out of range for " +
                         shape_string(data_->shape));
    }
    return data_->shape[axis];
}

std::size_t Tensor::size() const { return data_->values.size(); }

std::span<const double> Tensor::values() const { return data_->values; }
std::span<double> Tensor::mutable_values() const { return data_->values; }
std::span<const double> Tensor::grad() const { return data_->grad; }
std::span<double> Tensor::mutable_grad() const { return data_->grad; }

double Tensor::item() const {
    if (size() != 1) {
        throw ShapeError("item() on non-scalar tensor " + shape_string(shape()));
    }
    return data_->values[0];
}

bool Tensor::requires_grad() const { return data_->requires_grad; }
void Tensor::set_requires_grad(bool flag) { data_->requires_grad = flag; }

void Tensor::zero_grad() const { std::fill(data_->grad.begin(), data_->grad.end(), 0.0); }

Tensor Tensor::clone() const { return Tensor(data_->values, data_->shape, data_->requires_grad); }

Tensor Tensor::detach() const { return Tensor(data_->values, data_->shape, false); }

std::uint64_t Tensor::producer() const { return data_->producer; }

// ---------------------------------------------------------------------------
// Tape

Tape::Tape(GradMode mode) : id_(next_tape_id.fetch_add(1)), mode_(mode) {}

Tape::~Tape() = default;

Tensor Tape::output(Shape shape, std::vector<double> values, bool track) {
    Tensor out(std::move(values), std::move(shape), track && grad_enabled());
    out.data_->producer = id_;
    return out;
}

void Tape::record(std::function<void()> adjoint) {
    if (consumed_) {
        throw TapeError("cannot record onto a tape that has already been replayed");
    }
    if (grad_enabled()) {
        adjoints_.push_back(std::move(adjoint));
    }
}

void Tape::backward(const Tensor& root) {
    if (!grad_enabled()) {
        throw TapeError("backward on a tape recorded with gradients disabled");
    }
    if (consumed_) {
        throw TapeError("tape already replayed; run a new forward pass before backward");
    }
    if (!root.is_scalar()) {
        throw TapeError("backward root must be scalar, got " + shape_string(root.shape()));
    }
    if (root.producer() != id_) {
        throw TapeError("backward root was not produced on this tape");
    }
    consumed_ = true;
    if (!root.requires_grad()) {
        return;
    }
    Tensor seed = root;
    seed.mutable_grad()[0] += 1.0;
    for (auto it = adjoints_.rbegin(); it != adjoints_.rend(); ++it) {
        (*it)();
    }
    adjoints_.clear();
}

// ---------------------------------------------------------------------------
// Elementwise operations

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    std::vector<double> out(a.size());
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = av[i] + bv[i];
    }
    Tensor y = tape.output(a.shape(), std::move(out), a.requires_grad() || b.requires_grad());
    if (y.requires_grad()) {
        tape.record([a, b, y]() mutable {
            const auto gy = y.grad();
            if (a.requires_grad()) {
                auto ga = a.mutable_grad();
                for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
            }
            if (b.requires_grad()) {
                auto gb = b.mutable_grad();
                for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i];
            }
        });
    }
    return y;
}

Tensor sub(Tape& tape, const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    std::vector<double> out(a.size());
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = av[i] - bv[i];
    }
    Tensor y = tape.output(a.shape(), std::move(out), a.requires_grad() || b.requires_grad());
    if (y.requires_grad()) {
        tape.record([a, b, y]() mutable {
            const auto gy = y.grad();
            if (a.requires_grad()) {
                auto ga = a.mutable_grad();
                for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
            }
            if (b.requires_grad()) {
                auto gb = b.mutable_grad();
                for (std::size_t i = 0; i < gy.size(); ++i) gb[i] -= gy[i];
            }
        });
    }
    return y;
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    std::vector<double> out(a.size());
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = av[i] * bv[i];
    }
    Tensor y = tape.output(a.shape(), std::move(out), a.requires_grad() || b.requires_grad());
    if (y.requires_grad()) {
        tape.record([a, b, y]() mutable {
            const auto gy = y.grad();
            const auto av = a.values();
            const auto bv = b.values();
            if (a.requires_grad()) {
                auto ga = a.mutable_grad();
                for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * bv[i];
            }
            if (b.requires_grad()) {
                auto gb = b.mutable_grad();
                for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i] * av[i];
            }
        });
    }
    return y;
}

Tensor div(Tape& tape, const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "div");
    std::vector<double> out(a.size());
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = av[i] / bv[i];
    }
    Tensor y = tape.output(a.shape(), std::move(out), a.requires_grad() || b.requires_grad());
    if (y.requires_grad()) {
        tape.record([a, b, y]() mutable {
            const auto gy = y.grad();
            const auto av = a.values();
            const auto bv = b.values();
            if (a.requires_grad()) {
                auto ga = a.mutable_grad();
                for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] / bv[i];
            }
            if (b.requires_grad()) {
                auto gb = b.mutable_grad();
                for (std::size_t i = 0; i < gy.size(); ++i) {
                    gb[i] -= gy[i] * av[i] / (bv[i] * bv[i]);
                }
            }
        });
    }
    return y;
}

Tensor scale(Tape& tape, const Tensor& a, double factor) {
    std::vector<double> out(a.values().begin(), a.values().end());
    for (auto& v : out) v *= factor;
    Tensor y = tape.output(a.shape(), std::move(out), a.requires_grad());
    if (y.requires_grad()) {
        tape.record([a, y, factor]() mutable {
            const auto gy = y.grad();
            auto ga = a.mutable_grad();
            for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += factor * gy[i];
        });
    }
    return y;
}

Tensor add_scalar(Tape& tape, const Tensor& a, double offset) {
    std::vector<double> out(a.values().begin(), a.values().end());
    for (auto& v : out) v += offset;
    Tensor y = tape.output(a.shape(), std::move(out), a.requires_grad());
    if (y.requires_grad()) {
        tape.record([a, y]() mutable {
            const auto gy = y.grad();
            auto ga = a.mutable_grad();
            for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
        });
    }
    return y;
}

Tensor relu(Tape& tape, const Tensor& x) {
    std::vector<double> out(x.values().begin(), x.values().end());
    for (auto& v : out) v = v > 0.0 ? v : 0.0;
    Tensor y = tape.output(x.shape(), std::move(out), x.requires_grad());
    if (y.requires_grad()) {
        tape.record([x, y]() mutable {
            const auto gy = y.grad();
            const auto xv = x.values();
            auto gx = x.mutable_grad();
            // Subgradient at exactly zero is zero.
            for (std::size_t i = 0; i < gy.size(); ++i) {
                if (xv[i] > 0.0) gx[i] += gy[i];
            }
        });
    }
    return y;
}

Tensor exp(Tape& tape, const Tensor& x) {
    std::vector<double> out(x.values().begin(), x.values().end());
    for (auto& v : out) v = std::exp(v);
    Tensor y = tape.output(x.shape(), std::move(out), x.requires_grad());
    if (y.requires_grad()) {
        tape.record([x, y]() mutable {
            const auto gy = y.grad();
            const auto yv = y.values();
            auto gx = x.mutable_grad();
            for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * yv[i];
        });
    }
    return y;
}

Tensor log(Tape& tape, const Tensor& x, double floor) {
    std::vector<double> out(x.values().begin(), x.values().end());
    for (auto& v : out) v = std::log(std::max(v, floor));
    Tensor y = tape.output(x.shape(), std::move(out), x.requires_grad());
    if (y.requires_grad()) {
        tape.record([x, y, floor]() mutable {
            const auto gy = y.grad();
            const auto xv = x.values();
            auto gx = x.mutable_grad();
            for (std::size_t i = 0; i < gy.size(); ++i) {
                if (xv[i] > floor) gx[i] += gy[i] / xv[i];
            }
        });
    }
    return y;
}

// ---------------------------------------------------------------------------
// Reductions and reshaping

Tensor sum(Tape& tape, const Tensor& x) {
    const auto xv = x.values();
    const double total = std::accumulate(xv.begin(), xv.end(), 0.0);
    Tensor y = tape.output(Shape{1}, {total}, x.requires_grad());
    if (y.requires_grad()) {
        tape.record([x, y]() mutable {
            const double g = y.grad()[0];
            for (auto& v : x.mutable_grad()) v += g;
        });
    }
    return y;
}

Tensor mean(Tape& tape, const Tensor& x) {
    return scale(tape, sum(tape, x), 1.0 / static_cast<double>(x.size()));
}

Tensor add_n(Tape& tape, std::span<const Tensor> terms) {
    if (terms.empty()) {
        throw ShapeError("add_n needs at least one term");
    }
    std::vector<double> out(terms[0].values().begin(), terms[0].values().end());
    bool track = terms[0].requires_grad();
    for (std::size_t k = 1; k < terms.size(); ++k) {
        require_same_shape(terms[0], terms[k], "add_n");
        const auto v = terms[k].values();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
        track = track || terms[k].requires_grad();
    }
    Tensor y = tape.output(terms[0].shape(), std::move(out), track);
    if (y.requires_grad()) {
        tape.record([inputs = std::vector<Tensor>(terms.begin(), terms.end()), y]() mutable {
            const auto gy = y.grad();
            for (auto& t : inputs) {
                if (!t.requires_grad()) continue;
                auto g = t.mutable_grad();
                for (std::size_t i = 0; i < gy.size(); ++i) g[i] += gy[i];
            }
        });
    }
    return y;
}

Tensor dot(Tape& tape, const Tensor& a, const Tensor& b) {
    if (a.size() != b.size()) {
        throw ShapeError("dot: length mismatch " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
    }
    const double value = dot_kernel(a.values().data(), b.values().data(), a.size());
    Tensor y = tape.output(Shape{1}, {value}, a.requires_grad() || b.requires_grad());
    if (y.requires_grad()) {
        tape.record([a, b, y]() mutable {
            const double g = y.grad()[0];
            if (a.requires_grad()) axpy_kernel(g, b.values().data(), a.mutable_grad().data(), a.size());
            if (b.requires_grad()) axpy_kernel(g, a.values().data(), b.mutable_grad().data(), b.size());
        });
    }
    return y;
}

Tensor squared_distance(Tape& tape, const Tensor& a, const Tensor& b) {
    if (a.size() != b.size()) {
        throw ShapeError("squared_distance: length mismatch " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
    }
    const auto av = a.values();
    const auto bv = b.values();
    double total = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) {
        const double d = av[i] - bv[i];
        total += d * d;
    }
    Tensor y = tape.output(Shape{1}, {total}, a.requires_grad() || b.requires_grad());
    if (y.requires_grad()) {
        tape.record([a, b, y]() mutable {
            const double g = y.grad()[0];
            const auto av = a.values();
            const auto bv = b.values();
            if (a.requires_grad()) {
                auto ga = a.mutable_grad();
                for (std::size_t i = 0; i < av.size(); ++i) ga[i] += 2.0 * g * (av[i] - bv[i]);
            }
            if (b.requires_grad()) {
                auto gb = b.mutable_grad();
                for (std::size_t i = 0; i < av.size(); ++i) gb[i] -= 2.0 * g * (av[i] - bv[i]);
            }
        });
    }
    return y;
}

Tensor reshape(Tape& tape, const Tensor& x, Shape shape) {
    if (shape_size(shape) != x.size()) {
        throw ShapeError("reshape: cannot view " + shape_string(x.shape()) + " as " +
                         shape_string(shape));
    }
    Tensor y = tape.output(std::move(shape), std::vector<double>(x.values().begin(), x.values().end()),
                           x.requires_grad());
    if (y.requires_grad()) {
        tape.record([x, y]() mutable {
            const auto gy = y.grad();
            auto gx = x.mutable_grad();
            for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
        });
    }
    return y;
}

Tensor select(Tape& tape, const Tensor& x, std::size_t index) {
    if (index >= x.size()) {
        throw ShapeError("select: index " + std::to_string(index) + " out of range for " +
                         shape_string(x.shape()));
    }
    Tensor y = tape.output(Shape{1}, {x.values()[index]}, x.requires_grad());
    if (y.requires_grad()) {
        tape.record([x, y, index]() mutable { x.mutable_grad()[index] += y.grad()[0]; });
    }
    return y;
}

Tensor l2_normalize(Tape& tape, const Tensor& x, double eps) {
    const auto xv = x.values();
    const double norm = std::sqrt(dot_kernel(xv.data(), xv.data(), xv.size()) + eps);
    std::vector<double> out(xv.begin(), xv.end());
    for (auto& v : out) v /= norm;
    Tensor y = tape.output(x.shape(), std::move(out), x.requires_grad());
    if (y.requires_grad()) {
        tape.record([x, y, norm]() mutable {
            // dy_i/dx_j = (delta_ij - y_i y_j) / norm
            const auto gy = y.grad();
            const auto yv = y.values();
            const double proj = dot_kernel(gy.data(), yv.data(), gy.size());
            auto gx = x.mutable_grad();
            for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += (gy[i] - yv[i] * proj) / norm;
        });
    }
    return y;
}

Tensor softmax(Tape& tape, const Tensor& logits) {
    const auto lv = logits.values();
    const double peak = *std::max_element(lv.begin(), lv.end());
    std::vector<double> out(lv.size());
    double total = 0.0;
    for (std::size_t i = 0; i < lv.size(); ++i) {
        out[i] = std::exp(lv[i] - peak);
        total += out[i];
    }
    for (auto& v : out) v /= total;
    Tensor y = tape.output(logits.shape(), std::move(out), logits.requires_grad());
    if (y.requires_grad()) {
        tape.record([logits, y]() mutable {
            const auto gy = y.grad();
            const auto yv = y.values();
            const double proj = dot_kernel(gy.data(), yv.data(), gy.size());
            auto gx = logits.mutable_grad();
            for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += yv[i] * (gy[i] - proj);
        });
    }
    return y;
}

// ---------------------------------------------------------------------------
// Layers

Tensor conv1d(Tape& tape, const Tensor& input, const Tensor& kernels, const Tensor& bias,
              Padding padding) {
    if (input.rank() != 2 || kernels.rank() != 3 || bias.rank() != 1) {
        throw ShapeError("conv1d: expected input [c_in x L], kernels [c_out x c_in x k], bias "
                         "[c_out]; got " +
                         shape_string(input.shape()) + ", " + shape_string(kernels.shape()) +
                         ", " + shape_string(bias.shape()));
    }
    const std::size_t c_in = input.dim(0);
    const std::size_t length = input.dim(1);
    const std::size_t c_out = kernels.dim(0);
    const std::size_t width = kernels.dim(2);
    if (kernels.dim(1) != c_in || bias.dim(0) != c_out) {
        throw ShapeError("conv1d: channel mismatch between input " + shape_string(input.shape()) +
                         ", kernels " + shape_string(kernels.shape()) + " and bias " +
                         shape_string(bias.shape()));
    }
    if (width > length) {
        throw ShapeError("conv1d: kernel width " + std::to_string(width) +
                         " exceeds input length " + std::to_string(length));
    }
    const std::ptrdiff_t pad_left =
        padding == Padding::Same ? static_cast<std::ptrdiff_t>((width - 1) / 2) : 0;
    const std::size_t out_len = padding == Padding::Same ? length : length - width + 1;

    const double* x = input.values().data();
    const double* w = kernels.values().data();
    const double* b = bias.values().data();
    std::vector<double> out(c_out * out_len);

    // Output range for a tap whose input offset is `shift`.
    auto tap_range = [length, out_len](std::ptrdiff_t shift) {
        const auto lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, -shift));
        const auto hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
            static_cast<std::ptrdiff_t>(length) - shift, 0, static_cast<std::ptrdiff_t>(out_len)));
        return std::pair{lo, hi};
    };

    for (std::size_t o = 0; o < c_out; ++o) {
        double* y = out.data() + o * out_len;
        std::fill(y, y + out_len, b[o]);
        for (std::size_t c = 0; c < c_in; ++c) {
            const double* xc = x + c * length;
            for (std::size_t j = 0; j < width; ++j) {
                const double wv = w[(o * c_in + c) * width + j];
                const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - pad_left;
                const auto [lo, hi] = tap_range(shift);
                if (lo < hi) axpy_kernel(wv, xc + static_cast<std::ptrdiff_t>(lo) + shift, y + lo, hi - lo);
            }
        }
    }

    const bool track = input.requires_grad() || kernels.requires_grad() || bias.requires_grad();
    Tensor result = tape.output(Shape{c_out, out_len}, std::move(out), track);
    if (result.requires_grad()) {
        tape.record([input, kernels, bias, result, c_in, c_out, length, width, out_len, pad_left,
                     tap_range]() mutable {
            const double* gy = result.grad().data();
            const double* x = input.values().data();
            const double* w = kernels.values().data();
            double* gx = input.requires_grad() ? input.mutable_grad().data() : nullptr;
            double* gw = kernels.requires_grad() ? kernels.mutable_grad().data() : nullptr;
            if (bias.requires_grad()) {
                auto gb = bias.mutable_grad();
                for (std::size_t o = 0; o < c_out; ++o) {
                    const double* g = gy + o * out_len;
                    gb[o] += std::accumulate(g, g + out_len, 0.0);
                }
            }
            for (std::size_t o = 0; o < c_out; ++o) {
                const double* g = gy + o * out_len;
                for (std::size_t c = 0; c < c_in; ++c) {
                    for (std::size_t j = 0; j < width; ++j) {
                        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - pad_left;
                        const auto [lo, hi] = tap_range(shift);
                        if (lo >= hi) continue;
                        const std::size_t widx = (o * c_in + c) * width + j;
                        const std::ptrdiff_t xoff =
                            static_cast<std::ptrdiff_t>(c * length + lo) + shift;
                        if (gw) gw[widx] += dot_kernel(g + lo, x + xoff, hi - lo);
                        if (gx) axpy_kernel(w[widx], g + lo, gx + xoff, hi - lo);
                    }
                }
            }
        });
    }
    return result;
}

Tensor dense(Tape& tape, const Tensor& input, const Tensor& weights, const Tensor& bias) {
    if (weights.rank() != 2 || bias.rank() != 1 || weights.dim(1) != input.size() ||
        bias.dim(0) != weights.dim(0)) {
        throw ShapeError("dense: expected input [n], weights [m x n], bias [m]; got " +
                         shape_string(input.shape()) + ", " + shape_string(weights.shape()) +
                         ", " + shape_string(bias.shape()));
    }
    const std::size_t m = weights.dim(0);
    const std::size_t n = weights.dim(1);
    const double* x = input.values().data();
    const double* w = weights.values().data();
    std::vector<double> out(m);
    for (std::size_t r = 0; r < m; ++r) {
        out[r] = bias.values()[r] + dot_kernel(w + r * n, x, n);
    }
    const bool track = input.requires_grad() || weights.requires_grad() || bias.requires_grad();
    Tensor y = tape.output(Shape{m}, std::move(out), track);
    if (y.requires_grad()) {
        tape.record([input, weights, bias, y, m, n]() mutable {
            const auto gy = y.grad();
            const double* x = input.values().data();
            const double* w = weights.values().data();
            if (bias.requires_grad()) {
                auto gb = bias.mutable_grad();
                for (std::size_t r = 0; r < m; ++r) gb[r] += gy[r];
            }
            if (weights.requires_grad()) {
                double* gw = weights.mutable_grad().data();
                for (std::size_t r = 0; r < m; ++r) axpy_kernel(gy[r], x, gw + r * n, n);
            }
            if (input.requires_grad()) {
                double* gx = input.mutable_grad().data();
                for (std::size_t r = 0; r < m; ++r) axpy_kernel(gy[r], w + r * n, gx, n);
            }
        });
    }
    return y;
}

Tensor global_average_pool(Tape& tape, const Tensor& input) {
    if (input.rank() != 2) {
        throw ShapeError("global_average_pool: expected [c x L], got " + shape_string(input.shape()));
    }
    const std::size_t channels = input.dim(0);
    const std::size_t length = input.dim(1);
    const double* x = input.values().data();
    std::vector<double> out(channels);
    for (std::size_t c = 0; c < channels; ++c) {
        out[c] = std::accumulate(x + c * length, x + (c + 1) * length, 0.0) /
                 static_cast<double>(length);
    }
    Tensor y = tape.output(Shape{channels}, std::move(out), input.requires_grad());
    if (y.requires_grad()) {
        tape.record([input, y, channels, length]() mutable {
            const auto gy = y.grad();
            double* gx = input.mutable_grad().data();
            const double inv = 1.0 / static_cast<double>(length);
            for (std::size_t c = 0; c < channels; ++c) {
                const double g = gy[c] * inv;
                for (std::size_t l = 0; l < length; ++l) gx[c * length + l] += g;
            }
        });
    }
    return y;
}

}  // namespace cdnet
