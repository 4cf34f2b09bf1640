#ifndef MSSD_TENSOR_HPP
#define MSSD_TENSOR_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mssd/errors.hpp"

namespace mssd {

namespace memstat {
// Byte counters over tensor value and gradient buffers. reset_peak()
// starts a new measurement window; peak_bytes() reports the high-water
// mark since then.
void add(std::size_t bytes);
void sub(std::size_t bytes);
std::size_t live_bytes();
std::size_t peak_bytes();
void reset_peak();
} // namespace memstat

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

class GradTape;
class Gradients;

/**
 * Dense row-major array of 64-bit floats.
 *
 * The value buffer is immutable and shared between copies. A tensor may
 * additionally carry a handle (tape serial + node id) identifying the
 * operation that produced it on a gradient tape; the handle travels with
 * copies and is cleared by detached().
 */
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape);
    static Tensor full(Shape shape, double value);
    static Tensor from(Shape shape, std::vector<double> data);
    static Tensor scalar(double value);
    static Tensor randn(Shape shape, std::mt19937_64& rng, double stddev);

    const Shape& shape() const { return shape_; }
    std::size_t ndim() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t size() const { return data_ ? data_->values.size() : 0; }
    bool empty() const { return data_ == nullptr; }

    const double* data() const;
    std::span<const double> values() const;
    std::vector<double> to_vector() const;
    double at(std::size_t flat_index) const;
    double item() const; // scalar tensors only

    /// Same buffer under a different shape (element count must match).
    Tensor with_shape(Shape new_shape) const;

    bool tracked() const { return node_ >= 0; }
    /// Copy without tape bookkeeping.
    Tensor detached() const;

    bool same_buffer(const Tensor& other) const { return data_ == other.data_; }

private:
    struct Buffer {
        std::vector<double> values;
        explicit Buffer(std::vector<double> v);
        ~Buffer();
        Buffer(const Buffer&) = delete;
        Buffer& operator=(const Buffer&) = delete;
    };

    Shape shape_;
    std::shared_ptr<const Buffer> data_;
    std::uint64_t tape_serial_ = 0;
    std::int64_t node_ = -1;

    friend class GradTape;
    friend class Gradients;
};

/// Result of GradTape::backward: one gradient buffer per reached node.
class Gradients {
public:
    Gradients() = default;
    ~Gradients();
    Gradients(Gradients&& other) noexcept;
    Gradients& operator=(Gradients&& other) noexcept;
    Gradients(const Gradients&) = delete;
    Gradients& operator=(const Gradients&) = delete;

    /// Gradient buffer of a tensor recorded on the originating tape.
    /// Empty span when backpropagation never reached it.
    std::span<const double> find(const Tensor& t) const;

    /// Gradient as a tensor of the same shape, zeros when unreached.
    Tensor at(const Tensor& t) const;

    bool has(const Tensor& t) const;

private:
    friend class GradTape;
    std::uint64_t serial_ = 0;
    std::vector<std::vector<double>> buffers_;
    std::size_t bytes_ = 0;
};

/**
 * Append-only record of differentiable operations for one forward pass.
 *
 * Nodes are recorded in execution order, which is already a topological
 * order of the data flow. The tape is single use: backward() runs the
 * reverse sweep, hands the gradients to the caller and clears the tape.
 */
class GradTape {
public:
    GradTape();
    GradTape(const GradTape&) = delete;
    GradTape& operator=(const GradTape&) = delete;

    std::uint64_t serial() const { return serial_; }
    std::size_t node_count() const { return nodes_.size(); }
    bool consumed() const { return consumed_; }

    /// Registers a leaf; gradients accumulate into leaves during backward().
    void watch(Tensor& t);

    /// Reverse-mode sweep from a scalar loss. Consumes the tape.
    Gradients backward(const Tensor& loss);

    class Pass {
    public:
        /// Gradient accumulator of a node, lazily zero-initialized.
        /// nullptr for node < 0 (untracked inputs).
        double* grad(std::int64_t node);

    private:
        friend class GradTape;
        Pass(GradTape& tape, std::vector<std::vector<double>>& buffers);
        GradTape& tape_;
        std::vector<std::vector<double>>& buffers_;
    };

    using BackFn = std::function<void(const double* out_grad, Pass& pass)>;

    /// Node id of t on this tape, -1 when untracked.
    /// Throws when t was recorded on a different tape.
    std::int64_t node_of(const Tensor& t) const;

    /// Records a node and returns the value bound to it.
    Tensor emit(Tensor value, BackFn back);

private:
    struct Node {
        std::size_t size = 0;
        BackFn back;
    };

    std::uint64_t serial_ = 0;
    std::vector<Node> nodes_;
    std::size_t grad_bytes_ = 0;
    bool consumed_ = false;
};

} // namespace mssd

#endif // MSSD_TENSOR_HPP
