#include "mssd/tensor.hpp"

#include <atomic>
#include <sstream>

namespace mssd {

namespace memstat {
namespace {
std::atomic<std::size_t> g_live{0};
std::atomic<std::size_t> g_peak{0};
} // namespace

void add(std::size_t bytes) {
    std::size_t now = g_live.fetch_add(bytes, std::memory_order_relaxed) + bytes;
    std::size_t prev = g_peak.load(std::memory_order_relaxed);
    while (now > prev &&
           !g_peak.compare_exchange_weak(prev, now, std::memory_order_relaxed)) {
    }
}

void sub(std::size_t bytes) { g_live.fetch_sub(bytes, std::memory_order_relaxed); }

std::size_t live_bytes() { return g_live.load(std::memory_order_relaxed); }

std::size_t peak_bytes() { return g_peak.load(std::memory_order_relaxed); }

void reset_peak() { g_peak.store(g_live.load(std::memory_order_relaxed)); }

} // namespace memstat

std::size_t shape_size(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

Tensor::Buffer::Buffer(std::vector<double> v) : values(std::move(v)) {
    memstat::add(values.size() * sizeof(double));
}

Tensor::Buffer::~Buffer() { memstat::sub(values.size() * sizeof(double)); }

namespace {
void validate_shape(const Shape& shape) {
    if (shape.empty())
        throw ShapeError("tensor shape must have at least one dimension");
    for (std::size_t d : shape)
        if (d < 1) throw ShapeError("tensor dimensions must be >= 1, got " + shape_str(shape));
}
} // namespace

Tensor Tensor::zeros(Shape shape) {
    validate_shape(shape);
    std::size_t n = shape_size(shape);
    return from(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(Shape shape, double value) {
    validate_shape(shape);
    std::size_t n = shape_size(shape);
    return from(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::from(Shape shape, std::vector<double> data) {
    validate_shape(shape);
    if (shape_size(shape) != data.size())
        throw ShapeError("shape " + shape_str(shape) + " does not match buffer of " +
                         std::to_string(data.size()) + " elements");
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::make_shared<const Buffer>(std::move(data));
    return t;
}

Tensor Tensor::scalar(double value) { return from({1}, {value}); }

Tensor Tensor::randn(Shape shape, std::mt19937_64& rng, double stddev) {
    validate_shape(shape);
    std::size_t n = shape_size(shape);
    std::vector<double> v(n, 0.0);
    if (stddev > 0.0) {
        std::normal_distribution<double> dist(0.0, stddev);
        for (double& x : v) x = dist(rng);
    }
    return from(std::move(shape), std::move(v));
}

std::size_t Tensor::dim(std::size_t axis) const {
    if (axis >= shape_.size())
        throw ShapeError("axis " + std::to_string(axis) + " out of range for " + shape_str(shape_));
    return shape_[axis];
}

const double* Tensor::data() const {
    if (!data_) throw ContractError("access to empty tensor");
    return data_->values.data();
}

std::span<const double> Tensor::values() const {
    if (!data_) return {};
    return {data_->values.data(), data_->values.size()};
}

std::vector<double> Tensor::to_vector() const {
    if (!data_) return {};
    return data_->values;
}

double Tensor::at(std::size_t flat_index) const {
    if (!data_ || flat_index >= data_->values.size())
        throw ContractError("flat index " + std::to_string(flat_index) + " out of range");
    return data_->values[flat_index];
}

double Tensor::item() const {
    if (size() != 1)
        throw ContractError("item() requires a scalar tensor, got " + shape_str(shape_));
    return data_->values[0];
}

Tensor Tensor::with_shape(Shape new_shape) const {
    validate_shape(new_shape);
    if (shape_size(new_shape) != size())
        throw ShapeError("cannot view " + shape_str(shape_) + " as " + shape_str(new_shape));
    Tensor t;
    t.shape_ = std::move(new_shape);
    t.data_ = data_;
    return t;
}

Tensor Tensor::detached() const {
    Tensor t;
    t.shape_ = shape_;
    t.data_ = data_;
    return t;
}

Gradients::~Gradients() { memstat::sub(bytes_); }

Gradients::Gradients(Gradients&& other) noexcept
    : serial_(other.serial_), buffers_(std::move(other.buffers_)), bytes_(other.bytes_) {
    other.serial_ = 0;
    other.bytes_ = 0;
}

Gradients& Gradients::operator=(Gradients&& other) noexcept {
    if (this != &other) {
        memstat::sub(bytes_);
        serial_ = other.serial_;
        buffers_ = std::move(other.buffers_);
        bytes_ = other.bytes_;
        other.serial_ = 0;
        other.bytes_ = 0;
    }
    return *this;
}

std::span<const double> Gradients::find(const Tensor& t) const {
    if (t.node_ < 0 || t.tape_serial_ != serial_)
        throw ContractError("tensor was not recorded on the tape these gradients came from");
    const auto& buf = buffers_[static_cast<std::size_t>(t.node_)];
    return {buf.data(), buf.size()};
}

Tensor Gradients::at(const Tensor& t) const {
    auto g = find(t);
    if (g.empty()) return Tensor::zeros(t.shape());
    return Tensor::from(t.shape(), std::vector<double>(g.begin(), g.end()));
}

bool Gradients::has(const Tensor& t) const {
    if (t.node_ < 0 || t.tape_serial_ != serial_) return false;
    return !buffers_[static_cast<std::size_t>(t.node_)].empty();
}

namespace {
std::atomic<std::uint64_t> g_tape_serial{0};
} // namespace

GradTape::GradTape() : serial_(++g_tape_serial) {}

void GradTape::watch(Tensor& t) {
    if (consumed_) throw ContractError("tape already consumed by backward()");
    if (t.empty()) throw ContractError("cannot watch an empty tensor");
    if (t.tape_serial_ == serial_ && t.node_ >= 0) return;
    nodes_.push_back(Node{t.size(), nullptr});
    t.tape_serial_ = serial_;
    t.node_ = static_cast<std::int64_t>(nodes_.size()) - 1;
}

std::int64_t GradTape::node_of(const Tensor& t) const {
    if (t.node_ < 0 || t.tape_serial_ == 0) return -1;
    if (t.tape_serial_ != serial_)
        throw ContractError("tensor belongs to a different gradient tape");
    return t.node_;
}

Tensor GradTape::emit(Tensor value, BackFn back) {
    if (consumed_) throw ContractError("tape already consumed by backward()");
    nodes_.push_back(Node{value.size(), std::move(back)});
    value.tape_serial_ = serial_;
    value.node_ = static_cast<std::int64_t>(nodes_.size()) - 1;
    return value;
}

GradTape::Pass::Pass(GradTape& tape, std::vector<std::vector<double>>& buffers)
    : tape_(tape), buffers_(buffers) {}

double* GradTape::Pass::grad(std::int64_t node) {
    if (node < 0) return nullptr;
    auto& buf = buffers_[static_cast<std::size_t>(node)];
    if (buf.empty()) {
        std::size_t n = tape_.nodes_[static_cast<std::size_t>(node)].size;
        buf.assign(n, 0.0);
        tape_.grad_bytes_ += n * sizeof(double);
        memstat::add(n * sizeof(double));
    }
    return buf.data();
}

Gradients GradTape::backward(const Tensor& loss) {
    if (consumed_) throw ContractError("tape already consumed by backward()");
    if (loss.node_ < 0 || loss.tape_serial_ != serial_)
        throw ContractError("loss tensor is not recorded on this tape");
    if (loss.size() != 1)
        throw ContractError("backward() requires a scalar loss, got " + shape_str(loss.shape()));

    std::vector<std::vector<double>> buffers(nodes_.size());
    Pass pass(*this, buffers);
    *pass.grad(loss.node_) = 1.0;

    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (buffers[i].empty() || !nodes_[i].back) continue;
        nodes_[i].back(buffers[i].data(), pass);
    }

    Gradients out;
    out.serial_ = serial_;
    out.buffers_ = std::move(buffers);
    out.bytes_ = grad_bytes_;
    grad_bytes_ = 0;
    consumed_ = true;
    nodes_.clear();
    nodes_.shrink_to_fit();
    return out;
}

} // namespace mssd
