#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathgat {

/// Thrown when tensor shapes are incompatible for an operation.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Tape;

namespace detail {
struct TensorNode {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  std::vector<double> grad;  // sized lazily, same length as data
  bool requires_grad = false;
  Tape* tape = nullptr;

  std::size_t size() const { return data.size(); }
  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
};
}  // namespace detail

/// Dense row-major tensor of doubles. Copies are shallow; the underlying
/// buffer is shared. Gradients are recorded on a Tape when the tensor was
/// created with requires_grad.
class Tensor {
 public:
  Tensor() : node_(std::make_shared<detail::TensorNode>()) {}
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double value);
  static Tensor scalar(double value) { return Tensor({1}, {value}); }
  static Tensor identity(std::size_t n);

  /// Gradient-tracked parameter registered on a tape.
  static Tensor param(std::vector<std::size_t> shape, std::vector<double> data,
                      Tape& tape);

  const std::vector<std::size_t>& shape() const { return node_->shape; }
  std::size_t size() const { return node_->data.size(); }
  std::size_t ndim() const { return node_->shape.size(); }
  std::size_t rows() const { return node_->shape.at(0); }
  std::size_t cols() const { return node_->shape.at(1); }
  bool requires_grad() const { return node_->requires_grad; }
  Tape* tape() const { return node_->tape; }

  const std::vector<double>& data() const { return node_->data; }
  std::vector<double>& mutable_data() { return node_->data; }
  double value() const;  // scalar access
  double at(std::size_t i) const { return node_->data.at(i); }
  double at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, double v) { node_->data.at(i) = v; }
  void set(std::size_t i, std::size_t j, double v);

  const std::vector<double>& grad() const;
  void zero_grad() { node_->ensure_grad(); std::fill(node_->grad.begin(), node_->grad.end(), 0.0); }

  std::shared_ptr<detail::TensorNode> node() const { return node_; }
  std::string shape_str() const;

 private:
  explicit Tensor(std::shared_ptr<detail::TensorNode> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::TensorNode> node_;
  friend class Tape;
  friend Tensor make_tracked(std::vector<std::size_t>, std::vector<double>, Tape*);
};

/// Ordered record of primitive operations. backward() replays the records in
/// reverse, accumulating gradients into every tracked tensor reachable from
/// the loss. Single-threaded; each training run owns its own tape.
class Tape {
 public:
  struct Record {
    std::shared_ptr<detail::TensorNode> out;
    std::function<void(const std::vector<double>& out_grad)> pull;
  };

  void record(std::shared_ptr<detail::TensorNode> out,
              std::function<void(const std::vector<double>&)> pull) {
    records_.push_back({std::move(out), std::move(pull)});
  }

  /// Seeds d(loss)/d(loss)=1 and walks the records in reverse order.
  void backward(const Tensor& loss);

  void clear() { records_.clear(); }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<Record> records_;
};

// ---- primitives (all record gradients when an operand is tracked) ----

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);       // same shape, or b scalar / row vector
Tensor sub(const Tensor& a, const Tensor& b);
Tensor multiply(const Tensor& a, const Tensor& b);  // elementwise
Tensor scale(const Tensor& a, double c);
Tensor concat(const std::vector<Tensor>& parts);    // last axis
Tensor slice_rows(const Tensor& a, std::size_t row_begin, std::size_t row_end);
Tensor reshape(const Tensor& a, std::vector<std::size_t> shape);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor leaky_relu(const Tensor& x, double slope);
Tensor tanh_act(const Tensor& x);

/// Row-wise softmax restricted to mask==1 entries, stabilized by row-max
/// subtraction. Masked entries are exactly 0; a row with no permitted
/// entries yields an all-zero row.
Tensor masked_softmax(const Tensor& scores, const Tensor& mask);

/// Inverted dropout: train-time scaling by 1/(1-p). Identity when p==0 or
/// train_mode is false.
Tensor dropout(const Tensor& x, double p, bool train_mode, std::mt19937_64& rng);

}  // namespace pathgat
