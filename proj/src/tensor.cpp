#include "pathgat/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pathgat {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

std::string shape_to_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << "]";
  return os.str();
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : node_(std::make_shared<detail::TensorNode>()) {
  if (shape_product(shape) != data.size())
    throw ShapeError("tensor shape " + shape_to_string(shape) + " does not match data length " +
                     std::to_string(data.size()));
  node_->shape = std::move(shape);
  node_->data = std::move(data);
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  std::vector<double> d(shape_product(shape), 0.0);
  return Tensor(std::move(shape), std::move(d));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
  std::vector<double> d(shape_product(shape), value);
  return Tensor(std::move(shape), std::move(d));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t = zeros({n, n});
  for (std::size_t i = 0; i < n; ++i) t.set(i, i, 1.0);
  return t;
}

Tensor Tensor::param(std::vector<std::size_t> shape, std::vector<double> data, Tape& tape) {
  Tensor t(std::move(shape), std::move(data));
  t.node_->requires_grad = true;
  t.node_->tape = &tape;
  t.node_->ensure_grad();
  return t;
}

double Tensor::value() const {
  if (size() != 1) throw ShapeError("value() requires a scalar, got shape " + shape_str());
  return node_->data[0];
}

double Tensor::at(std::size_t i, std::size_t j) const {
  return node_->data.at(i * cols() + j);
}

void Tensor::set(std::size_t i, std::size_t j, double v) {
  node_->data.at(i * cols() + j) = v;
}

const std::vector<double>& Tensor::grad() const {
  node_->ensure_grad();
  return node_->grad;
}

std::string Tensor::shape_str() const { return shape_to_string(node_->shape); }

void Tape::backward(const Tensor& loss) {
  if (loss.size() != 1)
    throw std::invalid_argument("backward() requires a scalar loss, got shape " + loss.shape_str());
  loss.node()->ensure_grad();
  loss.node()->grad[0] = 1.0;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    it->out->ensure_grad();
    it->pull(it->out->grad);
  }
}

namespace {

Tape* result_tape(std::initializer_list<const Tensor*> operands) {
  for (const Tensor* t : operands)
    if (t->tape()) return t->tape();
  return nullptr;
}

Tensor make_result(std::vector<std::size_t> shape, std::vector<double> data, Tape* tape,
                   std::function<void(const std::vector<double>&)> pull) {
  Tensor out(std::move(shape), std::move(data));
  if (tape) {
    auto n = out.node();
    n->requires_grad = true;
    n->tape = tape;
    tape->record(n, std::move(pull));
  }
  return out;
}

void accumulate(const std::shared_ptr<detail::TensorNode>& n, std::size_t i, double v) {
  n->ensure_grad();
  n->grad[i] += v;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.cols() != b.rows())
    throw ShapeError("matmul: incompatible shapes " + a.shape_str() + " and " + b.shape_str());
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a.data()[i * k + p];
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += av * b.data()[p * n + j];
    }
  auto an = a.node(), bn = b.node();
  return make_result({m, n}, std::move(out), result_tape({&a, &b}),
                     [an, bn, m, k, n](const std::vector<double>& g) {
                       if (an->requires_grad || an->tape) {
                         an->ensure_grad();
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t p = 0; p < k; ++p) {
                             double acc = 0.0;
                             for (std::size_t j = 0; j < n; ++j)
                               acc += g[i * n + j] * bn->data[p * n + j];
                             an->grad[i * k + p] += acc;
                           }
                       }
                       if (bn->requires_grad || bn->tape) {
                         bn->ensure_grad();
                         for (std::size_t p = 0; p < k; ++p)
                           for (std::size_t j = 0; j < n; ++j) {
                             double acc = 0.0;
                             for (std::size_t i = 0; i < m; ++i)
                               acc += an->data[i * k + p] * g[i * n + j];
                             bn->grad[p * n + j] += acc;
                           }
                       }
                     });
}

Tensor transpose(const Tensor& a) {
  if (a.ndim() != 2) throw ShapeError("transpose: expected 2-d tensor, got " + a.shape_str());
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a.data()[i * n + j];
  auto an = a.node();
  return make_result({n, m}, std::move(out), result_tape({&a}),
                     [an, m, n](const std::vector<double>& g) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < m; ++i)
                         for (std::size_t j = 0; j < n; ++j) an->grad[i * n + j] += g[j * m + i];
                     });
}

namespace {

// broadcast kinds for add/sub: same shape, scalar rhs, or row-vector rhs
enum class Bcast { kSame, kScalar, kRow };

Bcast bcast_kind(const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) return Bcast::kSame;
  if (b.size() == 1) return Bcast::kScalar;
  if (a.ndim() == 2 && b.ndim() == 2 && b.rows() == 1 && b.cols() == a.cols()) return Bcast::kRow;
  throw ShapeError("add: incompatible shapes " + a.shape_str() + " and " + b.shape_str());
}

Tensor add_impl(const Tensor& a, const Tensor& b, double sign) {
  const Bcast kind = bcast_kind(a, b);
  std::vector<double> out(a.size());
  const std::size_t n = a.size();
  const std::size_t c = kind == Bcast::kRow ? a.cols() : 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double bv = kind == Bcast::kSame ? b.data()[i]
                    : kind == Bcast::kScalar ? b.data()[0]
                                             : b.data()[i % c];
    out[i] = a.data()[i] + sign * bv;
  }
  auto an = a.node(), bn = b.node();
  return make_result(a.shape(), std::move(out), result_tape({&a, &b}),
                     [an, bn, kind, sign, n, c](const std::vector<double>& g) {
                       if (an->requires_grad || an->tape) {
                         an->ensure_grad();
                         for (std::size_t i = 0; i < n; ++i) an->grad[i] += g[i];
                       }
                       if (bn->requires_grad || bn->tape) {
                         bn->ensure_grad();
                         for (std::size_t i = 0; i < n; ++i) {
                           const std::size_t bi = kind == Bcast::kSame ? i
                                                : kind == Bcast::kScalar ? 0
                                                                         : i % c;
                           bn->grad[bi] += sign * g[i];
                         }
                       }
                     });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return add_impl(a, b, 1.0); }
Tensor sub(const Tensor& a, const Tensor& b) { return add_impl(a, b, -1.0); }

Tensor multiply(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw ShapeError("multiply: shapes differ, " + a.shape_str() + " vs " + b.shape_str());
  const std::size_t n = a.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a.data()[i] * b.data()[i];
  auto an = a.node(), bn = b.node();
  return make_result(a.shape(), std::move(out), result_tape({&a, &b}),
                     [an, bn, n](const std::vector<double>& g) {
                       if (an->requires_grad || an->tape) {
                         an->ensure_grad();
                         for (std::size_t i = 0; i < n; ++i) an->grad[i] += g[i] * bn->data[i];
                       }
                       if (bn->requires_grad || bn->tape) {
                         bn->ensure_grad();
                         for (std::size_t i = 0; i < n; ++i) bn->grad[i] += g[i] * an->data[i];
                       }
                     });
}

Tensor scale(const Tensor& a, double c) {
  const std::size_t n = a.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = c * a.data()[i];
  auto an = a.node();
  return make_result(a.shape(), std::move(out), result_tape({&a}),
                     [an, c, n](const std::vector<double>& g) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < n; ++i) an->grad[i] += c * g[i];
                     });
}

Tensor concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat: empty input");
  if (parts[0].ndim() == 1) {
    std::size_t total = 0;
    for (const auto& p : parts) {
      if (p.ndim() != 1) throw ShapeError("concat: mixed ranks");
      total += p.size();
    }
    std::vector<double> out;
    out.reserve(total);
    for (const auto& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
    std::vector<std::shared_ptr<detail::TensorNode>> nodes;
    std::vector<const Tensor*> ptrs;
    for (const auto& p : parts) { nodes.push_back(p.node()); ptrs.push_back(&p); }
    Tape* tape = nullptr;
    for (const auto& p : parts) if (p.tape()) { tape = p.tape(); break; }
    return make_result({total}, std::move(out), tape,
                       [nodes](const std::vector<double>& g) {
                         std::size_t off = 0;
                         for (const auto& n : nodes) {
                           if (n->requires_grad || n->tape) {
                             n->ensure_grad();
                             for (std::size_t i = 0; i < n->size(); ++i) n->grad[i] += g[off + i];
                           }
                           off += n->size();
                         }
                       });
  }
  const std::size_t rows = parts[0].rows();
  std::size_t total_cols = 0;
  for (const auto& p : parts) {
    if (p.ndim() != 2 || p.rows() != rows)
      throw ShapeError("concat: row mismatch, " + parts[0].shape_str() + " vs " + p.shape_str());
    total_cols += p.cols();
  }
  std::vector<double> out(rows * total_cols);
  std::size_t col_off = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < p.cols(); ++j)
        out[i * total_cols + col_off + j] = p.data()[i * p.cols() + j];
    col_off += p.cols();
  }
  std::vector<std::shared_ptr<detail::TensorNode>> nodes;
  std::vector<std::size_t> widths;
  Tape* tape = nullptr;
  for (const auto& p : parts) {
    nodes.push_back(p.node());
    widths.push_back(p.cols());
    if (!tape && p.tape()) tape = p.tape();
  }
  return make_result({rows, total_cols}, std::move(out), tape,
                     [nodes, widths, rows, total_cols](const std::vector<double>& g) {
                       std::size_t off = 0;
                       for (std::size_t k = 0; k < nodes.size(); ++k) {
                         const auto& n = nodes[k];
                         if (n->requires_grad || n->tape) {
                           n->ensure_grad();
                           for (std::size_t i = 0; i < rows; ++i)
                             for (std::size_t j = 0; j < widths[k]; ++j)
                               n->grad[i * widths[k] + j] += g[i * total_cols + off + j];
                         }
                         off += widths[k];
                       }
                     });
}

Tensor slice_rows(const Tensor& a, std::size_t row_begin, std::size_t row_end) {
  if (a.ndim() != 2 || row_end > a.rows() || row_begin >= row_end)
    throw ShapeError("slice_rows: invalid range [" + std::to_string(row_begin) + "," +
                     std::to_string(row_end) + ") for " + a.shape_str());
  const std::size_t cols = a.cols();
  std::vector<double> out(a.data().begin() + row_begin * cols,
                          a.data().begin() + row_end * cols);
  auto an = a.node();
  return make_result({row_end - row_begin, cols}, std::move(out), result_tape({&a}),
                     [an, row_begin, cols](const std::vector<double>& g) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < g.size(); ++i)
                         an->grad[row_begin * cols + i] += g[i];
                     });
}

Tensor reshape(const Tensor& a, std::vector<std::size_t> shape) {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  if (n != a.size())
    throw ShapeError("reshape: size mismatch, " + a.shape_str() + " to " + std::to_string(n));
  std::vector<double> out = a.data();
  auto an = a.node();
  return make_result(std::move(shape), std::move(out), result_tape({&a}),
                     [an](const std::vector<double>& g) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < g.size(); ++i) an->grad[i] += g[i];
                     });
}

Tensor sum(const Tensor& a) {
  double s = std::accumulate(a.data().begin(), a.data().end(), 0.0);
  auto an = a.node();
  return make_result({1}, {s}, result_tape({&a}),
                     [an](const std::vector<double>& g) {
                       an->ensure_grad();
                       for (auto& v : an->grad) v += g[0];
                     });
}

Tensor mean(const Tensor& a) {
  const double n = static_cast<double>(a.size());
  double s = std::accumulate(a.data().begin(), a.data().end(), 0.0) / n;
  auto an = a.node();
  return make_result({1}, {s}, result_tape({&a}),
                     [an, n](const std::vector<double>& g) {
                       an->ensure_grad();
                       for (auto& v : an->grad) v += g[0] / n;
                     });
}

Tensor leaky_relu(const Tensor& x, double slope) {
  if (slope <= 0.0 || slope >= 1.0)
    throw std::invalid_argument("leaky_relu: slope must be in (0,1), got " + std::to_string(slope));
  const std::size_t n = x.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x.data()[i];
    out[i] = v > 0.0 ? v : slope * v;
  }
  auto xn = x.node();
  return make_result(x.shape(), std::move(out), result_tape({&x}),
                     [xn, slope, n](const std::vector<double>& g) {
                       xn->ensure_grad();
                       for (std::size_t i = 0; i < n; ++i)
                         xn->grad[i] += g[i] * (xn->data[i] > 0.0 ? 1.0 : slope);
                     });
}

Tensor tanh_act(const Tensor& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(x.data()[i]);
  auto xn = x.node();
  auto y = std::make_shared<std::vector<double>>(out);
  return make_result(x.shape(), std::move(out), result_tape({&x}),
                     [xn, y, n](const std::vector<double>& g) {
                       xn->ensure_grad();
                       for (std::size_t i = 0; i < n; ++i)
                         xn->grad[i] += g[i] * (1.0 - (*y)[i] * (*y)[i]);
                     });
}

Tensor masked_softmax(const Tensor& scores, const Tensor& mask) {
  if (scores.ndim() != 2 || scores.shape() != mask.shape())
    throw ShapeError("masked_softmax: shapes " + scores.shape_str() + " vs " + mask.shape_str());
  const std::size_t rows = scores.rows(), cols = scores.cols();
  std::vector<double> out(rows * cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cols; ++j)
      if (mask.data()[i * cols + j] != 0.0) mx = std::max(mx, scores.data()[i * cols + j]);
    if (!std::isfinite(mx)) continue;  // empty row stays zero
    double denom = 0.0;
    for (std::size_t j = 0; j < cols; ++j)
      if (mask.data()[i * cols + j] != 0.0) {
        out[i * cols + j] = std::exp(scores.data()[i * cols + j] - mx);
        denom += out[i * cols + j];
      }
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] /= denom;
  }
  auto sn = scores.node();
  auto mn = mask.node();
  auto y = std::make_shared<std::vector<double>>(out);
  return make_result(scores.shape(), std::move(out), result_tape({&scores}),
                     [sn, mn, y, rows, cols](const std::vector<double>& g) {
                       sn->ensure_grad();
                       // row-wise softmax jacobian: dx_j = y_j (g_j - sum_k g_k y_k)
                       for (std::size_t i = 0; i < rows; ++i) {
                         double dot = 0.0;
                         for (std::size_t j = 0; j < cols; ++j)
                           dot += g[i * cols + j] * (*y)[i * cols + j];
                         for (std::size_t j = 0; j < cols; ++j)
                           if (mn->data[i * cols + j] != 0.0)
                             sn->grad[i * cols + j] +=
                                 (*y)[i * cols + j] * (g[i * cols + j] - dot);
                       }
                     });
}

Tensor dropout(const Tensor& x, double p, bool train_mode, std::mt19937_64& rng) {
  if (p < 0.0 || p >= 1.0)
    throw std::invalid_argument("dropout: p must be in [0,1), got " + std::to_string(p));
  if (!train_mode || p == 0.0) return x;
  const std::size_t n = x.size();
  auto keep = std::make_shared<std::vector<double>>(n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double inv = 1.0 / (1.0 - p);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    (*keep)[i] = unif(rng) >= p ? inv : 0.0;
    out[i] = x.data()[i] * (*keep)[i];
  }
  auto xn = x.node();
  return make_result(x.shape(), std::move(out), result_tape({&x}),
                     [xn, keep, n](const std::vector<double>& g) {
                       xn->ensure_grad();
                       for (std::size_t i = 0; i < n; ++i) xn->grad[i] += g[i] * (*keep)[i];
                     });
}

}  // namespace pathgat
