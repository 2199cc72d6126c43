#include "salient/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace salient::ad {

namespace {

[[noreturn]] void shape_fail(Op op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op_name(op)) + ": incompatible shapes " + shape_string(a.shape()) + " and " +
                   shape_string(b.shape()));
}

void axpy(std::span<double> y, double alpha, std::span<const double> x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::kConstant: return "constant";
    case Op::kParameter: return "parameter";
    case Op::kMatMul: return "matmul";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kDiv: return "div";
    case Op::kScale: return "scale";
    case Op::kConcat: return "concat";
    case Op::kSlice: return "slice";
    case Op::kGather: return "gather";
    case Op::kRow: return "row";
    case Op::kStack: return "stack";
    case Op::kTanh: return "tanh";
    case Op::kSigmoid: return "sigmoid";
    case Op::kSoftmax: return "softmax";
    case Op::kSum: return "sum";
    case Op::kMean: return "mean";
    case Op::kWeightedSum: return "weighted-sum";
    case Op::kMaxPieces: return "max-over-pieces";
    case Op::kCrossEntropy: return "cross-entropy";
  }
  return "unknown";
}

Tape::Tape(const ParameterSet* params) : params_(params) {
  if (params_) param_nodes_.assign(params_->size(), Var::kNone);
  records_.reserve(1024);
}

Var Tape::push(Record rec) {
  records_.push_back(std::move(rec));
  return Var{static_cast<std::uint32_t>(records_.size() - 1)};
}

void Tape::check(Var v) const {
  if (!v.valid() || v.id >= records_.size()) throw std::out_of_range("variable does not belong to this tape");
}

const Tensor& Tape::value(Var v) const {
  check(v);
  const auto& r = records_[v.id];
  if (r.op == Op::kParameter) return (*params_)[r.slot];
  return r.value;
}

Var Tape::constant(Tensor value) {
  Record r;
  r.op = Op::kConstant;
  r.value = std::move(value);
  return push(std::move(r));
}

Var Tape::param(std::size_t slot) {
  if (!params_ || slot >= params_->size()) throw std::out_of_range("parameter slot out of range");
  if (param_nodes_[slot] != Var::kNone) return Var{param_nodes_[slot]};
  Record r;
  r.op = Op::kParameter;
  r.slot = slot;
  r.needs_grad = true;
  auto v = push(std::move(r));
  param_nodes_[slot] = v.id;
  return v;
}

Var Tape::matmul(Var a, Var b) {
  check(a);
  check(b);
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  Record r;
  r.op = Op::kMatMul;
  r.inputs = {a.id, b.id};
  r.needs_grad = needs(a) || needs(b);
  if (A.rank() == 2 && B.rank() == 1) {
    const std::size_t m = A.shape()[0], k = A.shape()[1];
    if (B.size() != k) shape_fail(Op::kMatMul, A, B);
    Tensor out({m});
    const double* x = B.data().data();
    for (std::size_t i = 0; i < m; ++i) {
      const double* w = A.data().data() + i * k;
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc += w[j] * x[j];
      out[i] = acc;
    }
    r.value = std::move(out);
  } else if (A.rank() == 2 && B.rank() == 2) {
    const std::size_t m = A.shape()[0], k = A.shape()[1], n = B.shape()[1];
    if (B.shape()[0] != k) shape_fail(Op::kMatMul, A, B);
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < k; ++j) axpy(out.row(i), A.at(i, j), B.row(j));
    r.value = std::move(out);
  } else if (A.rank() == 1 && B.rank() == 2) {
    const std::size_t k = B.shape()[0], n = B.shape()[1];
    if (A.size() != k) shape_fail(Op::kMatMul, A, B);
    Tensor out({n});
    for (std::size_t j = 0; j < k; ++j) axpy(out.data(), A[j], B.row(j));
    r.value = std::move(out);
  } else {
    shape_fail(Op::kMatMul, A, B);
  }
  return push(std::move(r));
}

Var Tape::add(Var a, Var b) {
  check(a);
  check(b);
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (A.shape() != B.shape()) shape_fail(Op::kAdd, A, B);
  Record r;
  r.op = Op::kAdd;
  r.inputs = {a.id, b.id};
  r.needs_grad = needs(a) || needs(b);
  r.value = A;
  axpy(r.value.data(), 1.0, B.data());
  return push(std::move(r));
}

Var Tape::sub(Var a, Var b) {
  check(a);
  check(b);
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (A.shape() != B.shape()) shape_fail(Op::kSub, A, B);
  Record r;
  r.op = Op::kSub;
  r.inputs = {a.id, b.id};
  r.needs_grad = needs(a) || needs(b);
  r.value = A;
  axpy(r.value.data(), -1.0, B.data());
  return push(std::move(r));
}

Var Tape::mul(Var a, Var b) {
  check(a);
  check(b);
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  Record r;
  r.op = Op::kMul;
  r.inputs = {a.id, b.id};
  r.needs_grad = needs(a) || needs(b);
  if (A.shape() == B.shape()) {
    r.value = A;
    for (std::size_t i = 0; i < A.size(); ++i) r.value[i] *= B[i];
  } else if (B.size() == 1) {
    r.value = A;
    for (auto& x : r.value.data()) x *= B[0];
  } else if (A.size() == 1) {
    r.value = B;
    for (auto& x : r.value.data()) x *= A[0];
  } else {
    shape_fail(Op::kMul, A, B);
  }
  return push(std::move(r));
}

Var Tape::div(Var a, Var b) {
  check(a);
  check(b);
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  Record r;
  r.op = Op::kDiv;
  r.inputs = {a.id, b.id};
  r.needs_grad = needs(a) || needs(b);
  r.value = A;
  if (A.shape() == B.shape()) {
    for (std::size_t i = 0; i < A.size(); ++i) r.value[i] /= B[i];
  } else if (B.size() == 1) {
    for (auto& x : r.value.data()) x /= B[0];
  } else {
    shape_fail(Op::kDiv, A, B);
  }
  return push(std::move(r));
}

Var Tape::scale(Var a, double factor) {
  check(a);
  Record r;
  r.op = Op::kScale;
  r.inputs = {a.id};
  r.scalar = factor;
  r.needs_grad = needs(a);
  r.value = value(a);
  for (auto& x : r.value.data()) x *= factor;
  return push(std::move(r));
}

Var Tape::concat(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  Record r;
  r.op = Op::kConcat;
  std::vector<double> out;
  for (auto p : parts) {
    check(p);
    const Tensor& t = value(p);
    if (t.rank() != 1) throw ShapeError("concat: expected rank-1 input, got " + shape_string(t.shape()));
    out.insert(out.end(), t.data().begin(), t.data().end());
    r.inputs.push_back(p.id);
    r.needs_grad = r.needs_grad || needs(p);
  }
  r.value = Tensor::vector(std::move(out));
  return push(std::move(r));
}

Var Tape::slice(Var a, std::size_t begin, std::size_t end) {
  check(a);
  const Tensor& A = value(a);
  if (A.rank() != 1 || begin >= end || end > A.size())
    throw ShapeError("slice: range [" + std::to_string(begin) + "," + std::to_string(end) + ") invalid for " +
                     shape_string(A.shape()));
  Record r;
  r.op = Op::kSlice;
  r.inputs = {a.id};
  r.aux = {begin, end};
  r.needs_grad = needs(a);
  r.value = Tensor::vector(std::vector<double>(A.data().begin() + begin, A.data().begin() + end));
  return push(std::move(r));
}

Var Tape::gather(Var a, std::span<const std::size_t> indices) {
  check(a);
  const Tensor& A = value(a);
  if (A.rank() != 1 || indices.empty()) throw ShapeError("gather: needs a rank-1 input and at least one index");
  std::vector<double> out;
  for (auto i : indices) {
    if (i >= A.size())
      throw ShapeError("gather: index " + std::to_string(i) + " out of range for " + shape_string(A.shape()));
    out.push_back(A[i]);
  }
  Record r;
  r.op = Op::kGather;
  r.inputs = {a.id};
  r.aux.assign(indices.begin(), indices.end());
  r.needs_grad = needs(a);
  r.value = Tensor::vector(std::move(out));
  return push(std::move(r));
}

Var Tape::row(Var matrix, std::size_t index) {
  check(matrix);
  const Tensor& M = value(matrix);
  if (M.rank() != 2 || index >= M.rows())
    throw ShapeError("row: index " + std::to_string(index) + " invalid for " + shape_string(M.shape()));
  Record r;
  r.op = Op::kRow;
  r.inputs = {matrix.id};
  r.aux = {index};
  r.needs_grad = needs(matrix);
  auto src = M.row(index);
  r.value = Tensor::vector(std::vector<double>(src.begin(), src.end()));
  return push(std::move(r));
}

Var Tape::stack(std::span<const Var> rows) {
  if (rows.empty()) throw ShapeError("stack: no inputs");
  Record r;
  r.op = Op::kStack;
  const std::size_t width = value(rows[0]).size();
  std::vector<double> out;
  out.reserve(width * rows.size());
  for (auto p : rows) {
    check(p);
    const Tensor& t = value(p);
    if (t.rank() != 1 || t.size() != width) shape_fail(Op::kStack, value(rows[0]), t);
    out.insert(out.end(), t.data().begin(), t.data().end());
    r.inputs.push_back(p.id);
    r.needs_grad = r.needs_grad || needs(p);
  }
  r.value = Tensor({rows.size(), width}, std::move(out));
  return push(std::move(r));
}

Var Tape::tanh(Var a) {
  check(a);
  Record r;
  r.op = Op::kTanh;
  r.inputs = {a.id};
  r.needs_grad = needs(a);
  r.value = value(a);
  for (auto& x : r.value.data()) x = std::tanh(x);
  return push(std::move(r));
}

Var Tape::sigmoid(Var a) {
  check(a);
  Record r;
  r.op = Op::kSigmoid;
  r.inputs = {a.id};
  r.needs_grad = needs(a);
  r.value = value(a);
  for (auto& x : r.value.data()) x = 1.0 / (1.0 + std::exp(-x));
  return push(std::move(r));
}

namespace {

void softmax_into(std::span<const double> in, std::span<double> out) {
  const double mx = *std::max_element(in.begin(), in.end());
  double z = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = std::exp(in[i] - mx);
    z += out[i];
  }
  for (auto& x : out) x /= z;
}

}  // namespace

Var Tape::softmax(Var a) {
  check(a);
  const Tensor& A = value(a);
  if (A.rank() != 1) throw ShapeError("softmax: expected rank-1 input, got " + shape_string(A.shape()));
  Record r;
  r.op = Op::kSoftmax;
  r.inputs = {a.id};
  r.needs_grad = needs(a);
  r.value = Tensor(A.shape());
  softmax_into(A.data(), r.value.data());
  return push(std::move(r));
}

Var Tape::sum(Var a) {
  check(a);
  Record r;
  r.op = Op::kSum;
  r.inputs = {a.id};
  r.needs_grad = needs(a);
  double s = 0.0;
  for (double x : value(a).data()) s += x;
  r.value = Tensor::scalar(s);
  return push(std::move(r));
}

Var Tape::mean(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("mean: no inputs");
  Record r;
  r.op = Op::kMean;
  r.value = Tensor(value(parts[0]).shape());
  for (auto p : parts) {
    check(p);
    const Tensor& t = value(p);
    if (t.shape() != r.value.shape()) shape_fail(Op::kMean, value(parts[0]), t);
    axpy(r.value.data(), 1.0, t.data());
    r.inputs.push_back(p.id);
    r.needs_grad = r.needs_grad || needs(p);
  }
  for (auto& x : r.value.data()) x /= static_cast<double>(parts.size());
  return push(std::move(r));
}

Var Tape::weighted_sum(Var weights, std::span<const Var> parts) {
  check(weights);
  const Tensor& W = value(weights);
  if (parts.empty() || W.rank() != 1 || W.size() != parts.size())
    throw ShapeError("weighted-sum: weights " + shape_string(W.shape()) + " do not match " +
                     std::to_string(parts.size()) + " inputs");
  Record r;
  r.op = Op::kWeightedSum;
  r.inputs = {weights.id};
  r.needs_grad = needs(weights);
  r.value = Tensor(value(parts[0]).shape());
  for (std::size_t k = 0; k < parts.size(); ++k) {
    check(parts[k]);
    const Tensor& t = value(parts[k]);
    if (t.shape() != r.value.shape()) shape_fail(Op::kWeightedSum, value(parts[0]), t);
    axpy(r.value.data(), W[k], t.data());
    r.inputs.push_back(parts[k].id);
    r.needs_grad = r.needs_grad || needs(parts[k]);
  }
  return push(std::move(r));
}

Var Tape::max_pieces(Var a, std::size_t pieces) {
  check(a);
  const Tensor& A = value(a);
  if (A.rank() != 1 || pieces == 0 || A.size() % pieces != 0)
    throw ShapeError("max-over-pieces: " + shape_string(A.shape()) + " not divisible into " +
                     std::to_string(pieces) + " pieces");
  const std::size_t d = A.size() / pieces;
  Record r;
  r.op = Op::kMaxPieces;
  r.inputs = {a.id};
  r.needs_grad = needs(a);
  r.value = Tensor({d});
  r.aux.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::size_t best = i;
    for (std::size_t p = 1; p < pieces; ++p)
      if (A[p * d + i] > A[best]) best = p * d + i;
    r.aux[i] = best;
    r.value[i] = A[best];
  }
  return push(std::move(r));
}

Var Tape::cross_entropy(Var logits, std::size_t target) {
  check(logits);
  const Tensor& L = value(logits);
  if (L.rank() != 1 || target >= L.size())
    throw ShapeError("cross-entropy: target " + std::to_string(target) + " invalid for " + shape_string(L.shape()));
  Record r;
  r.op = Op::kCrossEntropy;
  r.inputs = {logits.id};
  r.aux = {target};
  r.needs_grad = needs(logits);
  r.saved = Tensor(L.shape());
  softmax_into(L.data(), r.saved.data());
  const double mx = *std::max_element(L.data().begin(), L.data().end());
  double z = 0.0;
  for (double x : L.data()) z += std::exp(x - mx);
  r.value = Tensor::scalar(mx + std::log(z) - L[target]);
  return push(std::move(r));
}

void Tape::backward(Var loss, Gradients& grads) const {
  check(loss);
  if (value(loss).size() != 1)
    throw std::invalid_argument("backward: loss must be a scalar, got shape " + shape_string(value(loss).shape()));
  if (params_ && grads.size() != params_->size())
    throw ShapeError("backward: gradient set does not match parameter set");

  std::vector<Tensor> g(loss.id + 1);
  auto grad_of = [&](std::uint32_t id) -> Tensor& {
    if (g[id].empty()) g[id] = Tensor(value(Var{id}).shape());
    return g[id];
  };
  grad_of(loss.id)[0] = 1.0;

  for (std::uint32_t id = loss.id + 1; id-- > 0;) {
    const Record& r = records_[id];
    if (!r.needs_grad || g[id].empty()) continue;
    const Tensor& G = g[id];
    const auto in = [&](std::size_t k) { return r.inputs[k]; };
    const auto want = [&](std::size_t k) { return records_[r.inputs[k]].needs_grad; };

    switch (r.op) {
      case Op::kConstant:
        break;
      case Op::kParameter: {
        Tensor& dst = grads[r.slot];
        axpy(dst.data(), 1.0, G.data());
        break;
      }
      case Op::kMatMul: {
        const Tensor& A = value(Var{in(0)});
        const Tensor& B = value(Var{in(1)});
        if (A.rank() == 2 && B.rank() == 1) {
          const std::size_t m = A.shape()[0], k = A.shape()[1];
          if (want(0)) {
            Tensor& gA = grad_of(in(0));
            for (std::size_t i = 0; i < m; ++i)
              if (G[i] != 0.0) axpy(gA.row(i), G[i], B.data());
          }
          if (want(1)) {
            Tensor& gB = grad_of(in(1));
            for (std::size_t i = 0; i < m; ++i)
              if (G[i] != 0.0) axpy(gB.data(), G[i], A.row(i));
          }
          (void)k;
        } else if (A.rank() == 2 && B.rank() == 2) {
          const std::size_t m = A.shape()[0], k = A.shape()[1], n = B.shape()[1];
          if (want(0)) {
            Tensor& gA = grad_of(in(0));
            for (std::size_t i = 0; i < m; ++i)
              for (std::size_t j = 0; j < k; ++j) {
                double acc = 0.0;
                for (std::size_t c = 0; c < n; ++c) acc += G.at(i, c) * B.at(j, c);
                gA.at(i, j) += acc;
              }
          }
          if (want(1)) {
            Tensor& gB = grad_of(in(1));
            for (std::size_t i = 0; i < m; ++i)
              for (std::size_t j = 0; j < k; ++j) axpy(gB.row(j), A.at(i, j), G.row(i));
          }
        } else {
          // rank1 x rank2
          const std::size_t k = B.shape()[0];
          if (want(0)) {
            Tensor& gA = grad_of(in(0));
            for (std::size_t j = 0; j < k; ++j) {
              double acc = 0.0;
              auto br = B.row(j);
              for (std::size_t c = 0; c < br.size(); ++c) acc += br[c] * G[c];
              gA[j] += acc;
            }
          }
          if (want(1)) {
            Tensor& gB = grad_of(in(1));
            for (std::size_t j = 0; j < k; ++j) axpy(gB.row(j), A[j], G.data());
          }
        }
        break;
      }
      case Op::kAdd:
        if (want(0)) axpy(grad_of(in(0)).data(), 1.0, G.data());
        if (want(1)) axpy(grad_of(in(1)).data(), 1.0, G.data());
        break;
      case Op::kSub:
        if (want(0)) axpy(grad_of(in(0)).data(), 1.0, G.data());
        if (want(1)) axpy(grad_of(in(1)).data(), -1.0, G.data());
        break;
      case Op::kMul: {
        const Tensor& A = value(Var{in(0)});
        const Tensor& B = value(Var{in(1)});
        if (A.shape() == B.shape()) {
          if (want(0)) {
            Tensor& gA = grad_of(in(0));
            for (std::size_t i = 0; i < G.size(); ++i) gA[i] += G[i] * B[i];
          }
          if (want(1)) {
            Tensor& gB = grad_of(in(1));
            for (std::size_t i = 0; i < G.size(); ++i) gB[i] += G[i] * A[i];
          }
        } else if (B.size() == 1) {
          if (want(0)) axpy(grad_of(in(0)).data(), B[0], G.data());
          if (want(1)) {
            double acc = 0.0;
            for (std::size_t i = 0; i < G.size(); ++i) acc += G[i] * A[i];
            grad_of(in(1))[0] += acc;
          }
        } else {
          if (want(1)) axpy(grad_of(in(1)).data(), A[0], G.data());
          if (want(0)) {
            double acc = 0.0;
            for (std::size_t i = 0; i < G.size(); ++i) acc += G[i] * B[i];
            grad_of(in(0))[0] += acc;
          }
        }
        break;
      }
      case Op::kDiv: {
        const Tensor& A = value(Var{in(0)});
        const Tensor& B = value(Var{in(1)});
        if (A.shape() == B.shape()) {
          if (want(0)) {
            Tensor& gA = grad_of(in(0));
            for (std::size_t i = 0; i < G.size(); ++i) gA[i] += G[i] / B[i];
          }
          if (want(1)) {
            Tensor& gB = grad_of(in(1));
            for (std::size_t i = 0; i < G.size(); ++i) gB[i] -= G[i] * A[i] / (B[i] * B[i]);
          }
        } else {
          if (want(0)) axpy(grad_of(in(0)).data(), 1.0 / B[0], G.data());
          if (want(1)) {
            double acc = 0.0;
            for (std::size_t i = 0; i < G.size(); ++i) acc += G[i] * A[i];
            grad_of(in(1))[0] -= acc / (B[0] * B[0]);
          }
        }
        break;
      }
      case Op::kScale:
        axpy(grad_of(in(0)).data(), r.scalar, G.data());
        break;
      case Op::kConcat: {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < r.inputs.size(); ++k) {
          const std::size_t n = value(Var{in(k)}).size();
          if (want(k)) axpy(grad_of(in(k)).data(), 1.0, G.data().subspan(offset, n));
          offset += n;
        }
        break;
      }
      case Op::kSlice: {
        auto dst = grad_of(in(0)).data().subspan(r.aux[0], r.aux[1] - r.aux[0]);
        axpy(dst, 1.0, G.data());
        break;
      }
      case Op::kGather: {
        Tensor& gA = grad_of(in(0));
        for (std::size_t i = 0; i < r.aux.size(); ++i) gA[r.aux[i]] += G[i];
        break;
      }
      case Op::kRow:
        axpy(grad_of(in(0)).row(r.aux[0]), 1.0, G.data());
        break;
      case Op::kStack:
        for (std::size_t k = 0; k < r.inputs.size(); ++k)
          if (want(k)) axpy(grad_of(in(k)).data(), 1.0, G.row(k));
        break;
      case Op::kTanh: {
        Tensor& gA = grad_of(in(0));
        for (std::size_t i = 0; i < G.size(); ++i) gA[i] += G[i] * (1.0 - r.value[i] * r.value[i]);
        break;
      }
      case Op::kSigmoid: {
        Tensor& gA = grad_of(in(0));
        for (std::size_t i = 0; i < G.size(); ++i) gA[i] += G[i] * r.value[i] * (1.0 - r.value[i]);
        break;
      }
      case Op::kSoftmax: {
        double dot = 0.0;
        for (std::size_t i = 0; i < G.size(); ++i) dot += G[i] * r.value[i];
        Tensor& gA = grad_of(in(0));
        for (std::size_t i = 0; i < G.size(); ++i) gA[i] += r.value[i] * (G[i] - dot);
        break;
      }
      case Op::kSum:
        for (auto& x : grad_of(in(0)).data()) x += G[0];
        break;
      case Op::kMean: {
        const double f = 1.0 / static_cast<double>(r.inputs.size());
        for (std::size_t k = 0; k < r.inputs.size(); ++k)
          if (want(k)) axpy(grad_of(in(k)).data(), f, G.data());
        break;
      }
      case Op::kWeightedSum: {
        const Tensor& W = value(Var{in(0)});
        for (std::size_t k = 1; k < r.inputs.size(); ++k) {
          const Tensor& X = value(Var{in(k)});
          if (want(0)) {
            double acc = 0.0;
            for (std::size_t i = 0; i < G.size(); ++i) acc += G[i] * X[i];
            grad_of(in(0))[k - 1] += acc;
          }
          if (want(k)) axpy(grad_of(in(k)).data(), W[k - 1], G.data());
        }
        break;
      }
      case Op::kMaxPieces: {
        Tensor& gA = grad_of(in(0));
        for (std::size_t i = 0; i < r.aux.size(); ++i) gA[r.aux[i]] += G[i];
        break;
      }
      case Op::kCrossEntropy: {
        Tensor& gA = grad_of(in(0));
        for (std::size_t i = 0; i < gA.size(); ++i) gA[i] += G[0] * r.saved[i];
        gA[r.aux[0]] -= G[0];
        break;
      }
    }
  }
}

}  // namespace salient::ad
