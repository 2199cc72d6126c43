#pragma once

// Tape-based reverse-mode differentiation over fp64 tensors.
//
// A Tape records every forward operation in creation order, so the record
// list is already topologically sorted and backward() is a single reverse
// sweep. Parameters are bound by slot into a read-only ParameterSet; their
// gradients are accumulated into a Gradients vector aligned with the set.
// A Tape is single-threaded; several tapes may share one ParameterSet.

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "salient/parameters.hpp"
#include "salient/tensor.hpp"

namespace salient::ad {

enum class Op : std::uint8_t {
  kConstant,
  kParameter,
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kScale,
  kConcat,
  kSlice,
  kGather,
  kRow,
  kStack,
  kTanh,
  kSigmoid,
  kSoftmax,
  kSum,
  kMean,
  kWeightedSum,
  kMaxPieces,
  kCrossEntropy,
};

std::string_view op_name(Op op);

/// Handle to a node on a specific tape.
struct Var {
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t id = kNone;
  bool valid() const { return id != kNone; }
};

struct Record {
  Op op = Op::kConstant;
  std::vector<std::uint32_t> inputs;
  std::vector<std::size_t> aux;  // op-specific indices: slice bounds, argmax, targets
  double scalar = 0.0;           // op-specific constant (scale factor)
  Tensor value;                  // empty for parameter leaves
  Tensor saved;                  // softmax of logits for cross entropy
  std::size_t slot = 0;          // parameter slot for kParameter
  bool needs_grad = false;
};

class Tape {
 public:
  explicit Tape(const ParameterSet* params = nullptr);

  Var constant(Tensor value);
  /// Leaf bound to params[slot]; repeated calls return the same node.
  Var param(std::size_t slot);

  const Tensor& value(Var v) const;
  const Record& record(Var v) const { return records_.at(v.id); }
  std::size_t size() const { return records_.size(); }
  const ParameterSet* parameters() const { return params_; }

  /// rank2 x rank1 -> rank1, rank2 x rank2 -> rank2, rank1 x rank2 -> rank1.
  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  /// Elementwise; either side may be a size-1 scalar that broadcasts.
  Var mul(Var a, Var b);
  /// Elementwise; the divisor may be a size-1 scalar that broadcasts.
  Var div(Var a, Var b);
  Var scale(Var a, double factor);
  Var concat(std::span<const Var> parts);
  Var slice(Var a, std::size_t begin, std::size_t end);
  Var gather(Var a, std::span<const std::size_t> indices);
  Var row(Var matrix, std::size_t index);
  Var stack(std::span<const Var> rows);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var softmax(Var a);
  Var sum(Var a);
  /// Elementwise mean of equally shaped tensors.
  Var mean(std::span<const Var> parts);
  /// sum_k weights[k] * parts[k]; weights is a rank-1 node of length parts.size().
  Var weighted_sum(Var weights, std::span<const Var> parts);
  /// Input of length pieces*d viewed as pieces blocks of d; output is the
  /// elementwise max across blocks. Ties resolve to the lowest block.
  Var max_pieces(Var a, std::size_t pieces);
  /// -log softmax(logits)[target], a size-1 scalar.
  Var cross_entropy(Var logits, std::size_t target);

  /// Reverse sweep from a size-1 loss; adds d loss / d param into grads.
  void backward(Var loss, Gradients& grads) const;

 private:
  Var push(Record rec);
  bool needs(Var v) const { return records_[v.id].needs_grad; }
  void check(Var v) const;

  const ParameterSet* params_;
  std::vector<Record> records_;
  std::vector<std::uint32_t> param_nodes_;
};

}  // namespace salient::ad
