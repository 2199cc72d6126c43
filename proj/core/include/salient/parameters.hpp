#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "salient/tensor.hpp"

namespace salient {

/// Ordered, named collection of trainable tensors. Slot indices are stable
/// for the lifetime of the set and index into Gradients.
class ParameterSet {
 public:
  std::size_t add(std::string name, Tensor value);

  std::size_t size() const { return tensors_.size(); }
  const std::string& name(std::size_t slot) const { return names_.at(slot); }
  Tensor& operator[](std::size_t slot) { return tensors_.at(slot); }
  const Tensor& operator[](std::size_t slot) const { return tensors_.at(slot); }

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t slot(std::string_view name) const;

  std::size_t scalar_count() const;
  std::vector<Tensor> zeros_like() const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
};

/// One gradient tensor per parameter slot, shapes matching the ParameterSet.
using Gradients = std::vector<Tensor>;

void add_into(Gradients& acc, const Gradients& g);
void scale_in_place(Gradients& g, double factor);

}  // namespace salient
