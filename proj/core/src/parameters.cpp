#include "salient/parameters.hpp"

#include <stdexcept>

namespace salient {

std::size_t ParameterSet::add(std::string name, Tensor value) {
  if (find(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  names_.push_back(std::move(name));
  tensors_.push_back(std::move(value));
  return tensors_.size() - 1;
}

std::optional<std::size_t> ParameterSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::size_t ParameterSet::slot(std::string_view name) const {
  if (auto s = find(name)) return *s;
  throw std::out_of_range("no parameter named " + std::string(name));
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

std::vector<Tensor> ParameterSet::zeros_like() const {
  std::vector<Tensor> out;
  out.reserve(tensors_.size());
  for (const auto& t : tensors_) out.emplace_back(t.shape(), 0.0);
  return out;
}

void add_into(Gradients& acc, const Gradients& g) {
  if (acc.size() != g.size()) throw ShapeError("gradient set sizes differ");
  for (std::size_t s = 0; s < acc.size(); ++s) {
    if (acc[s].shape() != g[s].shape())
      throw ShapeError("gradient shape mismatch " + shape_string(acc[s].shape()) + " vs " +
                       shape_string(g[s].shape()));
    auto dst = acc[s].data();
    auto src = g[s].data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
}

void scale_in_place(Gradients& g, double factor) {
  for (auto& t : g)
    for (auto& x : t.data()) x *= factor;
}

}  // namespace salient
