#include "salient/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace salient {

AdamState::AdamState(const ParameterSet& params, AdamOptions options)
    : options_(options), m_(params.zeros_like()), v_(params.zeros_like()) {
  if (!(options.learning_rate >= 0.0) || !(options.beta1 > 0.0 && options.beta1 < 1.0) ||
      !(options.beta2 > 0.0 && options.beta2 < 1.0) || !(options.epsilon > 0.0))
    throw std::invalid_argument("adam: hyperparameters out of range");
}

void AdamState::apply(ParameterSet& params, const Gradients& grads) {
  if (grads.size() != params.size() || m_.size() != params.size())
    throw ShapeError("adam: gradient/parameter count mismatch");
  for (std::size_t s = 0; s < params.size(); ++s)
    if (grads[s].shape() != params[s].shape() || m_[s].shape() != params[s].shape())
      throw ShapeError("adam: shape mismatch for " + params.name(s) + ": param " +
                       shape_string(params[s].shape()) + ", grad " + shape_string(grads[s].shape()));

  ++step_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double lr = options_.learning_rate;
  for (std::size_t s = 0; s < params.size(); ++s) {
    auto p = params[s].data();
    auto g = grads[s].data();
    auto m = m_[s].data();
    auto v = v_[s].data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + options_.epsilon);
    }
  }
}

}  // namespace salient
