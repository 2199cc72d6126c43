#pragma once

#include <cstdint>

#include "salient/parameters.hpp"

namespace salient {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates for one ParameterSet.
class AdamState {
 public:
  AdamState() = default;
  AdamState(const ParameterSet& params, AdamOptions options);

  const AdamOptions& options() const { return options_; }
  std::uint64_t step() const { return step_; }
  const Gradients& first_moment() const { return m_; }
  const Gradients& second_moment() const { return v_; }

  /// Bias-corrected Adam update of params in place; increments the step.
  void apply(ParameterSet& params, const Gradients& grads);

 private:
  AdamOptions options_;
  std::uint64_t step_ = 0;
  Gradients m_;
  Gradients v_;
};

}  // namespace salient
