#pragma once

#include <map>
#include <string>

#include "sgnav/model.hpp"
#include "sgnav/tensor.hpp"

namespace sgnav {

using GradientMap = std::map<std::string, Tensor>;

double global_grad_norm(const GradientMap& grads);

// Rescales all gradients in place so their global L2 norm is at most max_norm.
void clip_global_norm(GradientMap& grads, double max_norm);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adaptive-moment optimizer with bias correction. Moment buffers are keyed by
// parameter name and allocated lazily on the first step.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(AdamConfig cfg = {}) : cfg_(cfg) {}

  // Applies one update. If any gradient entry is non-finite the step is
  // rejected: parameters, moments, and the step counter stay untouched and
  // the call returns false.
  bool step(ParameterSet& params, const GradientMap& grads);

  int steps_taken() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  int t_ = 0;
  GradientMap m_;
  GradientMap v_;
};

}  // namespace sgnav
