#include "sgnav/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace sgnav {

double global_grad_norm(const GradientMap& grads) {
  double sq = 0.0;
  for (const auto& [name, g] : grads)
    for (const double v : g.v) sq += v * v;
  return std::sqrt(sq);
}

void clip_global_norm(GradientMap& grads, double max_norm) {
  const double norm = global_grad_norm(grads);
  if (!(norm > max_norm)) return;  // also leaves NaN norms alone for step() to reject
  const double scale = max_norm / norm;
  for (auto& [name, g] : grads)
    for (double& v : g.v) v *= scale;
}

bool AdamOptimizer::step(ParameterSet& params, const GradientMap& grads) {
  for (const auto& [name, g] : grads) {
    const Tensor& p = params.at(name);
    if (!p.same_shape(g))
      throw std::invalid_argument("gradient shape mismatch for '" + name + "'");
    for (const double v : g.v)
      if (!std::isfinite(v)) return false;
  }

  const int t = t_ + 1;
  const double corr1 = 1.0 - std::pow(cfg_.beta1, t);
  const double corr2 = 1.0 - std::pow(cfg_.beta2, t);
  for (const auto& [name, g] : grads) {
    Tensor& p = params.at(name);
    Tensor& m = m_.try_emplace(name, Tensor(g.rows, g.cols)).first->second;
    Tensor& v = v_.try_emplace(name, Tensor(g.rows, g.cols)).first->second;
    for (int i = 0; i < g.size(); ++i) {
      m.v[i] = cfg_.beta1 * m.v[i] + (1.0 - cfg_.beta1) * g.v[i];
      v.v[i] = cfg_.beta2 * v.v[i] + (1.0 - cfg_.beta2) * g.v[i] * g.v[i];
      const double m_hat = m.v[i] / corr1;
      const double v_hat = v.v[i] / corr2;
      p.v[i] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
    }
  }
  t_ = t;
  return true;
}

}  // namespace sgnav
