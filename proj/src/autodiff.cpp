#include "sgnav/autodiff.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgnav {

namespace {
constexpr double kMinQ = 1e-12;  // floor for 1 - rho^2
}

Tape::Ref Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<Ref>(nodes_.size() - 1);
}

Tape::Ref Tape::leaf(Tensor value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.op = Op::kLeaf;
  n.requires_grad = requires_grad;
  return push(std::move(n));
}

Tape::Ref Tape::matvec(Ref w, Ref x) {
  const Tensor& wm = nodes_[w].value;
  const Tensor& xv = nodes_[x].value;
  if (wm.cols != xv.rows || xv.cols != 1)
    throw std::invalid_argument("matvec shape mismatch");
  Node n;
  n.value = Tensor(wm.rows, 1);
  for (int r = 0; r < wm.rows; ++r) {
    double acc = 0.0;
    const double* wrow = &wm.v[static_cast<std::size_t>(r) * wm.cols];
    for (int c = 0; c < wm.cols; ++c) acc += wrow[c] * xv.v[c];
    n.value.v[r] = acc;
  }
  n.op = Op::kMatVec;
  n.a = w;
  n.b = x;
  n.requires_grad = nodes_[w].requires_grad || nodes_[x].requires_grad;
  return push(std::move(n));
}

Tape::Ref Tape::add(Ref a, Ref b) {
  const Tensor& av = nodes_[a].value;
  const Tensor& bv = nodes_[b].value;
  if (!av.same_shape(bv)) throw std::invalid_argument("add shape mismatch");
  Node n;
  n.value = av;
  for (int i = 0; i < bv.size(); ++i) n.value.v[i] += bv.v[i];
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
  return push(std::move(n));
}

Tape::Ref Tape::mul(Ref a, Ref b) {
  const Tensor& av = nodes_[a].value;
  const Tensor& bv = nodes_[b].value;
  if (!av.same_shape(bv)) throw std::invalid_argument("mul shape mismatch");
  Node n;
  n.value = av;
  for (int i = 0; i < bv.size(); ++i) n.value.v[i] *= bv.v[i];
  n.op = Op::kMul;
  n.a = a;
  n.b = b;
  n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
  return push(std::move(n));
}

Tape::Ref Tape::scale(Ref x, double s) {
  Node n;
  n.value = nodes_[x].value;
  for (double& v : n.value.v) v *= s;
  n.op = Op::kScale;
  n.a = x;
  n.s = s;
  n.requires_grad = nodes_[x].requires_grad;
  return push(std::move(n));
}

Tape::Ref Tape::sigmoid(Ref x) {
  Node n;
  n.value = nodes_[x].value;
  for (double& v : n.value.v) v = 1.0 / (1.0 + std::exp(-v));
  n.op = Op::kSigmoid;
  n.a = x;
  n.requires_grad = nodes_[x].requires_grad;
  return push(std::move(n));
}

Tape::Ref Tape::tanh_fn(Ref x) {
  Node n;
  n.value = nodes_[x].value;
  for (double& v : n.value.v) v = std::tanh(v);
  n.op = Op::kTanh;
  n.a = x;
  n.requires_grad = nodes_[x].requires_grad;
  return push(std::move(n));
}

Tape::Ref Tape::relu(Ref x) {
  Node n;
  n.value = nodes_[x].value;
  for (double& v : n.value.v) v = v > 0.0 ? v : 0.0;
  n.op = Op::kRelu;
  n.a = x;
  n.requires_grad = nodes_[x].requires_grad;
  return push(std::move(n));
}

Tape::Ref Tape::exp_fn(Ref x) {
  Node n;
  n.value = nodes_[x].value;
  for (double& v : n.value.v) v = std::exp(v);
  n.op = Op::kExp;
  n.a = x;
  n.requires_grad = nodes_[x].requires_grad;
  return push(std::move(n));
}

Tape::Ref Tape::concat(Ref a, Ref b) {
  const Tensor& av = nodes_[a].value;
  const Tensor& bv = nodes_[b].value;
  if (av.cols != 1 || bv.cols != 1) throw std::invalid_argument("concat expects vectors");
  Node n;
  n.value = Tensor(av.rows + bv.rows, 1);
  std::copy(av.v.begin(), av.v.end(), n.value.v.begin());
  std::copy(bv.v.begin(), bv.v.end(), n.value.v.begin() + av.rows);
  n.op = Op::kConcat;
  n.a = a;
  n.b = b;
  n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
  return push(std::move(n));
}

Tape::Ref Tape::slice(Ref x, int offset, int len) {
  const Tensor& xv = nodes_[x].value;
  if (xv.cols != 1 || offset < 0 || offset + len > xv.rows)
    throw std::invalid_argument("slice out of range");
  Node n;
  n.value = Tensor(len, 1);
  std::copy(xv.v.begin() + offset, xv.v.begin() + offset + len, n.value.v.begin());
  n.op = Op::kSlice;
  n.a = x;
  n.i0 = offset;
  n.requires_grad = nodes_[x].requires_grad;
  return push(std::move(n));
}

Tape::Ref Tape::scatter_sum(std::vector<std::pair<Ref, int>> parts, int part_len,
                            int total_len) {
  Node n;
  n.value = Tensor(total_len, 1);
  n.requires_grad = false;
  for (const auto& [ref, offset] : parts) {
    const Tensor& pv = nodes_[ref].value;
    if (pv.cols != 1 || pv.rows != part_len)
      throw std::invalid_argument("scatter_sum part has wrong length");
    if (offset < 0 || offset + part_len > total_len)
      throw std::invalid_argument("scatter_sum offset out of range");
    for (int k = 0; k < part_len; ++k) n.value.v[offset + k] += pv.v[k];
    n.requires_grad = n.requires_grad || nodes_[ref].requires_grad;
  }
  n.op = Op::kScatterSum;
  n.i0 = part_len;
  n.parts = std::move(parts);
  return push(std::move(n));
}

Tape::Ref Tape::gaussian_nll(Ref mu, Ref sigma, Ref rho, Vec2 target) {
  const Tensor& muv = nodes_[mu].value;
  const Tensor& sv = nodes_[sigma].value;
  const Tensor& rv = nodes_[rho].value;
  if (muv.size() != 2 || sv.size() != 2 || rv.size() != 1)
    throw std::invalid_argument("gaussian_nll expects mu(2), sigma(2), rho(1)");
  const double sx = sv.v[0];
  const double sy = sv.v[1];
  const double r = rv.v[0];
  if (!(sx > 0.0) || !(sy > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(std::abs(r) < 1.0)) throw std::invalid_argument("|rho| must be < 1");

  const double ax = (target.x - muv.v[0]) / sx;
  const double by = (target.y - muv.v[1]) / sy;
  const double q = std::max(1.0 - r * r, kMinQ);
  const double z = ax * ax + by * by - 2.0 * r * ax * by;

  Node n;
  n.value = Tensor(1, 1);
  n.value.v[0] = std::log(2.0 * std::numbers::pi) + std::log(sx) + std::log(sy) +
                 0.5 * std::log(q) + z / (2.0 * q);
  n.op = Op::kGaussianNll;
  n.a = mu;
  n.b = sigma;
  n.i0 = rho;  // third input kept in i0
  n.target = target;
  n.requires_grad =
      nodes_[mu].requires_grad || nodes_[sigma].requires_grad || nodes_[rho].requires_grad;
  return push(std::move(n));
}

void Tape::reset() { nodes_.clear(); }

void Tape::backward(Ref root) {
  if (root < 0 || root >= static_cast<Ref>(nodes_.size()))
    throw std::invalid_argument("backward: bad root");
  if (nodes_[root].value.size() != 1)
    throw std::invalid_argument("backward expects a scalar root");

  for (auto& n : nodes_) {
    if (n.requires_grad)
      n.grad = Tensor(n.value.rows, n.value.cols);
    else
      n.grad = Tensor();
  }
  if (!nodes_[root].requires_grad) return;  // constant graph: nothing to do
  nodes_[root].grad.v[0] = 1.0;

  auto wants = [&](Ref r) { return r >= 0 && nodes_[r].requires_grad; };

  for (Ref i = root; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad) continue;
    const Tensor& gy = n.grad;
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kMatVec: {
        Node& wn = nodes_[n.a];
        Node& xn = nodes_[n.b];
        const Tensor& wm = wn.value;
        const Tensor& xv = xn.value;
        if (wants(n.a)) {
          for (int r = 0; r < wm.rows; ++r) {
            const double g = gy.v[r];
            double* wrow = &wn.grad.v[static_cast<std::size_t>(r) * wm.cols];
            for (int c = 0; c < wm.cols; ++c) wrow[c] += g * xv.v[c];
          }
        }
        if (wants(n.b)) {
          for (int r = 0; r < wm.rows; ++r) {
            const double g = gy.v[r];
            const double* wrow = &wm.v[static_cast<std::size_t>(r) * wm.cols];
            for (int c = 0; c < wm.cols; ++c) xn.grad.v[c] += g * wrow[c];
          }
        }
        break;
      }
      case Op::kAdd: {
        if (wants(n.a))
          for (int k = 0; k < gy.size(); ++k) nodes_[n.a].grad.v[k] += gy.v[k];
        if (wants(n.b))
          for (int k = 0; k < gy.size(); ++k) nodes_[n.b].grad.v[k] += gy.v[k];
        break;
      }
      case Op::kMul: {
        if (wants(n.a))
          for (int k = 0; k < gy.size(); ++k)
            nodes_[n.a].grad.v[k] += gy.v[k] * nodes_[n.b].value.v[k];
        if (wants(n.b))
          for (int k = 0; k < gy.size(); ++k)
            nodes_[n.b].grad.v[k] += gy.v[k] * nodes_[n.a].value.v[k];
        break;
      }
      case Op::kScale: {
        if (wants(n.a))
          for (int k = 0; k < gy.size(); ++k) nodes_[n.a].grad.v[k] += gy.v[k] * n.s;
        break;
      }
      case Op::kSigmoid: {
        if (wants(n.a))
          for (int k = 0; k < gy.size(); ++k) {
            const double y = n.value.v[k];
            nodes_[n.a].grad.v[k] += gy.v[k] * y * (1.0 - y);
          }
        break;
      }
      case Op::kTanh: {
        if (wants(n.a))
          for (int k = 0; k < gy.size(); ++k) {
            const double y = n.value.v[k];
            nodes_[n.a].grad.v[k] += gy.v[k] * (1.0 - y * y);
          }
        break;
      }
      case Op::kRelu: {
        if (wants(n.a))
          for (int k = 0; k < gy.size(); ++k)
            nodes_[n.a].grad.v[k] += nodes_[n.a].value.v[k] > 0.0 ? gy.v[k] : 0.0;
        break;
      }
      case Op::kExp: {
        if (wants(n.a))
          for (int k = 0; k < gy.size(); ++k) nodes_[n.a].grad.v[k] += gy.v[k] * n.value.v[k];
        break;
      }
      case Op::kConcat: {
        const int na = nodes_[n.a].value.rows;
        if (wants(n.a))
          for (int k = 0; k < na; ++k) nodes_[n.a].grad.v[k] += gy.v[k];
        if (wants(n.b))
          for (int k = 0; k < nodes_[n.b].value.rows; ++k)
            nodes_[n.b].grad.v[k] += gy.v[na + k];
        break;
      }
      case Op::kSlice: {
        if (wants(n.a))
          for (int k = 0; k < n.value.rows; ++k) nodes_[n.a].grad.v[n.i0 + k] += gy.v[k];
        break;
      }
      case Op::kScatterSum: {
        for (const auto& [ref, offset] : n.parts) {
          if (!wants(ref)) continue;
          for (int k = 0; k < n.i0; ++k) nodes_[ref].grad.v[k] += gy.v[offset + k];
        }
        break;
      }
      case Op::kGaussianNll: {
        const double g = gy.v[0];
        const Tensor& muv = nodes_[n.a].value;
        const Tensor& sv = nodes_[n.b].value;
        const Ref rho_ref = static_cast<Ref>(n.i0);
        const double sx = sv.v[0];
        const double sy = sv.v[1];
        const double r = nodes_[rho_ref].value.v[0];
        const double ax = (n.target.x - muv.v[0]) / sx;
        const double by = (n.target.y - muv.v[1]) / sy;
        const bool clamped = 1.0 - r * r < kMinQ;
        const double q = std::max(1.0 - r * r, kMinQ);
        const double z = ax * ax + by * by - 2.0 * r * ax * by;
        if (wants(n.a)) {
          nodes_[n.a].grad.v[0] += g * -(ax - r * by) / (sx * q);
          nodes_[n.a].grad.v[1] += g * -(by - r * ax) / (sy * q);
        }
        if (wants(n.b)) {
          nodes_[n.b].grad.v[0] += g * (1.0 - (ax * ax - r * ax * by) / q) / sx;
          nodes_[n.b].grad.v[1] += g * (1.0 - (by * by - r * ax * by) / q) / sy;
        }
        if (wants(rho_ref)) {
          // With q clamped the log q and 1/q factors are constant in rho.
          const double drho =
              clamped ? -ax * by / q : -r / q - ax * by / q + z * r / (q * q);
          nodes_[rho_ref].grad.v[0] += g * drho;
        }
        break;
      }
    }
  }
}

}  // namespace sgnav
