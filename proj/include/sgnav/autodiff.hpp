#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sgnav/tensor.hpp"
#include "sgnav/vec2.hpp"

namespace sgnav {

// Reverse-mode tape over the fixed operator set the sequence models need.
// Forward calls append nodes; backward() walks the tape in reverse and
// accumulates exact gradients into every node built from a grad-requiring
// leaf. Not thread-safe; one tape per forward/backward pass.
class Tape {
 public:
  using Ref = std::int32_t;

  Ref leaf(Tensor value, bool requires_grad = false);

  Ref matvec(Ref w, Ref x);          // w (r x c) * x (c)
  Ref add(Ref a, Ref b);             // elementwise, same shape
  Ref mul(Ref a, Ref b);             // elementwise, same shape
  Ref scale(Ref x, double s);
  Ref sigmoid(Ref x);
  Ref tanh_fn(Ref x);
  Ref relu(Ref x);
  Ref exp_fn(Ref x);
  Ref concat(Ref a, Ref b);          // vectors
  Ref slice(Ref x, int offset, int len);  // vector slice

  // Sum of fixed-length vector parts scattered into a longer zero vector:
  // out[offset_k .. offset_k+part_len) += part_k. Backward routes the slice of
  // the upstream gradient back to each part.
  Ref scatter_sum(std::vector<std::pair<Ref, int>> parts, int part_len, int total_len);

  // Negative log density of `target` under the bivariate normal given by
  // mu (2-vector), sigma (2-vector, positive), rho (1-vector, |rho|<1).
  // Computed in log space; returns a scalar node.
  Ref gaussian_nll(Ref mu, Ref sigma, Ref rho, Vec2 target);

  const Tensor& value(Ref r) const { return nodes_[r].value; }
  const Tensor& grad(Ref r) const { return nodes_[r].grad; }
  bool requires_grad(Ref r) const { return nodes_[r].requires_grad; }
  std::size_t node_count() const { return nodes_.size(); }

  // Seeds d(root)/d(root)=1 and accumulates gradients for the whole tape.
  // `root` must be scalar.
  void backward(Ref root);

  void reset();  // drop all nodes, keep allocation

 private:
  enum class Op {
    kLeaf,
    kMatVec,
    kAdd,
    kMul,
    kScale,
    kSigmoid,
    kTanh,
    kRelu,
    kExp,
    kConcat,
    kSlice,
    kScatterSum,
    kGaussianNll,
  };

  struct Node {
    Tensor value;
    Tensor grad;
    Op op = Op::kLeaf;
    bool requires_grad = false;
    Ref a = -1;
    Ref b = -1;
    int i0 = 0;  // slice offset / scatter part length / third input ref
    double s = 0.0;
    Vec2 target;
    std::vector<std::pair<Ref, int>> parts;
  };

  Ref push(Node node);
  std::vector<Node> nodes_;
};

}  // namespace sgnav
