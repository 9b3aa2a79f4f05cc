#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace sgnav {

// Dense row-major matrix of doubles; vectors are n x 1.
struct Tensor {
  int rows = 0;
  int cols = 1;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

  static Tensor zeros(int r, int c = 1) { return Tensor(r, c); }
  static Tensor vector(std::vector<double> values) {
    Tensor t;
    t.rows = static_cast<int>(values.size());
    t.cols = 1;
    t.v = std::move(values);
    return t;
  }

  int size() const { return rows * cols; }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  double& operator()(int r, int c = 0) { return v[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c = 0) const {
    return v[static_cast<std::size_t>(r) * cols + c];
  }
  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }

  void fill(double x) { std::fill(v.begin(), v.end(), x); }
};

}  // namespace sgnav
