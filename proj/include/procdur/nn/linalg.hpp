#pragma once

#include <cstddef>
#include <vector>

namespace procdur::nn {

using Vec = std::vector<double>;

// Row-major dense matrix. Small enough models that a flat vector plus index
// arithmetic beats pulling in a linear-algebra dependency.
struct Mat {
  int rows = 0;
  int cols = 0;
  Vec a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0) {}

  double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  size_t size() const { return a.size(); }
};

// out = M x
void matvec(const Mat& m, const Vec& x, Vec& out);
// out += M x
void matvec_acc(const Mat& m, const Vec& x, Vec& out);
// out += M^T y
void matvec_t_acc(const Mat& m, const Vec& y, Vec& out);
// M += y x^T
void outer_acc(Mat& m, const Vec& y, const Vec& x);

double dot(const Vec& a, const Vec& b);

}  // namespace procdur::nn
