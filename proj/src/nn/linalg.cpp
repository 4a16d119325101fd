#include "procdur/nn/linalg.hpp"

#include "procdur/errors.hpp"

namespace procdur::nn {

void matvec(const Mat& m, const Vec& x, Vec& out) {
  out.assign(static_cast<size_t>(m.rows), 0.0);
  matvec_acc(m, x, out);
}

void matvec_acc(const Mat& m, const Vec& x, Vec& out) {
  if (x.size() != static_cast<size_t>(m.cols) || out.size() != static_cast<size_t>(m.rows)) {
    throw ShapeError("matvec: dimension mismatch");
  }
  const double* row = m.a.data();
  for (int r = 0; r < m.rows; ++r, row += m.cols) {
    double s = 0.0;
    for (int c = 0; c < m.cols; ++c) s += row[c] * x[static_cast<size_t>(c)];
    out[static_cast<size_t>(r)] += s;
  }
}

void matvec_t_acc(const Mat& m, const Vec& y, Vec& out) {
  if (y.size() != static_cast<size_t>(m.rows) || out.size() != static_cast<size_t>(m.cols)) {
    throw ShapeError("matvec_t: dimension mismatch");
  }
  const double* row = m.a.data();
  for (int r = 0; r < m.rows; ++r, row += m.cols) {
    const double yr = y[static_cast<size_t>(r)];
    if (yr == 0.0) continue;
    for (int c = 0; c < m.cols; ++c) out[static_cast<size_t>(c)] += row[c] * yr;
  }
}

void outer_acc(Mat& m, const Vec& y, const Vec& x) {
  if (y.size() != static_cast<size_t>(m.rows) || x.size() != static_cast<size_t>(m.cols)) {
    throw ShapeError("outer: dimension mismatch");
  }
  double* row = m.a.data();
  for (int r = 0; r < m.rows; ++r, row += m.cols) {
    const double yr = y[static_cast<size_t>(r)];
    if (yr == 0.0) continue;
    for (int c = 0; c < m.cols; ++c) row[c] += yr * x[static_cast<size_t>(c)];
  }
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw ShapeError("dot: dimension mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace procdur::nn
