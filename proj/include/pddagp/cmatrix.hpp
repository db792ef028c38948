#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "pddagp/errors.hpp"

namespace pddagp {

using cxd = std::complex<double>;

// Dense row-major complex matrix. Matrices with at most kInlineCap entries
// live in inline storage; the solver's inner loop works on fixed antenna-
// sized blocks, so those never touch the heap. Zero-sized dimensions are
// allowed so that an empty reflecting surface (n_s = 0) degenerates cleanly.
class CMatrix {
  static constexpr std::size_t kInlineCap = 16;

 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (size() > kInlineCap) heap_.assign(size(), cxd(0.0, 0.0));
    else sbo_.fill(cxd(0.0, 0.0));
  }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return rows_ * cols_; }
  bool empty() const { return size() == 0; }

  cxd* data() { return size() <= kInlineCap ? sbo_.data() : heap_.data(); }
  const cxd* data() const {
    return size() <= kInlineCap ? sbo_.data() : heap_.data();
  }

  cxd& operator()(std::size_t i, std::size_t j) { return data()[i * cols_ + j]; }
  const cxd& operator()(std::size_t i, std::size_t j) const {
    return data()[i * cols_ + j];
  }

  CMatrix adjoint() const {
    CMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  cxd trace() const {
    if (rows_ != cols_) throw NotSquareError("trace: matrix not square");
    cxd t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double frob_norm() const {
    double s = 0.0;
    const cxd* p = data();
    for (std::size_t k = 0; k < size(); ++k) s += std::norm(p[k]);
    return std::sqrt(s);
  }

  bool is_finite() const {
    const cxd* p = data();
    for (std::size_t k = 0; k < size(); ++k)
      if (!std::isfinite(p[k].real()) || !std::isfinite(p[k].imag()))
        return false;
    return true;
  }

  CMatrix& operator+=(const CMatrix& o) {
    check_same_shape(o, "+=");
    cxd* p = data();
    const cxd* q = o.data();
    for (std::size_t k = 0; k < size(); ++k) p[k] += q[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    check_same_shape(o, "-=");
    cxd* p = data();
    const cxd* q = o.data();
    for (std::size_t k = 0; k < size(); ++k) p[k] -= q[k];
    return *this;
  }
  CMatrix& operator*=(cxd s) {
    cxd* p = data();
    for (std::size_t k = 0; k < size(); ++k) p[k] *= s;
    return *this;
  }

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(cxd s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(CMatrix a, cxd s) { return a *= s; }

  friend bool operator==(const CMatrix& a, const CMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    const cxd* p = a.data();
    const cxd* q = b.data();
    for (std::size_t k = 0; k < a.size(); ++k)
      if (p[k] != q[k]) return false;
    return true;
  }

 private:
  void check_same_shape(const CMatrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw DimensionMismatchError(std::string("CMatrix ") + op +
                                   ": shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::array<cxd, kInlineCap> sbo_{};
  std::vector<cxd> heap_;
};

inline double frob_dist(const CMatrix& a, const CMatrix& b) {
  return (a - b).frob_norm();
}

}  // namespace pddagp
