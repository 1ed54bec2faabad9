#ifndef SSIE2D_LINALG_HPP
#define SSIE2D_LINALG_HPP

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "ssie2d/errors.hpp"

namespace ssie2d {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// 2-norm condition number sigma_max / sigma_min from a full SVD; +inf when
// sigma_min is zero.
inline double cond2(const Matrix& a) {
  if (a.size() == 0) throw DomainError("cond2 of an empty matrix");
  Eigen::BDCSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (smin == 0.0 || !std::isfinite(smax)) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

// Partial-pivot LU of a square matrix. Throws SingularMatrixError naming the
// first exactly zero pivot.
class LuFactor {
 public:
  LuFactor(const Matrix& a, std::string name = "matrix") : name_(std::move(name)) {
    if (a.rows() != a.cols()) throw DomainError(name_ + " is not square");
    if (a.size() == 0) throw DomainError(name_ + " is empty");
    lu_.compute(a);
    const auto& m = lu_.matrixLU();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto p = m(i, i);
      if (p == 0.0 || !std::isfinite(p.real()) || !std::isfinite(p.imag()))
        throw SingularMatrixError(name_, i, cond2(a));
    }
  }

  template <class Rhs>
  auto solve(const Eigen::MatrixBase<Rhs>& b) const {
    if (b.rows() != lu_.rows()) throw DomainError(name_ + ": right-hand side has wrong row count");
    return Matrix(lu_.solve(b));
  }
  Matrix inverse() const { return lu_.inverse(); }
  Eigen::Index size() const { return lu_.rows(); }

 private:
  std::string name_;
  Eigen::PartialPivLU<Matrix> lu_;
};

inline Matrix lu_solve(const Matrix& a, const Matrix& b, const std::string& name = "matrix") {
  return LuFactor(a, name).solve(b);
}

inline Vector lu_solve(const Matrix& a, const Vector& b, const std::string& name = "matrix") {
  return LuFactor(a, name).solve(b).col(0);
}

}  // namespace ssie2d

#endif  // SSIE2D_LINALG_HPP
