#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "tatlab/errors.hpp"

namespace tat {

/// Relative threshold below which singular values are reported as zero.
inline constexpr double kSingularFloor = 1e-14;

namespace detail {

/// One-sided (Hestenes) Jacobi on the columns of a; returns column norms.
inline std::vector<double> hestenes_jacobi(Eigen::MatrixXd a) {
  const Eigen::Index n = a.cols();
  constexpr int kMaxSweeps = 80;
  constexpr double kTol = 1e-15;
  for (int sweep = 0;; ++sweep) {
    if (sweep == kMaxSweeps) throw NumericalError("Jacobi SVD did not converge");
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = a.col(p).squaredNorm();
        const double beta = a.col(q).squaredNorm();
        const double gamma = a.col(p).dot(a.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= kTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
          const double ap = a(i, p), aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) sv[std::size_t(j)] = a.col(j).norm();
  return sv;
}

}  // namespace detail

/// Singular values in descending order. Tall inputs are first reduced to
/// their triangular QR factor; values below kSingularFloor * sigma_1 are
/// reported as exactly zero.
inline std::vector<double> singular_values(const Eigen::MatrixXd& a) {
  if (a.size() == 0) throw ValidationError("singular values of an empty matrix");
  if (!a.allFinite()) throw ValidationError("matrix has non-finite entries");
  Eigen::MatrixXd work = a.rows() >= a.cols() ? a : Eigen::MatrixXd(a.transpose());
  if (work.rows() > work.cols()) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(work);
    work = qr.matrixQR().topRows(work.cols()).triangularView<Eigen::Upper>();
  }
  auto sv = detail::hestenes_jacobi(std::move(work));
  std::sort(sv.begin(), sv.end(), std::greater<>());
  const double floor = kSingularFloor * sv.front();
  for (auto& s : sv)
    if (s < floor) s = 0.0;
  return sv;
}

}  // namespace tat
