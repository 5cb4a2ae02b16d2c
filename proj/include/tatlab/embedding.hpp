#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "tatlab/errors.hpp"

namespace tat {

enum class EmbeddingKind {
  interval_Hs0_to_L2,  ///< H^s_0(-eps, eps) -> L^2(-eps, eps), sine basis
  torus_Hs1_to_Hs2,    ///< H^s1(T^2) -> H^s2(T^2), s1 > s2, Fourier basis
};

struct EmbeddingSpec {
  EmbeddingKind kind = EmbeddingKind::interval_Hs0_to_L2;
  int s = 1;            ///< interval: order s of H^s_0
  int s1 = 2;           ///< torus: source order
  int s2 = 0;           ///< torus: target order
  double epsilon = 1.0; ///< interval half-width
  double side_x = 2.0 * std::numbers::pi;
  double side_y = 2.0 * std::numbers::pi;
  /// Interval: number of sine modes. Torus: modes per axis (made odd).
  std::size_t n_modes = 64;
};

namespace detail {

/// 1D real basis function with analytic derivatives: amp * sin(freq x + phase).
struct Wave {
  double freq = 0.0;
  double phase = 0.0;
  double amp = 1.0;
  double derivative(int m, double x) const {
    return amp * std::pow(freq, m) * std::sin(freq * x + phase + m * std::numbers::pi / 2.0);
  }
};

/// Gram matrix of m-th derivatives over [lo, hi] by composite Gauss-Legendre.
inline Eigen::MatrixXd derivative_gram(const std::vector<Wave>& basis, int m, double lo, double hi) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  double max_freq = 0.0;
  for (const auto& w : basis) max_freq = std::max(max_freq, w.freq);
  const auto panels = std::size_t(std::ceil(max_freq * (hi - lo) / std::numbers::pi)) + 4;
  const double width = (hi - lo) / double(panels);
  std::vector<double> nodes, weights;
  const auto& abs = Rule::abscissa();
  const auto& wts = Rule::weights();
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = lo + (double(p) + 0.5) * width;
    for (std::size_t i = 0; i < abs.size(); ++i) {
      const double off = 0.5 * width * abs[i];
      const double w = 0.5 * width * wts[i];
      nodes.push_back(mid + off);
      weights.push_back(w);
      if (abs[i] != 0.0) {
        nodes.push_back(mid - off);
        weights.push_back(w);
      }
    }
  }
  const auto nb = Eigen::Index(basis.size());
  Eigen::MatrixXd vals(Eigen::Index(nodes.size()), nb);
  for (Eigen::Index q = 0; q < vals.rows(); ++q)
    for (Eigen::Index b = 0; b < nb; ++b)
      vals(q, b) = basis[std::size_t(b)].derivative(m, nodes[std::size_t(q)]) * std::sqrt(weights[std::size_t(q)]);
  return vals.transpose() * vals;
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

/// Gram of the H^s inner product sum_m C(s, m) <D^m u, D^m v>, i.e. the
/// Fourier weight (1 + w^2)^s.
inline Eigen::MatrixXd sobolev_gram_1d(const std::vector<Wave>& basis, int s, double lo, double hi) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(Eigen::Index(basis.size()), Eigen::Index(basis.size()));
  for (int m = 0; m <= s; ++m) g += binomial(s, m) * derivative_gram(basis, m, lo, hi);
  return g;
}

/// Real Fourier basis 1, cos(w x), sin(w x), w = 2 pi k / side, k = 1..K.
inline std::vector<Wave> fourier_basis(std::size_t per_axis, double side) {
  std::vector<Wave> b;
  b.push_back({0.0, std::numbers::pi / 2.0, 1.0});
  for (std::size_t k = 1; b.size() < per_axis; ++k) {
    const double w = 2.0 * std::numbers::pi * double(k) / side;
    b.push_back({w, std::numbers::pi / 2.0, 1.0});
    if (b.size() < per_axis) b.push_back({w, 0.0, 1.0});
  }
  return b;
}

/// H^s Gram on the 2D torus: (1 + wx^2 + wy^2)^s expanded by the multinomial
/// theorem into Kronecker products of 1D derivative Grams.
inline Eigen::MatrixXd torus_gram(const std::vector<Wave>& bx, const std::vector<Wave>& by, int s,
                                  double side_x, double side_y) {
  std::vector<Eigen::MatrixXd> dx, dy;
  for (int m = 0; m <= s; ++m) {
    dx.push_back(derivative_gram(bx, m, 0.0, side_x));
    dy.push_back(derivative_gram(by, m, 0.0, side_y));
  }
  const auto nx = Eigen::Index(bx.size()), ny = Eigen::Index(by.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nx * ny, nx * ny);
  for (int a = 0; a <= s; ++a) {
    for (int b = 0; a + b <= s; ++b) {
      // multinomial s! / ((s - a - b)! a! b!)
      const double coef = binomial(s, a) * binomial(s - a, b);
      Eigen::MatrixXd block = Eigen::MatrixXd::Zero(nx * ny, nx * ny);
      for (Eigen::Index iy = 0; iy < ny; ++iy)
        for (Eigen::Index jy = 0; jy < ny; ++jy) {
          const double w = dy[std::size_t(b)](iy, jy);
          if (w == 0.0) continue;
          block.block(iy * nx, jy * nx, nx, nx) = w * dx[std::size_t(a)];
        }
      g += coef * block;
    }
  }
  return g;
}

/// s-numbers of the embedding (V, source Gram) -> (W, target Gram): square
/// roots of the generalized eigenvalues of target v = lambda source v.
inline std::vector<double> generalized_snumbers(const Eigen::MatrixXd& target, const Eigen::MatrixXd& source) {
  Eigen::LLT<Eigen::MatrixXd> llt(source);
  if (llt.info() != Eigen::Success) throw NumericalError("source Gram matrix is not positive definite");
  Eigen::LLT<Eigen::MatrixXd> llt_t(target);
  if (llt_t.info() != Eigen::Success) throw NumericalError("target Gram matrix is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(target, source);
  if (es.info() != Eigen::Success) throw NumericalError("generalized eigenproblem failed");
  std::vector<double> out;
  out.reserve(std::size_t(es.eigenvalues().size()));
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam < -1e-10 * es.eigenvalues().cwiseAbs().maxCoeff())
      throw NumericalError("indefinite pencil: negative generalized eigenvalue");
    out.push_back(std::sqrt(std::max(lam, 0.0)));
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace detail

/// Descending s-numbers of the natural embedding described by `spec`.
inline std::vector<double> embedding_snumbers(const EmbeddingSpec& spec) {
  if (spec.n_modes < 16) throw ValidationError("embedding needs at least 16 modes");
  if (spec.kind == EmbeddingKind::interval_Hs0_to_L2) {
    if (spec.s < 0) throw ValidationError("Sobolev order must be non-negative");
    if (!(spec.epsilon > 0.0)) throw ValidationError("interval half-width must be positive");
    const double eps = spec.epsilon;
    std::vector<detail::Wave> basis;
    for (std::size_t j = 1; j <= spec.n_modes; ++j) {
      const double w = double(j) * std::numbers::pi / (2.0 * eps);
      basis.push_back({w, w * eps, 1.0});  // sin(w (x + eps)), vanishes at +-eps
    }
    const auto src = detail::sobolev_gram_1d(basis, spec.s, -eps, eps);
    const auto dst = detail::derivative_gram(basis, 0, -eps, eps);
    return detail::generalized_snumbers(dst, src);
  }
  if (spec.s1 < spec.s2 || spec.s2 < 0) throw ValidationError("torus embedding needs s1 >= s2 >= 0");
  if (!(spec.side_x > 0.0 && spec.side_y > 0.0)) throw ValidationError("torus sides must be positive");
  const std::size_t per_axis = spec.n_modes | 1u;
  const auto bx = detail::fourier_basis(per_axis, spec.side_x);
  const auto by = detail::fourier_basis(per_axis, spec.side_y);
  const auto src = detail::torus_gram(bx, by, spec.s1, spec.side_x, spec.side_y);
  const auto dst = detail::torus_gram(bx, by, spec.s2, spec.side_x, spec.side_y);
  return detail::generalized_snumbers(dst, src);
}

}  // namespace tat
