#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tatlab/csv.hpp"
#include "tatlab/decay_fit.hpp"
#include "tatlab/embedding.hpp"
#include "tatlab/errors.hpp"
#include "tatlab/grid.hpp"
#include "tatlab/parallel.hpp"
#include "tatlab/spectral_norms.hpp"
#include "tatlab/subspace.hpp"
#include "tatlab/svd.hpp"
#include "tatlab/wavesim.hpp"

namespace tat {

/// Discretised forward operator. Column j is the trace of basis function j
/// with sqrt(arclength weight * time weight) folded in, so Euclidean norms of
/// columns are L^2(Gamma) norms.
struct ForwardMatrix {
  Eigen::MatrixXd entries;
  std::vector<std::string> basis_descriptor;
  std::size_t n_s = 0;
  std::size_t n_t = 0;
};

/// Quadrature-weighted, vectorised trace (row index i * n_t + j).
inline Eigen::VectorXd weighted_trace(const TraceRecord& g) {
  Eigen::VectorXd v(Eigen::Index(g.n_s * g.n_t));
  for (std::size_t i = 0; i < g.n_s; ++i)
    for (std::size_t j = 0; j < g.n_t; ++j)
      v(Eigen::Index(i * g.n_t + j)) = std::sqrt(g.arclengths[i] * g.time_weight(j)) * g(i, j);
  return v;
}

/// Simulates every basis function (zero or unit L^2 norm) and stacks the
/// weighted traces as columns. Failures are reported with the column index.
inline ForwardMatrix assemble_forward_matrix(const WavePropagator& prop, const std::vector<GridField>& basis,
                                             std::vector<std::string> descriptor = {},
                                             std::size_t workers = default_workers()) {
  ForwardMatrix m;
  m.n_s = prop.scenario().n_s;
  m.n_t = prop.n_t();
  m.entries = Eigen::MatrixXd::Zero(Eigen::Index(m.n_s * m.n_t), Eigen::Index(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const double nrm = l2_norm(basis[j]);
    if (nrm != 0.0 && std::abs(nrm - 1.0) > 1e-6)
      throw ValidationError("basis function " + std::to_string(j) + " is not L2-normalised");
  }
  parallel_for(
      basis.size(),
      [&](std::size_t j) {
        try {
          m.entries.col(Eigen::Index(j)) = weighted_trace(prop.forward(basis[j]));
        } catch (const BlowUpError& e) {
          throw BlowUpError(e.step(), "column " + std::to_string(j) + ": " + e.what());
        } catch (const ValidationError& e) {
          throw ValidationError("column " + std::to_string(j) + ": " + e.what());
        } catch (const Error& e) {
          throw Error("column " + std::to_string(j) + ": " + e.what());
        }
      },
      workers);
  if (descriptor.empty())
    for (std::size_t j = 0; j < basis.size(); ++j) descriptor.push_back("basis[" + std::to_string(j) + "]");
  m.basis_descriptor = std::move(descriptor);
  return m;
}

/// L^2-normalised bumps exp(-1 / (1 - |x - c|^2 / rho^2)) centred on an
/// n_per_side x n_per_side lattice over the bounding square of omega; only
/// bumps whose support lies in omega are kept.
inline std::vector<GridField> make_bump_basis(const GridField& grid, const Disc& omega, std::size_t n_per_side,
                                              std::vector<std::string>* descriptor = nullptr) {
  if (n_per_side < 1) throw ValidationError("bump basis needs at least one bump per side");
  const double spacing = 2.0 * omega.radius / double(n_per_side + 1);
  const double rho = spacing;
  std::vector<GridField> out;
  for (std::size_t b = 0; b < n_per_side; ++b) {
    for (std::size_t a = 0; a < n_per_side; ++a) {
      const Vec2 c = omega.center + Vec2{-omega.radius + spacing * double(a + 1), -omega.radius + spacing * double(b + 1)};
      if (norm(c - omega.center) + rho > omega.radius) continue;
      GridField f = grid.zeros_like();
      for (std::size_t j = 0; j < f.ny; ++j)
        for (std::size_t i = 0; i < f.nx; ++i) {
          const double q = 1.0 - norm2(f.node(i, j) - c) / (rho * rho);
          if (q > 0.0) f(i, j) = std::exp(-1.0 / q);
        }
      const double nrm = l2_norm(f);
      if (!(nrm > 0.0)) continue;
      for (auto& v : f.values) v /= nrm;
      if (descriptor) descriptor->push_back("bump(" + format_double(c.x) + "," + format_double(c.y) + ")");
      out.push_back(std::move(f));
    }
  }
  return out;
}

/// Smooth step: 0 for x <= 0, 1 for x >= 1, C-infinity in between.
inline double smooth_step(double x) {
  const auto psi = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return psi(x) / (psi(x) + psi(1.0 - x));
}

/// Width of the taper at each end, as a fraction of the window length.
inline constexpr double kTaperFraction = 0.1;

/// Window equal to 1 away from both ends of [0, length] and decaying smoothly
/// to 0 over kTaperFraction * length at each end.
inline double taper_window(double u, double length) {
  const double width = kTaperFraction * length;
  return smooth_step(u / width) * smooth_step((length - u) / width);
}

/// H^s(Gamma) norm of a trace on the (arclength, time) rectangle. The data is
/// tapered in time, and in arclength for open arcs; closed arcs are periodic.
inline double trace_sobolev_norm(const TraceRecord& g, double s) {
  std::vector<double> w(g.values.size());
  const double t_len = double(g.n_t - 1) * g.dt_trace;
  const double s_len = g.closed ? 0.0 : double(g.n_s - 1) * g.arc_spacing;
  for (std::size_t i = 0; i < g.n_s; ++i) {
    const double ws = g.closed ? 1.0 : taper_window(double(i) * g.arc_spacing, s_len);
    for (std::size_t j = 0; j < g.n_t; ++j)
      w[i * g.n_t + j] = ws * taper_window(double(j) * g.dt_trace, t_len) * g(i, j);
  }
  return sobolev_norm_2d(w, g.n_s, g.n_t, g.arc_spacing, g.dt_trace, s,
                         g.closed ? Extension::periodic : Extension::zero_padded, Extension::zero_padded);
}

struct InstabilityPoint {
  int k = 0;
  double f_norm = 0.0;
  double trace_norm = 0.0;
  double r_k = 0.0;
  std::vector<double> trace_hs;  ///< one entry per requested Sobolev order
};

struct InstabilityCurve {
  std::vector<double> s_list;
  std::vector<InstabilityPoint> points;

  std::vector<double> ks() const {
    std::vector<double> v;
    for (const auto& p : points) v.push_back(p.k);
    return v;
  }
  std::vector<double> ratios() const {
    std::vector<double> v;
    for (const auto& p : points) v.push_back(p.r_k);
    return v;
  }
  /// max / min over k of the trace H^s norm for s_list[i].
  double hs_spread(std::size_t i) const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& p : points) {
      lo = std::min(lo, p.trace_hs[i]);
      hi = std::max(hi, p.trace_hs[i]);
    }
    return hi / lo;
  }
};

/// r_k = ||T f_k||_{L^2(Gamma)} / ||f_k||_{L^2} and trace H^s norms for each k.
inline InstabilityCurve instability_curve(const WavePropagator& prop, const std::function<GridField(int)>& family,
                                          const std::vector<int>& k_list, const std::vector<double>& s_list,
                                          std::size_t workers = default_workers()) {
  InstabilityCurve out;
  out.s_list = s_list;
  out.points.resize(k_list.size());
  parallel_for(
      k_list.size(),
      [&](std::size_t idx) {
        const GridField f = family(k_list[idx]);
        auto& p = out.points[idx];
        p.k = k_list[idx];
        p.f_norm = l2_norm(f);
        if (!(p.f_norm > 0.0))
          throw ValidationError("undefined ratio: family member k=" + std::to_string(p.k) + " is zero");
        const TraceRecord g = prop.forward(f);
        p.trace_norm = l2_norm(g);
        p.r_k = p.trace_norm / p.f_norm;
        for (double s : s_list) p.trace_hs.push_back(trace_sobolev_norm(g, s));
      },
      workers);
  return out;
}

/// Margins m_j = a_j^(1 - mu) - C b_j^mu with a = s-numbers of the interval
/// embedding H^s1_0 -> L^2 and b = s-numbers of the torus embedding
/// H^s -> H^s0. C is the smallest constant making m_j <= 0 for j <= j_cal.
struct HolderProbe {
  double mu = 1.0;
  double s0 = 0.0;
  double s1 = 1.0;
  double s = 0.0;
  double c_calibrated = 0.0;
  std::vector<double> margin;
  /// First index (1-based) after which every margin is positive, if any.
  std::optional<std::size_t> j_positive;

  bool turns_positive() const { return j_positive.has_value(); }
};

inline HolderProbe holder_probe(const std::vector<double>& interval_sn, const std::vector<double>& torus_sn,
                                double mu, double s0, double s1, double s, std::size_t j_cal = 8) {
  if (!(mu > 0.0 && mu <= 1.0)) throw ValidationError("Holder exponent must lie in (0, 1]");
  HolderProbe hp;
  hp.mu = mu;
  hp.s0 = s0;
  hp.s1 = s1;
  hp.s = s;
  std::size_t n = std::min(interval_sn.size(), torus_sn.size());
  for (std::size_t j = 0; j < n; ++j)
    if (!(interval_sn[j] > 0.0 && torus_sn[j] > 0.0)) {
      n = j;
      break;
    }
  if (n <= j_cal) throw NumericalError("not enough non-zero s-numbers past the calibration window");
  for (std::size_t j = 0; j < j_cal; ++j)
    hp.c_calibrated = std::max(hp.c_calibrated, std::pow(interval_sn[j], 1.0 - mu) / std::pow(torus_sn[j], mu));
  hp.margin.resize(n);
  std::optional<std::size_t> last_nonpositive;
  for (std::size_t j = 0; j < n; ++j) {
    hp.margin[j] = std::pow(interval_sn[j], 1.0 - mu) - hp.c_calibrated * std::pow(torus_sn[j], mu);
    if (hp.margin[j] <= 0.0) last_nonpositive = j;
  }
  const std::size_t first = last_nonpositive ? *last_nonpositive + 1 : 0;
  if (first < n) hp.j_positive = first + 1;
  return hp;
}

/// s-numbers of the two embeddings used by the probe: interval H^s1_0(-eps, eps)
/// -> L^2 and torus H^s -> H^s0 with the given sides.
struct ProbeEmbeddings {
  std::vector<double> interval;
  std::vector<double> torus;
};

inline ProbeEmbeddings probe_embeddings(int s0, int s1, int s, double epsilon, double side_x, double side_y,
                                        std::size_t interval_modes = 512, std::size_t torus_modes = 33) {
  EmbeddingSpec a;
  a.kind = EmbeddingKind::interval_Hs0_to_L2;
  a.s = s1;
  a.epsilon = epsilon;
  a.n_modes = interval_modes;
  EmbeddingSpec b;
  b.kind = EmbeddingKind::torus_Hs1_to_Hs2;
  b.s1 = s;
  b.s2 = s0;
  b.side_x = side_x;
  b.side_y = side_y;
  b.n_modes = torus_modes;
  return {embedding_snumbers(a), embedding_snumbers(b)};
}

struct SpectrumReport {
  std::vector<double> sigmas;
  std::optional<DecayFit> fit;
  std::vector<HolderProbe> holder;
};

/// Singular values of a forward matrix and their decay fit (when enough
/// values lie above the numerical-zero floor).
inline SpectrumReport spectrum_report(const ForwardMatrix& m, std::size_t j_min = 8) {
  SpectrumReport r;
  r.sigmas = singular_values(m.entries);
  try {
    r.fit = fit_decay(r.sigmas, j_min);
  } catch (const NumericalError&) {
  }
  return r;
}

}  // namespace tat
