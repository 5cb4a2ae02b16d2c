#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tatlab/errors.hpp"

namespace tat {

enum class DecayModel { power, exponential, inconclusive };

inline const char* to_string(DecayModel m) {
  switch (m) {
    case DecayModel::power: return "power";
    case DecayModel::exponential: return "exponential";
    case DecayModel::inconclusive: return "inconclusive";
  }
  return "?";
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double rss = 0.0;
};

/// v ~ C x^(-exponent) and v ~ C exp(-rate x), both fitted to log v.
struct DecayFit {
  double exponent = 0.0;
  double power_r2 = 0.0;
  double rate = 0.0;
  double exp_r2 = 0.0;
  double aic_power = 0.0;
  double aic_exp = 0.0;
  DecayModel preference = DecayModel::inconclusive;
  std::size_t n_used = 0;
};

/// Margin in information-criterion units required to prefer one model.
inline constexpr double kAicMargin = 2.0;
inline constexpr std::size_t kMinFitPoints = 8;

inline LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  const double n = double(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw NumericalError("degenerate abscissae in line fit");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.rss += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - f.rss / syy : 1.0;
  return f;
}

/// Fits over the points with x >= x_min and v above the numerical-zero floor
/// (1e-14 of the largest value). Needs at least 8 such points.
inline DecayFit fit_decay(std::span<const double> x, std::span<const double> values, double x_min) {
  if (x.size() != values.size()) throw ValidationError("abscissae and values differ in length");
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, v);
  std::vector<double> lx, xs, lv;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < x_min || !(values[i] > 1e-14 * vmax) || !(x[i] > 0.0)) continue;
    lx.push_back(std::log(x[i]));
    xs.push_back(x[i]);
    lv.push_back(std::log(values[i]));
  }
  if (lv.size() < kMinFitPoints)
    throw NumericalError("insufficient data for a decay fit: " + std::to_string(lv.size()) +
                         " usable values, need " + std::to_string(kMinFitPoints));
  const LineFit p = least_squares_line(lx, lv);
  const LineFit e = least_squares_line(xs, lv);
  DecayFit out;
  out.n_used = lv.size();
  out.exponent = -p.slope;
  out.power_r2 = p.r2;
  out.rate = -e.slope;
  out.exp_r2 = e.r2;
  const double n = double(lv.size());
  const auto aic = [n](double rss) { return n * std::log(std::max(rss / n, 1e-300)) + 2.0 * 2.0; };
  out.aic_power = aic(p.rss);
  out.aic_exp = aic(e.rss);
  if (out.aic_exp + kAicMargin < out.aic_power)
    out.preference = DecayModel::exponential;
  else if (out.aic_power + kAicMargin < out.aic_exp)
    out.preference = DecayModel::power;
  return out;
}

/// Fit of v_j against j = 1, 2, ... restricted to j >= j_min.
inline DecayFit fit_decay(std::span<const double> values, std::size_t j_min = 8) {
  std::vector<double> j(values.size());
  for (std::size_t i = 0; i < j.size(); ++i) j[i] = double(i + 1);
  return fit_decay(j, values, double(j_min));
}

}  // namespace tat
