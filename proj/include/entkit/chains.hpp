#ifndef ENTKIT_CHAINS_HPP
#define ENTKIT_CHAINS_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "entkit/spectrum.hpp"

namespace entkit {

inline constexpr int kXXCap = 512;
inline constexpr int kMotzkinCap = 2048;

/// Mode occupations of an interval of length l in the half-filled infinite
/// free-fermion chain: eigenvalues of the two-point kernel
/// C_jk = sin(pi (j-k) / 2) / (pi (j-k)), C_jj = 1/2 restricted to the
/// interval.
inline std::vector<double> xx_mode_occupations(int l, int cap = kXXCap) {
  if (l < 1) throw std::invalid_argument("xx_mode_occupations: l must be >= 1");
  if (l > cap) throw std::invalid_argument("xx_mode_occupations: l exceeds cap");
  Eigen::MatrixXd c(l, l);
  for (int j = 0; j < l; ++j) {
    for (int k = 0; k < l; ++k) {
      if (j == k) {
        c(j, k) = 0.5;
      } else {
        const double d = j - k;
        c(j, k) = std::sin(std::numbers::pi * d / 2.0) / (std::numbers::pi * d);
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("xx_mode_occupations: eigensolver failed");
  std::vector<double> nus(static_cast<std::size_t>(l));
  for (int k = 0; k < l; ++k) nus[static_cast<std::size_t>(k)] = std::clamp(es.eigenvalues()(k), 0.0, 1.0);
  return nus;
}

/// Schmidt spectrum of the interval: product over modes of [nu, 1-nu].
inline Spectrum xx_interval_spectrum(int l, int cap = kXXCap, double prune = 1e-12,
                                     std::size_t max_runs = Spectrum::kDefaultRunCap) {
  Spectrum out = point_mass();
  for (double nu : xx_mode_occupations(l, cap)) {
    if (std::min(nu, 1.0 - nu) < 1e-12) continue;  // deterministic mode, factor [1]
    out = tensor(out, make_spectrum({std::max(nu, 1.0 - nu), std::min(nu, 1.0 - nu)}),
                 prune, max_runs);
  }
  return out;
}

/// Interval entanglement entropy in nats, exact over the mode occupations
/// (the product spectrum's entropy is the sum of binary entropies).
inline double xx_interval_entropy(int l, int cap = kXXCap) {
  long double h = 0.0L;
  for (double nu : xx_mode_occupations(l, cap)) {
    if (std::min(nu, 1.0 - nu) < 1e-15) continue;
    h -= static_cast<long double>(nu) * std::log(static_cast<long double>(nu));
    h -= static_cast<long double>(1.0 - nu) * std::log(static_cast<long double>(1.0 - nu));
  }
  return static_cast<double>(h);
}

enum class ScalingModel { logarithmic, square_root };

struct ScalingFit {
  double slope = 0.0;
  double offset = 0.0;
  double residual = 0.0;  // sum of squared residuals
};

/// Least-squares fit of S = a f(len) + b with f = ln (logarithmic) or
/// f = sqrt (square_root).
inline ScalingFit entropy_scaling_fit(const std::vector<std::pair<double, double>>& samples,
                                      ScalingModel model) {
  if (samples.size() < 3)
    throw std::invalid_argument("entropy_scaling_fit: need at least 3 samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].first > samples[i - 1].first))
      throw std::invalid_argument("entropy_scaling_fit: lengths must strictly increase");
  Eigen::MatrixXd a(samples.size(), 2);
  Eigen::VectorXd y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double len = samples[i].first;
    if (!(len > 0.0)) throw std::invalid_argument("entropy_scaling_fit: lengths must be positive");
    a(i, 0) = model == ScalingModel::logarithmic ? std::log(len) : std::sqrt(len);
    a(i, 1) = 1.0;
    y(i) = samples[i].second;
  }
  if ((a.col(0).maxCoeff() - a.col(0).minCoeff()) < 1e-14)
    throw std::invalid_argument("entropy_scaling_fit: degenerate design matrix");
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(y);
  ScalingFit fit;
  fit.slope = coef(0);
  fit.offset = coef(1);
  fit.residual = (a * coef - y).squaredNorm();
  return fit;
}

/// Exponent of a power-law fit S = c len^p, via least squares in log-log.
inline double power_law_exponent(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3)
    throw std::invalid_argument("power_law_exponent: need at least 3 samples");
  Eigen::MatrixXd a(samples.size(), 2);
  Eigen::VectorXd y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].first > 0.0 && samples[i].second > 0.0))
      throw std::invalid_argument("power_law_exponent: samples must be positive");
    a(i, 0) = std::log(samples[i].first);
    a(i, 1) = 1.0;
    y(i) = std::log(samples[i].second);
  }
  return a.colPivHouseholderQr().solve(y)(0);
}

/// p[h] = number of s-colored Motzkin prefixes of length n ending at height
/// h. Down steps must close the matching up step, so they carry no color
/// factor.
inline std::vector<boost::multiprecision::cpp_int> motzkin_prefix_counts(int n, int s) {
  using BigInt = boost::multiprecision::cpp_int;
  if (n < 0 || s < 1) throw std::invalid_argument("motzkin_prefix_counts: need n >= 0, s >= 1");
  std::vector<BigInt> p(n + 1, 0);
  p[0] = 1;
  for (int i = 1; i <= n; ++i) {
    std::vector<BigInt> next(n + 1, 0);
    for (int h = 0; h <= i; ++h) {
      BigInt v = p[h];
      if (h > 0) v += s * p[h - 1];
      if (h + 1 <= n) v += p[h + 1];
      next[h] = v;
    }
    p.swap(next);
  }
  return p;
}

/// Midpoint Schmidt spectrum of the uniform superposition over s-colored
/// Motzkin walks of even length L. Schmidt indices are pairs (height h,
/// color word of length h); each of the s^h words at height h carries the
/// same weight, fixed by the exact count of colored prefixes ending at h.
inline Spectrum motzkin_spectrum(int L, int s, int cap = kMotzkinCap) {
  namespace mp = boost::multiprecision;
  using BigInt = mp::cpp_int;
  using BigFloat = mp::cpp_bin_float_100;
  if (L < 2 || L % 2 != 0) throw std::invalid_argument("motzkin_spectrum: L must be even, >= 2");
  if (s < 1) throw std::invalid_argument("motzkin_spectrum: s must be >= 1");
  if (L > cap) throw std::invalid_argument("motzkin_spectrum: L exceeds cap");
  const int n = L / 2;
  const std::vector<BigInt> p = motzkin_prefix_counts(n, s);
  // Per-word weight at height h is (p[h]/s^h)^2 / Z with multiplicity s^h,
  // so Z = sum_h p[h]^2 / s^h.
  std::vector<BigFloat> height_mass(n + 1);
  BigFloat z = 0;
  BigInt s_pow = 1;
  for (int h = 0; h <= n; ++h) {
    height_mass[h] = BigFloat(p[h] * p[h]) / BigFloat(s_pow);
    z += height_mass[h];
    s_pow *= s;
  }
  std::vector<SpectrumRun> runs;
  double deficit = 0.0;
  double deficit_entries = 0.0;
  for (int h = 0; h <= n; ++h) {
    if (p[h] == 0) continue;
    const double mass = static_cast<double>(height_mass[h] / z);
    const double count = std::pow(static_cast<double>(s), h);
    const double weight = mass / count;
    if (h <= 1000 && std::isfinite(count) && weight > 0.0) {
      runs.push_back({weight, count});
    } else {
      deficit += mass;
      deficit_entries += std::min(count, 1e300);
    }
  }
  if (deficit < 1e-15) { deficit = 0.0; deficit_entries = 0.0; }
  return Spectrum::from_runs(std::move(runs), deficit, deficit_entries,
                             /*renormalize=*/deficit == 0.0);
}

/// Largest gap between consecutive sorted log-weight-ratios inside
/// [0, window]. Shrinking gaps with growing interval length indicate a
/// ratio set filling the line densely.
inline double ratio_density_gap(const Spectrum& s, double window) {
  if (!(window > 0.0)) throw std::invalid_argument("ratio_density_gap: window must be > 0");
  std::vector<double> ratios{0.0, window};
  const auto& runs = s.runs();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      const double r = std::log(runs[i].weight / runs[j].weight);
      if (r < window) ratios.push_back(r);
      else break;  // runs sorted descending, ratios only grow with j at fixed i
    }
  }
  std::sort(ratios.begin(), ratios.end());
  double gap = 0.0;
  for (std::size_t i = 1; i < ratios.size(); ++i)
    gap = std::max(gap, ratios[i] - ratios[i - 1]);
  return gap;
}

}  // namespace entkit

#endif  // ENTKIT_CHAINS_HPP
