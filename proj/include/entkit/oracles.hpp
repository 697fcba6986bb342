#ifndef ENTKIT_ORACLES_HPP
#define ENTKIT_ORACLES_HPP

// Independent reference implementations used to validate the fast paths.
// Everything here is brute force on purpose: different algorithm, different
// failure modes.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "entkit/spectrum.hpp"

namespace entkit::oracle {

/// Max overlap |<phi|(U (x) V)|psi>| over complex 2x2 local unitaries, by
/// seeded random restarts plus coordinate refinement. Reference for
/// sorted_fidelity on qubit pairs.
inline double lu_fidelity_2x2(const std::vector<double>& p, const std::vector<double>& q,
                              std::uint64_t seed = 2024, int restarts = 24) {
  auto unitary = [](double theta, double alpha, double beta) {
    Eigen::Matrix2cd u;
    const std::complex<double> i(0.0, 1.0);
    u << std::cos(theta) * std::exp(i * alpha), std::sin(theta) * std::exp(i * beta),
        -std::sin(theta) * std::exp(-i * beta), std::cos(theta) * std::exp(-i * alpha);
    return u;
  };
  auto overlap = [&](const std::array<double, 6>& a) {
    const Eigen::Matrix2cd u = unitary(a[0], a[1], a[2]);
    const Eigen::Matrix2cd v = unitary(a[3], a[4], a[5]);
    std::complex<double> s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        s += std::sqrt(q[i]) * std::sqrt(p[j]) * u(i, j) * v(i, j);
    return std::abs(s);
  };
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    std::array<double, 6> a;
    for (auto& x : a) x = angle(gen);
    double f = overlap(a);
    for (double step = 0.5; step > 1e-8; step *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (int d = 0; d < 6; ++d) {
          for (double sgn : {1.0, -1.0}) {
            auto trial = a;
            trial[d] += sgn * step;
            const double ft = overlap(trial);
            if (ft > f) { f = ft; a = trial; improved = true; }
          }
        }
      }
    }
    best = std::max(best, f);
  }
  return best;
}

/// Best achievable fidelity of converting the qubit state with Schmidt
/// spectrum p into the one with spectrum q by a single-round protocol: one
/// two-outcome diagonal measurement, then the optimal local unitary per
/// outcome. F^2 = sum_i prob_i F(spec_i, q)^2 over the outcome ensemble.
/// A lower-bound oracle; on qubit pairs it attains the optimum.
inline double locc_fidelity_2x2(const std::vector<double>& p, const std::vector<double>& q,
                                int grid = 41) {
  auto outcome_fidelity2 = [&](double a, double b) {
    double total = 0.0;
    for (int outcome = 0; outcome < 2; ++outcome) {
      const double m1 = outcome == 0 ? a : 1.0 - a;
      const double m2 = outcome == 0 ? b : 1.0 - b;
      const double prob = p[0] * m1 + p[1] * m2;
      if (prob < 1e-15) continue;
      double s1 = p[0] * m1 / prob, s2 = p[1] * m2 / prob;
      if (s1 < s2) std::swap(s1, s2);
      const double f = std::sqrt(s1 * q[0]) + std::sqrt(s2 * q[1]);
      total += prob * f * f;
    }
    return total;
  };
  double best = 0.0, best_a = 0.0, best_b = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double a = static_cast<double>(i) / (grid - 1);
      const double b = static_cast<double>(j) / (grid - 1);
      const double f2 = outcome_fidelity2(a, b);
      if (f2 > best) { best = f2; best_a = a; best_b = b; }
    }
  }
  // stationary protocol where both outcomes carry the target spectrum; the
  // grid + pattern search alone can stall in the curved valley around it
  const double det = q[0] * q[0] - q[1] * q[1];
  if (std::abs(det) > 1e-12) {
    const double t1 = (q[0] * p[0] - q[1] * p[1]) / det;
    const double t2 = (q[0] * p[1] - q[1] * p[0]) / det;
    if (t1 >= -1e-12 && t2 >= -1e-12) {
      const double a = std::clamp(q[0] * t1 / p[0], 0.0, 1.0);
      const double b = std::clamp(q[1] * t1 / p[1], 0.0, 1.0);
      const double f2 = outcome_fidelity2(a, b);
      if (f2 > best) { best = f2; best_a = a; best_b = b; }
    }
  }
  for (double step = 1.0 / (grid - 1); step > 1e-10; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (double da : {step, -step, 0.0}) {
        for (double db : {step, -step, 0.0}) {
          const double a = std::clamp(best_a + da, 0.0, 1.0);
          const double b = std::clamp(best_b + db, 0.0, 1.0);
          const double f2 = outcome_fidelity2(a, b);
          if (f2 > best + 1e-15) { best = f2; best_a = a; best_b = b; improved = true; }
        }
      }
    }
  }
  return std::sqrt(best);
}

/// Partial trace of a pure state on n spins of dimension m each (big-endian
/// digit order) onto the `keep` spins.
inline Eigen::MatrixXd partial_trace(const Eigen::VectorXd& state, std::size_t n, std::size_t m,
                                     const std::vector<std::size_t>& keep) {
  std::vector<bool> kept(n, false);
  for (std::size_t g : keep) kept[g] = true;
  std::size_t keep_dim = 1, rest_dim = 1;
  for (std::size_t g = 0; g < n; ++g) (kept[g] ? keep_dim : rest_dim) *= m;
  Eigen::MatrixXd psi(static_cast<Eigen::Index>(keep_dim), static_cast<Eigen::Index>(rest_dim));
  for (Eigen::Index idx = 0; idx < state.size(); ++idx) {
    std::size_t row = 0, col = 0, x = static_cast<std::size_t>(idx);
    std::vector<std::size_t> digits(n);
    for (std::size_t g = n; g-- > 0;) { digits[g] = x % m; x /= m; }
    for (std::size_t g = 0; g < n; ++g) {
      if (kept[g]) row = row * m + digits[g];
      else col = col * m + digits[g];
    }
    psi(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = state(idx);
  }
  return psi * psi.transpose();
}

/// Schmidt spectrum (squared singular values) of a pure state across the
/// given spin bipartition, descending, entries below tol dropped.
inline std::vector<double> schmidt_spectrum(const Eigen::VectorXd& state, std::size_t n,
                                            std::size_t m, const std::vector<std::size_t>& left,
                                            double tol = 1e-14) {
  std::vector<bool> in_left(n, false);
  for (std::size_t g : left) in_left[g] = true;
  std::size_t ldim = 1, rdim = 1;
  for (std::size_t g = 0; g < n; ++g) (in_left[g] ? ldim : rdim) *= m;
  Eigen::MatrixXd psi =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ldim), static_cast<Eigen::Index>(rdim));
  for (Eigen::Index idx = 0; idx < state.size(); ++idx) {
    std::size_t row = 0, col = 0, x = static_cast<std::size_t>(idx);
    std::vector<std::size_t> digits(n);
    for (std::size_t g = n; g-- > 0;) { digits[g] = x % m; x /= m; }
    for (std::size_t g = 0; g < n; ++g) {
      if (in_left[g]) row = row * m + digits[g];
      else col = col * m + digits[g];
    }
    psi(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = state(idx);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double w = svd.singularValues()(i) * svd.singularValues()(i);
    if (w > tol) out.push_back(w);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Exhaustive midpoint Schmidt decomposition of the uniform colored-Motzkin
/// superposition. Enumerates all length-L/2 step words; left halves are
/// grouped by the set of right halves they can complete, each group forming
/// a rank-1 block of the coefficient matrix.
struct MotzkinEnumeration {
  std::vector<double> spectrum;            // descending Schmidt weights
  std::map<int, long long> prefix_counts;  // colored prefixes per final height
};

inline MotzkinEnumeration motzkin_enumerate(int L, int s) {
  if (L < 2 || L % 2 != 0 || s < 1 || L > 16)
    throw std::invalid_argument("motzkin_enumerate: need even L in [2,16], s >= 1");
  const int n = L / 2;
  // Steps: 0 flat, 1..s up with color, s+1..2s down with color.
  const int alphabet = 2 * s + 1;
  MotzkinEnumeration result;
  // word -> stack colors (left halves); word valid as right half -> required
  // initial stack (read bottom to top).
  std::map<std::vector<int>, long long> left_count;
  std::map<std::vector<int>, long long> right_count;
  std::vector<int> word(n, 0);
  while (true) {
    // as a prefix: run forward keeping a color stack
    {
      std::vector<int> stack;
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        const int step = word[i];
        if (step == 0) continue;
        if (step <= s) {
          stack.push_back(step);
        } else if (!stack.empty() && stack.back() == step - s) {
          stack.pop_back();
        } else {
          ok = false;
        }
      }
      if (ok) {
        ++left_count[stack];
        ++result.prefix_counts[static_cast<int>(stack.size())];
      }
    }
    // as a suffix ending at height 0: run backward, down steps push the
    // color they will close, up steps must match the pending color
    {
      std::vector<int> need;  // required stack, bottom to top, built in reverse
      bool ok = true;
      for (int i = n - 1; i >= 0 && ok; --i) {
        const int step = word[i];
        if (step == 0) continue;
        if (step > s) {
          need.push_back(step - s);
        } else if (!need.empty() && need.back() == step) {
          need.pop_back();
        } else {
          ok = false;
        }
      }
      if (ok) {
        std::reverse(need.begin(), need.end());
        ++right_count[need];
      }
    }
    int i = 0;
    while (i < n && ++word[i] == alphabet) word[i++] = 0;
    if (i == n) break;
  }
  long double total = 0.0L;
  for (const auto& [stack, g] : left_count) {
    auto it = right_count.find(stack);
    if (it != right_count.end()) total += static_cast<long double>(g) * it->second;
  }
  for (const auto& [stack, g] : left_count) {
    auto it = right_count.find(stack);
    if (it == right_count.end()) continue;
    result.spectrum.push_back(
        static_cast<double>(static_cast<long double>(g) * it->second / total));
  }
  std::sort(result.spectrum.begin(), result.spectrum.end(), std::greater<>());
  return result;
}

}  // namespace entkit::oracle

#endif  // ENTKIT_ORACLES_HPP
