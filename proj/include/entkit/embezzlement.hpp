#ifndef ENTKIT_EMBEZZLEMENT_HPP
#define ENTKIT_EMBEZZLEMENT_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "entkit/spectrum.hpp"

namespace entkit {

/// van Dam-Hayden spectrum: weights proportional to 1/j, j = 1..N.
inline Spectrum vdh_spectrum(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("vdh_spectrum: N must be positive");
  std::vector<SpectrumRun> runs;
  runs.reserve(n);
  long double norm = 0.0L;
  for (std::uint64_t j = 1; j <= n; ++j) norm += 1.0L / j;
  for (std::uint64_t j = 1; j <= n; ++j)
    runs.push_back({static_cast<double>(1.0L / (j * norm)), 1.0});
  return Spectrum::from_runs(std::move(runs));
}

struct ErrorEstimate {
  double value = 0.0;
  double bound = 0.0;  // slack from mass deficits
};

/// Residual local-unitary error when extracting `target` from `resource`
/// while returning the resource: sqrt(2 - 2 F(resource, resource (x) target)).
/// Vector-norm units, range [0, sqrt(2)].
inline ErrorEstimate embezzlement_error(const Spectrum& resource, const Spectrum& target) {
  const Spectrum joint = tensor(resource, target);
  const FidelityResult f = sorted_fidelity(resource, joint);
  ErrorEstimate e;
  e.value = std::sqrt(std::max(0.0, 2.0 - 2.0 * f.value));
  e.bound = f.error_bound;
  return e;
}

struct KappaOptions {
  int grid = 64;             // coarse grid resolution over the target simplex
  double refine_tol = 1e-6;  // golden-section refinement width (n = 2 only)
  double prune = 1e-12;
  std::size_t max_runs = Spectrum::kDefaultRunCap;
  double deficit_bound = 1e-9;  // resource truncation above this flags the result
  std::uint64_t seed = 12345;   // Dirichlet sampling seed for n > 2
};

struct KappaEstimate {
  double worst_error = 0.0;     // worst-case embezzlement_error, vector units in [0, sqrt(2)]
  double kappa = 0.0;           // same worst case in trace-distance units, 2*sqrt(1-F^2), in [0,2]
  double worst_fidelity = 1.0;  // the minimizing joint fidelity
  std::vector<double> worst_target;
  int copies = 0;
  bool reliable = true;
  double resource_deficit = 0.0;
};

/// Worst-case embezzlement error of the k-fold tensor power of `rho` over
/// dimension-n targets. The worst case is searched on a deterministic grid
/// (with golden-section refinement for n = 2) and both norm conventions of
/// the resulting error are reported: the vector-distance value and the
/// trace-distance value 2*sqrt(1-F^2) used by the kappa_max formula.
inline KappaEstimate kappa_estimate(const Spectrum& rho, int k, int n, KappaOptions opt = {}) {
  if (k < 1) throw std::invalid_argument("kappa_estimate: k must be >= 1");
  if (n < 2) throw std::invalid_argument("kappa_estimate: n must be >= 2");
  const Spectrum resource = tensor_power(rho, k, opt.prune, opt.max_runs);

  double worst_f = 1.0;
  std::vector<double> worst_target;
  auto consider = [&](const std::vector<double>& t) {
    const Spectrum joint = tensor(resource, make_spectrum(std::vector<double>(t)),
                                  opt.prune, opt.max_runs);
    const double f = sorted_fidelity(resource, joint).value;
    if (f < worst_f) {
      worst_f = f;
      worst_target = t;
    }
  };

  if (n == 2) {
    for (int i = 0; i < opt.grid; ++i) {
      const double q = 0.5 + 0.5 * i / (opt.grid - 1);
      consider({q, 1.0 - q});
    }
    // golden-section refinement around the coarse minimum of the fidelity
    const double spacing = 0.5 / (opt.grid - 1);
    double a = std::max(0.5, worst_target[0] - spacing);
    double b = std::min(1.0, worst_target[0] + spacing);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto f_at = [&](double q) {
      const Spectrum joint =
          tensor(resource, make_spectrum({q, 1.0 - q}), opt.prune, opt.max_runs);
      return sorted_fidelity(resource, joint).value;
    };
    while (b - a > opt.refine_tol) {
      const double c = b - inv_phi * (b - a);
      const double d = a + inv_phi * (b - a);
      if (f_at(c) < f_at(d)) b = d; else a = c;
    }
    consider({(a + b) / 2.0, 1.0 - (a + b) / 2.0});
  } else {
    // Dirichlet-grid sampling with a fixed seed: deterministic worst case.
    std::mt19937_64 gen(opt.seed);
    std::exponential_distribution<double> exp_dist(1.0);
    const int samples = opt.grid * opt.grid;
    for (int i = 0; i < samples; ++i) {
      std::vector<double> t(static_cast<std::size_t>(n));
      double total = 0.0;
      for (auto& x : t) { x = exp_dist(gen); total += x; }
      for (auto& x : t) x /= total;
      consider(t);
    }
    consider(std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));  // maximally entangled
  }

  KappaEstimate est;
  est.worst_fidelity = worst_f;
  est.worst_error = std::sqrt(std::max(0.0, 2.0 - 2.0 * worst_f));
  est.kappa = 2.0 * std::sqrt(std::max(0.0, 1.0 - worst_f * worst_f));
  est.worst_target = std::move(worst_target);
  est.copies = k;
  est.resource_deficit = resource.mass_deficit();
  est.reliable = resource.mass_deficit() <= opt.deficit_bound;
  return est;
}

/// Reference value of the worst embezzlement capability for a type III_lambda
/// sector (trace-distance units); 0 at lambda = 1.
inline double kappa_max_formula(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("kappa_max_formula: lambda must be in (0,1]");
  const double s = std::sqrt(lambda);
  return 2.0 * (1.0 - s) / (1.0 + s);
}

/// Smallest family index L such that the worst-case embezzlement error for
/// dimension-n targets is <= eps at L and at every tested later index.
inline std::optional<std::size_t> embezzling_family_check(const std::vector<Spectrum>& family,
                                                          int n, double eps,
                                                          KappaOptions opt = {}) {
  if (family.empty()) throw std::invalid_argument("embezzling_family_check: empty family");
  if (!(eps > 0.0)) throw std::invalid_argument("embezzling_family_check: eps must be > 0");
  std::vector<double> errs;
  errs.reserve(family.size());
  for (const auto& s : family) {
    KappaEstimate e = kappa_estimate(s, 1, n, opt);
    errs.push_back(e.worst_error);
  }
  std::optional<std::size_t> result;
  for (std::size_t i = family.size(); i-- > 0;) {
    if (errs[i] <= eps) result = i; else break;
  }
  return result;
}

}  // namespace entkit

#endif  // ENTKIT_EMBEZZLEMENT_HPP
