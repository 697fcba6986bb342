#ifndef ENTKIT_LOCC_HPP
#define ENTKIT_LOCC_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "entkit/spectrum.hpp"

namespace entkit {

/// Result of an LOCC conversion/distillation query.
struct ConversionReport {
  bool feasible_exact = false;
  double max_fidelity = 0.0;
  int bell_count = 0;
  std::optional<double> witness;  // truncation position used by the fidelity optimizer
};

/// One-shot exact LOCC convertibility of pure states: the source spectrum
/// must be majorized by the target spectrum.
inline bool convertible(const Spectrum& source, const Spectrum& target) {
  return majorizes(target, source);
}

namespace detail {

/// Entry positions where either run list changes weight; the conversion
/// optimizer only needs to truncate at these points.
inline std::vector<double> truncation_candidates(const Spectrum& p, const Spectrum& q) {
  std::vector<double> pos{0.0};
  double c = 0.0;
  for (const auto& r : p.runs()) { c += r.count; pos.push_back(c); }
  c = 0.0;
  for (const auto& r : q.runs()) { c += r.count; pos.push_back(c); }
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  return pos;
}

/// Runs of the first `l` entries (prefix) of s, together with the prefix mass.
inline std::pair<std::vector<SpectrumRun>, double> prefix_runs(const Spectrum& s, double l) {
  std::vector<SpectrumRun> out;
  double mass = 0.0, used = 0.0;
  for (const auto& r : s.runs()) {
    if (used >= l) break;
    const double take = std::min(r.count, l - used);
    out.push_back({r.weight, take});
    mass += r.weight * take;
    used += take;
  }
  return {out, mass};
}

/// Runs of s after skipping the first `l` entries.
inline std::vector<SpectrumRun> suffix_runs(const Spectrum& s, double l) {
  std::vector<SpectrumRun> out;
  double used = 0.0;
  for (const auto& r : s.runs()) {
    if (used + r.count <= l) { used += r.count; continue; }
    const double skip = std::max(0.0, l - used);
    out.push_back({r.weight, r.count - skip});
    used += r.count;
  }
  return out;
}

}  // namespace detail

struct ConversionFidelity {
  double fidelity = 0.0;
  std::optional<double> witness;
};

/// Optimal fidelity of an LOCC conversion from source p to target q: the
/// best sorted overlap with q over all spectra r reachable from p. Candidate
/// optima keep a prefix of p and carry q's renormalized tail; each candidate
/// is feasibility-checked by majorization.
inline ConversionFidelity max_conversion_fidelity_report(const Spectrum& p, const Spectrum& q) {
  if (p.mass_deficit() > 0.0 || q.mass_deficit() > 0.0)
    throw std::invalid_argument("max_conversion_fidelity: requires exact spectra");
  ConversionFidelity best;
  // l = dim(p): r = p itself, always reachable.
  best.fidelity = sorted_fidelity(p, q).value;
  best.witness = p.total_count();
  for (double l : detail::truncation_candidates(p, q)) {
    auto [head, head_mass] = detail::prefix_runs(p, l);
    const auto q_head = detail::prefix_runs(q, l);
    const double q_tail_mass = 1.0 - q_head.second;
    std::vector<SpectrumRun> runs = head;
    if (q_tail_mass > 1e-15) {
      const double scale = (1.0 - head_mass) / q_tail_mass;
      if (scale <= 0.0) continue;
      for (auto r : detail::suffix_runs(q, l)) {
        r.weight *= scale;
        runs.push_back(r);
      }
    } else if (head_mass < 1.0 - 1e-12) {
      continue;  // p mass left over but q has no tail to carry it
    }
    Spectrum r;
    try {
      r = Spectrum::from_runs(std::move(runs));
    } catch (const std::invalid_argument&) {
      continue;
    }
    if (!majorizes(r, p)) continue;
    const double f = sorted_fidelity(r, q).value;
    if (f > best.fidelity) {
      best.fidelity = f;
      best.witness = l;
    }
  }
  return best;
}

inline double max_conversion_fidelity(const Spectrum& p, const Spectrum& q) {
  return max_conversion_fidelity_report(p, q).fidelity;
}

inline constexpr int kMaxBellCount = 1000;  // 2^k must stay a finite double

/// Largest k such that p converts to the maximally entangled state of
/// Schmidt rank 2^k with fidelity >= 1 - eps.
inline int distillable_bells(const Spectrum& p, double eps, int cap = kMaxBellCount) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("distillable_bells: eps must be in (0,1)");
  int bells = 0;
  for (int k = 1; k <= cap; ++k) {
    const Spectrum target =
        Spectrum::from_runs({{std::pow(2.0, -k), std::pow(2.0, k)}});
    if (max_conversion_fidelity(p, target) >= 1.0 - eps)
      bells = k;
    else
      break;
  }
  return bells;
}

/// Full report for a source -> target query at error budget eps.
inline ConversionReport conversion_report(const Spectrum& p, const Spectrum& q, double eps) {
  ConversionReport rep;
  rep.feasible_exact = convertible(p, q);
  const ConversionFidelity cf = max_conversion_fidelity_report(p, q);
  rep.max_fidelity = cf.fidelity;
  rep.witness = cf.witness;
  rep.bell_count = distillable_bells(p, eps);
  return rep;
}

/// Smallest index L0 such that every tested family member from L0 on reaches
/// the target with fidelity >= 1 - eps.
inline std::optional<std::size_t> finite_size_distillation_check(
    const std::vector<Spectrum>& family, const Spectrum& target, double eps) {
  if (family.empty())
    throw std::invalid_argument("finite_size_distillation_check: empty family");
  if (!(eps > 0.0)) throw std::invalid_argument("finite_size_distillation_check: eps must be > 0");
  std::optional<std::size_t> result;
  for (std::size_t i = family.size(); i-- > 0;) {
    if (max_conversion_fidelity(family[i], target) >= 1.0 - eps)
      result = i;
    else
      break;
  }
  return result;
}

}  // namespace entkit

#endif  // ENTKIT_LOCC_HPP
