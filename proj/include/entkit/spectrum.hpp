#ifndef ENTKIT_SPECTRUM_HPP
#define ENTKIT_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace entkit {

/// A run of identical weights in a sorted Schmidt spectrum. `count` is kept
/// as a double so that combinatorially large degeneracies (e.g. binomial
/// multiplicities of tensor powers) stay representable.
struct SpectrumRun {
  double weight = 0.0;
  double count = 0.0;
};

inline constexpr double kWeightMergeTol = 1e-12;
inline constexpr double kMassTol = 1e-12;

/// Sorted, normalized probability vector (squared Schmidt coefficients) in
/// run-length form. `mass_deficit` tracks probability removed by truncation;
/// it is zero for exactly represented spectra.
class Spectrum {
 public:
  Spectrum() = default;

  static Spectrum from_weights(std::vector<double> weights) {
    std::vector<SpectrumRun> runs;
    runs.reserve(weights.size());
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0 || !std::isfinite(w))
        throw std::invalid_argument("Spectrum: weights must be finite and non-negative");
      if (w > 0.0) {
        runs.push_back({w, 1.0});
        total += w;
      }
    }
    if (runs.empty() || total <= 0.0)
      throw std::invalid_argument("Spectrum: at least one weight must be positive");
    for (auto& r : runs) r.weight /= total;
    return from_runs(std::move(runs), 0.0, 0.0, /*renormalize=*/false);
  }

  /// Builds from (weight, count) runs. Sorts, merges near-equal weights and
  /// checks the normalization invariant unless `renormalize` is set.
  static Spectrum from_runs(std::vector<SpectrumRun> runs, double deficit = 0.0,
                            double deficit_entries = 0.0, bool renormalize = false) {
    std::erase_if(runs, [](const SpectrumRun& r) { return r.count <= 0.0 || r.weight <= 0.0; });
    if (runs.empty()) throw std::invalid_argument("Spectrum: empty run list");
    std::sort(runs.begin(), runs.end(),
              [](const SpectrumRun& a, const SpectrumRun& b) { return a.weight > b.weight; });
    std::vector<SpectrumRun> merged;
    merged.reserve(runs.size());
    for (const auto& r : runs) {
      if (!merged.empty() &&
          merged.back().weight - r.weight <= kWeightMergeTol * merged.back().weight) {
        merged.back().count += r.count;
      } else {
        merged.push_back(r);
      }
    }
    double mass = 0.0;
    for (const auto& r : merged) mass += r.weight * r.count;
    if (renormalize) {
      for (auto& r : merged) r.weight /= mass;
    } else if (std::abs(mass + deficit - 1.0) > 1e-9) {
      throw std::invalid_argument("Spectrum: weights + deficit do not sum to 1");
    }
    Spectrum s;
    s.runs_ = std::move(merged);
    s.mass_deficit_ = deficit;
    s.deficit_entries_ = deficit_entries;
    return s;
  }

  const std::vector<SpectrumRun>& runs() const { return runs_; }
  double mass_deficit() const { return mass_deficit_; }
  double deficit_entries() const { return deficit_entries_; }
  bool exact() const { return mass_deficit_ == 0.0; }

  double total_count() const {
    double n = 0.0;
    for (const auto& r : runs_) n += r.count;
    return n;
  }

  double max_weight() const { return runs_.front().weight; }
  double min_weight() const { return runs_.back().weight; }

  bool is_pure() const { return runs_.size() == 1 && runs_[0].count == 1.0; }
  bool is_uniform() const { return runs_.size() == 1; }

  /// Expands to a flat weight list. Only for small spectra (tests, ED
  /// cross-checks); throws if the total count is unreasonably large.
  std::vector<double> expanded() const {
    double n = total_count();
    if (n > (1 << 22)) throw std::domain_error("Spectrum: too large to expand");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (const auto& r : runs_)
      for (double c = 0.0; c < r.count - 0.5; c += 1.0) out.push_back(r.weight);
    return out;
  }

  /// Drops the smallest entries until at most `delta` mass is removed, then
  /// enforces the run cap. Dropped mass accumulates into the deficit.
  void prune(double delta, std::size_t max_runs = kDefaultRunCap) {
    if (delta < 0.0 || delta >= 1.0) throw std::invalid_argument("prune: delta must be in [0,1)");
    double dropped = 0.0, dropped_entries = 0.0;
    while (runs_.size() > 1) {
      SpectrumRun& last = runs_.back();
      const double budget = delta - dropped;
      const double run_mass = last.weight * last.count;
      if (run_mass <= budget) {
        dropped += run_mass;
        dropped_entries += last.count;
        runs_.pop_back();
      } else {
        double n_drop = std::floor(budget / last.weight);
        if (n_drop >= 1.0 && n_drop < last.count) {
          dropped += n_drop * last.weight;
          dropped_entries += n_drop;
          last.count -= n_drop;
        }
        break;
      }
    }
    while (runs_.size() > max_runs) {
      dropped += runs_.back().weight * runs_.back().count;
      dropped_entries += runs_.back().count;
      runs_.pop_back();
    }
    mass_deficit_ += dropped;
    deficit_entries_ += dropped_entries;
  }

  static constexpr std::size_t kDefaultRunCap = std::size_t{1} << 20;

 private:
  std::vector<SpectrumRun> runs_;
  double mass_deficit_ = 0.0;
  double deficit_entries_ = 0.0;
};

inline Spectrum make_spectrum(std::vector<double> weights) {
  return Spectrum::from_weights(std::move(weights));
}

/// Point mass: the spectrum of a product state.
inline Spectrum point_mass() { return make_spectrum({1.0}); }

/// Uniform spectrum over `n` levels.
inline Spectrum uniform_spectrum(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_spectrum: n must be positive");
  return Spectrum::from_runs({{1.0 / static_cast<double>(n), static_cast<double>(n)}});
}

/// Powers spectrum [1/(1+lambda), lambda/(1+lambda)].
inline Spectrum powers_spectrum(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("powers_spectrum: lambda must be in (0,1)");
  return make_spectrum({1.0, lambda});
}

/// Tensor product of two spectra with tail pruning. The deficit of the result
/// is exactly the inputs' combined deficit plus the pruned mass.
inline Spectrum tensor(const Spectrum& a, const Spectrum& b, double prune_delta = 0.0,
                       std::size_t max_runs = Spectrum::kDefaultRunCap) {
  std::vector<SpectrumRun> prod;
  prod.reserve(a.runs().size() * b.runs().size());
  for (const auto& ra : a.runs())
    for (const auto& rb : b.runs()) prod.push_back({ra.weight * rb.weight, ra.count * rb.count});
  const double d = a.mass_deficit() + b.mass_deficit() - a.mass_deficit() * b.mass_deficit();
  const double de =
      a.deficit_entries() * std::max(1.0, b.total_count()) +
      b.deficit_entries() * std::max(1.0, a.total_count());
  // combined runs still sum to (1-da)(1-db); from_runs checks against 1-d.
  Spectrum s = Spectrum::from_runs(std::move(prod), d, de);
  s.prune(prune_delta, max_runs);
  return s;
}

/// k-fold tensor power with per-step pruning.
inline Spectrum tensor_power(const Spectrum& s, int k, double prune_delta = 1e-12,
                             std::size_t max_runs = Spectrum::kDefaultRunCap) {
  if (k < 0) throw std::invalid_argument("tensor_power: k must be non-negative");
  Spectrum out = point_mass();
  for (int i = 0; i < k; ++i) out = tensor(out, s, prune_delta, max_runs);
  return out;
}

struct FidelityResult {
  double value = 0.0;
  double error_bound = 0.0;  // slack from the inputs' mass deficits
};

/// Sorted fidelity sum_i sqrt(p_i q_i) over the descending-sorted, zero-padded
/// weight lists. This is the maximal overlap of the two purifications under
/// local unitaries.
inline FidelityResult sorted_fidelity(const Spectrum& p, const Spectrum& q) {
  long double f = 0.0L;
  std::size_t i = 0, j = 0;
  double rem_i = p.runs().empty() ? 0.0 : p.runs()[0].count;
  double rem_j = q.runs().empty() ? 0.0 : q.runs()[0].count;
  while (i < p.runs().size() && j < q.runs().size()) {
    const double take = std::min(rem_i, rem_j);
    f += static_cast<long double>(take) *
         std::sqrt(static_cast<long double>(p.runs()[i].weight) * q.runs()[j].weight);
    rem_i -= take;
    rem_j -= take;
    if (rem_i <= 0.0 && ++i < p.runs().size()) rem_i = p.runs()[i].count;
    if (rem_j <= 0.0 && ++j < q.runs().size()) rem_j = q.runs()[j].count;
  }
  FidelityResult r;
  r.value = std::min(1.0, static_cast<double>(f));
  r.error_bound = std::sqrt(p.mass_deficit()) + std::sqrt(q.mass_deficit());
  return r;
}

enum class LogBase { nats, bits };

struct EntropyResult {
  double value = 0.0;
  double truncation_bound = 0.0;  // upper bound on the truncated tail's contribution
};

/// Shannon entropy -sum p log p of the spectrum in the requested base.
inline EntropyResult entropy(const Spectrum& s, LogBase base = LogBase::nats) {
  long double h = 0.0L;
  for (const auto& r : s.runs())
    h -= static_cast<long double>(r.count) * r.weight * std::log(static_cast<long double>(r.weight));
  EntropyResult out;
  out.value = static_cast<double>(h);
  const double d = s.mass_deficit();
  if (d > 0.0) {
    // n entries of total mass d have entropy at most d*log(n/d).
    const double n = std::max(1.0, s.deficit_entries());
    out.truncation_bound = d * std::log(std::max(n / d, std::exp(1.0)));
  }
  if (base == LogBase::bits) {
    out.value /= std::numbers::ln2;
    out.truncation_bound /= std::numbers::ln2;
  }
  return out;
}

/// True iff p majorizes q: all partial sums of the sorted, zero-padded weight
/// lists of p dominate those of q. Requires exact spectra.
inline bool majorizes(const Spectrum& p, const Spectrum& q) {
  if (p.mass_deficit() > 0.0 || q.mass_deficit() > 0.0)
    throw std::invalid_argument("majorizes: spectra with nonzero mass_deficit are unsupported");
  // Both cumulative-sum curves are piecewise linear in the entry index with
  // kinks only at run boundaries, so checking the union of boundaries is exact.
  long double cum_p = 0.0L, cum_q = 0.0L;
  long double pos = 0.0L;
  std::size_t i = 0, j = 0;
  double rem_i = p.runs()[0].count, rem_j = q.runs()[0].count;
  while (true) {
    const double wi = i < p.runs().size() ? p.runs()[i].weight : 0.0;
    const double wj = j < q.runs().size() ? q.runs()[j].weight : 0.0;
    if (i >= p.runs().size() && j >= q.runs().size()) break;
    double step;
    if (i >= p.runs().size())
      step = rem_j;
    else if (j >= q.runs().size())
      step = rem_i;
    else
      step = std::min(rem_i, rem_j);
    cum_p += static_cast<long double>(step) * wi;
    cum_q += static_cast<long double>(step) * wj;
    pos += step;
    if (cum_p < cum_q - static_cast<long double>(kMassTol)) return false;
    if (i < p.runs().size()) {
      rem_i -= step;
      if (rem_i <= 0.0 && ++i < p.runs().size()) rem_i = p.runs()[i].count;
    }
    if (j < q.runs().size()) {
      rem_j -= step;
      if (rem_j <= 0.0 && ++j < q.runs().size()) rem_j = q.runs()[j].count;
    }
  }
  return true;
}

/// Entrywise equality of the sorted weight lists within `tol`.
inline bool spectra_equal(const Spectrum& a, const Spectrum& b, double tol = 1e-10) {
  std::size_t i = 0, j = 0;
  double rem_i = a.runs()[0].count, rem_j = b.runs()[0].count;
  while (i < a.runs().size() && j < b.runs().size()) {
    if (std::abs(a.runs()[i].weight - b.runs()[j].weight) > tol) return false;
    const double take = std::min(rem_i, rem_j);
    rem_i -= take;
    rem_j -= take;
    if (rem_i <= 0.0 && ++i < a.runs().size()) rem_i = a.runs()[i].count;
    if (rem_j <= 0.0 && ++j < b.runs().size()) rem_j = b.runs()[j].count;
  }
  return i >= a.runs().size() && j >= b.runs().size();
}

}  // namespace entkit

#endif  // ENTKIT_SPECTRUM_HPP
