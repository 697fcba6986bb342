#ifndef ENTKIT_FACTOR_TYPE_HPP
#define ENTKIT_FACTOR_TYPE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entkit/spectrum.hpp"

namespace entkit {

enum class FactorKind {
  I_finite,
  I_infinite,
  II_1,
  II_infinite,
  III_0,  // representable for completeness, never produced by the classifier
  III_lambda,
  III_1,
  Undetermined,
};

struct RationalityOptions {
  int depth = 20;
  double tol = 1e-12;
  long long max_denominator = 1'000'000;
  // A convergent p/q of a generic irrational has error ~ 1/q^2, so a flat
  // tolerance would accept junk at large q. A true rational computed in
  // doubles sits at relative error ~1e-16 regardless of q, hence the
  // quality gate err * q^2 < quality separates the two by orders of
  // magnitude.
  double quality = 1e-6;
};

/// Classification label of an (approximately finite-dimensional) factor.
struct FactorType {
  FactorKind kind = FactorKind::Undetermined;
  std::uint64_t dim = 0;    // for I_finite
  double lambda = 0.0;      // for III_lambda, in (0,1)
  std::string reason;       // for Undetermined
  RationalityOptions detection;  // bounds under which "irrational" was decided

  static FactorType type_i(std::uint64_t n) { return {FactorKind::I_finite, n}; }
  static FactorType i_infinite() { return {FactorKind::I_infinite}; }
  static FactorType ii_1() { return {FactorKind::II_1}; }
  static FactorType ii_infinite() { return {FactorKind::II_infinite}; }
  static FactorType iii_lambda(double l) { return {FactorKind::III_lambda, 0, l}; }
  static FactorType iii_1() { return {FactorKind::III_1}; }
  static FactorType undetermined(std::string why) {
    return {FactorKind::Undetermined, 0, 0.0, std::move(why)};
  }

  bool is_type_iii() const {
    return kind == FactorKind::III_0 || kind == FactorKind::III_lambda ||
           kind == FactorKind::III_1;
  }
};

inline bool same_subtype(const FactorType& a, const FactorType& b, double lambda_tol = 1e-9) {
  if (a.kind != b.kind) return false;
  if (a.kind == FactorKind::III_lambda) return std::abs(a.lambda - b.lambda) <= lambda_tol;
  return true;
}

inline std::string to_string(const FactorType& t) {
  switch (t.kind) {
    case FactorKind::I_finite: return "I_" + std::to_string(t.dim);
    case FactorKind::I_infinite: return "I_inf";
    case FactorKind::II_1: return "II_1";
    case FactorKind::II_infinite: return "II_inf";
    case FactorKind::III_0: return "III_0";
    case FactorKind::III_lambda: return "III_lambda(" + std::to_string(t.lambda) + ")";
    case FactorKind::III_1: return "III_1";
    case FactorKind::Undetermined: return "Undetermined(" + t.reason + ")";
  }
  return "?";
}

/// Continued-fraction rational approximation of x/y. Returns coprime (p,q)
/// with |x/y - p/q| < tol and q within the denominator bound, or nullopt if
/// no such convergent exists up to the given depth.
inline std::optional<std::pair<long long, long long>> rationality_test(
    double x, double y, RationalityOptions opt = {}) {
  if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("rationality_test: need x,y > 0");
  const double target = x / y;
  auto accept = [&](long long p, long long q) {
    if (q < 1 || q > opt.max_denominator) return false;
    const double err = std::abs(target - static_cast<double>(p) / static_cast<double>(q));
    return err < opt.tol &&
           err * static_cast<double>(q) * static_cast<double>(q) < opt.quality;
  };
  long double value = target;
  long long p_prev = 1, q_prev = 0;  // convergents p/q
  long long p = static_cast<long long>(std::floor(value)), q = 1;
  value -= std::floor(value);
  for (int step = 0; step < opt.depth; ++step) {
    if (accept(p, q)) return std::make_pair(p, q);
    if (value < 1e-18L) break;
    value = 1.0L / value;
    const long long a = static_cast<long long>(std::floor(value));
    value -= std::floor(value);
    const long long p_next = a * p + p_prev;
    const long long q_next = a * q + q_prev;
    p_prev = p; q_prev = q;
    p = p_next; q = q_next;
    if (q > opt.max_denominator && q_prev > opt.max_denominator) break;
  }
  if (accept(p, q)) return std::make_pair(p, q);
  return std::nullopt;
}

struct RatioGroup {
  enum class Structure { trivial, cyclic, dense };
  Structure structure = Structure::trivial;
  double step = 0.0;                // cyclic generator of all log-ratios
  std::vector<double> generators;   // deduplicated positive log-ratios
};

inline constexpr double kStepTol = 1e-9;

namespace detail {

/// Common real generator of a set of positive reals, or nullopt if some pair
/// is (numerically) incommensurate. Euclidean reduction driven by the
/// continued-fraction rationality test.
inline std::optional<double> common_step(const std::vector<double>& gens,
                                         const RationalityOptions& opt) {
  if (gens.empty()) return std::nullopt;
  double g = gens.front();
  for (std::size_t i = 1; i < gens.size(); ++i) {
    const auto pq = rationality_test(gens[i], g, opt);
    if (!pq || pq->first <= 0) return std::nullopt;
    // gens[i]/g = p/q with p,q coprime => gcd = gens[i]/p = g/q.
    g = gens[i] / static_cast<double>(pq->first);
  }
  for (double x : gens) {
    const double k = std::round(x / g);
    if (std::abs(x - k * g) > kStepTol * std::max(1.0, std::abs(x))) return std::nullopt;
  }
  return g;
}

}  // namespace detail

/// Multiplicative structure of the spectrum's weight ratios, encoded through
/// the additive group generated by the pairwise log-ratios.
inline RatioGroup ratio_group(const Spectrum& s, RationalityOptions opt = {}) {
  if (s.mass_deficit() > 0.0)
    throw std::invalid_argument("ratio_group: requires an exact spectrum");
  RatioGroup g;
  const auto& runs = s.runs();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      const double r = std::log(runs[i].weight / runs[j].weight);
      bool known = false;
      for (double e : g.generators)
        if (std::abs(e - r) <= kStepTol) { known = true; break; }
      if (!known) g.generators.push_back(r);
    }
  }
  if (g.generators.empty()) {
    g.structure = RatioGroup::Structure::trivial;
    return g;
  }
  if (auto step = detail::common_step(g.generators, opt)) {
    g.structure = RatioGroup::Structure::cyclic;
    g.step = *step;
  } else {
    g.structure = RatioGroup::Structure::dense;
  }
  return g;
}

/// Factor type of the infinite tensor product with constant one-site spectrum
/// `s`. With `ambient_properly_infinite`, finite type I is promoted to
/// I_inf and II_1 to II_inf (tensoring with B(H) of an infinite interior).
inline FactorType classify_itpfi(const Spectrum& s, bool ambient_properly_infinite = false,
                                 RationalityOptions opt = {}) {
  if (s.mass_deficit() > 0.0)
    throw std::invalid_argument("classify_itpfi: requires an exact spectrum");
  FactorType t;
  if (s.is_pure()) {
    t = ambient_properly_infinite ? FactorType::i_infinite() : FactorType::type_i(1);
  } else if (s.is_uniform()) {
    t = ambient_properly_infinite ? FactorType::ii_infinite() : FactorType::ii_1();
  } else {
    const RatioGroup g = ratio_group(s, opt);
    if (g.structure == RatioGroup::Structure::cyclic) {
      t = FactorType::iii_lambda(std::exp(-g.step));
    } else {
      t = FactorType::iii_1();
    }
  }
  t.detection = opt;
  return t;
}

/// Type of the tensor product of two factors, per the standard composition
/// table for approximately finite-dimensional factors.
inline FactorType compose(const FactorType& a, const FactorType& b,
                          RationalityOptions opt = {}) {
  if (a.kind == FactorKind::Undetermined || b.kind == FactorKind::Undetermined)
    return FactorType::undetermined("compose with undetermined input");
  // Finite type I is absorbed by anything that is not finite type I.
  if (a.kind == FactorKind::I_finite && b.kind == FactorKind::I_finite)
    return FactorType::type_i(a.dim * b.dim);
  if (a.kind == FactorKind::I_finite) return b;
  if (b.kind == FactorKind::I_finite) return a;
  // III_1 absorbs everything.
  if (a.kind == FactorKind::III_1 || b.kind == FactorKind::III_1) return FactorType::iii_1();
  if (a.kind == FactorKind::III_lambda && b.kind == FactorKind::III_lambda) {
    const double x = std::log(1.0 / a.lambda);
    const double y = std::log(1.0 / b.lambda);
    if (auto step = detail::common_step({x, y}, opt)) {
      FactorType t = FactorType::iii_lambda(std::exp(-*step));
      t.detection = opt;
      return t;
    }
    FactorType t = FactorType::iii_1();
    t.detection = opt;
    return t;
  }
  // III_lambda absorbs types I and II.
  if (a.kind == FactorKind::III_lambda) return a;
  if (b.kind == FactorKind::III_lambda) return b;
  if (a.kind == FactorKind::III_0 || b.kind == FactorKind::III_0)
    return FactorType::undetermined("III_0 composition out of scope");
  // Remaining: {I_inf, II_1, II_inf}.
  if (a.kind == FactorKind::II_infinite || b.kind == FactorKind::II_infinite)
    return FactorType::ii_infinite();
  if (a.kind == FactorKind::II_1 && b.kind == FactorKind::II_1) return FactorType::ii_1();
  if (a.kind == FactorKind::II_1 || b.kind == FactorKind::II_1)
    return FactorType::ii_infinite();  // I_inf x II_1
  return FactorType::i_infinite();     // I_inf x I_inf
}

/// Resource ordering of infinite factor types:
/// I_inf < II_inf < III_0 < III_lambda < III_1 (finite types below their
/// infinite counterparts). Larger rank means more LOCC resourcefulness.
inline int resource_rank(const FactorType& t) {
  switch (t.kind) {
    case FactorKind::I_finite: return 0;
    case FactorKind::I_infinite: return 1;
    case FactorKind::II_1: return 2;
    case FactorKind::II_infinite: return 3;
    case FactorKind::III_0: return 4;
    case FactorKind::III_lambda: return 5;
    case FactorKind::III_1: return 6;
    case FactorKind::Undetermined: return -1;
  }
  return -1;
}

}  // namespace entkit

#endif  // ENTKIT_FACTOR_TYPE_HPP
