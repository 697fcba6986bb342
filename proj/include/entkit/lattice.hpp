#ifndef ENTKIT_LATTICE_HPP
#define ENTKIT_LATTICE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "entkit/factor_type.hpp"
#include "entkit/spectrum.hpp"

namespace entkit {

enum class Boundary { open, periodic };

/// An edge pairs virtual spin slot 2a of a site with slot 2a+1 of its
/// positive-axis-a neighbor.
struct LatticeEdge {
  std::size_t site_a = 0;
  std::size_t slot_a = 0;
  std::size_t site_b = 0;
  std::size_t slot_b = 0;
  std::size_t axis = 0;
};

/// Hypercubic lattice of sites subdivided into 2D virtual spins of dimension
/// m each; every edge carries the rank-1 projector onto the purification of
/// rho. Unpaired (dangling) virtual spins at open boundaries are clamped to
/// the first basis state.
struct LatticeModel {
  std::size_t dimension = 1;
  std::vector<std::size_t> extent;
  Boundary boundary = Boundary::open;
  std::size_t m = 2;
  Spectrum rho;
  std::vector<LatticeEdge> edges;
  std::size_t site_count = 0;

  std::size_t degree() const { return 2 * dimension; }
  std::size_t spins_per_site() const { return 2 * dimension; }
  std::size_t spin_count() const { return site_count * spins_per_site(); }
  std::size_t global_spin(std::size_t site, std::size_t slot) const {
    return site * spins_per_site() + slot;
  }
};

struct Region {
  std::vector<std::size_t> sites;
};

namespace detail {

inline std::size_t site_index(const std::vector<std::size_t>& coord,
                              const std::vector<std::size_t>& extent) {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < extent.size(); ++a) idx = idx * extent[a] + coord[a];
  return idx;
}

inline bool checked_pow(std::size_t base, std::size_t exp, std::size_t& out) {
  out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > std::size_t(-1) / base) return false;
    out *= base;
  }
  return true;
}

}  // namespace detail

inline LatticeModel build_model(std::size_t dimension, std::vector<std::size_t> extent,
                                Boundary boundary, std::size_t m, Spectrum rho) {
  if (dimension == 0 || extent.size() != dimension)
    throw std::invalid_argument("build_model: extent must have one entry per axis");
  if (m < 2) throw std::invalid_argument("build_model: m must be >= 2");
  if (!rho.exact()) throw std::invalid_argument("build_model: rho must be an exact spectrum");
  if (rho.total_count() > static_cast<double>(m))
    throw std::invalid_argument("build_model: rho has more eigenvalues than m");
  LatticeModel model;
  model.dimension = dimension;
  model.extent = extent;
  model.boundary = boundary;
  model.m = m;
  model.rho = std::move(rho);
  model.site_count = 1;
  for (std::size_t a = 0; a < dimension; ++a) {
    if (extent[a] == 0) throw std::invalid_argument("build_model: zero extent");
    if (boundary == Boundary::periodic && extent[a] < 2)
      throw std::invalid_argument("build_model: periodic axes need extent >= 2");
    model.site_count *= extent[a];
  }
  std::vector<std::size_t> coord(dimension, 0);
  for (std::size_t site = 0; site < model.site_count; ++site) {
    for (std::size_t a = 0; a < dimension; ++a) {
      if (coord[a] + 1 < extent[a] || boundary == Boundary::periodic) {
        std::vector<std::size_t> nb = coord;
        nb[a] = (coord[a] + 1) % extent[a];
        model.edges.push_back({site, 2 * a, detail::site_index(nb, extent), 2 * a + 1, a});
      }
    }
    for (std::size_t a = dimension; a-- > 0;) {
      if (++coord[a] < extent[a]) break;
      coord[a] = 0;
    }
  }
  if (model.edges.empty())
    throw std::invalid_argument("build_model: extent too small to contain an edge");
  return model;
}

/// Global spin indices not covered by any edge (open boundary only).
inline std::vector<std::size_t> dangling_spins(const LatticeModel& model) {
  std::vector<bool> paired(model.spin_count(), false);
  for (const auto& e : model.edges) {
    paired[model.global_spin(e.site_a, e.slot_a)] = true;
    paired[model.global_spin(e.site_b, e.slot_b)] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t g = 0; g < paired.size(); ++g)
    if (!paired[g]) out.push_back(g);
  return out;
}

/// Rank-1 edge projector |psi><psi| on two m-dimensional spins,
/// psi = sum_i sqrt(rho_i) |ii>.
inline Eigen::MatrixXd pair_projector_local(const Spectrum& rho, std::size_t m) {
  std::vector<double> w;
  for (const auto& r : rho.runs())
    for (double c = 0; c < r.count; c += 1.0) w.push_back(r.weight);
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m * m));
  for (std::size_t i = 0; i < w.size(); ++i)
    psi(static_cast<Eigen::Index>(i * m + i)) = std::sqrt(w[i]);
  return psi * psi.transpose();
}

/// Embeds the rho pair projector on two arbitrary global spins of the full
/// lattice Hilbert space. Test hook: passing spins shared between two calls
/// produces non-commuting projectors.
inline Eigen::MatrixXd projector_on_spins(const LatticeModel& model, std::size_t g1,
                                          std::size_t g2, std::size_t dim_cap = 1u << 12) {
  if (g1 == g2 || g1 >= model.spin_count() || g2 >= model.spin_count())
    throw std::invalid_argument("projector_on_spins: invalid spin pair");
  std::size_t dim;
  if (!detail::checked_pow(model.m, model.spin_count(), dim) || dim > dim_cap)
    throw std::invalid_argument("projector_on_spins: dimension exceeds cap");
  const Eigen::MatrixXd local = pair_projector_local(model.rho, model.m);
  const std::size_t n = model.spin_count();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
  // digit g is most significant for small g
  auto digit = [&](std::size_t state, std::size_t g) {
    std::size_t p = 1;
    for (std::size_t i = g + 1; i < n; ++i) p *= model.m;
    return (state / p) % model.m;
  };
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      bool same = true;
      for (std::size_t g = 0; g < n; ++g) {
        if (g == g1 || g == g2) continue;
        if (digit(r, g) != digit(c, g)) { same = false; break; }
      }
      if (!same) continue;
      const std::size_t lr = digit(r, g1) * model.m + digit(r, g2);
      const std::size_t lc = digit(c, g1) * model.m + digit(c, g2);
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          local(static_cast<Eigen::Index>(lr), static_cast<Eigen::Index>(lc));
    }
  }
  return out;
}

inline Eigen::MatrixXd edge_projector_full(const LatticeModel& model, std::size_t edge_index,
                                           std::size_t dim_cap = 1u << 12) {
  const auto& e = model.edges.at(edge_index);
  return projector_on_spins(model, model.global_spin(e.site_a, e.slot_a),
                            model.global_spin(e.site_b, e.slot_b), dim_cap);
}

/// All edge projectors commute. Structural reason: distinct edges act on
/// disjoint virtual-spin pairs. When the full dimension fits under the cap
/// the commutators are also checked numerically.
inline bool commuting_check(const LatticeModel& model, std::size_t dim_cap = 1u << 12) {
  std::set<std::size_t> seen;
  for (const auto& e : model.edges) {
    if (!seen.insert(model.global_spin(e.site_a, e.slot_a)).second) return false;
    if (!seen.insert(model.global_spin(e.site_b, e.slot_b)).second) return false;
  }
  std::size_t dim;
  if (detail::checked_pow(model.m, model.spin_count(), dim) && dim <= dim_cap) {
    std::vector<Eigen::MatrixXd> ps;
    for (std::size_t i = 0; i < model.edges.size(); ++i)
      ps.push_back(edge_projector_full(model, i, dim_cap));
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j)
        if (((ps[i] * ps[j] - ps[j] * ps[i]).cwiseAbs().maxCoeff()) > 1e-12) return false;
  }
  return true;
}

struct EnergyLevel {
  double energy = 0.0;
  std::uint64_t multiplicity = 0;
};

struct ExactEnergyLevel {
  long long energy = 0;
  boost::multiprecision::cpp_int multiplicity;
};

namespace detail {

/// H = -sum_e P_e restricted to the paired-spin sector (dangling spins are
/// clamped and H acts trivially on them). Paired spins are ordered edge by
/// edge, which keeps every projector a contiguous kron factor.
inline Eigen::MatrixXd paired_hamiltonian(const LatticeModel& model, std::size_t dim_cap) {
  std::size_t dim;
  if (!checked_pow(model.m * model.m, model.edges.size(), dim) || dim > dim_cap)
    throw std::invalid_argument("paired_hamiltonian: dimension exceeds cap");
  const Eigen::MatrixXd p = pair_projector_local(model.rho, model.m);
  const std::size_t block = model.m * model.m;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(dim));
  for (std::size_t e = 0; e < model.edges.size(); ++e) {
    std::size_t left = 1, right = 1;
    for (std::size_t i = 0; i < e; ++i) left *= block;
    for (std::size_t i = e + 1; i < model.edges.size(); ++i) right *= block;
    for (std::size_t l = 0; l < left; ++l)
      for (std::size_t br = 0; br < block; ++br)
        for (std::size_t bc = 0; bc < block; ++bc) {
          if (p(static_cast<Eigen::Index>(br), static_cast<Eigen::Index>(bc)) == 0.0) continue;
          for (std::size_t r = 0; r < right; ++r) {
            const std::size_t row = (l * block + br) * right + r;
            const std::size_t col = (l * block + bc) * right + r;
            h(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) -=
                p(static_cast<Eigen::Index>(br), static_cast<Eigen::Index>(bc));
          }
        }
  }
  return h;
}

}  // namespace detail

/// Dense exact diagonalization of H(rho) in the paired sector; eigenvalues
/// grouped to integer levels.
inline std::vector<EnergyLevel> hamiltonian_spectrum_small(const LatticeModel& model,
                                                           std::size_t dim_cap = 1u << 16) {
  const Eigen::MatrixXd h = detail::paired_hamiltonian(model, dim_cap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hamiltonian_spectrum_small: eigensolver failed");
  std::vector<EnergyLevel> levels;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double e = es.eigenvalues()(i);
    if (!levels.empty() && std::abs(e - levels.back().energy) < 1e-8) {
      ++levels.back().multiplicity;
    } else {
      levels.push_back({e, 1});
    }
  }
  return levels;
}

/// Exact spectrum of H(rho): each edge projector contributes eigenvalue 1
/// (multiplicity 1) or 0 (multiplicity m^2 - 1) independently, so energy -k
/// has multiplicity C(|E|, k) (m^2 - 1)^(|E| - k). Independent of rho.
inline std::vector<ExactEnergyLevel> hamiltonian_spectrum_exact(const LatticeModel& model) {
  using boost::multiprecision::cpp_int;
  const std::size_t ne = model.edges.size();
  const cpp_int zero_mult = cpp_int(model.m) * cpp_int(model.m) - 1;
  std::vector<ExactEnergyLevel> levels;
  cpp_int binom = 1;
  for (std::size_t k = 0; k <= ne; ++k) {
    cpp_int mult = binom;
    for (std::size_t i = 0; i < ne - k; ++i) mult *= zero_mult;
    levels.push_back({-static_cast<long long>(k), mult});
    binom = binom * (ne - k) / (k + 1);
  }
  std::sort(levels.begin(), levels.end(),
            [](const auto& a, const auto& b) { return a.energy < b.energy; });
  return levels;
}

/// Exact rational certificate that each edge term is a projector: with
/// P = |psi><psi| and psi = sum_i sqrt(rho_i)|ii>, P^2 = (sum_i rho_i) P,
/// so idempotence is exactly the normalization of rho.
inline bool exact_projector_check(const std::vector<boost::rational<long long>>& rho_weights) {
  boost::rational<long long> total(0);
  for (const auto& w : rho_weights) {
    if (w < 0) return false;
    total += w;
  }
  return total == boost::rational<long long>(1);
}

/// Spectral gap from the exact spectrum; equals 1 whenever the model has at
/// least one edge.
inline long long exact_gap(const LatticeModel& model) {
  const auto levels = hamiltonian_spectrum_exact(model);
  return levels[1].energy - levels[0].energy;
}

/// Reduced state of an interior site (all 2D slots paired): rho^(x) degree.
inline Spectrum site_reduced_state(const LatticeModel& model) {
  std::vector<bool> paired(model.spin_count(), true);
  for (std::size_t g : dangling_spins(model)) paired[g] = false;
  bool interior_exists = false;
  for (std::size_t s = 0; s < model.site_count && !interior_exists; ++s) {
    bool all = true;
    for (std::size_t slot = 0; slot < model.spins_per_site(); ++slot)
      if (!paired[model.global_spin(s, slot)]) { all = false; break; }
    interior_exists = all;
  }
  if (!interior_exists) throw std::invalid_argument("site_reduced_state: no interior site");
  return tensor_power(model.rho, static_cast<int>(model.degree()), 0.0);
}

/// Edges with exactly one endpoint inside the region.
inline std::vector<std::size_t> boundary_edges(const LatticeModel& model, const Region& region) {
  std::vector<bool> in(model.site_count, false);
  for (std::size_t s : region.sites) {
    if (s >= model.site_count) throw std::invalid_argument("boundary_edges: site out of range");
    in[s] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < model.edges.size(); ++i)
    if (in[model.edges[i].site_a] != in[model.edges[i].site_b]) out.push_back(i);
  return out;
}

/// Schmidt spectrum across the region cut: rho^(x) |boundary| by construction
/// (the two sides are entangled only through the boundary edge states).
inline std::pair<Spectrum, std::size_t> boundary_spectrum(const LatticeModel& model,
                                                          const Region& region) {
  std::set<std::size_t> uniq(region.sites.begin(), region.sites.end());
  if (uniq.empty() || uniq.size() >= model.site_count)
    throw std::invalid_argument("boundary_spectrum: region must be nonempty and proper");
  const std::size_t b = boundary_edges(model, region).size();
  return {tensor_power(model.rho, static_cast<int>(b), 0.0), b};
}

/// Factor type of a region algebra in the thermodynamic limit of this model.
inline FactorType classify_region(const LatticeModel& model, bool region_is_properly_infinite,
                                  RationalityOptions opt = {}) {
  return classify_itpfi(model.rho, region_is_properly_infinite, opt);
}

/// Stacks two models on the same geometry: virtual spins combine, edge
/// states tensor.
inline LatticeModel stack(const LatticeModel& a, const LatticeModel& b) {
  if (a.dimension != b.dimension || a.extent != b.extent || a.boundary != b.boundary)
    throw std::invalid_argument("stack: geometry mismatch");
  return build_model(a.dimension, a.extent, a.boundary, a.m * b.m, tensor(a.rho, b.rho));
}

/// Ground state in the paired sector, ordered edge by edge (matches
/// hamiltonian_spectrum_small's basis).
inline Eigen::VectorXd ground_state_paired(const LatticeModel& model,
                                           std::size_t dim_cap = 1u << 16) {
  std::size_t dim;
  if (!detail::checked_pow(model.m * model.m, model.edges.size(), dim) || dim > dim_cap)
    throw std::invalid_argument("ground_state_paired: dimension exceeds cap");
  std::vector<double> w;
  for (const auto& r : model.rho.runs())
    for (double c = 0; c < r.count; c += 1.0) w.push_back(r.weight);
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.m * model.m));
  for (std::size_t i = 0; i < w.size(); ++i)
    psi(static_cast<Eigen::Index>(i * model.m + i)) = std::sqrt(w[i]);
  Eigen::VectorXd state = Eigen::VectorXd::Ones(1);
  for (std::size_t e = 0; e < model.edges.size(); ++e) {
    Eigen::VectorXd next(state.size() * psi.size());
    for (Eigen::Index i = 0; i < state.size(); ++i)
      for (Eigen::Index j = 0; j < psi.size(); ++j) next(i * psi.size() + j) = state(i) * psi(j);
    state.swap(next);
  }
  return state;
}

/// Ground state on the full site-ordered Hilbert space (site-major, slot
/// order within a site, digit 0 most significant within a spin group);
/// dangling spins sit in their clamped basis state.
inline Eigen::VectorXd ground_state_vector(const LatticeModel& model,
                                           std::size_t dim_cap = 1u << 16) {
  std::size_t dim;
  const std::size_t n = model.spin_count();
  if (!detail::checked_pow(model.m, n, dim) || dim > dim_cap)
    throw std::invalid_argument("ground_state_vector: dimension exceeds cap");
  std::vector<double> w;
  for (const auto& r : model.rho.runs())
    for (double c = 0; c < r.count; c += 1.0) w.push_back(r.weight);
  std::vector<std::size_t> place(n, 0);  // digit multiplier per global spin
  for (std::size_t g = 0; g < n; ++g) {
    std::size_t p = 1;
    for (std::size_t i = g + 1; i < n; ++i) p *= model.m;
    place[g] = p;
  }
  Eigen::VectorXd state = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  const std::size_t ne = model.edges.size();
  std::vector<std::size_t> assign(ne, 0);  // rho eigenvalue index per edge
  while (true) {
    double amp = 1.0;
    std::size_t idx = 0;
    for (std::size_t e = 0; e < ne; ++e) {
      amp *= std::sqrt(w[assign[e]]);
      idx += assign[e] * (place[model.global_spin(model.edges[e].site_a, model.edges[e].slot_a)] +
                          place[model.global_spin(model.edges[e].site_b, model.edges[e].slot_b)]);
    }
    state(static_cast<Eigen::Index>(idx)) += amp;
    std::size_t e = 0;
    while (e < ne && ++assign[e] == w.size()) assign[e++] = 0;
    if (e == ne) break;
  }
  return state;
}

}  // namespace entkit

#endif  // ENTKIT_LATTICE_HPP
