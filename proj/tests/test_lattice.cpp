#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "entkit/lattice.hpp"
#include "entkit/oracles.hpp"
#include "entkit/spectrum.hpp"

using namespace entkit;

namespace {
const Spectrum kRho = make_spectrum({0.7, 0.3});
}

TEST_CASE("build_model counting") {
  const LatticeModel chain = build_model(1, {3}, Boundary::open, 2, uniform_spectrum(2));
  REQUIRE(chain.site_count == 3);
  REQUIRE(chain.edges.size() == 2);
  REQUIRE(chain.spins_per_site() == 2);
  REQUIRE(dangling_spins(chain).size() == 2);

  const LatticeModel square = build_model(2, {2, 2}, Boundary::open, 2, uniform_spectrum(2));
  REQUIRE(square.site_count == 4);
  REQUIRE(square.edges.size() == 4);
  REQUIRE(square.spins_per_site() == 4);  // per-site dim 16

  const LatticeModel torus = build_model(2, {2, 2}, Boundary::periodic, 2, uniform_spectrum(2));
  REQUIRE(torus.edges.size() == 8);
  REQUIRE(dangling_spins(torus).empty());

  REQUIRE_THROWS_AS(build_model(1, {1}, Boundary::open, 2, uniform_spectrum(2)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(build_model(1, {1}, Boundary::periodic, 2, uniform_spectrum(2)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(build_model(1, {3}, Boundary::open, 1, uniform_spectrum(2)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(build_model(1, {3}, Boundary::open, 2, uniform_spectrum(3)),
                    std::invalid_argument);
}

TEST_CASE("every virtual spin is paired exactly once or dangling") {
  for (const auto& model :
       {build_model(1, {4}, Boundary::open, 2, kRho),
        build_model(2, {2, 3}, Boundary::open, 2, kRho),
        build_model(2, {2, 2}, Boundary::periodic, 2, kRho)}) {
    std::vector<int> use(model.spin_count(), 0);
    for (const auto& e : model.edges) {
      ++use[model.global_spin(e.site_a, e.slot_a)];
      ++use[model.global_spin(e.site_b, e.slot_b)];
    }
    for (std::size_t g : dangling_spins(model)) ++use[g];
    for (int u : use) REQUIRE(u == 1);
  }
}

TEST_CASE("commuting check holds for valid models and explicit matrices") {
  const LatticeModel chain = build_model(1, {3}, Boundary::open, 2, kRho);
  REQUIRE(commuting_check(chain));  // includes 64x64 matrix commutators
  REQUIRE(commuting_check(build_model(2, {2, 2}, Boundary::open, 2, kRho)));
}

TEST_CASE("overlapping projectors do not commute") {
  const LatticeModel chain = build_model(1, {3}, Boundary::open, 2, kRho);
  // spins (0,1) and (1,2) overlap at virtual spin 1
  const Eigen::MatrixXd p1 = projector_on_spins(chain, 0, 1);
  const Eigen::MatrixXd p2 = projector_on_spins(chain, 1, 2);
  REQUIRE((p1 * p2 - p2 * p1).cwiseAbs().maxCoeff() > 1e-6);
  // while disjoint pairs commute
  const Eigen::MatrixXd p3 = projector_on_spins(chain, 2, 3);
  REQUIRE((p1 * p3 - p3 * p1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ED spectrum matches the exact combinatorial spectrum") {
  std::mt19937_64 gen(80);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = w(gen);
    const Spectrum rho = make_spectrum({a, a * w(gen)});
    const LatticeModel chain = build_model(1, {3}, Boundary::open, 2, rho);
    const auto levels = hamiltonian_spectrum_small(chain);
    const auto exact = hamiltonian_spectrum_exact(chain);
    REQUIRE(levels.size() == exact.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
      REQUIRE(levels[i].energy ==
              Catch::Approx(static_cast<double>(exact[i].energy)).margin(1e-10));
      REQUIRE(exact[i].multiplicity == levels[i].multiplicity);
    }
    REQUIRE(levels.front().multiplicity == 1);
    REQUIRE(exact_gap(chain) == 1);
  }
}

TEST_CASE("exact spectrum structure") {
  const LatticeModel chain = build_model(1, {3}, Boundary::open, 2, kRho);
  const auto exact = hamiltonian_spectrum_exact(chain);
  REQUIRE(exact.size() == 3);
  REQUIRE(exact[0].energy == -2);
  REQUIRE(exact[0].multiplicity == 1);
  REQUIRE(exact[1].energy == -1);
  REQUIRE(exact[1].multiplicity == 6);  // C(2,1) * 3
  REQUIRE(exact[2].energy == 0);
  REQUIRE(exact[2].multiplicity == 9);  // 3^2
  // pure rho keeps the same spectrum (gap independent of rho)
  const LatticeModel pure = build_model(1, {3}, Boundary::open, 2, point_mass());
  const auto exact_pure = hamiltonian_spectrum_exact(pure);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    REQUIRE(exact_pure[i].energy == exact[i].energy);
    REQUIRE(exact_pure[i].multiplicity == exact[i].multiplicity);
  }
}

TEST_CASE("frustration freeness: every projector fixes the ground state") {
  const LatticeModel chain = build_model(1, {3}, Boundary::open, 2, kRho);
  const Eigen::VectorXd gs = ground_state_vector(chain);
  REQUIRE(gs.norm() == Catch::Approx(1.0));
  for (std::size_t e = 0; e < chain.edges.size(); ++e) {
    const Eigen::MatrixXd p = edge_projector_full(chain, e);
    REQUIRE((p * gs - gs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("exact projector identity over the rationals") {
  REQUIRE(exact_projector_check({{7, 10}, {3, 10}}));
  REQUIRE(exact_projector_check({{1, 2}, {1, 3}, {1, 6}}));
  REQUIRE_FALSE(exact_projector_check({{1, 2}, {1, 3}}));
  REQUIRE_FALSE(exact_projector_check({{3, 2}, {-1, 2}}));
}

TEST_CASE("site reduced state matches the partial trace") {
  const LatticeModel chain = build_model(1, {3}, Boundary::open, 2, kRho);
  const Spectrum analytic = site_reduced_state(chain);
  REQUIRE(spectra_equal(analytic, tensor(kRho, kRho)));
  const Eigen::VectorXd gs = ground_state_vector(chain);
  const Eigen::MatrixXd reduced = oracle::partial_trace(gs, chain.spin_count(), 2, {2, 3});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reduced);
  const auto flat = analytic.expanded();
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double ed = es.eigenvalues()(static_cast<Eigen::Index>(flat.size() - 1 - i));
    REQUIRE(ed == Catch::Approx(flat[i]).margin(1e-10));
  }
  // boundary site has dangling spins: no interior site on a 2-site chain
  REQUIRE_THROWS_AS(site_reduced_state(build_model(1, {2}, Boundary::open, 2, kRho)),
                    std::invalid_argument);
}

TEST_CASE("boundary spectrum matches the ED Schmidt decomposition") {
  const LatticeModel chain = build_model(1, {3}, Boundary::open, 2, kRho);
  const auto [spec, count] = boundary_spectrum(chain, Region{{0}});
  REQUIRE(count == 1);
  const Eigen::VectorXd gs = ground_state_vector(chain);
  const auto schmidt = oracle::schmidt_spectrum(gs, chain.spin_count(), 2, {0, 1});
  const auto flat = spec.expanded();
  REQUIRE(schmidt.size() == flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i)
    REQUIRE(schmidt[i] == Catch::Approx(flat[i]).margin(1e-10));

  // two-site region in the middle of a 4-chain: two boundary edges
  const LatticeModel chain4 = build_model(1, {4}, Boundary::open, 2, kRho);
  const auto [spec2, count2] = boundary_spectrum(chain4, Region{{1, 2}});
  REQUIRE(count2 == 2);
  REQUIRE(spectra_equal(spec2, tensor(kRho, kRho)));

  REQUIRE_THROWS_AS(boundary_spectrum(chain, Region{}), std::invalid_argument);
  REQUIRE_THROWS_AS(boundary_spectrum(chain, Region{{0, 1, 2}}), std::invalid_argument);
}

TEST_CASE("boundary sets agree with the complement") {
  const LatticeModel square = build_model(2, {2, 2}, Boundary::periodic, 2, kRho);
  const Region left{{0, 2}};
  const Region right{{1, 3}};
  REQUIRE(boundary_edges(square, left) == boundary_edges(square, right));
}

TEST_CASE("region classification") {
  REQUIRE(classify_region(build_model(1, {3}, Boundary::open, 2, uniform_spectrum(2)), true)
              .kind == FactorKind::II_infinite);
  const FactorType t =
      classify_region(build_model(1, {3}, Boundary::open, 2, powers_spectrum(0.5)), true);
  REQUIRE(t.kind == FactorKind::III_lambda);
  REQUIRE(t.lambda == Catch::Approx(0.5));
  REQUIRE(classify_region(build_model(1, {3}, Boundary::open, 2, point_mass()), true).kind ==
          FactorKind::I_infinite);
}

TEST_CASE("stacking") {
  const double golden = 0.6180339887498949;
  const LatticeModel fib = build_model(1, {3}, Boundary::open, 2, powers_spectrum(golden));
  const LatticeModel ising = build_model(1, {3}, Boundary::open, 2, powers_spectrum(0.5));
  const LatticeModel stacked = stack(fib, ising);
  REQUIRE(stacked.m == 4);
  REQUIRE(classify_region(stacked, true).kind == FactorKind::III_1);
  REQUIRE(same_subtype(classify_region(stacked, true),
                       compose(classify_region(fib, true), classify_region(ising, true))));

  const LatticeModel halves = build_model(1, {3}, Boundary::open, 2, powers_spectrum(0.5));
  const LatticeModel quarters = build_model(1, {3}, Boundary::open, 2, powers_spectrum(0.25));
  const FactorType merged = classify_region(stack(halves, quarters), true);
  REQUIRE(merged.kind == FactorKind::III_lambda);
  REQUIRE(merged.lambda == Catch::Approx(0.5));

  // trivial stack leaves the classification alone
  const LatticeModel with_trivial =
      stack(ising, build_model(1, {3}, Boundary::open, 2, point_mass()));
  REQUIRE(same_subtype(classify_region(with_trivial, true), classify_region(ising, true)));

  REQUIRE_THROWS_AS(stack(fib, build_model(1, {4}, Boundary::open, 2, kRho)),
                    std::invalid_argument);
}

TEST_CASE("ground state in the paired sector is the bottom eigenvector") {
  const LatticeModel chain = build_model(1, {3}, Boundary::open, 2, kRho);
  const Eigen::VectorXd gs = ground_state_paired(chain);
  REQUIRE(gs.norm() == Catch::Approx(1.0));
  const Eigen::MatrixXd h = detail::paired_hamiltonian(chain, 1u << 16);
  REQUIRE((h * gs + 2.0 * gs).cwiseAbs().maxCoeff() < 1e-12);
}
