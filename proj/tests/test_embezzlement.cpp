#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "entkit/embezzlement.hpp"
#include "entkit/spectrum.hpp"

using namespace entkit;

TEST_CASE("vdh spectrum") {
  const Spectrum s1 = vdh_spectrum(1);
  REQUIRE(s1.is_pure());

  const Spectrum s2 = vdh_spectrum(2);
  REQUIRE(s2.runs().size() == 2);
  REQUIRE(s2.runs()[0].weight == Catch::Approx(2.0 / 3.0));
  REQUIRE(s2.runs()[1].weight == Catch::Approx(1.0 / 3.0));

  const Spectrum s8 = vdh_spectrum(8);
  double mass = 0.0;
  for (const auto& r : s8.runs()) mass += r.weight * r.count;
  REQUIRE(mass == Catch::Approx(1.0));
  REQUIRE(s8.runs()[0].weight / s8.runs()[1].weight == Catch::Approx(2.0));

  REQUIRE_THROWS_AS(vdh_spectrum(0), std::invalid_argument);
}

TEST_CASE("embezzlement error endpoints") {
  // product target is free
  const ErrorEstimate zero = embezzlement_error(vdh_spectrum(16), point_mass());
  REQUIRE(zero.value == Catch::Approx(0.0).margin(1e-12));
  // product resource, Bell target: F = sqrt(1/2), err = sqrt(2 - sqrt(2))
  const ErrorEstimate worst = embezzlement_error(point_mass(), uniform_spectrum(2));
  REQUIRE(worst.value == Catch::Approx(std::sqrt(2.0 - std::sqrt(2.0))));
}

TEST_CASE("vdh error decreases and is beaten by larger resources") {
  const double e4 = embezzlement_error(vdh_spectrum(1 << 4), uniform_spectrum(2)).value;
  const double e8 = embezzlement_error(vdh_spectrum(1 << 8), uniform_spectrum(2)).value;
  const double e12 = embezzlement_error(vdh_spectrum(1 << 12), uniform_spectrum(2)).value;
  REQUIRE(e8 < e4);
  REQUIRE(e12 < e8);
}

TEST_CASE("kappa formula endpoints") {
  REQUIRE(kappa_max_formula(1.0) == Catch::Approx(0.0));
  REQUIRE(kappa_max_formula(0.25) == Catch::Approx(2.0 / 3.0));
  REQUIRE(kappa_max_formula(0.5) == Catch::Approx(2.0 * (1 - std::sqrt(0.5)) / (1 + std::sqrt(0.5))));
  REQUIRE_THROWS_AS(kappa_max_formula(0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(kappa_max_formula(1.5), std::invalid_argument);
}

TEST_CASE("kappa estimate identities") {
  // uniform resource of one copy: worst error against dim-2 targets is the
  // product-vs-Bell overlap sqrt(2 - 2 * (1+1/sqrt2)/2) evaluated at q -> 1
  const KappaEstimate e = kappa_estimate(uniform_spectrum(2), 1, 2);
  REQUIRE(e.worst_error == Catch::Approx(0.76537).margin(1e-3));
  REQUIRE(e.worst_fidelity <= 1.0);
  REQUIRE(e.reliable);
  REQUIRE(e.copies == 1);
  // trace-units value is always >= vector-units value on [0, ~1.08]
  REQUIRE(e.kappa >= e.worst_error - 1e-12);
  REQUIRE_THROWS_AS(kappa_estimate(uniform_spectrum(2), 0, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(kappa_estimate(uniform_spectrum(2), 1, 1), std::invalid_argument);
}

TEST_CASE("kappa converges to the formula target in trace units") {
  // short schedule here; the acceptance suite drives it to k = 512
  const KappaEstimate e64 = kappa_estimate(powers_spectrum(0.25), 64, 2);
  const KappaEstimate e256 = kappa_estimate(powers_spectrum(0.25), 256, 2);
  const double target = kappa_max_formula(0.25);
  REQUIRE(std::abs(e256.kappa - target) <= std::abs(e64.kappa - target) + 1e-9);
  REQUIRE(std::abs(e256.kappa - target) < 0.02);
}

TEST_CASE("worst-case targets for higher n include the sampled simplex") {
  const KappaEstimate e = kappa_estimate(powers_spectrum(0.5), 8, 3);
  REQUIRE(e.worst_target.size() == 3);
  double sum = 0.0;
  for (double x : e.worst_target) sum += x;
  REQUIRE(sum == Catch::Approx(1.0));
  // deterministic for a fixed seed
  const KappaEstimate e2 = kappa_estimate(powers_spectrum(0.5), 8, 3);
  REQUIRE(e.worst_error == e2.worst_error);
}

TEST_CASE("embezzling family check scans from the tail") {
  std::vector<Spectrum> family;
  for (int l = 1; l <= 14; ++l) family.push_back(vdh_spectrum(std::uint64_t{1} << l));
  const auto idx = embezzling_family_check(family, 2, 0.3);
  REQUIRE(idx.has_value());
  REQUIRE(*idx > 0);
  // unreachable tolerance: no index qualifies
  REQUIRE_FALSE(embezzling_family_check(family, 2, 1e-6).has_value());
  REQUIRE_THROWS_AS(embezzling_family_check({}, 2, 0.3), std::invalid_argument);
}
