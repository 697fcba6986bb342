#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "entkit/factor_type.hpp"
#include "entkit/spectrum.hpp"

using namespace entkit;

namespace {
constexpr double kGolden = 0.6180339887498949;
}

TEST_CASE("rationality test finds small fractions") {
  auto pq = rationality_test(2.0, 3.0);
  REQUIRE(pq.has_value());
  REQUIRE(pq->first == 2);
  REQUIRE(pq->second == 3);

  pq = rationality_test(std::log(4.0), std::log(2.0));
  REQUIRE(pq.has_value());
  REQUIRE(pq->first == 2);
  REQUIRE(pq->second == 1);

  pq = rationality_test(0.75, 1.0);
  REQUIRE(pq.has_value());
  REQUIRE(pq->first == 3);
  REQUIRE(pq->second == 4);
}

TEST_CASE("rationality test rejects irrational ratios") {
  REQUIRE_FALSE(rationality_test(std::log(3.0), std::log(2.0)).has_value());
  REQUIRE_FALSE(rationality_test(std::numbers::pi, 1.0).has_value());
  REQUIRE_FALSE(rationality_test(std::log(1.0 / kGolden), std::log(2.0)).has_value());
  REQUIRE_THROWS_AS(rationality_test(-1.0, 2.0), std::invalid_argument);
}

TEST_CASE("ratio group structure") {
  REQUIRE(ratio_group(uniform_spectrum(3)).structure == RatioGroup::Structure::trivial);

  const RatioGroup cyclic = ratio_group(powers_spectrum(0.5));
  REQUIRE(cyclic.structure == RatioGroup::Structure::cyclic);
  REQUIRE(cyclic.step == Catch::Approx(std::numbers::ln2));

  // weights 1, 1/2, 1/4: ratios ln2, ln4 -> still cyclic with step ln2
  const RatioGroup nested = ratio_group(make_spectrum({1.0, 0.5, 0.25}));
  REQUIRE(nested.structure == RatioGroup::Structure::cyclic);
  REQUIRE(nested.step == Catch::Approx(std::numbers::ln2));

  REQUIRE(ratio_group(make_spectrum({1.0, 0.5, 1.0 / 3.0})).structure ==
          RatioGroup::Structure::dense);
}

TEST_CASE("classifier anchors") {
  REQUIRE(classify_itpfi(point_mass()).kind == FactorKind::I_finite);
  REQUIRE(classify_itpfi(point_mass()).dim == 1);
  REQUIRE(classify_itpfi(uniform_spectrum(2)).kind == FactorKind::II_1);
  REQUIRE(classify_itpfi(uniform_spectrum(5)).kind == FactorKind::II_1);
  for (double lam : {0.1, 0.25, 0.5, kGolden}) {
    const FactorType t = classify_itpfi(powers_spectrum(lam));
    REQUIRE(t.kind == FactorKind::III_lambda);
    REQUIRE(std::abs(t.lambda - lam) <= 1e-9);
  }
  REQUIRE(classify_itpfi(make_spectrum({1.0, 0.5, 1.0 / 3.0})).kind == FactorKind::III_1);
}

TEST_CASE("ambient promotion") {
  REQUIRE(classify_itpfi(point_mass(), true).kind == FactorKind::I_infinite);
  REQUIRE(classify_itpfi(uniform_spectrum(2), true).kind == FactorKind::II_infinite);
  // type III is unaffected
  REQUIRE(classify_itpfi(powers_spectrum(0.5), true).kind == FactorKind::III_lambda);
}

TEST_CASE("classifier refuses truncated spectra") {
  Spectrum s = make_spectrum({0.9, 0.06, 0.04});
  s.prune(0.05);
  REQUIRE_THROWS_AS(classify_itpfi(s), std::invalid_argument);
}

TEST_CASE("composition table") {
  const FactorType i2 = FactorType::type_i(2);
  const FactorType i3 = FactorType::type_i(3);
  REQUIRE(compose(i2, i3).kind == FactorKind::I_finite);
  REQUIRE(compose(i2, i3).dim == 6);
  REQUIRE(compose(FactorType::ii_1(), FactorType::ii_1()).kind == FactorKind::II_1);
  REQUIRE(compose(FactorType::i_infinite(), FactorType::ii_1()).kind == FactorKind::II_infinite);
  REQUIRE(compose(FactorType::ii_infinite(), FactorType::ii_1()).kind == FactorKind::II_infinite);
  REQUIRE(compose(FactorType::iii_1(), FactorType::ii_1()).kind == FactorKind::III_1);
  REQUIRE(compose(FactorType::iii_lambda(0.5), FactorType::ii_1()).kind ==
          FactorKind::III_lambda);
  REQUIRE(compose(i2, FactorType::iii_lambda(0.5)).lambda == Catch::Approx(0.5));
  REQUIRE(compose(FactorType::undetermined("x"), i2).kind == FactorKind::Undetermined);
}

TEST_CASE("III_lambda composition follows the merged ratio group") {
  const FactorType half = FactorType::iii_lambda(0.5);
  const FactorType quarter = FactorType::iii_lambda(0.25);
  FactorType t = compose(half, quarter);
  REQUIRE(t.kind == FactorKind::III_lambda);
  REQUIRE(t.lambda == Catch::Approx(0.5));

  t = compose(FactorType::iii_lambda(kGolden), half);
  REQUIRE(t.kind == FactorKind::III_1);

  t = compose(FactorType::iii_lambda(1.0 / 3.0), FactorType::iii_lambda(1.0 / 9.0));
  REQUIRE(t.kind == FactorKind::III_lambda);
  REQUIRE(t.lambda == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("compose agrees with classifying the tensored spectrum") {
  std::mt19937_64 gen(50);
  std::uniform_real_distribution<double> lam(0.05, 0.95);
  for (int i = 0; i < 25; ++i) {
    const Spectrum s1 = powers_spectrum(lam(gen));
    const Spectrum s2 = powers_spectrum(lam(gen));
    const FactorType via_compose = compose(classify_itpfi(s1), classify_itpfi(s2));
    const FactorType direct = classify_itpfi(tensor(s1, s2));
    REQUIRE(same_subtype(via_compose, direct));
  }
}

TEST_CASE("finite type I factors never change the subtype") {
  std::mt19937_64 gen(51);
  std::uniform_real_distribution<double> lam(0.05, 0.95);
  std::uniform_int_distribution<int> dim(2, 9);
  for (int i = 0; i < 40; ++i) {
    FactorType t = classify_itpfi(powers_spectrum(lam(gen)));
    const FactorType original = t;
    for (int j = 0; j < 3; ++j) t = compose(t, FactorType::type_i(dim(gen)));
    REQUIRE(same_subtype(t, original));
  }
}

TEST_CASE("resource rank is monotone along the absorption chain") {
  REQUIRE(resource_rank(FactorType::i_infinite()) < resource_rank(FactorType::ii_infinite()));
  REQUIRE(resource_rank(FactorType::ii_infinite()) < resource_rank(FactorType::iii_lambda(0.5)));
  REQUIRE(resource_rank(FactorType::iii_lambda(0.5)) < resource_rank(FactorType::iii_1()));
}

TEST_CASE("to_string round trip sanity") {
  REQUIRE(to_string(FactorType::type_i(4)) == "I_4");
  REQUIRE(to_string(FactorType::ii_1()) == "II_1");
  REQUIRE(to_string(FactorType::iii_1()) == "III_1");
  REQUIRE(to_string(FactorType::iii_lambda(0.5)).starts_with("III_lambda"));
}
