#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "helfrich/energy.hpp"
#include "helfrich/params.hpp"
#include "helfrich/sphere_analysis.hpp"

using namespace helfrich;

TEST_CASE("validate accepts the Willmore parameters") {
  CHECK_FALSE(validate(ParameterSet{1, 0, 0, 0, 0}).has_value());
}

TEST_CASE("validate rejects non-positive bending modulus") {
  for (double kc : {0.0, -1.0}) {
    auto r = validate(ParameterSet{kc, 0, 0, 0, 0});
    REQUIRE(r.has_value());
    CHECK(r->field == "kc");
    CHECK(r->reason == "k_c must be > 0");
  }
}

TEST_CASE("validate rejects non-finite fields and names them") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(validate(ParameterSet{1, nan, 0, 0, 0})->field == "kbar");
  CHECK(validate(ParameterSet{1, 0, inf, 0, 0})->field == "c0");
  CHECK(validate(ParameterSet{1, 0, 0, -inf, 0})->field == "lambda");
  CHECK(validate(ParameterSet{1, 0, 0, 0, nan})->field == "p");
}

TEST_CASE("tolerances must be strictly positive") {
  CHECK_FALSE(validate(Tolerances{}).has_value());
  CHECK(validate(Tolerances{0.0, 1e-9, 1e-6}).has_value());
  CHECK(validate(Tolerances{1e-3, -1.0, 1e-6}).has_value());
  CHECK(validate(Tolerances{1e-3, 1e-9, 0.0}).has_value());
}

TEST_CASE("scale_params applies the length exponents") {
  const ParameterSet s = scale_params(ParameterSet{1, 0, 1, 1, 1}, 2.0);
  CHECK(s.c0 == 0.5);
  CHECK(s.lambda == 0.25);
  CHECK(s.p == 0.125);
  CHECK(s.kc == 1.0);
  CHECK(s.kbar == 0.0);

  const ParameterSet any{2.5, -0.5, 0.3, -1.2, 0.7};
  CHECK(scale_params(any, 1.0) == any);
  CHECK_THROWS_AS(scale_params(any, 0.0), std::domain_error);
  CHECK_THROWS_AS(scale_params(any, -2.0), std::domain_error);
}

TEST_CASE("scaling the parameters scales the sphere radii") {
  const ParameterSet P{1, 0, 0, 1, -1};
  CHECK(classify_spheres(P).radii.at(0) == doctest::Approx(2.0));
  CHECK(classify_spheres(scale_params(P, 3.0)).radii.at(0) == doctest::Approx(6.0));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0), kc(0.1, 5.0), rho(0.2, 5.0);
  int compared = 0;
  for (int i = 0; i < 2000; ++i) {
    const ParameterSet q{kc(rng), u(rng), u(rng), u(rng), u(rng)};
    const double r = rho(rng);
    const auto a = classify_spheres(q);
    const auto b = classify_spheres(scale_params(q, r));
    REQUIRE(a.verdict == b.verdict);
    REQUIRE(a.radii.size() == b.radii.size());
    for (std::size_t k = 0; k < a.radii.size(); ++k) {
      CHECK(b.radii[k] == doctest::Approx(r * a.radii[k]).epsilon(1e-9));
      ++compared;
    }
  }
  CHECK(compared > 100);
}

TEST_CASE("energy is invariant under joint dilation of mesh and parameters") {
  const ParameterSet P{1.3, 0.4, 0.8, -0.2, 0.6};
  const TriMesh m = make_icosphere(2, 1.0);
  for (double rho : {0.5, 2.0, 3.7}) {
    const TriMesh big = transformed(m, rho * Eigen::Matrix3d::Identity());
    const double a = helfrich_energy(m, P).total;
    const double b = helfrich_energy(big, scale_params(P, rho)).total;
    CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
  }
}
