#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helfrich/sphere_analysis.hpp"
#include "oracles.hpp"

using namespace helfrich;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

void check_radii(const SphericalSolutionSet& s, std::vector<double> expected) {
  REQUIRE(s.radii.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(s.radii[i] == Approx(expected[i]).epsilon(1e-12));
}

} // namespace

TEST_CASE("sphere residual values") {
  CHECK(el_sphere_residual(2, {1, 0, 0, 1, -1}) == 0.0);
  CHECK(el_sphere_residual(1, {1, 0, 0, 1, -1}) == -1.0);
  CHECK(el_sphere_residual(2, {1, 0, 2, -2, 1}) == Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(el_sphere_residual(0.0, {}), std::domain_error);
  CHECK_THROWS_AS(el_sphere_residual(-1.0, {}), std::domain_error);
}

TEST_CASE("quadratic roots") {
  auto r = quadratic_roots({1, 0, 2, 0, -0.75});
  REQUIRE(r.roots.size() == 2);
  CHECK(r.roots[0] == Approx(0.25));
  CHECK(r.roots[1] == Approx(0.75));

  r = quadratic_roots({1, 0, 2, -2, 1});
  REQUIRE(r.roots.size() == 2);
  CHECK(r.roots[0] == Approx(-0.5));
  CHECK(r.roots[1] == Approx(0.5));

  r = quadratic_roots({1, 0, -2, 0, -1});
  REQUIRE(r.roots.size() == 2);
  CHECK(r.roots[0] == Approx(-(1 + std::sqrt(2.0)) / 2));
  CHECK(r.roots[1] == Approx((std::sqrt(2.0) - 1) / 2));
  CHECK(1.0 / r.roots[1] == Approx(4.82843).epsilon(1e-5));

  r = quadratic_roots({1, 0, 0, 1, -1});
  CHECK(r.degenerate_linear);
  REQUIRE(r.roots.size() == 1);
  CHECK(r.roots[0] == Approx(0.5));

  r = quadratic_roots({1, 0, 0, 0, 0});
  CHECK(r.degenerate_linear);
  CHECK(r.every_u);
}

TEST_CASE("boundedness verdicts") {
  CHECK(boundedness_verdict({1, 0, 2, -3, 0}) == Boundedness::UnboundedFlattening);
  CHECK(boundedness_verdict({1, 0, 2, -2, -1}) == Boundedness::UnboundedInflation);
  CHECK(boundedness_verdict({1, 0, 2, -2, 0}) == Boundedness::Plausible);
  CHECK(boundedness_verdict({1, 0, 0, 0, 0}) == Boundedness::Plausible);
  CHECK(boundedness_verdict({1, 0, 0, -0.1, 0}) == Boundedness::UnboundedFlattening);
}

TEST_CASE("classification of the canonical cases") {
  auto s = classify_spheres({1, 0, 0, 0, 0});
  CHECK(s.verdict == SphereVerdict::AnyRadius);
  CHECK(s.radii.empty());

  s = classify_spheres({1, 0, 0, 1, -1});
  CHECK(s.verdict == SphereVerdict::Unique);
  check_radii(s, {2.0});

  s = classify_spheres({1, 0, 2, -2, 1});
  CHECK(s.verdict == SphereVerdict::Unique);
  check_radii(s, {2.0});

  s = classify_spheres({1, 0, 1, 0, 0});
  CHECK(s.verdict == SphereVerdict::Unique);
  check_radii(s, {2.0});
  CHECK(*s.x == 0.5);

  s = classify_spheres({1, 0, 2, 0, -0.75});
  CHECK(s.verdict == SphereVerdict::TwoRadii);
  check_radii(s, {4.0 / 3.0, 4.0});
  CHECK(*s.x == 1.0);
  CHECK(s.literal_theorem_agrees);

  s = classify_spheres({1, 0, -2, 0, -1});
  CHECK(s.verdict == SphereVerdict::Unique);
  check_radii(s, {2.0 + 2.0 * std::sqrt(2.0)});
  CHECK_FALSE(s.literal_theorem_agrees);
  CHECK(literal_theorem_prediction({1, 0, -2, 0, -1}).verdict == SphereVerdict::NoSphere);

  s = classify_spheres({1, 0, 0, 1, 1});
  CHECK(s.verdict == SphereVerdict::NoSphere);

  // critical lambda with p = 0 has no sphere; unbounded sets report none
  CHECK(classify_spheres({1, 0, 2, -2, 0}).verdict == SphereVerdict::NoSphere);
  CHECK(classify_spheres({1, 0, 2, -3, 0}).verdict == SphereVerdict::NoSphere);
  CHECK(classify_spheres({1, 0, 2, -2, -1}).verdict == SphereVerdict::NoSphere);
}

TEST_CASE("classification agrees with the bisection oracle on random draws") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-5.0, 5.0), kc(0.0, 5.0);
  int disagreements = 0, literal_flags = 0;
  for (int i = 0; i < 10000; ++i) {
    ParameterSet P{kc(rng), 0.0, u(rng), u(rng), u(rng)};
    if (P.kc == 0.0) continue;
    const auto s = classify_spheres(P);
    const auto expect = oracle::admissible_radii(P);
    REQUIRE(expect.has_value());
    bool same = expect->size() == s.radii.size();
    for (std::size_t k = 0; same && k < s.radii.size(); ++k)
      same = std::abs(s.radii[k] - (*expect)[k]) <= 1e-9 * std::max(1.0, (*expect)[k]);
    if (!same) ++disagreements;
    if (!s.literal_theorem_agrees) {
      ++literal_flags;
      CHECK(P.c0 < 0.0);
      CHECK(P.p < 0.0);
    }
  }
  CHECK(disagreements == 0);
  CHECK(literal_flags > 0);
}

TEST_CASE("every reported radius solves the sphere equation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0), kc(0.01, 5.0);
  for (int i = 0; i < 5000; ++i) {
    ParameterSet P{kc(rng), 0.0, u(rng), u(rng), u(rng)};
    for (double r : classify_spheres(P).radii) {
      CHECK(r > 0.0);
      CHECK(std::abs(el_sphere_residual(r, P)) <= 1e-9 * el_sphere_residual_scale(r, P));
    }
  }
}

TEST_CASE("two radii only in the bounded positive-c0 window") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0), kc(0.01, 5.0);
  int seen = 0;
  for (int i = 0; i < 20000; ++i) {
    ParameterSet P{kc(rng), 0.0, u(rng), u(rng), u(rng)};
    const auto s = classify_spheres(P);
    if (s.verdict != SphereVerdict::TwoRadii) continue;
    ++seen;
    const double x = *s.x;
    CHECK(s.radii[0] < s.radii[1]);
    CHECK(P.c0 > 0.0);
    CHECK(P.lambda > critical_lambda(P));
    CHECK(P.p < 0.0);
    CHECK(P.p > -P.kc * P.c0 * x * x / 2.0);
  }
  CHECK(seen > 50);
}

TEST_CASE("positive c0 with nonnegative p gives exactly one sphere") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> pos(0.01, 5.0), u(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    ParameterSet P{pos(rng), 0.0, pos(rng), 0.0, i % 10 == 0 ? 0.0 : pos(rng)};
    P.lambda = critical_lambda(P) + pos(rng);
    const auto s = classify_spheres(P);
    CHECK(s.verdict == SphereVerdict::Unique);
  }
}

TEST_CASE("sphere energy polynomial") {
  CHECK(sphere_energy_closed_form(2, {1, 0, 1, 0, 0}) == Approx(0.0).scale(1.0));
  CHECK(sphere_energy_closed_form(1, {1, 1, 0, 1, -1}) == Approx(44 * kPi / 3));
  CHECK(sphere_energy_closed_form(1, {1, 0, 0, 0, 0}) == Approx(8 * kPi));
  // at r = 2/c0 the polynomial gives 4 kbar pi, not 4 pi (kbar - 2 kc)
  const ParameterSet P{1.5, 0.7, 0.5, 0, 0};
  CHECK(sphere_energy_closed_form(4.0, P) == Approx(4 * kPi * 0.7));
  CHECK(sphere_energy_closed_form(4.0, P) != Approx(4 * kPi * (0.7 - 3.0)));
  CHECK_THROWS_AS(sphere_energy_closed_form(0.0, P), std::domain_error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0), pos(0.1, 5.0);
  for (int i = 0; i < 500; ++i) {
    ParameterSet Q{pos(rng), u(rng), u(rng), u(rng), u(rng)};
    const double r = pos(rng);
    const double ref = oracle::sphere_energy(r, Q);
    CHECK(sphere_energy_closed_form(r, Q) == Approx(ref).epsilon(1e-10).scale(100.0));
  }
}

TEST_CASE("unboundedness witness") {
  auto w = unboundedness_witness({1, 0, 2, -2, -1}, 4);
  REQUIRE(w.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(w[k].radius == std::ldexp(1.0, k));
  for (int k = 1; k + 1 < 4; ++k) CHECK(w[k + 1].energy < w[k].energy);
  CHECK(w.back().energy < w.front().energy);

  w = unboundedness_witness({1, 0, 2, -2, -0.01}, 12);
  CHECK(w.back().energy < w[w.size() - 2].energy);
  CHECK(w.back().energy < w.front().energy);

  CHECK_THROWS_AS(unboundedness_witness({1, 0, 0, 0, 0}, 4), std::logic_error);
  CHECK_THROWS_AS(unboundedness_witness({1, 0, 2, -3, 0}, 4), std::logic_error);
}

TEST_CASE("sphere energy diverges to minus infinity under inflation") {
  const ParameterSet P{1, 0, 2, -2, -1};
  double prev = sphere_energy_closed_form(4, P);
  for (double r = 8; r < 1e6; r *= 2) {
    const double e = sphere_energy_closed_form(r, P);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < -1e15);
}
