// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "contrail/error.hpp"
#include "contrail/thermo.hpp"
#include "doctest.h"
#include "oracles/oracles.hpp"

using namespace contrail;
using namespace contrail::thermo;

namespace {

// Independent hand evaluation of the constant-latent-heat solution.
double closed_form(double latent, double t) {
  return 611.657 * std::exp(-(latent / 8.31) * (1.0 / t - 1.0 / 273.16));
}

const SaturationModel kModel{};

}  // namespace

TEST_CASE("anchor and closed-form values") {
  CHECK(saturation_pressure(kModel, Phase::ice, 273.16) == doctest::Approx(611.657).epsilon(1e-12));
  CHECK(saturation_pressure(kModel, Phase::liquid, 273.16) == doctest::Approx(611.657).epsilon(1e-12));
  const double ice = saturation_pressure(kModel, Phase::ice, 250.0);
  const double liq = saturation_pressure(kModel, Phase::liquid, 250.0);
  CHECK(std::abs(ice / closed_form(51059, 250) - 1) < 1e-12);
  CHECK(std::abs(liq / closed_form(45051, 250) - 1) < 1e-12);
  CHECK(ice == doctest::Approx(76.13).epsilon(1e-3));
  CHECK(liq == doctest::Approx(97.28).epsilon(1e-3));
}

TEST_CASE("out of range temperatures are rejected") {
  CHECK_THROWS_AS(saturation_pressure(kModel, Phase::ice, 179.9), Error);
  CHECK_THROWS_AS(saturation_pressure(kModel, Phase::liquid, 320.1), Error);
}

TEST_CASE("liquid exceeds ice below the anchor and both curves increase") {
  for (double t = 180.0; t < 273.15; t += 0.1)
    CHECK(saturation_pressure(kModel, Phase::liquid, t) > saturation_pressure(kModel, Phase::ice, t));
  for (double t = 180.0; t + 0.01 <= 320.0; t += 0.01) {
    REQUIRE(saturation_pressure(kModel, Phase::ice, t + 0.01) > saturation_pressure(kModel, Phase::ice, t));
    REQUIRE(saturation_pressure(kModel, Phase::liquid, t + 0.01) > saturation_pressure(kModel, Phase::liquid, t));
  }
}

TEST_CASE("temperature-dependent latent heat integrates the ODE") {
  SaturationModel m;
  m.latent_ice_fn = [](double) { return 51059.0; };
  CHECK(saturation_pressure(m, Phase::ice, 230.0) ==
        doctest::Approx(saturation_pressure(kModel, Phase::ice, 230.0)).epsilon(1e-10));
  // L(T) = a + bT integrates to ln(e/e0) = -(a/R)(1/T - 1/T0) + (b/R) ln(T/T0)
  const double a = 56000.0, b = -20.0;
  m.latent_ice_fn = [=](double t) { return a + b * t; };
  const double t = 220.0;
  const double expect = 611.657 * std::exp(-(a / 8.31) * (1 / t - 1 / 273.16) + (b / 8.31) * std::log(t / 273.16));
  CHECK(saturation_pressure(m, Phase::ice, t) == doctest::Approx(expect).epsilon(1e-10));
  m.validate();
  SaturationModel bad;
  bad.latent_ice = 40000.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

namespace {

void check_against_dense_oracle(const MixingLine& line, const FormationVerdict& v) {
  for (auto [phase, got] : {std::pair{Phase::liquid, &v.crossings_liquid}, std::pair{Phase::ice, &v.crossings_ice}}) {
    auto f = [&, ph = phase](double t) { return line.vapor_pressure_at(t) - saturation_pressure_unchecked(kModel, ph, t); };
    const auto want = oracle::dense_crossings(f, line.exhaust.temperature, line.ambient.temperature, 100000);
    REQUIRE(got->size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs((*got)[i] - want[i]) < 1e-4);
    for (std::size_t i = 1; i < got->size(); ++i) CHECK((*got)[i - 1] > (*got)[i]);
  }
}

}  // namespace

TEST_CASE("three mixing-line scenarios") {
  const double e215 = saturation_pressure(kModel, Phase::ice, 215.0);
  struct Case {
    MixingLine line;
    Outcome want;
  };
  const Case cases[] = {
      {{{580, 1300}, {230, 1}}, Outcome::no_contrail},
      {{{580, 1300}, {215, 1.1 * e215}}, Outcome::persistent},
      {{{580, 1300}, {215, 0.5 * e215}}, Outcome::non_persistent},
  };
  for (const auto& c : cases) {
    for (int samples : {256, 512, 2048}) {
      const auto v = classify_mixing_line(kModel, c.line, samples);
      CHECK(v.outcome == c.want);
      CHECK(v.crossings_liquid.empty() == (v.outcome == Outcome::no_contrail));
      check_against_dense_oracle(c.line, v);
    }
  }
}

TEST_CASE("classification argument checks") {
  CHECK_THROWS_AS(classify_mixing_line(kModel, {{230, 10}, {230, 1}}), Error);
  try {
    classify_mixing_line(kModel, {{230, 10}, {230, 1}});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateLine);
  }
  CHECK_THROWS_AS(classify_mixing_line(kModel, {{580, 1300}, {215, 1}}, 10), Error);
}

TEST_CASE("plot polylines") {
  const auto plot = sample_curves(kModel, {{580, 1300}, {215, 0.1}}, 64);
  CHECK(plot.liquid.size() == 64);
  CHECK(plot.liquid.front().temperature == 215);
  CHECK(plot.liquid.back().temperature == 320);
  CHECK(plot.mixing_line.size() == 2);
}

TEST_CASE("unit conversion") {
  CHECK(molar_to_specific(specific_to_molar(2.834e6)) == doctest::Approx(2.834e6));
  CHECK(specific_to_molar(2.834e6) == doctest::Approx(51056.3).epsilon(1e-4));
}
