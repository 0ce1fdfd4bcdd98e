// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "contrail/ingest.hpp"

namespace contrail::thermo {

enum class Phase { liquid, ice };

/// Molar latent heat as a function of temperature (J/mol).
using LatentHeat = std::function<double(double)>;

/// Saturation vapour pressure curves obtained by integrating
///   d ln e / dT = L(T) / (R T^2)
/// from a common anchor (T0, e0). Constant latent heats use the closed form
///   e(T) = e0 exp(-(L/R)(1/T - 1/T0));
/// temperature-dependent ones are integrated by adaptive Gauss-Kronrod.
struct SaturationModel {
  double gas_constant = 8.31;  // J mol^-1 K^-1
  double anchor_temperature = 273.16;
  double anchor_pressure = 611.657;
  double latent_liquid = 45051.0;  // J/mol, used when latent_liquid_fn is empty
  double latent_ice = 51059.0;     // J/mol, used when latent_ice_fn is empty
  LatentHeat latent_liquid_fn;
  LatentHeat latent_ice_fn;

  double latent(Phase phase, double t) const;
  /// Checks E_ice(T) > E_liq(T) > 0 over the supported range and e0 > 0.
  void validate() const;
};

inline constexpr double kMinTemperature = 180.0;
inline constexpr double kMaxTemperature = 320.0;

/// Saturation pressure (Pa) over the supported range [180 K, 320 K]; throws
/// Error(OutOfRange) outside it.
double saturation_pressure(const SaturationModel& model, Phase phase, double t);

/// Same curve without the range guard (the mixing line spans exhaust
/// temperatures far above 320 K).
double saturation_pressure_unchecked(const SaturationModel& model, Phase phase, double t);

struct MixingLine {
  StatePoint exhaust;
  StatePoint ambient;

  double slope() const;  // Pa/K
  double vapor_pressure_at(double t) const;
};

enum class Outcome { no_contrail, persistent, non_persistent };
std::string to_string(Outcome o);

struct FormationVerdict {
  Outcome outcome = Outcome::no_contrail;
  /// crossing temperatures, descending (exhaust -> ambient traversal)
  std::vector<double> crossings_liquid;
  std::vector<double> crossings_ice;
};

/// Samples the mixing line from exhaust to ambient, refines every sign
/// change against both saturation curves by bisection (1e-6 K), and applies
/// the formation rule: no liquid crossing -> no contrail; otherwise the
/// ambient endpoint at/above ice saturation -> persistent, below -> non-persistent.
FormationVerdict classify_mixing_line(const SaturationModel& model, const MixingLine& line, int samples = 512);

struct CurveSample {
  double temperature;
  double pressure;
};

/// Polylines for plotting: both saturation curves and the mixing line,
/// saturation curves span [T_amb, T_exh] clipped to the supported range.
struct CriterionPlot {
  std::vector<CurveSample> liquid;
  std::vector<CurveSample> ice;
  std::vector<CurveSample> mixing_line;
};
CriterionPlot sample_curves(const SaturationModel& model, const MixingLine& line, int points = 128);

/// Unit conversion at the boundary: J/kg -> J/mol for water.
inline constexpr double kWaterMolarMass = 0.01801528;  // kg/mol
inline double specific_to_molar(double j_per_kg) { return j_per_kg * kWaterMolarMass; }
inline double molar_to_specific(double j_per_mol) { return j_per_mol / kWaterMolarMass; }

}  // namespace contrail::thermo
