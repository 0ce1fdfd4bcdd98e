// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/thermo.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "contrail/error.hpp"

namespace contrail::thermo {

double SaturationModel::latent(Phase phase, double t) const {
  if (phase == Phase::liquid) return latent_liquid_fn ? latent_liquid_fn(t) : latent_liquid;
  return latent_ice_fn ? latent_ice_fn(t) : latent_ice;
}

void SaturationModel::validate() const {
  if (!(anchor_pressure > 0)) throw Error(ErrorKind::InvalidArgument, "anchor pressure must be positive");
  if (!(gas_constant > 0)) throw Error(ErrorKind::InvalidArgument, "gas constant must be positive");
  for (double t = kMinTemperature; t <= kMaxTemperature; t += 1.0) {
    const double l = latent(Phase::liquid, t);
    const double i = latent(Phase::ice, t);
    if (!(l > 0) || !(i > l))
      throw Error(ErrorKind::InvalidArgument, "latent heats must satisfy E_ice > E_liq > 0 at T=" + std::to_string(t));
  }
}

double saturation_pressure_unchecked(const SaturationModel& model, Phase phase, double t) {
  const double t0 = model.anchor_temperature;
  const bool constant = phase == Phase::liquid ? !model.latent_liquid_fn : !model.latent_ice_fn;
  if (constant) {
    const double l = model.latent(phase, t);
    return model.anchor_pressure * std::exp(-(l / model.gas_constant) * (1.0 / t - 1.0 / t0));
  }
  auto integrand = [&](double s) { return model.latent(phase, s) / (model.gas_constant * s * s); };
  const double log_ratio = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, t0, t, 12, 1e-13);
  return model.anchor_pressure * std::exp(log_ratio);
}

double saturation_pressure(const SaturationModel& model, Phase phase, double t) {
  if (!(t >= kMinTemperature && t <= kMaxTemperature)) throw Error(ErrorKind::OutOfRange, std::to_string(t));
  return saturation_pressure_unchecked(model, phase, t);
}

double MixingLine::slope() const {
  return (exhaust.vapor_pressure - ambient.vapor_pressure) / (exhaust.temperature - ambient.temperature);
}

double MixingLine::vapor_pressure_at(double t) const {
  return ambient.vapor_pressure + slope() * (t - ambient.temperature);
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::no_contrail: return "no_contrail";
    case Outcome::persistent: return "persistent";
    case Outcome::non_persistent: return "non_persistent";
  }
  return "unknown";
}

namespace {

std::vector<double> crossings(const SaturationModel& model, Phase phase, const MixingLine& line, int samples) {
  auto f = [&](double t) { return line.vapor_pressure_at(t) - saturation_pressure_unchecked(model, phase, t); };
  const double t_hi = line.exhaust.temperature;
  const double t_lo = line.ambient.temperature;
  std::vector<double> out;
  double prev_t = t_hi;
  double prev_f = f(t_hi);
  for (int k = 1; k < samples; ++k) {
    const double t = t_hi + (t_lo - t_hi) * static_cast<double>(k) / static_cast<double>(samples - 1);
    const double ft = f(t);
    if (ft == 0.0) {
      out.push_back(t);
    } else if ((prev_f < 0) != (ft < 0) && prev_f != 0.0) {
      double a = prev_t, b = t, fa = prev_f;
      while (std::abs(a - b) > 1e-6) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      out.push_back(0.5 * (a + b));
    }
    prev_t = t;
    prev_f = ft;
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

FormationVerdict classify_mixing_line(const SaturationModel& model, const MixingLine& line, int samples) {
  if (line.exhaust.temperature == line.ambient.temperature)
    throw Error(ErrorKind::DegenerateLine, "exhaust and ambient temperatures coincide");
  if (!(line.exhaust.temperature > line.ambient.temperature))
    throw Error(ErrorKind::InvalidArgument, "exhaust must be hotter than ambient");
  if (line.exhaust.vapor_pressure < 0 || line.ambient.vapor_pressure < 0)
    throw Error(ErrorKind::InvalidArgument, "vapour pressures must be non-negative");
  if (samples < 64) throw Error(ErrorKind::InvalidArgument, "samples must be >= 64");

  FormationVerdict v;
  v.crossings_liquid = crossings(model, Phase::liquid, line, samples);
  v.crossings_ice = crossings(model, Phase::ice, line, samples);
  if (v.crossings_liquid.empty()) {
    v.outcome = Outcome::no_contrail;
  } else {
    const double s_ice = saturation_pressure_unchecked(model, Phase::ice, line.ambient.temperature);
    v.outcome = line.ambient.vapor_pressure >= s_ice ? Outcome::persistent : Outcome::non_persistent;
  }
  return v;
}

CriterionPlot sample_curves(const SaturationModel& model, const MixingLine& line, int points) {
  CriterionPlot plot;
  const double lo = std::clamp(line.ambient.temperature, kMinTemperature, kMaxTemperature);
  const double hi = std::clamp(line.exhaust.temperature, kMinTemperature, kMaxTemperature);
  const int n = std::max(points, 2);
  for (int k = 0; k < n; ++k) {
    const double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    plot.liquid.push_back({t, saturation_pressure(model, Phase::liquid, t)});
    plot.ice.push_back({t, saturation_pressure(model, Phase::ice, t)});
  }
  plot.mixing_line.push_back({line.ambient.temperature, line.ambient.vapor_pressure});
  plot.mixing_line.push_back({line.exhaust.temperature, line.exhaust.vapor_pressure});
  return plot;
}

}  // namespace contrail::thermo
