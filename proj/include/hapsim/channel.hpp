#pragma once

#include "hapsim/common.hpp"
#include "hapsim/config.hpp"
#include "hapsim/rng.hpp"

namespace hapsim {

struct LinkGeometry {
  LinkType link;
  double distance_m = 0.0;
  bool los = false;
};

// NLoS distances are clamped at the 1 m reference distance of beta0.
inline constexpr double kMinNlosDistanceM = 1.0;

// Free-space gain at 1 m, used as the NLoS reference path loss.
inline double nlos_beta0(double carrier_hz) {
  const double x = kLightSpeedMps / (4.0 * M_PI * carrier_hz);
  return x * x;
}

// LoS power gain: antenna_gain * (c / (4 pi d f_c))^2 * |h|^2.
double los_gain(const LinkGeometry& geom, double antenna_gain, double carrier_hz,
                double fading_power);

// NLoS power gain: beta0 * |h|^2 / d^alpha.
double nlos_gain(const LinkGeometry& geom, double beta0, double alpha, double fading_power);

// Squared small-scale fading coefficient, unit mean. LoS links draw a Rician
// envelope with factor K, NLoS links a Rayleigh envelope.
double sample_fading(Rng& rng, bool los, double rician_k_linear);

// Shannon rate over the allocated share: b*B*log2(1 + P*G / (b*B*N0)).
double rate_bps(double b, double bandwidth_hz, double tx_power_w, double gain,
                double noise_psd_w_hz);

// Link geometries in the 1-D road plus HAPS-altitude plane.
LinkGeometry haps_cav_geometry(double cav_position_m, const ScenarioConfig& cfg, LinkType link);
LinkGeometry haps_rsu_geometry(int rsu, const ScenarioConfig& cfg);
LinkGeometry rsu_cav_geometry(double cav_position_m, int rsu, const ScenarioConfig& cfg,
                              LinkType link);

}  // namespace hapsim
