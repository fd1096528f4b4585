#include "hapsim/channel.hpp"

#include <cmath>

namespace hapsim {

double los_gain(const LinkGeometry& geom, double antenna_gain, double carrier_hz,
                double fading_power) {
  if (!geom.los) throw NumericalError("los_gain called on a non-LoS link");
  if (geom.distance_m <= 0.0) throw NumericalError("los_gain needs a positive distance");
  const double x = kLightSpeedMps / (4.0 * M_PI * geom.distance_m * carrier_hz);
  return antenna_gain * x * x * fading_power;
}

double nlos_gain(const LinkGeometry& geom, double beta0, double alpha, double fading_power) {
  if (geom.los) throw NumericalError("nlos_gain called on a LoS link");
  const double d = std::max(geom.distance_m, kMinNlosDistanceM);
  return beta0 * fading_power / std::pow(d, alpha);
}

double sample_fading(Rng& rng, bool los, double rician_k_linear) {
  if (!los) return rng.exponential();
  // Rician: deterministic component sqrt(K/(K+1)), scattered component with
  // per-axis variance 1/(2(K+1)); E[|h|^2] = 1.
  const double k = rician_k_linear;
  const double mean_amp = std::sqrt(k / (k + 1.0));
  const double sigma = std::sqrt(1.0 / (2.0 * (k + 1.0)));
  const double re = mean_amp + sigma * rng.normal();
  const double im = sigma * rng.normal();
  return re * re + im * im;
}

double rate_bps(double b, double bandwidth_hz, double tx_power_w, double gain,
                double noise_psd_w_hz) {
  if (b <= 0.0) throw NumericalError("rate requires a positive bandwidth ratio");
  const double share = b * bandwidth_hz;
  return share * std::log2(1.0 + tx_power_w * gain / (share * noise_psd_w_hz));
}

LinkGeometry haps_cav_geometry(double cav_position_m, const ScenarioConfig& cfg, LinkType link) {
  const double dx = cav_position_m - cfg.haps_horizontal_m;
  return {link, std::hypot(dx, cfg.haps_altitude_m), true};
}

LinkGeometry haps_rsu_geometry(int rsu, const ScenarioConfig& cfg) {
  const double dx = cfg.rsu_positions_m[static_cast<std::size_t>(rsu)] - cfg.haps_horizontal_m;
  return {LinkType::HapsToRsu, std::hypot(dx, cfg.haps_altitude_m), true};
}

LinkGeometry rsu_cav_geometry(double cav_position_m, int rsu, const ScenarioConfig& cfg,
                              LinkType link) {
  const double d = std::abs(cav_position_m - cfg.rsu_positions_m[static_cast<std::size_t>(rsu)]);
  return {link, std::max(d, kMinNlosDistanceM), false};
}

}  // namespace hapsim
