#include "hapsim/grouping.hpp"

namespace hapsim {

JointDecision JointDecision::from_actions(const std::vector<int>& actions) {
  JointDecision d;
  d.offload.reserve(actions.size());
  d.cache.reserve(actions.size());
  for (int u : actions) {
    switch (u) {
      case 0: d.offload.push_back(ComputeMode::Local); d.cache.push_back(0); break;
      case 1: d.offload.push_back(ComputeMode::Haps);  d.cache.push_back(0); break;
      case 2: d.offload.push_back(ComputeMode::Rsu);   d.cache.push_back(0); break;
      case 3: d.offload.push_back(ComputeMode::Rsu);   d.cache.push_back(1); break;
      default: throw NumericalError("action out of range: " + std::to_string(u));
    }
  }
  return d;
}

SlotChannels sample_slot_channels(Rng& rng, const std::vector<CavState>& cavs,
                                  const ScenarioConfig& cfg) {
  SlotChannels ch;
  const std::size_t n = cavs.size();
  ch.gain_dl_haps.resize(n);
  ch.gain_ul_haps.resize(n);
  ch.gain_dl_rsu.resize(n);
  ch.gain_ul_rsu.resize(n);
  ch.gain_haps_rsu.resize(static_cast<std::size_t>(cfg.num_rsus()));

  const double antenna = cfg.antenna_gain_linear();
  const double k_lin = cfg.rician_k_linear();
  const double beta0 = nlos_beta0(cfg.carrier_hz);
  const double alpha = cfg.pathloss_exponent;

  for (std::size_t i = 0; i < n; ++i) {
    const auto& cav = cavs[i];
    const auto haps_dl = haps_cav_geometry(cav.position_m, cfg, LinkType::HapsToCav);
    const auto haps_ul = haps_cav_geometry(cav.position_m, cfg, LinkType::CavToHaps);
    const auto rsu_dl = rsu_cav_geometry(cav.position_m, cav.associated_rsu, cfg, LinkType::RsuToCav);
    const auto rsu_ul = rsu_cav_geometry(cav.position_m, cav.associated_rsu, cfg, LinkType::CavToRsu);
    ch.gain_dl_haps[i] = los_gain(haps_dl, antenna, cfg.carrier_hz, sample_fading(rng, true, k_lin));
    ch.gain_ul_haps[i] = los_gain(haps_ul, antenna, cfg.carrier_hz, sample_fading(rng, true, k_lin));
    ch.gain_dl_rsu[i] = nlos_gain(rsu_dl, beta0, alpha, sample_fading(rng, false, k_lin));
    ch.gain_ul_rsu[i] = nlos_gain(rsu_ul, beta0, alpha, sample_fading(rng, false, k_lin));
  }
  for (int m = 0; m < cfg.num_rsus(); ++m) {
    ch.gain_haps_rsu[static_cast<std::size_t>(m)] =
        los_gain(haps_rsu_geometry(m, cfg), antenna, cfg.carrier_hz,
                 sample_fading(rng, true, k_lin));
  }
  return ch;
}

std::vector<std::uint8_t> cache_flags(const std::vector<CavState>& cavs,
                                      const std::vector<Task>& tasks,
                                      const std::vector<RsuCache>& caches) {
  std::vector<std::uint8_t> s(cavs.size(), 0);
  for (std::size_t i = 0; i < cavs.size(); ++i) {
    const auto& cache = caches[static_cast<std::size_t>(cavs[i].associated_rsu)];
    s[i] = cache.contains(tasks[i].content_id) ? 1 : 0;
  }
  return s;
}

Groups build_groups(const JointDecision& decisions, const std::vector<std::uint8_t>& s_flags,
                    const std::vector<Task>& tasks, const std::vector<CavState>& cavs,
                    const SlotChannels& channels, const ContentLibrary& library,
                    const ScenarioConfig& cfg) {
  const int n = static_cast<int>(cavs.size());
  if (decisions.size() != n) throw NumericalError("decision count does not match fleet size");
  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (decisions.cache[idx] && decisions.offload[idx] != ComputeMode::Rsu)
      throw NumericalError("caching decision requires RSU computing (cav " + std::to_string(i) + ")");
  }

  Groups g;
  g.comp_rsu.resize(static_cast<std::size_t>(cfg.num_rsus()));
  const double n0 = cfg.noise_psd_w_hz();

  auto add = [&](CommGroup k, int cav, LinkType link, double payload, double gain) {
    const double bw = cfg.bandwidth(k);
    g.comm[static_cast<std::size_t>(k)].push_back(
        {cav, link, payload, gain, payload / bw, cfg.tx_power_w(k) * gain / (bw * n0)});
  };

  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto& task = tasks[idx];
    const bool cached = s_flags[idx] != 0;
    const double omega = library.size(task.content_id);
    const int rsu = cavs[idx].associated_rsu;
    switch (decisions.offload[idx]) {
      case ComputeMode::Local:
        g.comp_local.push_back(i);
        if (cached) {
          add(CommGroup::DlRsu, i, LinkType::RsuToCav, omega, channels.gain_dl_rsu[idx]);
        } else {
          add(CommGroup::DlHaps, i, LinkType::HapsToCav, omega, channels.gain_dl_haps[idx]);
        }
        break;
      case ComputeMode::Haps:
        // the library sits at the HAPS, so no fundamental-data transfer
        g.comp_haps.push_back(i);
        add(CommGroup::UlHaps, i, LinkType::CavToHaps, task.input_bits, channels.gain_ul_haps[idx]);
        add(CommGroup::DlHaps, i, LinkType::HapsToCav, task.output_bits, channels.gain_dl_haps[idx]);
        break;
      case ComputeMode::Rsu:
        g.comp_rsu[static_cast<std::size_t>(rsu)].push_back(i);
        if (!cached) {
          add(CommGroup::DlHaps, i, LinkType::HapsToRsu, omega,
              channels.gain_haps_rsu[static_cast<std::size_t>(rsu)]);
        }
        add(CommGroup::UlRsu, i, LinkType::CavToRsu, task.input_bits, channels.gain_ul_rsu[idx]);
        add(CommGroup::DlRsu, i, LinkType::RsuToCav, task.output_bits, channels.gain_dl_rsu[idx]);
        break;
    }
  }
  return g;
}

}  // namespace hapsim
