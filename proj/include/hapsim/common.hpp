#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hapsim {

inline constexpr double kLightSpeedMps = 299792458.0;

// Bandwidth pools shared by all links of one class.
enum class CommGroup : int { DlHaps = 0, UlHaps = 1, DlRsu = 2, UlRsu = 3 };
inline constexpr int kNumCommGroups = 4;
inline constexpr std::array<CommGroup, 4> kAllCommGroups = {
    CommGroup::DlHaps, CommGroup::UlHaps, CommGroup::DlRsu, CommGroup::UlRsu};

inline const char* to_string(CommGroup k) {
  switch (k) {
    case CommGroup::DlHaps: return "dl_H";
    case CommGroup::UlHaps: return "ul_H";
    case CommGroup::DlRsu: return "dl_R";
    case CommGroup::UlRsu: return "ul_R";
  }
  return "?";
}

// Physical links of the system. HapsToRsu / HapsToCav / CavToHaps are LoS,
// the RSU-CAV pair is NLoS.
enum class LinkType : int {
  HapsToRsu = 1,
  HapsToCav = 2,
  CavToHaps = 3,
  RsuToCav = 4,
  CavToRsu = 5,
};

enum class ComputeMode : int { Local = 0, Haps = 1, Rsu = 2 };

enum class AllocMode : int { Equal = 0, Optimal = 1 };

inline const char* to_string(ComputeMode m) {
  switch (m) {
    case ComputeMode::Local: return "local";
    case ComputeMode::Haps: return "haps";
    case ComputeMode::Rsu: return "rsu";
  }
  return "?";
}

// Error taxonomy, mapped to CLI exit codes (config=2, numerical=3, cap=4).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class CapExceededError : public std::runtime_error {
 public:
  explicit CapExceededError(const std::string& what) : std::runtime_error(what) {}
};

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double dbi_to_linear(double dbi) { return std::pow(10.0, dbi / 10.0); }

}  // namespace hapsim
