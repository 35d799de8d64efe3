#pragma once

#include <map>
#include <string>

#include "perifront/linalg.hpp"

namespace perifront {

enum class SpeedMethod { FrontSlope, LevelSet, Recursion, SemiWave };

inline const char* to_string(SpeedMethod m) {
  switch (m) {
    case SpeedMethod::FrontSlope: return "front-slope";
    case SpeedMethod::LevelSet: return "level-set";
    case SpeedMethod::Recursion: return "recursion";
    case SpeedMethod::SemiWave: return "semi-wave";
  }
  return "?";
}

/// A measured speed: distance per unit time, the method that produced it,
/// the fit window, and the fit residual (never hidden).
struct SpeedEstimate {
  Real value = 0;
  SpeedMethod method = SpeedMethod::FrontSlope;
  Real fit_t_lo = 0, fit_t_hi = 0;
  Real residual = 0;
  std::map<std::string, Real> meta;
};

}  // namespace perifront
