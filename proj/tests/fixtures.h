#pragma once

#include "oracles.h"
#include "twostrain/incidence.h"
#include "twostrain/model.h"

namespace fixtures {

inline twostrain::IncidenceSpec to_spec(const oracle::Law& law) {
  using twostrain::IncidenceSpec;
  switch (law.family) {
    case oracle::Family::kBilinear: return IncidenceSpec::bilinear(law.beta);
    case oracle::Family::kSaturatedS: return IncidenceSpec::saturated_s(law.beta, law.zeta);
    case oracle::Family::kSaturatedI2: return IncidenceSpec::saturated_i2(law.beta, law.zeta);
  }
  return IncidenceSpec::bilinear(law.beta);
}

inline twostrain::Model to_model(const oracle::Setup& s) {
  return {s.p, to_spec(s.law1), to_spec(s.law2)};
}

/// Parameter sets of the four published examples (index 1..4).
inline oracle::Setup example(int n) {
  oracle::Setup s;
  s.p.Lambda = 200;
  s.p.mu = 0.02;
  s.p.r = n == 4 ? 0.01 : 0.1;
  s.p.k = 2e-5;
  s.p.gamma1 = 0.07;
  s.p.gamma2 = 0.09;
  s.p.v1 = 0.1;
  s.p.v2 = 0.1;
  using oracle::Family;
  switch (n) {
    case 1:
      s.law1 = {Family::kSaturatedI2, 3e-5, 0.7};
      s.law2 = {Family::kSaturatedS, 2e-4, 0.9};
      break;
    case 2:
      s.law1 = {Family::kBilinear, 2e-4, 0.0};
      s.law2 = {Family::kSaturatedS, 2e-4, 0.9};
      break;
    case 3:
      s.law1 = {Family::kSaturatedI2, 3e-5, 0.7};
      s.law2 = {Family::kSaturatedS, 2e-4, 0.001};
      break;
    default:
      s.law1 = {Family::kSaturatedI2, 2e-4, 1e-4};
      s.law2 = {Family::kSaturatedS, 2e-4, 1e-4};
      break;
  }
  return s;
}

inline twostrain::Model example_model(int n) { return to_model(example(n)); }

inline twostrain::State paper_start() { return {500, 500, 50, 50, {}}; }

}  // namespace fixtures
