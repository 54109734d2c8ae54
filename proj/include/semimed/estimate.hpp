#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semimed/incidence.hpp"
#include "semimed/inference.hpp"
#include "semimed/records.hpp"

namespace semimed {

enum class DecompositionChoice { prev, haz, both };
enum class CiChoice { none, asymptotic, bootstrap, both };

constexpr unsigned effect_bit(Effect e) { return 1u << static_cast<unsigned>(e); }
constexpr unsigned kAllEffects =
    effect_bit(Effect::total) | effect_bit(Effect::de) | effect_bit(Effect::ie) |
    effect_bit(Effect::de_alt) | effect_bit(Effect::ie_alt);

struct EstimateOptions {
  DecompositionChoice decomposition = DecompositionChoice::both;
  CiChoice ci = CiChoice::none;
  unsigned effects_mask = kAllEffects;
  int n_boot = 200;
  double alpha = 0.05;
  std::uint64_t seed = 20240801;
  int threads = 1;
  std::vector<double> grid;  // empty: use all event (jump) times up to the horizon
};

struct CurveOutput {
  Decomposition dec{};
  bool is_effect = false;
  int z1 = 0, z2 = 0;
  Effect effect{};
  std::string label;  // "F(0,1)", "total", ...
  std::vector<double> estimate;  // aligned with EstimateResult::grid

  struct MethodBand {
    VarianceMethod method = VarianceMethod::none;
    bool partial = false;  // se reported, interval withheld
    bool has_ci = false;
    std::vector<double> se, lo, hi;
  };
  std::vector<MethodBand> bands;
};

struct EstimateResult {
  std::vector<double> grid;
  double horizon = 0.0;
  std::vector<CurveOutput> curves;
  std::vector<std::string> warnings;
  EstimateOptions options;
  std::size_t m_total = 0, m_arm0 = 0, m_arm1 = 0;
};

// Full estimation pipeline: panels, transition hazards, prevalence, both
// decompositions' counterfactual incidences, effect curves, and the requested
// uncertainty quantification. Throws ValidationError for bad data and
// PartialVarianceError when asymptotic-only intervals are requested for the
// prevalence-controlling decomposition (its cross-world variance is partial
// by design; bootstrap is the supported path there).
EstimateResult run_estimate(const std::vector<SubjectRecord>& records,
                            const EstimateOptions& opt);

}  // namespace semimed
