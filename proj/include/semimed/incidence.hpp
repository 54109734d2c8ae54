#pragma once

#include <array>
#include <string>
#include <vector>

#include "semimed/hazard.hpp"
#include "semimed/step_function.hpp"

namespace semimed {

enum class Decomposition { prev, haz };
enum class Effect { total, de, ie, de_alt, ie_alt };

const char* to_string(Decomposition d);
const char* to_string(Effect e);

// All per-arm estimated curves needed to assemble counterfactual incidences.
struct ArmEstimates {
  HazardCurve lam_star;  // non-terminal transition hazard
  HazardCurve lam0;      // terminal hazard without prior non-terminal event
  HazardCurve lam1;      // terminal hazard after the non-terminal event
  PrevalenceCurve prev;
};

ArmEstimates estimate_arm(const RiskSetPanel& panel);

// Counterfactual cumulative incidence under the prevalence-controlling
// decomposition: F(t; z1, z2) = 1 - exp(-sum over terminal jumps of arm z2 of
// w_{n1}(s-; z1) dLambda_{n1}(s; z2)), truncated at `horizon`.
StepFunction incidence_prev(const ArmEstimates& arm_z2, const PrevalenceCurve& prev_z1,
                            double horizon);

// Counterfactual incidence under the hazard-controlling decomposition plus
// its sub-distributions. At each jump of the pooled state-0 exit hazard the
// exact drop of exp(-Lstar-L0) is split proportionally between the two exit
// causes, so the closed form, f0 + f1 and the [0,1] bounds agree to round-off.
struct HazCellCurves {
  StepFunction f;      // f = f0 + f1 (closed form)
  StepFunction f0;     // terminal without prior non-terminal event
  StepFunction f1;     // terminal with prior non-terminal event
  StepFunction fstar;  // non-terminal event incidence
};

HazCellCurves incidence_haz(const ArmEstimates& arm_z1, const ArmEstimates& arm_z2,
                            double horizon);

// The four counterfactual curves F(t; z1, z2) for one decomposition.
struct IncidenceSurface {
  Decomposition decomposition{};
  std::array<std::array<StepFunction, 2>, 2> f;  // f[z1][z2]
  std::array<std::array<HazCellCurves, 2>, 2> aux;  // populated for haz only
};

IncidenceSurface surface_prev(const ArmEstimates arms[2], double horizon);
IncidenceSurface surface_haz(const ArmEstimates arms[2], double horizon);

// Effect curves on the union of the four cells' jump grids.
StepFunction effect_curve(const IncidenceSurface& s, Effect e);

struct EffectEstimate {
  Effect effect{};
  Decomposition decomposition{};
  StepFunction curve;
};

std::vector<EffectEstimate> effects(const IncidenceSurface& s);

// Cells contrasted by each effect, as (z1, z2) pairs: effect = first - second.
struct EffectCells {
  int a_z1, a_z2, b_z1, b_z2;
};
EffectCells effect_cells(Effect e);

}  // namespace semimed
