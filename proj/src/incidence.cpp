#include "semimed/incidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace semimed {

const char* to_string(Decomposition d) { return d == Decomposition::prev ? "prev" : "haz"; }

const char* to_string(Effect e) {
  switch (e) {
    case Effect::total: return "total";
    case Effect::de: return "de";
    case Effect::ie: return "ie";
    case Effect::de_alt: return "de_alt";
    case Effect::ie_alt: return "ie_alt";
  }
  return "?";
}

ArmEstimates estimate_arm(const RiskSetPanel& panel) {
  ArmEstimates a;
  a.lam_star = nelson_aalen(panel, HazardKind::nonterminal);
  a.lam0 = nelson_aalen(panel, HazardKind::terminal_from_state0);
  a.lam1 = nelson_aalen(panel, HazardKind::terminal_from_state1);
  a.prev = prevalence(panel);
  return a;
}

StepFunction incidence_prev(const ArmEstimates& arm_z2, const PrevalenceCurve& prev_z1,
                            double horizon) {
  // Merge the jump times of the two terminal hazards of arm z2.
  const auto& t0 = arm_z2.lam0.curve.jump_times();
  const auto& i0 = arm_z2.lam0.curve.increments();
  const auto& t1 = arm_z2.lam1.curve.jump_times();
  const auto& i1 = arm_z2.lam1.curve.increments();

  std::vector<double> times, values;
  double cum = 0.0;
  std::size_t a = 0, b = 0;
  while (a < t0.size() || b < t1.size()) {
    double s;
    double d0 = 0.0, d1 = 0.0;
    if (a < t0.size() && (b >= t1.size() || t0[a] <= t1[b])) s = t0[a];
    else s = t1[b];
    if (a < t0.size() && t0[a] == s) d0 = i0[a], ++a;
    if (b < t1.size() && t1[b] == s) d1 = i1[b], ++b;
    if (s > horizon) break;
    const auto w = prev_z1.left_limit(s);
    cum += w.w0 * d0 + w.w1 * d1;
    times.push_back(s);
    values.push_back(1.0 - std::exp(-cum));
  }
  return StepFunction::from_values(times, values);
}

HazCellCurves incidence_haz(const ArmEstimates& arm_z1, const ArmEstimates& arm_z2,
                            double horizon) {
  const auto& ts = arm_z1.lam_star.curve.jump_times();
  const auto& is = arm_z1.lam_star.curve.increments();
  const auto& t0 = arm_z2.lam0.curve.jump_times();
  const auto& i0 = arm_z2.lam0.curve.increments();
  const auto& t1 = arm_z2.lam1.curve.jump_times();
  const auto& i1 = arm_z2.lam1.curve.increments();

  std::vector<double> times, vf, vf0, vf1, vfs;
  double p00 = 1.0;   // exp(-Lstar(s) - L0(s))
  double bsum = 0.0;  // sum over transition jumps u <= s of mass(u) * exp(L1(u) - L1(s))
  double f0 = 0.0, fstar = 0.0, fprev_val = 0.0;

  std::size_t a = 0, b = 0, c = 0;
  while (a < ts.size() || b < t0.size() || c < t1.size()) {
    double s = std::numeric_limits<double>::infinity();
    if (a < ts.size()) s = std::min(s, ts[a]);
    if (b < t0.size()) s = std::min(s, t0[b]);
    if (c < t1.size()) s = std::min(s, t1[c]);
    double dstar = 0.0, d0 = 0.0, d1 = 0.0;
    if (a < ts.size() && ts[a] == s) dstar = is[a], ++a;
    if (b < t0.size() && t0[b] == s) d0 = i0[b], ++b;
    if (c < t1.size() && t1[c] == s) d1 = i1[c], ++c;
    if (s > horizon) break;

    // Post-transition deaths at s act on mass already in state 1, not on the
    // mass transitioning at s itself.
    if (d1 > 0.0) bsum *= std::exp(-d1);

    const double dtot = dstar + d0;
    if (dtot > 0.0) {
      const double drop = p00 * (1.0 - std::exp(-dtot));
      const double mu_star = drop * (dstar / dtot);
      const double mu0 = drop * (d0 / dtot);
      f0 += mu0;
      fstar += mu_star;
      bsum += mu_star;
      p00 *= std::exp(-dtot);
    }

    double f = 1.0 - p00 - bsum;
    if (f < fprev_val) f = fprev_val;  // shield against ulp-level dips
    fprev_val = f;
    double f1 = fstar - bsum;
    if (f1 < 0.0) f1 = 0.0;

    times.push_back(s);
    vf.push_back(f);
    vf0.push_back(f0);
    vf1.push_back(f1);
    vfs.push_back(fstar);
  }
  HazCellCurves out;
  out.f = StepFunction::from_values(times, vf);
  out.f0 = StepFunction::from_values(times, vf0);
  out.f1 = StepFunction::from_values(times, vf1);
  out.fstar = StepFunction::from_values(times, vfs);
  return out;
}

IncidenceSurface surface_prev(const ArmEstimates arms[2], double horizon) {
  IncidenceSurface s;
  s.decomposition = Decomposition::prev;
  for (int z1 = 0; z1 < 2; ++z1)
    for (int z2 = 0; z2 < 2; ++z2)
      s.f[z1][z2] = incidence_prev(arms[z2], arms[z1].prev, horizon);
  return s;
}

IncidenceSurface surface_haz(const ArmEstimates arms[2], double horizon) {
  IncidenceSurface s;
  s.decomposition = Decomposition::haz;
  for (int z1 = 0; z1 < 2; ++z1)
    for (int z2 = 0; z2 < 2; ++z2) {
      s.aux[z1][z2] = incidence_haz(arms[z1], arms[z2], horizon);
      s.f[z1][z2] = s.aux[z1][z2].f;
    }
  return s;
}

EffectCells effect_cells(Effect e) {
  switch (e) {
    case Effect::total: return {1, 1, 0, 0};
    case Effect::de: return {0, 1, 0, 0};
    case Effect::ie: return {1, 1, 0, 1};
    case Effect::de_alt: return {1, 1, 1, 0};
    case Effect::ie_alt: return {1, 0, 0, 0};
  }
  return {0, 0, 0, 0};
}

StepFunction effect_curve(const IncidenceSurface& s, Effect e) {
  const EffectCells c = effect_cells(e);
  const StepFunction& fa = s.f[c.a_z1][c.a_z2];
  const StepFunction& fb = s.f[c.b_z1][c.b_z2];
  std::vector<double> grid = union_jump_times(
      {&s.f[0][0], &s.f[0][1], &s.f[1][0], &s.f[1][1]});
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = fa.value(grid[i]) - fb.value(grid[i]);
  }
  return StepFunction::from_values(grid, values);
}

std::vector<EffectEstimate> effects(const IncidenceSurface& s) {
  std::vector<EffectEstimate> out;
  for (Effect e : {Effect::total, Effect::de, Effect::ie, Effect::de_alt, Effect::ie_alt}) {
    out.push_back({e, s.decomposition, effect_curve(s, e)});
  }
  return out;
}

}  // namespace semimed
