#include "semimed/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "semimed/errors.hpp"
#include "semimed/panel.hpp"

namespace semimed {

namespace {

const Effect kEffectOrder[5] = {Effect::total, Effect::de, Effect::ie, Effect::de_alt,
                                Effect::ie_alt};

std::string cell_label(int z1, int z2) {
  return "F(" + std::to_string(z1) + "," + std::to_string(z2) + ")";
}

}  // namespace

EstimateResult run_estimate(const std::vector<SubjectRecord>& records,
                            const EstimateOptions& opt) {
  if (opt.alpha <= 0.0 || opt.alpha >= 1.0) throw ConfigError("alpha must be in (0,1)");
  if ((opt.ci == CiChoice::bootstrap || opt.ci == CiChoice::both) && opt.n_boot < 2) {
    throw ConfigError("n_boot must be at least 2");
  }
  const bool want_prev = opt.decomposition != DecompositionChoice::haz;
  const bool want_haz = opt.decomposition != DecompositionChoice::prev;
  if (opt.ci == CiChoice::asymptotic && want_prev) {
    throw PartialVarianceError(
        "asymptotic-only intervals are unavailable for the prevalence-controlling "
        "decomposition: the covariance of the cross-world prevalence process is not "
        "estimated (martingale term only). Use --ci bootstrap or --ci both.");
  }

  EstimateResult res;
  res.options = opt;

  // validate and split
  {
    int bad = 0;
    for (const auto& r : records) {
      if (!record_violation(r).empty()) ++bad;
    }
    if (bad > 0) throw ValidationError(std::to_string(bad) + " invalid record(s)");
  }
  const RiskSetPanel p0 = build_panel(records, 0);
  const RiskSetPanel p1 = build_panel(records, 1);
  res.m_arm0 = static_cast<std::size_t>(p0.m_arm);
  res.m_arm1 = static_cast<std::size_t>(p1.m_arm);
  res.m_total = res.m_arm0 + res.m_arm1;
  res.horizon = std::min(panel_horizon(p0), panel_horizon(p1));

  const ArmEstimates arms[2] = {estimate_arm(p0), estimate_arm(p1)};
  IncidenceSurface sp, sh;
  if (want_prev) sp = surface_prev(arms, res.horizon);
  if (want_haz) sh = surface_haz(arms, res.horizon);

  // evaluation grid
  if (opt.grid.empty()) {
    std::set<double> g;
    for (const IncidenceSurface* s : {want_prev ? &sp : nullptr, want_haz ? &sh : nullptr}) {
      if (!s) continue;
      for (int z1 = 0; z1 < 2; ++z1)
        for (int z2 = 0; z2 < 2; ++z2)
          for (double t : s->f[z1][z2].jump_times()) g.insert(t);
    }
    res.grid.assign(g.begin(), g.end());
  } else {
    res.grid = opt.grid;
    std::sort(res.grid.begin(), res.grid.end());
    res.grid.erase(std::unique(res.grid.begin(), res.grid.end()), res.grid.end());
    for (double t : res.grid) {
      if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("grid times must be finite and >= 0");
    }
    if (!res.grid.empty() && res.grid.back() > res.horizon) {
      res.warnings.push_back("grid extends beyond the supported horizon " +
                             std::to_string(res.horizon) +
                             "; estimates there are frozen at their last value");
    }
  }
  if (res.grid.empty()) res.grid.push_back(res.horizon);

  // enumerate output curves
  std::vector<CurveOutput> curves;
  for (const Decomposition dec : {Decomposition::prev, Decomposition::haz}) {
    if ((dec == Decomposition::prev && !want_prev) || (dec == Decomposition::haz && !want_haz))
      continue;
    const IncidenceSurface& s = dec == Decomposition::prev ? sp : sh;
    for (int z1 = 0; z1 < 2; ++z1) {
      for (int z2 = 0; z2 < 2; ++z2) {
        CurveOutput c;
        c.dec = dec;
        c.is_effect = false;
        c.z1 = z1;
        c.z2 = z2;
        c.label = cell_label(z1, z2);
        c.estimate = s.f[z1][z2].values_on(res.grid);
        curves.push_back(std::move(c));
      }
    }
    for (Effect e : kEffectOrder) {
      if (!(opt.effects_mask & effect_bit(e))) continue;
      CurveOutput c;
      c.dec = dec;
      c.is_effect = true;
      c.effect = e;
      c.label = to_string(e);
      const EffectCells cc = effect_cells(e);
      c.estimate.resize(res.grid.size());
      for (std::size_t i = 0; i < res.grid.size(); ++i) {
        c.estimate[i] =
            s.f[cc.a_z1][cc.a_z2].value(res.grid[i]) - s.f[cc.b_z1][cc.b_z2].value(res.grid[i]);
      }
      curves.push_back(std::move(c));
    }
  }

  const bool do_asym = opt.ci == CiChoice::asymptotic || opt.ci == CiChoice::both;
  const bool do_boot = opt.ci == CiChoice::bootstrap || opt.ci == CiChoice::both;
  std::set<std::string> unstable;

  if (do_asym) {
    for (CurveOutput& c : curves) {
      const bool is_prev = c.dec == Decomposition::prev;
      // prevalence-decomposition DE/IE variances are partial; skip them (the
      // bootstrap band carries the interval when requested)
      if (is_prev && c.is_effect && c.effect != Effect::total) continue;
      VarianceCurve vc;
      if (!is_prev) {
        vc = c.is_effect ? var_haz_effects(arms, sh, c.effect, res.grid)
                         : var_haz_incidence(arms, sh, c.z1, c.z2, res.grid);
      } else if (c.is_effect) {  // total only
        vc = var_prev_total_curve(arms, sp, res.grid);
      } else {
        vc = var_prev_partial(arms, sp, c.z1, c.z2, res.grid);
      }
      CurveOutput::MethodBand band;
      band.method = VarianceMethod::asymptotic;
      band.partial = vc.partial;
      band.has_ci = !vc.partial;
      band.se.resize(res.grid.size());
      if (band.has_ci) {
        band.lo.resize(res.grid.size());
        band.hi.resize(res.grid.size());
      }
      for (std::size_t i = 0; i < res.grid.size(); ++i) {
        const double v = vc.curve.value(res.grid[i]);
        band.se[i] = std::sqrt(std::max(0.0, v));
        if (band.has_ci) {
          const Band bd = wald_band(c.estimate[i], v, opt.alpha, false,
                                    c.is_effect ? -1.0 : 0.0, 1.0);
          band.lo[i] = bd.lo;
          band.hi[i] = bd.hi;
        }
      }
      if (vc.min_at_risk > 0.0 && vc.min_at_risk < 5.0) unstable.insert(c.label);
      c.bands.push_back(std::move(band));
    }
  }

  if (do_boot) {
    std::vector<BootTarget> targets;
    for (const CurveOutput& c : curves) {
      BootTarget tg;
      tg.dec = c.dec;
      tg.is_effect = c.is_effect;
      tg.z1 = c.z1;
      tg.z2 = c.z2;
      tg.effect = c.effect;
      tg.label = c.label;
      targets.push_back(std::move(tg));
    }
    BootstrapOptions bopt;
    bopt.n_boot = opt.n_boot;
    bopt.alpha = opt.alpha;
    bopt.seed = opt.seed;
    bopt.threads = opt.threads;
    const BootstrapSummary bs = bootstrap_estimates(records, targets, res.grid, bopt);
    if (bs.n_failed > 0) {
      res.warnings.push_back(std::to_string(bs.n_failed) + " of " +
                             std::to_string(bs.n_requested) +
                             " bootstrap replicates dropped (an arm lost all terminal events)");
    }
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
      CurveOutput& c = curves[ci];
      CurveOutput::MethodBand band;
      band.method = VarianceMethod::bootstrap;
      band.has_ci = true;
      band.se.resize(res.grid.size());
      band.lo.resize(res.grid.size());
      band.hi.resize(res.grid.size());
      for (std::size_t i = 0; i < res.grid.size(); ++i) {
        band.se[i] = std::sqrt(bs.variance[ci][i]);
        band.lo[i] = std::min(bs.lo[ci][i], c.estimate[i]);
        band.hi[i] = std::max(bs.hi[ci][i], c.estimate[i]);
      }
      c.bands.push_back(std::move(band));
    }
  }

  if (opt.ci == CiChoice::none) {
    for (CurveOutput& c : curves) {
      CurveOutput::MethodBand band;
      band.method = VarianceMethod::none;
      c.bands.push_back(std::move(band));
    }
  }

  if (!unstable.empty()) {
    std::string w = "variance estimates unstable near the tail (risk set below 5) for:";
    for (const auto& s : unstable) w += " " + s;
    res.warnings.push_back(std::move(w));
  }

  res.curves = std::move(curves);
  return res;
}

}  // namespace semimed
