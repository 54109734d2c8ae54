#include "semimed/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/distributions/normal.hpp>

#include "semimed/errors.hpp"
#include "semimed/panel.hpp"
#include "semimed/parallel.hpp"
#include "semimed/rng.hpp"

namespace semimed {

double normal_quantile(double p) {
  boost::math::normal_distribution<> n(0.0, 1.0);
  return boost::math::quantile(n, p);
}

const char* to_string(VarianceMethod m) {
  switch (m) {
    case VarianceMethod::none: return "none";
    case VarianceMethod::asymptotic: return "asymptotic";
    case VarianceMethod::bootstrap: return "bootstrap";
  }
  return "?";
}

namespace {

struct CellView {
  const HazCellCurves* aux = nullptr;
  const StepFunction* lam1 = nullptr;  // cumulative post-transition hazard, arm z2
  double f_t = 0.0;
  double l1_t = 0.0;
  int z1 = 0, z2 = 0;
};

CellView make_cell_view(const ArmEstimates arms[2], const IncidenceSurface& haz, int z1,
                        int z2, double t) {
  CellView c;
  c.aux = &haz.aux[z1][z2];
  c.lam1 = &arms[z2].lam1.curve;
  c.f_t = c.aux->f.value(t);
  c.l1_t = c.lam1->value(t);
  c.z1 = z1;
  c.z2 = z2;
  return c;
}

enum class Transition { nonterminal, term0, term1 };

// Martingale integrands of the hazard-controlling incidence estimator; s is
// a jump time <= t of the corresponding counting process.
double integrand(const CellView& c, Transition tr, double s) {
  const double e = std::exp(c.lam1->value(s) - c.l1_t);
  switch (tr) {
    case Transition::nonterminal:
      return 1.0 - c.f_t - (1.0 - c.aux->f.value(s)) * e;
    case Transition::term0:
      return 1.0 - c.f_t - (c.aux->fstar.value(s) - c.aux->f1.value(s)) * e;
    case Transition::term1:
      return (c.aux->fstar.value(s) - c.aux->f1.value(s)) * e;
  }
  return 0.0;
}

bool loads(const CellView& c, Transition tr, int arm) {
  return tr == Transition::nonterminal ? c.z1 == arm : c.z2 == arm;
}

const HazardCurve& hazard_of(const ArmEstimates& a, Transition tr) {
  switch (tr) {
    case Transition::nonterminal: return a.lam_star;
    case Transition::term0: return a.lam0;
    case Transition::term1: return a.lam1;
  }
  return a.lam0;
}

}  // namespace

double var_haz_at(const ArmEstimates arms[2], const IncidenceSurface& haz, int a_z1,
                  int a_z2, int b_z1, int b_z2, double t, double* min_at_risk) {
  const CellView a = make_cell_view(arms, haz, a_z1, a_z2, t);
  const bool has_b = b_z1 >= 0;
  const CellView b = has_b ? make_cell_view(arms, haz, b_z1, b_z2, t) : CellView{};

  double total = 0.0;
  double min_y = std::numeric_limits<double>::infinity();
  for (int arm = 0; arm < 2; ++arm) {
    for (Transition tr : {Transition::nonterminal, Transition::term0, Transition::term1}) {
      const bool la = loads(a, tr, arm);
      const bool lb = has_b && loads(b, tr, arm);
      if (!la && !lb) continue;
      const HazardCurve& hz = hazard_of(arms[arm], tr);
      const auto& times = hz.curve.jump_times();
      for (std::size_t k = 0; k < times.size() && times[k] <= t; ++k) {
        const double s = times[k];
        double h = 0.0;
        if (la) h += integrand(a, tr, s);
        if (lb) h -= integrand(b, tr, s);
        const double y = static_cast<double>(hz.y[k]);
        total += h * h * static_cast<double>(hz.dn[k]) / (y * y);
        min_y = std::min(min_y, y);
      }
    }
  }
  if (min_at_risk) *min_at_risk = std::isfinite(min_y) ? min_y : 0.0;
  return total;
}

double var_haz_effect_at(const ArmEstimates arms[2], const IncidenceSurface& haz, Effect e,
                         double t, double* min_at_risk) {
  const EffectCells c = effect_cells(e);
  return var_haz_at(arms, haz, c.a_z1, c.a_z2, c.b_z1, c.b_z2, t, min_at_risk);
}

namespace {

VarianceCurve make_variance_curve(const std::string& target, Decomposition dec,
                                  const std::vector<double>& grid,
                                  const std::function<double(double, double*)>& at) {
  VarianceCurve out;
  out.target = target;
  out.decomposition = dec;
  out.method = VarianceMethod::asymptotic;
  out.min_at_risk = std::numeric_limits<double>::infinity();
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double my = 0.0;
    values[i] = at(grid[i], &my);
    if (my > 0.0) out.min_at_risk = std::min(out.min_at_risk, my);
  }
  if (!std::isfinite(out.min_at_risk)) out.min_at_risk = 0.0;
  out.curve = StepFunction::from_values(grid, values);
  return out;
}

}  // namespace

VarianceCurve var_haz_incidence(const ArmEstimates arms[2], const IncidenceSurface& haz,
                                int z1, int z2, const std::vector<double>& grid) {
  return make_variance_curve(
      "F(" + std::to_string(z1) + "," + std::to_string(z2) + ")", Decomposition::haz, grid,
      [&](double t, double* my) { return var_haz_at(arms, haz, z1, z2, -1, -1, t, my); });
}

VarianceCurve var_haz_effects(const ArmEstimates arms[2], const IncidenceSurface& haz,
                              Effect e, const std::vector<double>& grid) {
  return make_variance_curve(to_string(e), Decomposition::haz, grid,
                             [&](double t, double* my) {
                               return var_haz_effect_at(arms, haz, e, t, my);
                             });
}

VarianceCurve var_prev_partial(const ArmEstimates arms[2], const IncidenceSurface& prev,
                               int z1, int z2, const std::vector<double>& grid) {
  VarianceCurve out = make_variance_curve(
      "F(" + std::to_string(z1) + "," + std::to_string(z2) + ")", Decomposition::prev, grid,
      [&](double t, double* my) {
        const PrevVariance pv = var_prev_cell(arms, prev, z1, z2, t);
        *my = pv.min_at_risk;
        return pv.value;
      });
  out.partial = z1 != z2;
  return out;
}

VarianceCurve var_prev_total_curve(const ArmEstimates arms[2], const IncidenceSurface& prev,
                                   const std::vector<double>& grid) {
  return make_variance_curve("total", Decomposition::prev, grid, [&](double t, double* my) {
    return var_prev_total(arms, prev, t, my);
  });
}

PrevVariance var_prev_cell(const ArmEstimates arms[2], const IncidenceSurface& prev, int z1,
                           int z2, double t) {
  PrevVariance out;
  out.partial = z1 != z2;
  double var_lambda = 0.0;
  double min_y = std::numeric_limits<double>::infinity();
  const PrevalenceCurve& w = arms[z1].prev;
  for (int which : {0, 1}) {
    const HazardCurve& hz = which == 0 ? arms[z2].lam0 : arms[z2].lam1;
    const auto& times = hz.curve.jump_times();
    for (std::size_t k = 0; k < times.size() && times[k] <= t; ++k) {
      const auto lw = w.left_limit(times[k]);
      const double ww = which == 0 ? lw.w0 : lw.w1;
      const double y = static_cast<double>(hz.y[k]);
      var_lambda += ww * ww * static_cast<double>(hz.dn[k]) / (y * y);
      min_y = std::min(min_y, y);
    }
  }
  const double surv = 1.0 - prev.f[z1][z2].value(t);
  out.value = surv * surv * var_lambda;
  out.min_at_risk = std::isfinite(min_y) ? min_y : 0.0;
  return out;
}

double var_prev_total(const ArmEstimates arms[2], const IncidenceSurface& prev, double t,
                      double* min_at_risk) {
  const PrevVariance a = var_prev_cell(arms, prev, 1, 1, t);
  const PrevVariance b = var_prev_cell(arms, prev, 0, 0, t);
  if (min_at_risk) *min_at_risk = std::min(a.min_at_risk, b.min_at_risk);
  return a.value + b.value;
}

Band wald_band(double estimate, double variance, double alpha, bool partial,
               double bound_lo, double bound_hi) {
  if (partial) {
    throw PartialVarianceError(
        "asymptotic interval refused: variance is partial (cross-world prevalence "
        "process covariance unavailable); use the bootstrap");
  }
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double se = std::sqrt(std::max(0.0, variance));
  Band b;
  b.lo = std::max(bound_lo, estimate - z * se);
  b.hi = std::min(bound_hi, estimate + z * se);
  return b;
}

double quantile(std::vector<double> v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  if (p <= 0.0) return v.front();
  if (p >= 1.0) return v.back();
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

BootstrapSummary bootstrap_estimates(const std::vector<SubjectRecord>& records,
                                     const std::vector<BootTarget>& targets,
                                     const std::vector<double>& grid,
                                     const BootstrapOptions& opt) {
  if (opt.n_boot < 2) throw ConfigError("n_boot must be at least 2");
  const ArmLayout layouts[2] = {ArmLayout(records, 0), ArmLayout(records, 1)};
  const std::size_t m[2] = {layouts[0].n_subjects(), layouts[1].n_subjects()};
  const std::size_t G = grid.size();
  const std::size_t T = targets.size();

  bool need_prev = false, need_haz = false;
  for (const auto& tg : targets) {
    (tg.dec == Decomposition::prev ? need_prev : need_haz) = true;
  }

  std::vector<std::uint8_t> ok(static_cast<std::size_t>(opt.n_boot), 0);
  std::vector<std::vector<double>> vals(T);
  for (auto& v : vals) v.assign(static_cast<std::size_t>(opt.n_boot) * G, 0.0);

  parallel_for(opt.n_boot, opt.threads, [&](int rep) {
    Rng rng(substream_seed(opt.seed, kStreamBootstrap, static_cast<std::uint64_t>(rep)));
    std::vector<std::int64_t> w[2];
    for (int arm = 0; arm < 2; ++arm) {
      w[arm].assign(m[arm], 0);
      for (std::size_t i = 0; i < m[arm]; ++i) ++w[arm][rng.below(m[arm])];
    }
    const RiskSetPanel p0 = layouts[0].panel(&w[0]);
    const RiskSetPanel p1 = layouts[1].panel(&w[1]);
    if (!panel_has_terminal_events(p0) || !panel_has_terminal_events(p1)) return;  // dropped
    const double horizon = std::min(panel_horizon(p0), panel_horizon(p1));
    const ArmEstimates arms[2] = {estimate_arm(p0), estimate_arm(p1)};

    IncidenceSurface sp, sh;
    if (need_prev) sp = surface_prev(arms, horizon);
    if (need_haz) sh = surface_haz(arms, horizon);

    for (std::size_t ti = 0; ti < T; ++ti) {
      const BootTarget& tg = targets[ti];
      const IncidenceSurface& s = tg.dec == Decomposition::prev ? sp : sh;
      double* out = &vals[ti][static_cast<std::size_t>(rep) * G];
      if (tg.is_effect) {
        const EffectCells c = effect_cells(tg.effect);
        const StepFunction& fa = s.f[c.a_z1][c.a_z2];
        const StepFunction& fb = s.f[c.b_z1][c.b_z2];
        for (std::size_t g = 0; g < G; ++g) out[g] = fa.value(grid[g]) - fb.value(grid[g]);
      } else {
        const StepFunction& f = s.f[tg.z1][tg.z2];
        for (std::size_t g = 0; g < G; ++g) out[g] = f.value(grid[g]);
      }
    }
    ok[static_cast<std::size_t>(rep)] = 1;
  });

  BootstrapSummary out;
  out.grid = grid;
  out.n_requested = opt.n_boot;
  int used = 0;
  for (auto o : ok) used += o;
  out.n_failed = opt.n_boot - used;
  if (out.n_failed * 10 > opt.n_boot) {
    throw std::runtime_error("bootstrap: more than 10% of replicates failed (" +
                             std::to_string(out.n_failed) + "/" +
                             std::to_string(opt.n_boot) + ")");
  }

  out.variance.assign(T, std::vector<double>(G, 0.0));
  out.lo.assign(T, std::vector<double>(G, 0.0));
  out.hi.assign(T, std::vector<double>(G, 0.0));
  std::vector<double> sample;
  sample.reserve(static_cast<std::size_t>(used));
  for (std::size_t ti = 0; ti < T; ++ti) {
    for (std::size_t g = 0; g < G; ++g) {
      sample.clear();
      for (int rep = 0; rep < opt.n_boot; ++rep) {
        if (ok[static_cast<std::size_t>(rep)])
          sample.push_back(vals[ti][static_cast<std::size_t>(rep) * G + g]);
      }
      double mean = 0.0;
      for (double v : sample) mean += v;
      mean /= static_cast<double>(sample.size());
      double ss = 0.0;
      for (double v : sample) ss += (v - mean) * (v - mean);
      out.variance[ti][g] = ss / static_cast<double>(sample.size() - 1);
      std::sort(sample.begin(), sample.end());
      const auto pick = [&](double p) {
        const double h = (static_cast<double>(sample.size()) - 1.0) * p;
        const std::size_t lo = static_cast<std::size_t>(h);
        const double frac = h - static_cast<double>(lo);
        return lo + 1 >= sample.size() ? sample.back()
                                       : sample[lo] + frac * (sample[lo + 1] - sample[lo]);
      };
      out.lo[ti][g] = pick(opt.alpha / 2.0);
      out.hi[ti][g] = pick(1.0 - opt.alpha / 2.0);
    }
  }
  return out;
}

}  // namespace semimed
