#include "semimed/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "semimed/errors.hpp"
#include "semimed/inference.hpp"
#include "semimed/panel.hpp"
#include "semimed/parallel.hpp"
#include "semimed/rng.hpp"

namespace semimed {

ScenarioConfig ScenarioConfig::preset(int setting) {
  ScenarioConfig cfg;
  cfg.setting = setting;
  switch (setting) {
    case 1: cfg.a = 1; break;
    case 2: cfg.b = 1; break;
    case 3: cfg.c = 1; break;
    default: throw ConfigError("preset setting must be 1, 2 or 3");
  }
  return cfg;
}

void ScenarioConfig::validate() const {
  if (a != 0 && a != 1) throw ConfigError("a must be 0 or 1");
  if (b != 0 && b != 1) throw ConfigError("b must be 0 or 1");
  if (c != 0 && c != 1) throw ConfigError("c must be 0 or 1");
  if (m < 2) throw ConfigError("m must be at least 2");
  if (!(p_treat >= 0.0 && p_treat <= 1.0)) throw ConfigError("p_treat must be in [0,1]");
  if (!(censor_low < censor_high)) throw ConfigError("censor_low must be below censor_high");
  if (censor_low < 0.0) throw ConfigError("censoring support must be nonnegative");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (n_reps < 1) throw ConfigError("n_reps must be at least 1");
  if (n_boot < 2) throw ConfigError("n_boot must be at least 2");
  if (eval_times.empty()) throw ConfigError("eval_times must be nonempty");
  for (double t : eval_times) {
    if (!(t >= 0.0 && t <= horizon)) throw ConfigError("eval_times must lie in [0, horizon]");
  }
}

std::vector<SubjectRecord> generate_dataset(const ScenarioConfig& cfg, int replicate_index) {
  cfg.validate();
  Rng rng(substream_seed(cfg.seed, kStreamGenerate,
                         static_cast<std::uint64_t>(replicate_index)));
  std::vector<SubjectRecord> out;
  out.reserve(cfg.m);
  for (std::size_t i = 0; i < cfg.m; ++i) {
    const int z = rng.bernoulli(cfg.p_treat) ? 1 : 0;
    const double r0 = cfg.rate0(z);
    const double rs = cfg.rate_star(z);
    const double r1 = cfg.rate1(z);
    const double k = r0 + rs;
    const double exit_time = std::sqrt(2.0 * rng.exponential() / k);
    const bool to_state1 = rng.uniform() < rs / k;
    const double censor = rng.uniform(cfg.censor_low, cfg.censor_high);
    double t1 = std::numeric_limits<double>::infinity();
    double t2;
    if (to_state1) {
      t1 = exit_time;
      t2 = std::sqrt(t1 * t1 + 2.0 * rng.exponential() / r1);
    } else {
      t2 = exit_time;
    }
    SubjectRecord rec;
    rec.id = "s" + std::to_string(i + 1);
    rec.arm = z;
    rec.time_terminal = std::min(t2, censor);
    rec.status_terminal = t2 <= censor ? 1 : 0;
    if (t1 <= rec.time_terminal) {
      rec.time_nonterminal = t1;
      rec.status_nonterminal = 1;
    } else {
      rec.time_nonterminal = rec.time_terminal;
      rec.status_nonterminal = 0;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

// adaptive Simpson
double adapt(const std::function<double(double)>& f, double a, double b, double fa,
             double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adapt(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adapt(f, a, b, fa, fm, fb, whole, tol, 40);
}

struct Rates {
  double r0, rs, r1;
};

Rates arm_rates(const ScenarioConfig& cfg, int z) {
  return {cfg.rate0(z), cfg.rate_star(z), cfg.rate1(z)};
}

double cumhaz(double rate, double t) { return 0.5 * rate * t * t; }

// Single-world state-1 occupation probability P(in state 1 and alive at s)
// for arm z; closed form for the t-linear rates.
double occupation_state1(const Rates& r, double s) {
  const double k = r.r0 + r.rs;
  const double d = k - r.r1;
  const double s2 = 0.5 * s * s;
  if (std::abs(d) < 1e-12) return r.rs * s2 * std::exp(-r.r1 * s2);
  return r.rs * std::exp(-r.r1 * s2) * (1.0 - std::exp(-d * s2)) / d;
}

double occupation_state0(const Rates& r, double s) {
  return std::exp(-(r.r0 + r.rs) * 0.5 * s * s);
}

}  // namespace

double OracleCurves::f_at(Decomposition d, int z1, int z2, double t) const {
  const auto& v = f[d == Decomposition::prev ? 0 : 1][z1][z2];
  auto it = std::lower_bound(grid.begin(), grid.end(), t);
  if (it == grid.end()) return v.back();
  std::size_t i = static_cast<std::size_t>(it - grid.begin());
  if (grid[i] == t || i == 0) return v[i];
  const double w = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return v[i - 1] + w * (v[i] - v[i - 1]);
}

double OracleCurves::effect_at(Decomposition d, Effect e, double t) const {
  const EffectCells c = effect_cells(e);
  return f_at(d, c.a_z1, c.a_z2, t) - f_at(d, c.b_z1, c.b_z2, t);
}

OracleCurves oracle(const ScenarioConfig& cfg, const std::vector<double>& grid_in) {
  cfg.validate();
  OracleCurves out;
  out.grid = grid_in;
  std::sort(out.grid.begin(), out.grid.end());
  out.grid.erase(std::unique(out.grid.begin(), out.grid.end()), out.grid.end());
  const auto& grid = out.grid;
  const double tol = 1e-10;

  for (int z1 = 0; z1 < 2; ++z1) {
    for (int z2 = 0; z2 < 2; ++z2) {
      const Rates rw1 = arm_rates(cfg, z1);  // drives the non-terminal pathway
      const Rates rw2 = arm_rates(cfg, z2);  // drives the terminal pathway

      // hazard-controlling identification
      auto p00 = [&](double s) {
        return std::exp(-cumhaz(rw1.rs, s) - cumhaz(rw2.r0, s));
      };
      std::vector<double>& fh = out.f[1][z1][z2];
      fh.resize(grid.size());
      {
        double f0 = 0.0, fstar = 0.0, awk = 0.0;  // awk: int p00 exp(L1) lamstar
        double prev_t = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const double t = grid[i];
          f0 += integrate([&](double s) { return p00(s) * rw2.r0 * s; }, prev_t, t, tol);
          fstar += integrate([&](double s) { return p00(s) * rw1.rs * s; }, prev_t, t, tol);
          awk += integrate(
              [&](double s) { return p00(s) * std::exp(cumhaz(rw2.r1, s)) * rw1.rs * s; },
              prev_t, t, tol);
          const double f1 = fstar - std::exp(-cumhaz(rw2.r1, t)) * awk;
          fh[i] = f0 + f1;
          prev_t = t;
        }
      }

      // prevalence-controlling identification
      auto w1 = [&](double s) {
        const double p1 = occupation_state1(rw1, s);
        const double p0 = occupation_state0(rw1, s);
        const double alive = p0 + p1;
        return alive > 0.0 ? p1 / alive : 0.0;
      };
      std::vector<double>& fp = out.f[0][z1][z2];
      fp.resize(grid.size());
      {
        double lam = 0.0, prev_t = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const double t = grid[i];
          lam += integrate(
              [&](double s) {
                const double w = w1(s);
                return ((1.0 - w) * rw2.r0 + w * rw2.r1) * s;
              },
              prev_t, t, tol);
          fp[i] = 1.0 - std::exp(-lam);
          prev_t = t;
        }
      }
    }
  }

  for (int d = 0; d < 2; ++d) {
    out.total[d].resize(grid.size());
    out.de[d].resize(grid.size());
    out.ie[d].resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out.total[d][i] = out.f[d][1][1][i] - out.f[d][0][0][i];
      out.de[d][i] = out.f[d][0][1][i] - out.f[d][0][0][i];
      out.ie[d][i] = out.f[d][1][1][i] - out.f[d][0][1][i];
    }
  }
  return out;
}

double oracle_f(const ScenarioConfig& cfg, Decomposition d, int z1, int z2, double t) {
  OracleCurves c = oracle(cfg, {t});
  return c.f[d == Decomposition::prev ? 0 : 1][z1][z2][0];
}

namespace {

struct RepOut {
  bool ok = false;
  int boot_failed = 0;
  // flattened [dec][effect][eval_time]
  std::vector<double> est, ase, bse, blo, bhi;
};

}  // namespace

StudySummary run_study(const ScenarioConfig& cfg, int threads) {
  cfg.validate();
  StudySummary out;
  out.config = cfg;

  // truths on a dense grid plus the evaluation times
  std::vector<double> truth_grid = cfg.eval_times;
  const int dense = 160;
  for (int i = 0; i <= dense; ++i) {
    truth_grid.push_back(cfg.horizon * static_cast<double>(i) / dense);
  }
  out.truths = oracle(cfg, truth_grid);

  const std::size_t E = cfg.eval_times.size();
  const auto idx = [E](int dec, int effect, std::size_t t) {
    return (static_cast<std::size_t>(dec) * 2 + static_cast<std::size_t>(effect)) * E + t;
  };
  const Effect kEffects[2] = {Effect::de, Effect::ie};
  const Decomposition kDecs[2] = {Decomposition::prev, Decomposition::haz};

  std::vector<RepOut> reps(static_cast<std::size_t>(cfg.n_reps));
  parallel_for(cfg.n_reps, threads, [&](int r) {
    RepOut& ro = reps[static_cast<std::size_t>(r)];
    try {
      const auto data = generate_dataset(cfg, r);
      const RiskSetPanel p0 = build_panel(data, 0);
      const RiskSetPanel p1 = build_panel(data, 1);
      if (!panel_has_terminal_events(p0) || !panel_has_terminal_events(p1)) return;
      const double horizon = std::min(panel_horizon(p0), panel_horizon(p1));
      const ArmEstimates arms[2] = {estimate_arm(p0), estimate_arm(p1)};
      const IncidenceSurface sp = surface_prev(arms, horizon);
      const IncidenceSurface sh = surface_haz(arms, horizon);

      ro.est.assign(4 * E, 0.0);
      ro.ase.assign(4 * E, std::numeric_limits<double>::quiet_NaN());
      ro.bse.assign(4 * E, 0.0);
      ro.blo.assign(4 * E, 0.0);
      ro.bhi.assign(4 * E, 0.0);

      for (int d = 0; d < 2; ++d) {
        const IncidenceSurface& s = d == 0 ? sp : sh;
        for (int e = 0; e < 2; ++e) {
          const EffectCells c = effect_cells(kEffects[e]);
          for (std::size_t ti = 0; ti < E; ++ti) {
            const double t = cfg.eval_times[ti];
            ro.est[idx(d, e, ti)] =
                s.f[c.a_z1][c.a_z2].value(t) - s.f[c.b_z1][c.b_z2].value(t);
            if (d == 1) {
              ro.ase[idx(d, e, ti)] =
                  std::sqrt(var_haz_effect_at(arms, sh, kEffects[e], t));
            }
          }
        }
      }

      std::vector<BootTarget> targets;
      for (int d = 0; d < 2; ++d) {
        for (int e = 0; e < 2; ++e) {
          BootTarget tg;
          tg.dec = kDecs[d];
          tg.is_effect = true;
          tg.effect = kEffects[e];
          targets.push_back(tg);
        }
      }
      BootstrapOptions bopt;
      bopt.n_boot = cfg.n_boot;
      bopt.alpha = 0.05;
      bopt.seed = substream_seed(cfg.seed, kStreamBootstrap + 100,
                                 static_cast<std::uint64_t>(r));
      bopt.threads = 1;
      const BootstrapSummary bs = bootstrap_estimates(data, targets, cfg.eval_times, bopt);
      ro.boot_failed = bs.n_failed;
      for (int d = 0; d < 2; ++d) {
        for (int e = 0; e < 2; ++e) {
          const std::size_t tgt = static_cast<std::size_t>(d * 2 + e);
          for (std::size_t ti = 0; ti < E; ++ti) {
            const double est = ro.est[idx(d, e, ti)];
            ro.bse[idx(d, e, ti)] = std::sqrt(bs.variance[tgt][ti]);
            ro.blo[idx(d, e, ti)] = std::min(bs.lo[tgt][ti], est);
            ro.bhi[idx(d, e, ti)] = std::max(bs.hi[tgt][ti], est);
          }
        }
      }
      ro.ok = true;
    } catch (const std::exception&) {
      ro.ok = false;
    }
  });

  int n_used = 0, boot_dropped = 0;
  for (const auto& ro : reps) {
    if (ro.ok) {
      ++n_used;
      boot_dropped += ro.boot_failed;
    }
  }
  out.n_failed_replicates = cfg.n_reps - n_used;
  if (out.n_failed_replicates > 0) {
    out.warnings.push_back(std::to_string(out.n_failed_replicates) +
                           " replicate(s) failed and were dropped");
  }
  if (boot_dropped > 0) {
    out.warnings.push_back(std::to_string(boot_dropped) +
                           " bootstrap resample(s) dropped across replicates");
  }
  if (n_used == 0) throw std::runtime_error("run_study: every replicate failed");

  const double z975 = normal_quantile(0.975);
  for (int r = 0; r < cfg.n_reps; ++r) {
    const RepOut& ro = reps[static_cast<std::size_t>(r)];
    if (!ro.ok) continue;
    for (int d = 0; d < 2; ++d) {
      for (int e = 0; e < 2; ++e) {
        for (std::size_t ti = 0; ti < E; ++ti) {
          ReplicateRow row;
          row.replicate = r;
          row.effect = to_string(kEffects[e]);
          row.decomposition = to_string(kDecs[d]);
          row.t = cfg.eval_times[ti];
          row.estimate = ro.est[idx(d, e, ti)];
          row.se_asymptotic = ro.ase[idx(d, e, ti)];
          row.boot_se = ro.bse[idx(d, e, ti)];
          row.boot_lo = ro.blo[idx(d, e, ti)];
          row.boot_hi = ro.bhi[idx(d, e, ti)];
          out.replicates.push_back(std::move(row));
        }
      }
    }
  }

  for (int d = 0; d < 2; ++d) {
    for (int e = 0; e < 2; ++e) {
      for (std::size_t ti = 0; ti < E; ++ti) {
        const double t = cfg.eval_times[ti];
        std::vector<double> ests, ases, bses;
        for (const auto& ro : reps) {
          if (!ro.ok) continue;
          ests.push_back(ro.est[idx(d, e, ti)]);
          if (d == 1) ases.push_back(ro.ase[idx(d, e, ti)]);
          bses.push_back(ro.bse[idx(d, e, ti)]);
        }
        double mean = 0.0;
        for (double v : ests) mean += v;
        mean /= static_cast<double>(ests.size());

        auto push = [&](const std::string& stat, const std::string& truth, double value) {
          out.rows.push_back({cfg.setting, to_string(kEffects[e]), to_string(kDecs[d]),
                              truth, stat, t, value});
        };
        push("mean", "-", mean);
        if (ests.size() >= 2) {
          double ss = 0.0;
          for (double v : ests) ss += (v - mean) * (v - mean);
          push("sd", "-", std::sqrt(ss / static_cast<double>(ests.size() - 1)));
        }
        if (d == 1) {
          double am = 0.0;
          for (double v : ases) am += v;
          push("asymptotic_se", "-", am / static_cast<double>(ases.size()));
        }
        double bm = 0.0;
        for (double v : bses) bm += v;
        push("bootstrap_se", "-", bm / static_cast<double>(bses.size()));

        for (int truth_d = 0; truth_d < 2; ++truth_d) {
          const double truth = out.truths.effect_at(kDecs[truth_d], kEffects[e], t);
          push("truth", to_string(kDecs[truth_d]), truth);
          int cov_b = 0, n_b = 0, cov_a = 0, n_a = 0;
          for (const auto& ro : reps) {
            if (!ro.ok) continue;
            ++n_b;
            if (ro.blo[idx(d, e, ti)] <= truth && truth <= ro.bhi[idx(d, e, ti)]) ++cov_b;
            if (d == 1) {
              ++n_a;
              const double est = ro.est[idx(d, e, ti)];
              const double se = ro.ase[idx(d, e, ti)];
              if (est - z975 * se <= truth && truth <= est + z975 * se) ++cov_a;
            }
          }
          push("coverage_bootstrap", to_string(kDecs[truth_d]),
               static_cast<double>(cov_b) / static_cast<double>(n_b));
          if (d == 1) {
            push("coverage_asymptotic", to_string(kDecs[truth_d]),
                 static_cast<double>(cov_a) / static_cast<double>(n_a));
          }
        }
      }
    }
  }
  return out;
}

}  // namespace semimed
