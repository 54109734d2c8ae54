#pragma once

// Test-only oracles, deliberately independent of the library's aggregation
// code: per-subject indicator evaluation of the observed processes, a forward
// ODE solver for the illness-death truth, and a small-dataset generator that
// exercises ties.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "semimed/records.hpp"
#include "semimed/rng.hpp"

namespace brute {

struct Counts {
  std::int64_t y0 = 0, y1 = 0;
  std::int64_t dn_star = 0, dn0 = 0, dn1 = 0;
};

// Literal indicator evaluation at time t, with the non-terminal-first tie
// convention (a subject with x1 == x2 and both statuses 1 is at risk in both
// states at that instant).
inline Counts counts_at(const std::vector<semimed::SubjectRecord>& recs, int arm, double t) {
  Counts c;
  for (const auto& r : recs) {
    if (r.arm != arm) continue;
    const bool d1 = r.status_nonterminal == 1;
    const bool d2 = r.status_terminal == 1;
    const bool tie = d1 && d2 && r.time_nonterminal == r.time_terminal;
    if (r.time_nonterminal >= t) ++c.y0;
    if (d1 && ((r.time_nonterminal < t && r.time_terminal >= t) ||
               (tie && r.time_nonterminal == t)))
      ++c.y1;
    if (d1 && r.time_nonterminal == t) ++c.dn_star;
    if (!d1 && d2 && r.time_terminal == t) ++c.dn0;
    if (d1 && d2 && r.time_terminal == t) ++c.dn1;
  }
  return c;
}

inline std::vector<double> grid_of(const std::vector<semimed::SubjectRecord>& recs, int arm) {
  std::vector<double> g;
  for (const auto& r : recs) {
    if (r.arm != arm) continue;
    g.push_back(r.time_nonterminal);
    g.push_back(r.time_terminal);
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

inline double prevalence_at(const std::vector<semimed::SubjectRecord>& recs, int arm,
                            double t) {
  const Counts c = counts_at(recs, arm, t);
  const std::int64_t tot = c.y0 + c.y1;
  return tot > 0 ? static_cast<double>(c.y1) / static_cast<double>(tot) : 0.0;
}

// ---- forward equations of the (cross-world) illness-death truth ----
// rates: lam_star(t) = rs*t from arm z1; lam0(t) = r0*t, lam1(t) = r1*t from z2

struct OdeState {
  double p00 = 1.0, p01 = 0.0;
  double f0 = 0.0, f1 = 0.0, fstar = 0.0;
  double f() const { return f0 + f1; }
};

namespace detail {

inline OdeState ode_deriv(double rs, double r0, double r1, double t, const OdeState& s) {
  OdeState d;
  d.p00 = -(rs + r0) * t * s.p00;
  d.p01 = rs * t * s.p00 - r1 * t * s.p01;
  d.f0 = r0 * t * s.p00;
  d.f1 = r1 * t * s.p01;
  d.fstar = rs * t * s.p00;
  return d;
}

inline OdeState ode_axpy(const OdeState& a, double w, const OdeState& b) {
  OdeState r;
  r.p00 = a.p00 + w * b.p00;
  r.p01 = a.p01 + w * b.p01;
  r.f0 = a.f0 + w * b.f0;
  r.f1 = a.f1 + w * b.f1;
  r.fstar = a.fstar + w * b.fstar;
  return r;
}

inline void ode_rk4_step(double rs, double r0, double r1, double t, double h, OdeState* y) {
  const OdeState k1 = ode_deriv(rs, r0, r1, t, *y);
  const OdeState k2 = ode_deriv(rs, r0, r1, t + h / 2, ode_axpy(*y, h / 2, k1));
  const OdeState k3 = ode_deriv(rs, r0, r1, t + h / 2, ode_axpy(*y, h / 2, k2));
  const OdeState k4 = ode_deriv(rs, r0, r1, t + h, ode_axpy(*y, h, k3));
  OdeState step;
  step.p00 = (k1.p00 + 2 * k2.p00 + 2 * k3.p00 + k4.p00) / 6;
  step.p01 = (k1.p01 + 2 * k2.p01 + 2 * k3.p01 + k4.p01) / 6;
  step.f0 = (k1.f0 + 2 * k2.f0 + 2 * k3.f0 + k4.f0) / 6;
  step.f1 = (k1.f1 + 2 * k2.f1 + 2 * k3.f1 + k4.f1) / 6;
  step.fstar = (k1.fstar + 2 * k2.fstar + 2 * k3.fstar + k4.fstar) / 6;
  *y = ode_axpy(*y, h, step);
}

}  // namespace detail

inline OdeState solve_forward(double rs, double r0, double r1, double t_end,
                              int steps = 20000) {
  OdeState y;
  if (!(t_end > 0.0)) return y;
  const double h = t_end / steps;
  for (int i = 0; i < steps; ++i) detail::ode_rk4_step(rs, r0, r1, i * h, h, &y);
  return y;
}

// integrates once, reporting the state at each (sorted) grid time
inline std::vector<OdeState> solve_forward_on(double rs, double r0, double r1,
                                              const std::vector<double>& grid,
                                              double h_target = 1e-3) {
  std::vector<OdeState> out;
  out.reserve(grid.size());
  OdeState y;
  double t = 0.0;
  for (double tg : grid) {
    const double span = tg - t;
    if (span > 0.0) {
      const int n = std::max(1, static_cast<int>(std::ceil(span / h_target)));
      const double h = span / n;
      for (int i = 0; i < n; ++i) detail::ode_rk4_step(rs, r0, r1, t + i * h, h, &y);
      t = tg;
    }
    out.push_back(y);
  }
  return out;
}

// prevalence-controlling truth: accumulate the weighted terminal hazard with
// the single-world prevalence of arm z1 and the terminal rates of arm z2
inline double solve_forward_prev(double rs1, double r01, double r11, double r02, double r12,
                                 double t_end, int steps = 20000) {
  double q00 = 1.0, q01 = 0.0, lam = 0.0;
  const double h = t_end / steps;
  auto deriv = [&](double t, double a, double b, double* da, double* db, double* dl) {
    *da = -(rs1 + r01) * t * a;
    *db = rs1 * t * a - r11 * t * b;
    const double alive = a + b;
    const double w1 = alive > 0 ? b / alive : 0.0;
    *dl = ((1.0 - w1) * r02 + w1 * r12) * t;
  };
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    double k1a, k1b, k1l, k2a, k2b, k2l, k3a, k3b, k3l, k4a, k4b, k4l;
    deriv(t, q00, q01, &k1a, &k1b, &k1l);
    deriv(t + h / 2, q00 + h / 2 * k1a, q01 + h / 2 * k1b, &k2a, &k2b, &k2l);
    deriv(t + h / 2, q00 + h / 2 * k2a, q01 + h / 2 * k2b, &k3a, &k3b, &k3l);
    deriv(t + h, q00 + h * k3a, q01 + h * k3b, &k4a, &k4b, &k4l);
    q00 += h * (k1a + 2 * k2a + 2 * k3a + k4a) / 6;
    q01 += h * (k1b + 2 * k2b + 2 * k3b + k4b) / 6;
    lam += h * (k1l + 2 * k2l + 2 * k3l + k4l) / 6;
  }
  return 1.0 - std::exp(-lam);
}

// ---- random small datasets on a half-integer lattice (ties likely) ----

inline std::vector<semimed::SubjectRecord> random_dataset(semimed::Rng& rng,
                                                          int max_per_arm = 5) {
  std::vector<semimed::SubjectRecord> recs;
  int serial = 0;
  for (int arm = 0; arm < 2; ++arm) {
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_per_arm)));
    for (int i = 0; i < n; ++i) {
      semimed::SubjectRecord r;
      r.id = "s" + std::to_string(++serial);
      r.arm = arm;
      const double first = 0.5 * (1.0 + static_cast<double>(rng.below(8)));
      const double u = rng.uniform();
      if (u < 0.35) {  // death straight from state 0
        r.time_nonterminal = r.time_terminal = first;
        r.status_nonterminal = 0;
        r.status_terminal = 1;
      } else if (u < 0.6) {  // censored in state 0
        r.time_nonterminal = r.time_terminal = first;
        r.status_nonterminal = 0;
        r.status_terminal = 0;
      } else {  // non-terminal event, then death or censoring (possibly at the same time)
        r.time_nonterminal = first;
        r.status_nonterminal = 1;
        r.time_terminal = first + 0.5 * static_cast<double>(rng.below(5));
        r.status_terminal = rng.bernoulli(0.7) ? 1 : 0;
      }
      recs.push_back(std::move(r));
    }
  }
  return recs;
}

}  // namespace brute
