#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <string>
#include <vector>

#include "semimed/incidence.hpp"
#include "semimed/rng.hpp"
#include "support/brute_force.hpp"

using namespace semimed;

namespace {

SubjectRecord rec(int arm, double x1, int d1, double x2, int d2) {
  static int serial = 0;
  SubjectRecord r;
  r.id = "i" + std::to_string(++serial);
  r.arm = arm;
  r.time_nonterminal = x1;
  r.status_nonterminal = d1;
  r.time_terminal = x2;
  r.status_terminal = d2;
  return r;
}

struct Fit {
  RiskSetPanel p0, p1;
  ArmEstimates arms[2];
  double horizon;
};

Fit fit(const std::vector<SubjectRecord>& rows) {
  Fit f{build_panel(rows, 0), build_panel(rows, 1), {}, 0.0};
  f.arms[0] = estimate_arm(f.p0);
  f.arms[1] = estimate_arm(f.p1);
  f.horizon = std::min(panel_horizon(f.p0), panel_horizon(f.p1));
  return f;
}

// pooled terminal-event Nelson-Aalen within one arm, straight from the panel
double pooled_terminal_na(const RiskSetPanel& p, double t) {
  double acc = 0.0;
  for (std::size_t k = 0; k < p.grid.size() && p.grid[k] <= t; ++k) {
    const std::int64_t y = p.y0[k] + p.y1[k];
    const std::int64_t dn = p.dn0[k] + p.dn1[k];
    if (y > 0 && dn > 0) acc += static_cast<double>(dn) / static_cast<double>(y);
  }
  return acc;
}

std::vector<SubjectRecord> mirrored_arms(std::vector<SubjectRecord> rows) {
  // the same outcomes in both arms
  std::vector<SubjectRecord> out;
  int serial = 0;
  for (auto r : rows) {
    r.arm = 0;
    r.id = "m" + std::to_string(++serial);
    out.push_back(r);
    r.arm = 1;
    r.id = "m" + std::to_string(++serial);
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("prevalence-controlling incidence: single death from state 0") {
  auto rows = mirrored_arms({rec(0, 1.0, 0, 1.0, 1), rec(0, 3.0, 0, 3.0, 0)});
  Fit f = fit(rows);
  StepFunction fp = incidence_prev(f.arms[0], f.arms[0].prev, f.horizon);
  CHECK(fp.value(1.0) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-15));
  CHECK(fp.value(0.5) == 0.0);
}

TEST_CASE("prevalence-controlling incidence: no terminal events is identically zero") {
  auto rows = mirrored_arms({rec(0, 1.0, 1, 3.0, 0), rec(0, 2.0, 0, 2.0, 0)});
  Fit f = fit(rows);
  StepFunction fp = incidence_prev(f.arms[0], f.arms[1].prev, f.horizon);
  CHECK(fp.value(100.0) == 0.0);
}

TEST_CASE("same-world collapse: F_prev(t;z,z) equals the pooled terminal Nelson-Aalen") {
  Rng rng(substream_seed(21, 1));
  for (int it = 0; it < 400; ++it) {
    auto rows = brute::random_dataset(rng);
    Fit f = fit(rows);
    for (int z = 0; z < 2; ++z) {
      const RiskSetPanel& p = z == 0 ? f.p0 : f.p1;
      StepFunction fp = incidence_prev(f.arms[z], f.arms[z].prev, f.horizon);
      for (double t : p.grid) {
        if (t > f.horizon) break;
        const double expected = 1.0 - std::exp(-pooled_terminal_na(p, t));
        CHECK(std::abs(fp.value(t) - expected) <= 1e-12);
      }
    }
  }
}

TEST_CASE("hazard-controlling incidence: no transitions reduces to one minus exp") {
  auto rows = mirrored_arms({rec(0, 1.0, 0, 1.0, 1), rec(0, 2.0, 0, 2.0, 1),
                             rec(0, 3.0, 0, 3.0, 0)});
  Fit f = fit(rows);
  HazCellCurves c01 = incidence_haz(f.arms[0], f.arms[1], f.horizon);
  HazCellCurves c11 = incidence_haz(f.arms[1], f.arms[1], f.horizon);
  const double l0_2 = f.arms[1].lam0.curve.value(2.0);
  CHECK(c01.f.value(2.0) == doctest::Approx(1.0 - std::exp(-l0_2)).epsilon(1e-15));
  // no transition hazard makes the first index irrelevant
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    CHECK(c01.f.value(t) == c11.f.value(t));
  }
  CHECK(c01.f1.value(3.0) == 0.0);
  CHECK(c01.fstar.value(3.0) == 0.0);
}

TEST_CASE("hazard-controlling incidence: no terminal hazards is identically zero") {
  auto rows = mirrored_arms({rec(0, 1.0, 1, 5.0, 0), rec(0, 2.0, 0, 2.0, 0)});
  Fit f = fit(rows);
  HazCellCurves c = incidence_haz(f.arms[0], f.arms[1], f.horizon);
  CHECK(c.f.value(100.0) == 0.0);
  CHECK(c.fstar.value(100.0) > 0.0);  // the transition mass is still tracked
}

TEST_CASE("closed form equals the sub-distribution sum to round-off") {
  Rng rng(substream_seed(21, 2));
  for (int it = 0; it < 400; ++it) {
    auto rows = brute::random_dataset(rng);
    Fit f = fit(rows);
    for (int z1 = 0; z1 < 2; ++z1) {
      for (int z2 = 0; z2 < 2; ++z2) {
        HazCellCurves c = incidence_haz(f.arms[z1], f.arms[z2], f.horizon);
        const double tol =
            10.0 * DBL_EPSILON * static_cast<double>(1 + c.f.size());
        for (double t : c.f.jump_times()) {
          CHECK(std::abs(c.f.value(t) - (c.f0.value(t) + c.f1.value(t))) <= tol);
        }
      }
    }
  }
}

TEST_CASE("incidence surfaces are nondecreasing, in [0,1], with f1 <= fstar") {
  Rng rng(substream_seed(21, 3));
  for (int it = 0; it < 400; ++it) {
    auto rows = brute::random_dataset(rng);
    Fit f = fit(rows);
    IncidenceSurface sp = surface_prev(f.arms, f.horizon);
    IncidenceSurface sh = surface_haz(f.arms, f.horizon);
    for (int z1 = 0; z1 < 2; ++z1) {
      for (int z2 = 0; z2 < 2; ++z2) {
        for (const IncidenceSurface* s : {&sp, &sh}) {
          const auto& fc = s->f[z1][z2];
          double prev_v = 0.0;
          for (double t : fc.jump_times()) {
            const double v = fc.value(t);
            CHECK(v >= prev_v);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            prev_v = v;
          }
        }
        const auto& aux = sh.aux[z1][z2];
        for (double t : aux.f.jump_times()) {
          CHECK(aux.f1.value(t) <= aux.fstar.value(t) + 1e-15);
        }
      }
    }
  }
}

TEST_CASE("identical arms give identically zero effects") {
  Rng rng(substream_seed(21, 4));
  auto rows = mirrored_arms(brute::random_dataset(rng, 6));
  Fit f = fit(rows);
  for (const IncidenceSurface& s : {surface_prev(f.arms, f.horizon),
                                    surface_haz(f.arms, f.horizon)}) {
    for (const EffectEstimate& e : effects(s)) {
      for (double t : e.curve.jump_times()) {
        CHECK(e.curve.value(t) == 0.0);
      }
    }
  }
}

TEST_CASE("de + ie telescopes to the total effect, both splits") {
  Rng rng(substream_seed(21, 5));
  for (int it = 0; it < 300; ++it) {
    auto rows = brute::random_dataset(rng);
    Fit f = fit(rows);
    for (const IncidenceSurface& s : {surface_prev(f.arms, f.horizon),
                                      surface_haz(f.arms, f.horizon)}) {
      StepFunction total = effect_curve(s, Effect::total);
      StepFunction de = effect_curve(s, Effect::de);
      StepFunction ie = effect_curve(s, Effect::ie);
      StepFunction de_alt = effect_curve(s, Effect::de_alt);
      StepFunction ie_alt = effect_curve(s, Effect::ie_alt);
      for (double t : total.jump_times()) {
        CHECK(std::abs(de.value(t) + ie.value(t) - total.value(t)) <= 1e-15);
        CHECK(std::abs(de_alt.value(t) + ie_alt.value(t) - total.value(t)) <= 1e-15);
      }
    }
  }
}
