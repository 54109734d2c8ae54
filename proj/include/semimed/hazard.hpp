#pragma once

#include <cstdint>
#include <vector>

#include "semimed/panel.hpp"
#include "semimed/step_function.hpp"

namespace semimed {

enum class HazardKind {
  nonterminal,           // state 0 -> state 1 transition
  terminal_from_state0,  // state 0 -> dead
  terminal_from_state1,  // state 1 -> dead
};

// A Nelson-Aalen cumulative hazard together with its jump-level counting data
// (needed by the martingale plug-in variances).
struct HazardCurve {
  HazardKind kind{};
  int arm = 0;
  StepFunction curve;
  // per jump (times align with curve.jump_times()):
  std::vector<std::int64_t> dn;
  std::vector<std::int64_t> y;
};

HazardCurve nelson_aalen(const RiskSetPanel& panel, HazardKind kind);

// Prevalence of the non-terminal event among at-risk subjects,
// w1(t) = y1(t) / (y0(t) + y1(t)), with at-risk counts taken just before t.
// curve materializes w1 sampled at the panel grid; left_limit() evaluates the
// process just before an arbitrary time, which is what the incidence
// integrals consume.
class PrevalenceCurve {
 public:
  PrevalenceCurve() = default;
  explicit PrevalenceCurve(const RiskSetPanel& panel);

  int arm() const { return arm_; }
  const StepFunction& curve() const { return curve_; }

  struct Weights {
    double w0 = 0.0, w1 = 0.0;  // both zero when nobody is at risk
  };
  Weights left_limit(double t) const;

 private:
  int arm_ = 0;
  StepFunction curve_;
  std::vector<double> grid_;
  std::vector<std::int64_t> y0_, y1_, ties_;
  std::int64_t m_ = 0;
};

PrevalenceCurve prevalence(const RiskSetPanel& panel);

}  // namespace semimed
