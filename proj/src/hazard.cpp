#include "semimed/hazard.hpp"

#include <algorithm>

namespace semimed {

HazardCurve nelson_aalen(const RiskSetPanel& panel, HazardKind kind) {
  HazardCurve h;
  h.kind = kind;
  h.arm = panel.arm;
  const std::vector<std::int64_t>* dn = nullptr;
  const std::vector<std::int64_t>* y = nullptr;
  switch (kind) {
    case HazardKind::nonterminal:
      dn = &panel.dn_star;
      y = &panel.y0;  // shares the state-0 risk set
      break;
    case HazardKind::terminal_from_state0:
      dn = &panel.dn0;
      y = &panel.y0;
      break;
    case HazardKind::terminal_from_state1:
      dn = &panel.dn1;
      y = &panel.y1;
      break;
  }
  std::vector<double> times, inc;
  for (std::size_t k = 0; k < panel.grid.size(); ++k) {
    if ((*dn)[k] == 0 || (*y)[k] == 0) continue;
    times.push_back(panel.grid[k]);
    inc.push_back(static_cast<double>((*dn)[k]) / static_cast<double>((*y)[k]));
    h.dn.push_back((*dn)[k]);
    h.y.push_back((*y)[k]);
  }
  h.curve = StepFunction(std::move(times), std::move(inc));
  return h;
}

PrevalenceCurve::PrevalenceCurve(const RiskSetPanel& panel)
    : arm_(panel.arm),
      grid_(panel.grid),
      y0_(panel.y0),
      y1_(panel.y1),
      ties_(panel.ties),
      m_(panel.m_arm) {
  std::vector<double> w(grid_.size());
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const std::int64_t tot = y0_[k] + y1_[k];
    w[k] = tot > 0 ? static_cast<double>(y1_[k]) / static_cast<double>(tot) : 0.0;
  }
  curve_ = StepFunction::from_values(grid_, w);
}

PrevalenceCurve::Weights PrevalenceCurve::left_limit(double t) const {
  std::int64_t y0g = 0, y1g = 0;
  auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - grid_.begin());
  if (it != grid_.end() && *it == t) {
    y0g = y0_[k];
    y1g = y1_[k];
  } else if (it != grid_.end()) {
    // Strictly between grid points: the tie adjustment at grid[k] has not
    // happened yet as of t-.
    y0g = y0_[k];
    y1g = y1_[k] - ties_[k];
  }  // past the last observed time: nobody at risk
  Weights w;
  const std::int64_t tot = y0g + y1g;
  if (tot > 0) {
    w.w0 = static_cast<double>(y0g) / static_cast<double>(tot);
    w.w1 = static_cast<double>(y1g) / static_cast<double>(tot);
  }
  return w;
}

PrevalenceCurve prevalence(const RiskSetPanel& panel) { return PrevalenceCurve(panel); }

}  // namespace semimed
