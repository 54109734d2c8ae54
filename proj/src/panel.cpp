#include "semimed/panel.hpp"

#include <algorithm>

#include "semimed/errors.hpp"

namespace semimed {

ArmLayout::ArmLayout(const std::vector<SubjectRecord>& records, int arm) : arm_(arm) {
  for (const auto& r : records) {
    if (r.arm != arm) continue;
    grid_.push_back(r.time_nonterminal);
    grid_.push_back(r.time_terminal);
  }
  if (grid_.empty()) throw ValidationError("no records in arm " + std::to_string(arm));
  std::sort(grid_.begin(), grid_.end());
  grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());

  auto index_of = [&](double t) {
    return static_cast<std::int32_t>(
        std::lower_bound(grid_.begin(), grid_.end(), t) - grid_.begin());
  };
  for (const auto& r : records) {
    if (r.arm != arm) continue;
    Sub s;
    s.k1 = index_of(r.time_nonterminal);
    s.k2 = index_of(r.time_terminal);
    s.d1 = r.status_nonterminal == 1;
    s.d2 = r.status_terminal == 1;
    s.tie = s.d1 && s.d2 && r.time_nonterminal == r.time_terminal;
    subs_.push_back(s);
  }
}

RiskSetPanel ArmLayout::panel(const std::vector<std::int64_t>* weights) const {
  const std::size_t n = grid_.size();
  RiskSetPanel p;
  p.arm = arm_;
  p.grid = grid_;
  p.dn_star.assign(n, 0);
  p.dn0.assign(n, 0);
  p.dn1.assign(n, 0);
  p.ties.assign(n, 0);
  std::vector<std::int64_t> exit0(n, 0), enter1(n, 0), exit1(n, 0);

  std::int64_t m = 0;
  for (std::size_t i = 0; i < subs_.size(); ++i) {
    const Sub& s = subs_[i];
    const std::int64_t w = weights ? (*weights)[i] : 1;
    if (w == 0) continue;
    m += w;
    exit0[static_cast<std::size_t>(s.k1)] += w;  // leaves state 0 at x1 whatever the cause
    if (s.d1) {
      p.dn_star[static_cast<std::size_t>(s.k1)] += w;
      enter1[static_cast<std::size_t>(s.k1)] += w;
      exit1[static_cast<std::size_t>(s.k2)] += w;
      if (s.d2) p.dn1[static_cast<std::size_t>(s.k2)] += w;
      if (s.tie) p.ties[static_cast<std::size_t>(s.k1)] += w;
    } else if (s.d2) {
      p.dn0[static_cast<std::size_t>(s.k2)] += w;
    }
  }
  p.m_arm = m;

  p.y0.assign(n, 0);
  p.y1.assign(n, 0);
  std::int64_t at_risk0 = m, in_state1 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    p.y0[k] = at_risk0;
    p.y1[k] = in_state1 + p.ties[k];
    at_risk0 -= exit0[k];
    in_state1 += enter1[k] - exit1[k];
  }
  return p;
}

RiskSetPanel build_panel(const std::vector<SubjectRecord>& records, int arm) {
  return ArmLayout(records, arm).panel();
}

double panel_horizon(const RiskSetPanel& p) {
  for (std::size_t k = p.grid.size(); k-- > 0;) {
    if (p.y0[k] + p.y1[k] > 0) return p.grid[k];
  }
  return 0.0;
}

bool panel_has_terminal_events(const RiskSetPanel& p) {
  for (std::size_t k = 0; k < p.grid.size(); ++k) {
    if (p.dn0[k] + p.dn1[k] > 0) return true;
  }
  return false;
}

}  // namespace semimed
