#pragma once

#include <cstdint>
#include <vector>

#include "semimed/records.hpp"

namespace semimed {

// Aggregated counting and at-risk processes for one arm, evaluated on the
// grid of all distinct observed times in that arm (event and censoring
// times; risk sets change at both). At-risk counts are taken just before
// each grid time.
//
// Tie rule: when a subject has time_nonterminal == time_terminal with both
// statuses 1, the non-terminal event is processed first at that instant. The
// subject counts in dn_star with y0 membership and the death goes to dn1
// with the subject included in y1 at the same time.
//
// Immutable after construction; safe to share across threads.
struct RiskSetPanel {
  int arm = 0;
  std::int64_t m_arm = 0;  // weighted subject count
  std::vector<double> grid;
  std::vector<std::int64_t> dn_star, dn0, dn1;
  std::vector<std::int64_t> y0, y1;   // y_star == y0; y1 includes ties at that time
  std::vector<std::int64_t> ties;     // tie count folded into y1 at each grid time

  // Largest time with y0 + y1 > 0 (the last observed terminal/censoring time).
  double last_at_risk_time() const { return grid.empty() ? 0.0 : grid.back(); }
};

// Precomputed per-arm index layout so that resampled (weighted) panels can be
// rebuilt in O(m + grid) without re-sorting.
class ArmLayout {
 public:
  ArmLayout(const std::vector<SubjectRecord>& records, int arm);

  int arm() const { return arm_; }
  std::size_t n_subjects() const { return subs_.size(); }
  const std::vector<double>& grid() const { return grid_; }

  // weights == nullptr means every subject once.
  RiskSetPanel panel(const std::vector<std::int64_t>* weights = nullptr) const;

 private:
  struct Sub {
    std::int32_t k1, k2;  // grid indices of time_nonterminal / time_terminal
    bool d1, d2, tie;
  };
  int arm_;
  std::vector<double> grid_;
  std::vector<Sub> subs_;
};

RiskSetPanel build_panel(const std::vector<SubjectRecord>& records, int arm);

// Largest time with y0 + y1 > 0, i.e. the last instant anyone in the arm is
// still observable; 0 when the panel carries no mass.
double panel_horizon(const RiskSetPanel& p);

bool panel_has_terminal_events(const RiskSetPanel& p);

}  // namespace semimed
