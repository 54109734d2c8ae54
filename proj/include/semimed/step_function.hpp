#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace semimed {

// Right-continuous piecewise-constant function on [0, inf). The function is
// zero before the first jump time and constant after the last one. Immutable
// after construction; safe to share across threads.
class StepFunction {
 public:
  StepFunction() = default;

  // jump_times must be strictly increasing; increments aligned with them.
  StepFunction(std::vector<double> jump_times, std::vector<double> increments);

  // Builds from cumulative values sampled at strictly increasing times.
  static StepFunction from_values(const std::vector<double>& times,
                                  const std::vector<double>& values);

  // Sum of increments at jump times <= t.
  double value(double t) const;
  // Sum of increments at jump times < t (the left limit at t).
  double left_value(double t) const;
  double last_value() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  std::vector<double> values_on(const std::vector<double>& grid) const;

  const std::vector<double>& jump_times() const { return times_; }
  const std::vector<double>& increments() const { return increments_; }
  const std::vector<double>& cumulative() const { return cumulative_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

 private:
  std::vector<double> times_;
  std::vector<double> increments_;
  std::vector<double> cumulative_;  // prefix sums of increments_
};

// Sorted union of all jump times, duplicates removed.
std::vector<double> union_jump_times(std::initializer_list<const StepFunction*> fns);

}  // namespace semimed
