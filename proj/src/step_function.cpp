#include "semimed/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace semimed {

StepFunction::StepFunction(std::vector<double> jump_times, std::vector<double> increments)
    : times_(std::move(jump_times)), increments_(std::move(increments)) {
  if (times_.size() != increments_.size()) {
    throw std::invalid_argument("StepFunction: jump_times and increments differ in length");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(increments_[i])) {
      throw std::invalid_argument("StepFunction: non-finite entry");
    }
    if (i > 0 && !(times_[i - 1] < times_[i])) {
      throw std::invalid_argument("StepFunction: jump_times must be strictly increasing");
    }
  }
  cumulative_.resize(times_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    acc += increments_[i];
    cumulative_[i] = acc;
  }
}

StepFunction StepFunction::from_values(const std::vector<double>& times,
                                       const std::vector<double>& values) {
  if (times.size() != values.size()) {
    throw std::invalid_argument("StepFunction::from_values: size mismatch");
  }
  std::vector<double> inc(values.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    inc[i] = values[i] - prev;
    prev = values[i];
  }
  StepFunction f(times, std::move(inc));
  // Keep the sampled values exactly; prefix sums of the diffs can drift by an ulp.
  f.cumulative_ = values;
  return f;
}

double StepFunction::value(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double StepFunction::left_value(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

std::vector<double> StepFunction::values_on(const std::vector<double>& grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = value(grid[i]);
  return out;
}

std::vector<double> union_jump_times(std::initializer_list<const StepFunction*> fns) {
  std::vector<double> all;
  for (const StepFunction* f : fns) {
    all.insert(all.end(), f->jump_times().begin(), f->jump_times().end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

}  // namespace semimed
