#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semimed/incidence.hpp"
#include "semimed/records.hpp"
#include "semimed/step_function.hpp"

namespace semimed {

double normal_quantile(double p);

enum class VarianceMethod { none, asymptotic, bootstrap };
const char* to_string(VarianceMethod m);

// Pointwise variance of an estimate (already on the squared-standard-error
// scale). `partial` marks the prevalence-decomposition cross-world cells,
// where only the martingale term of the variance is computable; partial
// variances must not be turned into confidence intervals.
struct VarianceCurve {
  std::string target;
  Decomposition decomposition{};
  VarianceMethod method = VarianceMethod::asymptotic;
  bool partial = false;
  StepFunction curve;
  double min_at_risk = 0.0;  // smallest risk set entering the plug-in sums
  int n_boot = 0;
  std::uint64_t seed = 0;
};

// ---- hazard-controlling decomposition: full plug-in variances ----

// Var of F_haz(t; a_z1, a_z2) - F_haz(t; b_z1, b_z2); pass b_z1 = -1 for a
// single cell. Sums squared martingale integrands dN/Y^2 over the six
// transition martingales, with shared martingales contributing the
// difference of the two cells' integrands.
double var_haz_at(const ArmEstimates arms[2], const IncidenceSurface& haz,
                  int a_z1, int a_z2, int b_z1, int b_z2, double t,
                  double* min_at_risk = nullptr);

double var_haz_effect_at(const ArmEstimates arms[2], const IncidenceSurface& haz,
                         Effect e, double t, double* min_at_risk = nullptr);

// curve-valued forms on an evaluation grid
VarianceCurve var_haz_incidence(const ArmEstimates arms[2], const IncidenceSurface& haz,
                                int z1, int z2, const std::vector<double>& grid);
VarianceCurve var_haz_effects(const ArmEstimates arms[2], const IncidenceSurface& haz,
                              Effect e, const std::vector<double>& grid);

// ---- prevalence-controlling decomposition: martingale term only ----

struct PrevVariance {
  double value = 0.0;
  bool partial = false;  // true when z1 != z2 (cross-world prevalence term missing)
  double min_at_risk = 0.0;
};

PrevVariance var_prev_cell(const ArmEstimates arms[2], const IncidenceSurface& prev,
                           int z1, int z2, double t);

// total effect contrasts two same-world cells from independent arms, so its
// asymptotic variance is exact under this decomposition as well.
double var_prev_total(const ArmEstimates arms[2], const IncidenceSurface& prev, double t,
                      double* min_at_risk = nullptr);

// curve-valued form; partial unless z1 == z2
VarianceCurve var_prev_partial(const ArmEstimates arms[2], const IncidenceSurface& prev,
                               int z1, int z2, const std::vector<double>& grid);
VarianceCurve var_prev_total_curve(const ArmEstimates arms[2], const IncidenceSurface& prev,
                                   const std::vector<double>& grid);

// ---- bootstrap ----

struct BootTarget {
  Decomposition dec{};
  bool is_effect = false;
  int z1 = 0, z2 = 0;  // when is_effect == false
  Effect effect{};     // when is_effect == true
  std::string label;
};

struct BootstrapOptions {
  int n_boot = 200;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct BootstrapSummary {
  std::vector<double> grid;
  std::vector<std::vector<double>> variance;  // [target][grid point]
  std::vector<std::vector<double>> lo, hi;    // percentile bands
  int n_requested = 0;
  int n_failed = 0;
};

// Resamples subjects with replacement, stratified by arm with arm sizes
// preserved. Replicate r draws from substream (seed, r); results do not
// depend on the thread count. Replicates in which an arm has no terminal
// event are dropped; more than 10% dropped is an error.
BootstrapSummary bootstrap_estimates(const std::vector<SubjectRecord>& records,
                                     const std::vector<BootTarget>& targets,
                                     const std::vector<double>& grid,
                                     const BootstrapOptions& opt);

// Wald band; clamps into [bound_lo, bound_hi]. Throws PartialVarianceError
// for partial variances.
struct Band {
  double lo = 0.0, hi = 0.0;
};
Band wald_band(double estimate, double variance, double alpha, bool partial,
               double bound_lo, double bound_hi);

// type-7 empirical quantile of an unsorted sample
double quantile(std::vector<double> v, double p);

}  // namespace semimed
