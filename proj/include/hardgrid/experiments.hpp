#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hardgrid/model.hpp"

namespace hardgrid {

/// ceil(sqrt(d) l / eps)^d cells of diameter at most eps.
std::uint64_t hypercube_partitioning_size(int dimension, double side_length, double eps);

/// ceil(48 (1 / delta2)^2 (1 / gamma1) m ln(2m / p)): random points needed for a partition-based allocation.
std::uint64_t required_points(std::uint64_t m, double gamma1, double delta2, double p);

struct TrialRow {
  std::size_t trial = 0;
  std::size_t n = 0;
  double ln_z_hc = 0.0;
  double ln_z_ref = 0.0;
  double deviation = 0.0;  ///< ln_z_hc - ln_z_ref
};

struct ConcentrationReport {
  std::size_t n = 0;
  std::size_t trials = 0;
  double eps_d = 0.0;
  double reference_ln_z = 0.0;
  double fraction_within = 0.0;  ///< share of trials with |deviation| <= eps_d
  double min_deviation = 0.0;
  double median_deviation = 0.0;
  double max_deviation = 0.0;
  std::vector<TrialRow> rows;
};

/*!
 * Draws `trials` uniform point sets of size n for a one-dimensional hard-sphere
 * model and compares the exact ln Z of each hard-core representation with the
 * hard-rod closed form.
 */
ConcentrationReport concentration_trial(const ModelSpec& model, std::size_t n, std::size_t trials, double eps_d,
                                        std::uint64_t seed);

struct ExpectationReport {
  std::size_t n = 0;
  std::size_t trials = 0;
  double mean_ln_z = 0.0;   ///< ln of the sample mean of Z_hc
  double ln_z_ref = 0.0;
  double std_error = 0.0;   ///< standard error of the mean of Z_hc / Z_ref
  double ci_low = 0.0;      ///< ln(mean - 2 SE) in Z units, -inf when non-positive
  double ci_high = 0.0;     ///< ln(mean + 2 SE)
  bool pass = false;        ///< mean - 2 SE <= Z_ref
  std::vector<TrialRow> rows;
};

/// One-sided check that the mean of Z_hc over random discretizations does not exceed Z.
ExpectationReport expectation_check(const ModelSpec& model, std::size_t n, std::size_t trials, std::uint64_t seed);

/// lambda^2 vol^2 / (6 eps_d): below this many points the unconstrained model is not eps_d-approximated.
double tightness_threshold(double lambda, double vol, double eps_d);

/// True iff n ln(1 + lambda vol / n) < lambda vol - eps_d. Requires lambda vol > 6.
bool tightness_check(double lambda, double vol, double n, double eps_d);

/// True iff y ln(1 + x / y) <= x - x^2 / (6 y). Requires y >= x > 0.
bool quadratic_gap_holds(double x, double y);

/// (1 / (c + 1)) (1 + delta (1 - eps) / eps).
double modified_markov_bound(double eps, double delta, double c);

/*!
 * Smallest eps_d for which a point set of size n with a delta-eps allocation is
 * guaranteed Z_hc >= (1 - eps_d) Z: the maximum of
 * eps 2 q lmax^2 vol(B_{Lambda_max + 1}) vol, delta 16 q lmax vol and 64 q lmax^2 vol^2 / n.
 * Returns +inf when eps > 1/2, where the bound does not apply.
 */
double lower_bound_accuracy(const ModelSpec& model, double n, double delta, double eps);

/// Spearman rank correlation with average ranks for ties; 0 when either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace hardgrid
