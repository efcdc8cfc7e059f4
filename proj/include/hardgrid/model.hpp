#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hardgrid {

/// The cube [0, side_length)^dimension.
class Region {
 public:
  Region(int dimension, double side_length);

  int dimension() const noexcept { return dimension_; }
  double side_length() const noexcept { return side_length_; }
  double volume() const noexcept;

 private:
  int dimension_;
  double side_length_;
};

/// Dense row-major q x q matrix of non-negative reals.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  SquareMatrix(std::size_t size, std::vector<double> entries);

  std::size_t size() const noexcept { return size_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * size_ + j]; }
  const std::vector<double>& entries() const noexcept { return entries_; }
  bool is_symmetric() const noexcept;
  /// Maximum absolute row sum; equals the column-sum norm for symmetric matrices.
  double l1_norm() const noexcept;

 private:
  std::size_t size_ = 0;
  std::vector<double> entries_;
};

/// Pairwise minimum distances between particle types.
class InteractionMatrix {
 public:
  explicit InteractionMatrix(SquareMatrix entries);

  std::size_t q() const noexcept { return entries_.size(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_(i, j); }
  const SquareMatrix& matrix() const noexcept { return entries_; }
  /// Smallest strictly positive entry; +inf if every entry is zero.
  double lambda_min() const noexcept;
  double lambda_max() const noexcept;

 private:
  SquareMatrix entries_;
};

class Fugacities {
 public:
  explicit Fugacities(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }
  double lambda_max() const noexcept;
  double sum() const noexcept;

 private:
  std::vector<double> values_;
};

/// A hard-constraint point process: region, interaction matrix and fugacities.
class ModelSpec {
 public:
  ModelSpec(Region region, InteractionMatrix interaction, Fugacities fugacities,
            std::vector<std::string> type_names = {});

  /// Single type with minimum distance 2 * radius.
  static ModelSpec hard_sphere(int dimension, double side_length, double radius, double fugacity);
  /// q types; same-type pairs unconstrained, types i != j at least radii[i] + radii[j] apart.
  static ModelSpec widom_rowlinson(int dimension, double side_length, const std::vector<double>& radii,
                                   const std::vector<double>& fugacities);

  const Region& region() const noexcept { return region_; }
  const InteractionMatrix& interaction() const noexcept { return interaction_; }
  const Fugacities& fugacities() const noexcept { return fugacities_; }
  const std::vector<std::string>& type_names() const noexcept { return type_names_; }
  std::size_t q() const noexcept { return interaction_.q(); }
  int dimension() const noexcept { return region_.dimension(); }
  double volume() const noexcept { return region_.volume(); }

  ModelSpec with_fugacities(std::vector<double> fugacities) const;
  ModelSpec with_side_length(double side_length) const;

 private:
  Region region_;
  InteractionMatrix interaction_;
  Fugacities fugacities_;
  std::vector<std::string> type_names_;
};

/// Lebesgue volume of a d-dimensional ball of radius r.
double ball_volume(int dimension, double radius);

/// Theta(i, j) = ball_volume(d, Lambda(i, j)).
SquareMatrix volume_exclusion_matrix(const ModelSpec& model);

/// ln of the trivial upper bound exp(sum_i lambda(i) vol(V)).
double log_z_upper_bound(const ModelSpec& model);

struct ConditionReport {
  bool satisfied = false;
  double lhs = 0.0;
  double rhs = 0.0;

  std::string describe() const;
};

/// Uniform-fugacity condition lambda_max < e / ||Theta||_1. Throws if ||Theta||_1 = 0.
ConditionReport check_uniform_condition(const ModelSpec& model);

enum class CliqueStatus {
  certified,      ///< a witness f was found and verified
  not_certified,  ///< no verified witness; the condition may still hold
};

struct CliqueReport {
  CliqueStatus status = CliqueStatus::not_certified;
  /// Witness with f(i) > sum_j Theta(i, j) f(j) lambda(j); empty unless certified.
  std::vector<double> witness;
  /// Spectral radius of M(i, j) = Theta(i, j) lambda(j); the condition holds iff it is < 1.
  double spectral_radius = 0.0;
  std::string method;
  std::string detail;

  bool feasible() const noexcept { return status == CliqueStatus::certified; }
};

/// Searches for a positive f with f(i) > sum_j Theta(i, j) f(j) lambda(j) for every type i.
CliqueReport check_clique_condition(const ModelSpec& model);

/// True iff f is strictly positive and satisfies the strict clique inequality.
bool verify_clique_witness(const ModelSpec& model, const std::vector<double>& witness);

}  // namespace hardgrid
