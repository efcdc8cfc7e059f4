#include "hardgrid/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hardgrid/errors.hpp"

namespace hardgrid {

Region::Region(int dimension, double side_length) : dimension_(dimension), side_length_(side_length) {
  if (dimension < 1) throw ValidationError("dimension", "must be a positive integer");
  if (!(side_length > 0.0) || !std::isfinite(side_length))
    throw ValidationError("side_length", "must be a positive finite real");
}

double Region::volume() const noexcept { return std::pow(side_length_, dimension_); }

SquareMatrix::SquareMatrix(std::size_t size, std::vector<double> entries)
    : size_(size), entries_(std::move(entries)) {
  if (entries_.size() != size_ * size_) throw ValidationError("matrix", "expected a square matrix");
}

bool SquareMatrix::is_symmetric() const noexcept {
  for (std::size_t i = 0; i < size_; ++i)
    for (std::size_t j = i + 1; j < size_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

double SquareMatrix::l1_norm() const noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < size_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < size_; ++j) row += std::abs((*this)(i, j));
    best = std::max(best, row);
  }
  return best;
}

InteractionMatrix::InteractionMatrix(SquareMatrix entries) : entries_(std::move(entries)) {
  if (entries_.size() == 0) throw ValidationError("interaction", "at least one particle type is required");
  for (double v : entries_.entries())
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ValidationError("interaction.matrix", "entries must be non-negative finite reals");
  if (!entries_.is_symmetric()) throw ValidationError("interaction.matrix", "must be symmetric");
}

double InteractionMatrix::lambda_min() const noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (double v : entries_.entries())
    if (v > 0.0) best = std::min(best, v);
  return best;
}

double InteractionMatrix::lambda_max() const noexcept {
  const auto& e = entries_.entries();
  return *std::max_element(e.begin(), e.end());
}

Fugacities::Fugacities(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ValidationError("types.fugacity", "must be a non-negative finite real");
}

double Fugacities::lambda_max() const noexcept {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

double Fugacities::sum() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

ModelSpec::ModelSpec(Region region, InteractionMatrix interaction, Fugacities fugacities,
                     std::vector<std::string> type_names)
    : region_(region),
      interaction_(std::move(interaction)),
      fugacities_(std::move(fugacities)),
      type_names_(std::move(type_names)) {
  if (fugacities_.size() != interaction_.q())
    throw ValidationError("types", "number of fugacities must equal the interaction matrix size");
  if (type_names_.empty()) {
    for (std::size_t i = 0; i < interaction_.q(); ++i) type_names_.push_back("type" + std::to_string(i));
  } else if (type_names_.size() != interaction_.q()) {
    throw ValidationError("types", "number of type names must equal the interaction matrix size");
  }
}

ModelSpec ModelSpec::hard_sphere(int dimension, double side_length, double radius, double fugacity) {
  if (!(radius >= 0.0) || !std::isfinite(radius))
    throw ValidationError("interaction.radius", "must be a non-negative finite real");
  return ModelSpec(Region(dimension, side_length), InteractionMatrix(SquareMatrix(1, {2.0 * radius})),
                   Fugacities({fugacity}), {"particle"});
}

ModelSpec ModelSpec::widom_rowlinson(int dimension, double side_length, const std::vector<double>& radii,
                                     const std::vector<double>& fugacities) {
  const std::size_t q = radii.size();
  if (q == 0) throw ValidationError("interaction.radii", "at least one radius is required");
  for (double r : radii)
    if (!(r >= 0.0) || !std::isfinite(r))
      throw ValidationError("interaction.radii", "radii must be non-negative finite reals");
  if (fugacities.size() != q)
    throw ValidationError("types", "number of fugacities must equal the number of radii");
  std::vector<double> entries(q * q, 0.0);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j)
      if (i != j) entries[i * q + j] = radii[i] + radii[j];
  return ModelSpec(Region(dimension, side_length), InteractionMatrix(SquareMatrix(q, std::move(entries))),
                   Fugacities(fugacities));
}

ModelSpec ModelSpec::with_fugacities(std::vector<double> fugacities) const {
  return ModelSpec(region_, interaction_, Fugacities(std::move(fugacities)), type_names_);
}

ModelSpec ModelSpec::with_side_length(double side_length) const {
  return ModelSpec(Region(region_.dimension(), side_length), interaction_, fugacities_, type_names_);
}

double ball_volume(int dimension, double radius) {
  detail::require(dimension >= 1, "ball_volume: dimension must be >= 1");
  detail::require(radius >= 0.0, "ball_volume: radius must be >= 0");
  // Unit-ball constants via c_d = c_{d-2} * 2 pi / d, starting from c_0 = 1, c_1 = 2.
  double c = (dimension % 2 == 0) ? 1.0 : 2.0;
  for (int k = (dimension % 2 == 0) ? 2 : 3; k <= dimension; k += 2) c *= 2.0 * std::numbers::pi / k;
  return c * std::pow(radius, dimension);
}

SquareMatrix volume_exclusion_matrix(const ModelSpec& model) {
  const std::size_t q = model.q();
  std::vector<double> entries(q * q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) entries[i * q + j] = ball_volume(model.dimension(), model.interaction()(i, j));
  return SquareMatrix(q, std::move(entries));
}

double log_z_upper_bound(const ModelSpec& model) { return model.fugacities().sum() * model.volume(); }

std::string ConditionReport::describe() const {
  std::ostringstream out;
  out << "condition lambda_max < e/||Theta||_1 " << (satisfied ? "holds" : "fails") << ": " << lhs
      << (satisfied ? " < " : " >= ") << rhs;
  return out.str();
}

ConditionReport check_uniform_condition(const ModelSpec& model) {
  const double norm = volume_exclusion_matrix(model).l1_norm();
  if (norm == 0.0)
    throw PreconditionError(
        "uniform condition is vacuous: ||Theta||_1 = 0 (unconstrained model, use the closed form)");
  ConditionReport report;
  report.lhs = model.fugacities().lambda_max();
  report.rhs = std::numbers::e / norm;
  report.satisfied = report.lhs < report.rhs;
  return report;
}

namespace {

SquareMatrix clique_matrix(const ModelSpec& model) {
  const SquareMatrix theta = volume_exclusion_matrix(model);
  const std::size_t q = model.q();
  std::vector<double> m(q * q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) m[i * q + j] = theta(i, j) * model.fugacities()[j];
  return SquareMatrix(q, std::move(m));
}

// Perron root of a non-negative matrix via power iteration on M + I (aperiodic shift).
double spectral_radius(const SquareMatrix& m) {
  const std::size_t q = m.size();
  std::vector<double> x(q, 1.0), y(q);
  double estimate = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    double norm = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      double acc = x[i];
      for (std::size_t j = 0; j < q; ++j) acc += m(i, j) * x[j];
      y[i] = acc;
      norm = std::max(norm, acc);
    }
    const double next = norm - 1.0;
    for (std::size_t i = 0; i < q; ++i) x[i] = y[i] / norm;
    if (iter > 10 && std::abs(next - estimate) <= 1e-14 * std::max(1.0, next)) return next;
    estimate = next;
  }
  return estimate;
}

// Solves (I - M) f = 1 by Gaussian elimination with partial pivoting; empty on singularity.
std::vector<double> neumann_witness(const SquareMatrix& m) {
  const std::size_t q = m.size();
  std::vector<double> a(q * q), b(q, 1.0);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) a[i * q + j] = (i == j ? 1.0 : 0.0) - m(i, j);
  for (std::size_t col = 0; col < q; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < q; ++r)
      if (std::abs(a[r * q + col]) > std::abs(a[pivot * q + col])) pivot = r;
    if (std::abs(a[pivot * q + col]) < 1e-300) return {};
    if (pivot != col) {
      for (std::size_t j = 0; j < q; ++j) std::swap(a[col * q + j], a[pivot * q + j]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < q; ++r) {
      const double factor = a[r * q + col] / a[col * q + col];
      for (std::size_t j = col; j < q; ++j) a[r * q + j] -= factor * a[col * q + j];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> f(q);
  for (std::size_t i = q; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < q; ++j) acc -= a[i * q + j] * f[j];
    f[i] = acc / a[i * q + i];
  }
  return f;
}

}  // namespace

bool verify_clique_witness(const ModelSpec& model, const std::vector<double>& witness) {
  if (witness.size() != model.q()) return false;
  const SquareMatrix m = clique_matrix(model);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!(witness[i] > 0.0) || !std::isfinite(witness[i])) return false;
    double rhs = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) rhs += m(i, j) * witness[j];
    if (!(witness[i] > rhs)) return false;
  }
  return true;
}

CliqueReport check_clique_condition(const ModelSpec& model) {
  const SquareMatrix m = clique_matrix(model);
  const std::size_t q = m.size();
  CliqueReport report;

  if (std::all_of(m.entries().begin(), m.entries().end(), [](double v) { return v == 0.0; })) {
    report.status = CliqueStatus::certified;
    report.witness.assign(q, 1.0);
    report.method = "trivial";
    report.detail = "all interaction terms vanish";
    return report;
  }

  if (q == 2 && m(0, 0) == 0.0 && m(1, 1) == 0.0) {
    // Two types with unconstrained same-type pairs: closed form on the product of cross terms.
    const double a = m(1, 0);  // Theta(2,1) lambda(1)
    const double b = m(0, 1);  // Theta(1,2) lambda(2)
    const double product = a * b;
    report.method = "two-type closed form";
    report.spectral_radius = std::sqrt(product);
    if (product < 1.0) {
      std::vector<double> f;
      if (a > 0.0) {
        const double beta = product > 0.0 ? (1.0 - product) / (2.0 * product) : 1.0;
        f = {1.0, (1.0 + beta) * a};
      } else {
        f = {1.0, b > 0.0 ? 1.0 / (2.0 * b) : 1.0};
      }
      if (verify_clique_witness(model, f)) {
        report.status = CliqueStatus::certified;
        report.witness = std::move(f);
        report.detail = "cross-term product " + std::to_string(product) + " < 1";
        return report;
      }
      report.detail = "cross-term product below 1 but the witness failed verification in floating point";
      return report;
    }
    report.detail = "cross-term product " + std::to_string(product) + " >= 1";
    return report;
  }

  report.method = "linear solve of (I - M) f = 1";
  report.spectral_radius = spectral_radius(m);
  std::vector<double> f = neumann_witness(m);
  if (!f.empty() && verify_clique_witness(model, f)) {
    report.status = CliqueStatus::certified;
    report.witness = std::move(f);
    report.detail = "spectral radius " + std::to_string(report.spectral_radius) + " < 1";
  } else {
    report.detail = "no verified witness; spectral radius estimate " + std::to_string(report.spectral_radius);
  }
  return report;
}

}  // namespace hardgrid
