#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "prefdyn/errors.hpp"

namespace prefdyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kUnitNormTol = 1e-12;

/// A point on the unit sphere S^{d-1}, d >= 2. Construction validates the
/// norm to within 1e-12; use normalize() to build one from an arbitrary
/// nonzero vector.
class UnitVector {
 public:
  explicit UnitVector(Vector coords);

  const Vector& vec() const { return coords_; }
  Eigen::Index dim() const { return coords_.size(); }
  double operator[](Eigen::Index i) const { return coords_[i]; }
  double dot(const UnitVector& other) const;
  double dot(const Vector& other) const;

 private:
  Vector coords_;
};

/// v / ||v||. Throws ZeroVectorError when ||v|| <= 1e-12.
UnitVector normalize(const Vector& v);

/// Ordered collection of N unit-norm items sharing a dimension d, also
/// viewable as the d x N matrix with item i in column i. Item order is
/// stable: the index is an identity.
class ItemCatalog {
 public:
  explicit ItemCatalog(std::vector<UnitVector> items);
  explicit ItemCatalog(const Matrix& columns);

  std::size_t size() const { return items_.size(); }
  Eigen::Index dim() const { return matrix_.rows(); }
  const UnitVector& item(std::size_t i) const;
  const Matrix& matrix() const { return matrix_; }

 private:
  std::vector<UnitVector> items_;
  Matrix matrix_;
};

/// Step size eta_t: either a constant eta > 0 or eta / (t + s) for positive
/// integers eta and s (integrality is required by the closed-form trajectory
/// expressions).
class StepSizeSchedule {
 public:
  enum class Kind { Constant, Decreasing };

  static StepSizeSchedule constant(double eta);
  static StepSizeSchedule decreasing(std::int64_t eta, std::int64_t s);

  Kind kind() const { return kind_; }
  double eta() const { return eta_; }
  std::int64_t s() const;
  double eta_at(std::size_t t) const;

 private:
  StepSizeSchedule(Kind kind, double eta, std::int64_t s)
      : kind_(kind), eta_(eta), s_(s) {}

  Kind kind_;
  double eta_;
  std::int64_t s_;
};

}  // namespace prefdyn
