#include "prefdyn/types.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace prefdyn {

UnitVector::UnitVector(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) {
    throw DimensionMismatchError("UnitVector requires dimension >= 2, got " +
                                 std::to_string(coords_.size()));
  }
  const double norm = coords_.norm();
  if (std::abs(norm - 1.0) > kUnitNormTol) {
    throw ZeroVectorError("UnitVector norm " + std::to_string(norm) +
                          " is not 1 within 1e-12");
  }
}

double UnitVector::dot(const UnitVector& other) const {
  if (other.dim() != dim()) {
    throw DimensionMismatchError("dot of dimensions " + std::to_string(dim()) +
                                 " and " + std::to_string(other.dim()));
  }
  return coords_.dot(other.coords_);
}

double UnitVector::dot(const Vector& other) const {
  if (other.size() != dim()) {
    throw DimensionMismatchError("dot of dimensions " + std::to_string(dim()) +
                                 " and " + std::to_string(other.size()));
  }
  return coords_.dot(other);
}

UnitVector normalize(const Vector& v) {
  const double norm = v.norm();
  if (norm <= 1e-12) {
    throw ZeroVectorError("cannot normalize a vector of norm " +
                          std::to_string(norm));
  }
  return UnitVector(v / norm);
}

ItemCatalog::ItemCatalog(std::vector<UnitVector> items)
    : items_(std::move(items)) {
  if (items_.empty()) {
    throw DimensionMismatchError("catalog must contain at least one item");
  }
  const Eigen::Index d = items_.front().dim();
  matrix_.resize(d, static_cast<Eigen::Index>(items_.size()));
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i].dim() != d) {
      throw DimensionMismatchError("catalog items must share one dimension");
    }
    matrix_.col(static_cast<Eigen::Index>(i)) = items_[i].vec();
  }
}

namespace {
std::vector<UnitVector> columns_to_items(const Matrix& columns) {
  std::vector<UnitVector> items;
  items.reserve(static_cast<std::size_t>(columns.cols()));
  for (Eigen::Index i = 0; i < columns.cols(); ++i) {
    items.emplace_back(Vector(columns.col(i)));
  }
  return items;
}
}  // namespace

ItemCatalog::ItemCatalog(const Matrix& columns)
    : ItemCatalog(columns_to_items(columns)) {}

const UnitVector& ItemCatalog::item(std::size_t i) const {
  if (i >= items_.size()) {
    throw IndexOutOfRangeError("catalog index " + std::to_string(i) +
                               " out of range for " +
                               std::to_string(items_.size()) + " items");
  }
  return items_[i];
}

StepSizeSchedule StepSizeSchedule::constant(double eta) {
  if (!(eta > 0.0)) {
    throw DomainError("constant step size must be positive");
  }
  return StepSizeSchedule(Kind::Constant, eta, 0);
}

StepSizeSchedule StepSizeSchedule::decreasing(std::int64_t eta,
                                              std::int64_t s) {
  if (eta < 1 || s < 1) {
    throw DomainError("decreasing schedule requires integer eta >= 1, s >= 1");
  }
  return StepSizeSchedule(Kind::Decreasing, static_cast<double>(eta), s);
}

std::int64_t StepSizeSchedule::s() const {
  if (kind_ != Kind::Decreasing) {
    throw DomainError("s is only defined for the decreasing schedule");
  }
  return s_;
}

double StepSizeSchedule::eta_at(std::size_t t) const {
  if (kind_ == Kind::Constant) return eta_;
  return eta_ / (static_cast<double>(t) + static_cast<double>(s_));
}

}  // namespace prefdyn
