#include "citopt/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "citopt/error.hpp"

namespace citopt {

double Bound::value() const {
  return m_ ? *m_ : std::numeric_limits<double>::infinity();
}

bool Bound::admits(double x) const {
  if (!m_) return true;
  return std::abs(x) <= *m_ + 1e-9 * std::max(1.0, *m_);
}

void validate_bounds(const Bounds& b) {
  if (b.order < 1 || static_cast<int>(b.m.size()) != b.order + 1)
    fail(ErrorCode::LengthMismatch, "order " + std::to_string(b.order) + " needs " +
                                        std::to_string(b.order + 1) + " limits, got " +
                                        std::to_string(b.m.size()));
  if (!b.m[0].finite()) fail(ErrorCode::InfiniteControlBound, "M0 must be finite");
  for (size_t k = 0; k < b.m.size(); ++k) {
    if (b.m[k].finite() && !(b.m[k].value() > 0.0))
      fail(ErrorCode::NonPositiveBound, "M" + std::to_string(k) + " must be positive");
  }
}

bool feasible(const StateVector& x, const Bounds& b) {
  if (static_cast<int>(x.size()) != b.order)
    fail(ErrorCode::OrderMismatch, "state length differs from bounds order");
  for (int k = 1; k <= b.order; ++k)
    if (!b.state(k).admits(x[static_cast<size_t>(k - 1)])) return false;
  return true;
}

void PiecewiseControl::add(double duration, double level) {
  if (duration < 0.0 || !std::isfinite(duration))
    fail(ErrorCode::InvalidArgument, "segment duration must be non-negative");
  if (duration == 0.0) return;
  segments.push_back({duration, level});
}

void PiecewiseControl::append(const PiecewiseControl& other) {
  for (const auto& s : other.segments) add(s.duration, s.level);
}

double PiecewiseControl::duration() const {
  double d = 0.0;
  for (const auto& s : segments) d += s.duration;
  return d;
}

void PiecewiseControl::validate(const Bounds& b) const {
  for (const auto& s : segments) {
    if (!(s.duration > 0.0)) fail(ErrorCode::InvalidArgument, "segment duration must be positive");
    if (!b.m.at(0).admits(s.level))
      fail(ErrorCode::InvalidArgument, "control level exceeds M0");
  }
}

double CostateArc::p1(double tau) const {
  return -(p0 / 6.0) * (tau - roots[0]) * (tau - roots[1]) * (tau - roots[2]);
}

double CostateArc::p2(double tau) const {
  const double a = tau - roots[0], b = tau - roots[1], c = tau - roots[2];
  return (p0 / 6.0) * (a * b + b * c + a * c);
}

double CostateArc::p3(double tau) const {
  const double a = tau - roots[0], b = tau - roots[1], c = tau - roots[2];
  return -(p0 / 3.0) * (a + b + c);
}

}  // namespace citopt
