#include "citopt/poly.hpp"

#include <algorithm>
#include <cmath>

namespace citopt {

namespace {

void trim(std::vector<double>& c) {
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * scale) c.pop_back();
}

double polish(const std::vector<double>& c, double x) {
  const auto d = poly_derivative(c);
  for (int i = 0; i < 3; ++i) {
    const double fp = poly_eval(d, x);
    if (fp == 0.0) break;
    const double step = poly_eval(c, x) / fp;
    if (!std::isfinite(step)) break;
    x -= step;
  }
  return x;
}

std::vector<double> roots_quadratic(double c0, double c1, double c2) {
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) return {};
  if (disc == 0.0) return {-c1 / (2.0 * c2)};
  const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
  std::vector<double> r;
  r.push_back(q / c2);
  if (q != 0.0) r.push_back(c0 / q);
  else r.push_back(-r.front());
  return r;
}

std::vector<double> roots_cubic(const std::vector<double>& c) {
  const double a = c[2] / c[3], b = c[1] / c[3], d = c[0] / c[3];
  const double q = (a * a - 3.0 * b) / 9.0;
  const double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * d) / 54.0;
  std::vector<double> out;
  if (r * r < q * q * q) {
    const double th = std::acos(std::clamp(r / std::sqrt(q * q * q), -1.0, 1.0));
    const double s = -2.0 * std::sqrt(q);
    out = {s * std::cos(th / 3.0) - a / 3.0, s * std::cos((th + 2.0 * M_PI) / 3.0) - a / 3.0,
           s * std::cos((th - 2.0 * M_PI) / 3.0) - a / 3.0};
  } else {
    const double A = -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r * r - q * q * q)), r);
    const double B = A == 0.0 ? 0.0 : q / A;
    out = {A + B - a / 3.0};
  }
  for (double& x : out) x = polish(c, x);
  return out;
}

}  // namespace

double poly_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> d(c.size() - 1);
  for (size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
  return d;
}

std::vector<double> real_roots(const std::vector<double>& coeffs, double lo, double hi) {
  std::vector<double> c = coeffs;
  trim(c);
  std::vector<double> cand;
  const size_t deg = c.size() - 1;
  if (deg == 0) return {};
  if (deg == 1) {
    cand = {-c[0] / c[1]};
  } else if (deg == 2) {
    cand = roots_quadratic(c[0], c[1], c[2]);
  } else if (deg == 3) {
    cand = roots_cubic(c);
  } else {
    // Critical points split [lo, hi] into monotone pieces; bisect each sign change.
    std::vector<double> knots{lo};
    for (double x : real_roots(poly_derivative(c), lo, hi)) knots.push_back(x);
    knots.push_back(hi);
    auto f = [&](double x) { return poly_eval(c, x); };
    for (size_t i = 0; i + 1 < knots.size(); ++i) {
      const double fa = f(knots[i]), fb = f(knots[i + 1]);
      if (fa == 0.0) cand.push_back(knots[i]);
      else if (fa * fb < 0.0) cand.push_back(bisect(f, knots[i], knots[i + 1]));
    }
    if (f(hi) == 0.0) cand.push_back(hi);
  }
  std::vector<double> out;
  for (double x : cand)
    if (std::isfinite(x) && x >= lo && x <= hi) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double bisect(const std::function<double(double)>& f, double a, double b, double xtol,
              int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) return std::abs(fa) < std::abs(fb) ? a : b;
  for (int i = 0; i < max_iter && std::abs(b - a) > xtol * std::max(1.0, std::abs(a)); ++i) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    const double fm = f(m);
    if (fm == 0.0) return m;
    if (fa * fm < 0.0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return std::abs(fa) < std::abs(fb) ? a : b;
}

ScalarMin golden_section(const std::function<double(double)>& f, double a, double b,
                         double xtol, int max_iter) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iter && std::abs(b - a) > xtol; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? ScalarMin{c, fc} : ScalarMin{d, fd};
}

}  // namespace citopt
