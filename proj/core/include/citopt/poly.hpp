#pragma once

#include <functional>
#include <vector>

namespace citopt {

// Coefficients are stored lowest degree first.
double poly_eval(const std::vector<double>& c, double x);
std::vector<double> poly_derivative(const std::vector<double>& c);

// Real roots inside [lo, hi], sorted. Closed form up to degree 3, bracketed
// bisection between critical points above that.
std::vector<double> real_roots(const std::vector<double>& c, double lo, double hi);

// Root of f on [a, b] given a sign change. Falls back to the endpoint with the
// smaller |f| when both have the same sign.
double bisect(const std::function<double(double)>& f, double a, double b, double xtol = 1e-15,
              int max_iter = 200);

struct ScalarMin {
  double x;
  double fx;
};

ScalarMin golden_section(const std::function<double(double)>& f, double a, double b,
                         double xtol = 1e-10, int max_iter = 300);

}  // namespace citopt
