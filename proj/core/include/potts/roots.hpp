#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "potts/errors.hpp"

namespace potts {

// Bracketed root of f on [lo, hi]; f(lo) and f(hi) must differ in sign.
// Secant steps are taken when they stay inside the bracket, otherwise bisection.
double bracketed_root(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14,
                      int max_iter = 400);

// All sign changes of f on a uniform n-cell scan of [lo, hi], each refined.
std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi, int n,
                               double tol = 1e-14);

// Minimizer of a unimodal function on [lo, hi] by golden section.
double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

}  // namespace potts
