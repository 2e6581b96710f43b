#pragma once

// Special functions used by the GH prior/posterior formulas.
//
// Every function is pure and reentrant. Domain violations throw
// std::domain_error; exhausted series budgets throw NonConvergenceError.

#include <vector>

#include "countshrink/errors.hpp"

namespace countshrink::specfun {

struct EvalControl {
    double rel_tol = 1e-12;
    int max_terms = 10'000;
};

double log_beta(double a, double b);

double log_gamma(double x);

// Gauss hypergeometric 2F1(a, b; c; w) on 0 <= w < 1 with c > b > 0.
//
// w <= 0.5: direct Pochhammer series.
// w >  0.5: adaptive quadrature of the Euler integral, accumulated in log space.
double gauss_2f1(double a, double b, double c, double w, const EvalControl& ctl = {});

// log 2F1(a, b; c; w). Same algorithm as gauss_2f1 but never overflows.
double log_gauss_2f1(double a, double b, double c, double w, const EvalControl& ctl = {});

// log 2F1 taking the complement 1 - w as well, so arguments like
// w = 1 - 1e-12 keep full relative precision in the (1 - w t) factor.
double log_gauss_2f1_split(double a, double b, double c, double w, double one_minus_w,
                           const EvalControl& ctl = {});

// log 2F1(a, b; c_k; w) for several c_k sharing a, b and w.
std::vector<double> log_gauss_2f1_batch(double a, double b, const std::vector<double>& c, double w,
                                        double one_minus_w, const EvalControl& ctl = {});

// Upper incomplete gamma Gamma(s, x) for s <= 1 (s may be zero or negative), x > 0.
double upper_inc_gamma(double s, double x);

// log Gamma(s, x); finite even where Gamma(s, x) underflows.
double log_upper_inc_gamma(double s, double x);

// Exponential integral E1(x), x > 0.
double exp_e1(double x);

double digamma(double x);

}  // namespace countshrink::specfun
