#pragma once

// Series implementations of the special functions used by the closed-form
// families. Each routine has a hard argument window instead of asymptotic
// switching; arguments outside it are rejected with DomainError.

namespace omegascale::special {

struct SeriesControl {
  int max_terms = 500;
  double rel_tol = 1e-17;
};

// Lanczos (g = 7, 9 terms) with reflection below 1/2. Throws DomainError at
// the poles 0, -1, -2, ...
double gamma_fn(double z);

// 1F1(a; b; z) by the term recurrence t_{n+1} = t_n (a+n) z / ((b+n)(n+1)).
// Throws DomainError for b in {0, -1, ...} and ConvergenceError if the
// series has not settled after ctl.max_terms terms.
double kummer_1f1(double a, double b, double z, const SeriesControl& ctl = {});

// Modified Bessel function of the first kind, any real order, 0 <= z <= 30.
double bessel_i(double v, double z, const SeriesControl& ctl = {});

// K_v(z) = (pi/2)(I_{-v}(z) - I_v(z))/sin(v pi). Orders within 1e-8 of an
// integer are rejected; 0 < z <= 30.
double bessel_k(double v, double z, const SeriesControl& ctl = {});

// Airy functions from the Maclaurin series of y'' = x y, |x| <= 15, summed in
// long double. Cancellation limits the absolute error to about 1e-12 on
// [-10, 10]; towards the window edges it grows to 1e-3.
double airy_ai(double x);
double airy_bi(double x);
double airy_ai_prime(double x);
double airy_bi_prime(double x);

}  // namespace omegascale::special
