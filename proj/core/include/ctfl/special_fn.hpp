#pragma once

// Gamma-density masses f_k(r) = r^k e^{-r} / k! over segments and tails.
//
// Every eigenvalue in this library is a sum of such masses, so these routines
// are written to keep full relative precision for k up to ~1e6 and for masses
// far in either tail. All factorials go through log-space; k! is never formed.

namespace ctfl {

struct SegmentMass {
    double value = 0.0;          ///< in [0, 1]
    double rel_err_bound = 0.0;  ///< estimated relative error of `value`
};

/// Mass of [a, b] in log form; `log_value` stays finite where `value` would
/// underflow. `log_value == -inf` for an empty segment.
struct LogSegmentMass {
    double log_value = 0.0;
    double rel_err_bound = 0.0;
};

/// f_k(x) = x^k e^{-x} / k!, evaluated through the saddle-point form
/// exp(-stirlerr(k) - bd0(k, x)) / sqrt(2 pi k).
double poisson_weight(int k, double x);
double log_poisson_weight(int k, double x);

/// P(k+1, x) = int_0^x f_k. Series below x = k+1, continued fraction above.
/// Throws DomainError for x < 0 or k < 0.
double regularized_lower_gamma(int k, double x);

/// Q(k+1, x) = int_x^inf f_k = e^{-x} sum_{n<=k} x^n/n!, summed outward from
/// the largest term with a log-space scale factor.
double gamma_tail_mass(int k, double x);

/// int_a^b f_k. Uses a difference of P (or Q) values when that difference
/// keeps enough digits, otherwise adaptive Gauss-Legendre quadrature of the
/// scaled integrand. Throws DomainError unless 0 <= a <= b.
SegmentMass segment_mass(int k, double a, double b);
LogSegmentMass log_segment_mass(int k, double a, double b);

/// Direct adaptive quadrature route of segment_mass, exposed for cross-checks.
LogSegmentMass log_segment_mass_quadrature(int k, double a, double b);

namespace detail {
/// lgamma(n+1) - (n+1/2) ln n + n - ln sqrt(2 pi), n >= 1.
double stirlerr(int n);
/// k ln(k/x) + x - k, accurate when k is close to x.
double bd0(double k, double x);
}  // namespace detail

}  // namespace ctfl
