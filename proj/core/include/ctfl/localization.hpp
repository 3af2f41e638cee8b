#pragma once

// Eigenvalues and operator norm of the Gaussian-window localization operator
// onto a spherically symmetric Cantor iterate. With rho = pi R^2 the set's
// squared radii fill a subset C of [0, rho], and
//
//     lambda_k = int_C r^k e^{-r} / k! dr.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctfl/cantor.hpp"

namespace ctfl {

class LocalizationProblem {
public:
    /// Iterate n of `spec` scaled to [0, rho]. rho = 0 gives the empty set.
    static LocalizationProblem fixed(const CantorSpec& spec, int n, double rho,
                                     std::size_t cap = enumeration_cap());
    static LocalizationProblem indexed(const IndexedCantorSpec& spec, double rho,
                                       std::size_t cap = enumeration_cap());

    const IterateIntervals& set() const { return set_; }
    std::span<const Interval> intervals() const { return set_.intervals; }
    double rho() const { return rho_; }
    const AnySpec& spec() const { return set_.origin; }
    int iterate() const { return set_.iterate; }
    /// Lebesgue measure of C (in rho units, i.e. pi |E|).
    double measure() const { return set_.total_length(); }

private:
    LocalizationProblem(IterateIntervals set, double rho) : set_(std::move(set)), rho_(rho) {}

    IterateIntervals set_;
    double rho_ = 0.0;
};

struct EigenvalueResult {
    int k = 0;
    double value = 0.0;
    double err = 0.0;  ///< absolute error bound
};

/// Sum of segment masses over the merged intervals.
EigenvalueResult eigenvalue(const LocalizationProblem& p, int k);

/// lambda_0..lambda_{k_max} in one pass: each unit panel of [0, rho] carries
/// Chebyshev interpolation weights integrated exactly over C, and f_k at the
/// nodes is generated by recurrence in k. Agrees with `eigenvalue` within the
/// reported error bounds; far cheaper when many k are needed.
std::vector<EigenvalueResult> eigenvalue_table(const LocalizationProblem& p, int k_max);

/// Upper bound 1 - e^{-measure} on every eigenvalue.
double ball_bound(double measure);

struct NormOptions {
    double rel_tol = 1e-9;
    double abs_floor = 1e-12;
    /// Start the scan at floor(inner_rho); only valid for reverse canonical
    /// fixed-base problems.
    bool start_at_inner_index = false;
};

struct NormResult {
    double value = 0.0;
    int argmax_k = 0;
    int k_start = 0;
    int k_truncation = 0;
    /// sup_{k > K} lambda_k <= tail_bound = int_0^rho f_{K+1}.
    double tail_bound = 0.0;
    /// Error bound on `value` itself.
    double err = 0.0;
};

/// max_k lambda_k with a truncation certificate: the scan stops at the first
/// K > rho with int_0^rho f_{K+1} < max(abs_floor, max * rel_tol).
NormResult operator_norm(const LocalizationProblem& p, const NormOptions& options = {});

/// (1 - e^{-rho M^{-n}}) prod_{j=1..n} sum_{a in A} e^{-a M^{-j} rho}
double lambda0_closed_form(const CantorSpec& spec, int n, double rho);
/// (1 - e^{-rho M^{-n}}) prod_j (1 - e^{-|A| M^{-j} rho}) / (1 - e^{-M^{-j} rho})
double lambda0_canonical_geometric(std::int64_t base, std::int64_t size, int n, double rho);
/// (1 - e^{-rho}) prod_j A_{0, M_j, A_j}(rho / (M_1 ... M_{j-1})), with level 1
/// the coarsest.
double lambda0_indexed(const IndexedCantorSpec& spec, double rho);
/// ln of lambda0_indexed, finite where the value itself underflows.
double log_lambda0_indexed(const IndexedCantorSpec& spec, double rho);

/// Fraction of the f_k-mass of [s, s+T] kept by one refinement step with
/// base M and the given alphabet. Throws DegenerateError when the mass of
/// [s, s+T] is zero even in log form.
double relative_area(const CantorSpec& spec, int k, double s, double T);
/// Same, but the alphabet may be all of {0..M-1}.
double relative_area(std::int64_t base, const Alphabet& alphabet, int k, double s, double T);
/// k = 0 relative area of a run-structured alphabet; independent of s.
double relative_area_k0(std::int64_t base, const Alphabet& alphabet, double T);
/// Canonical k = 0 form (1 - e^{-theta T}) / (1 - e^{-T}).
double relative_area_k0(double theta, double T);
/// (1 - e^{-theta T (1 - 1/a)}) / (1 - e^{-T (1 - 1/a)}); equals theta at a = 1.
double limit_relative_area(double theta, double a, double T);

/// rho (M - |A|) sum_{j=1..n} M^{-j}. Throws ValidationError unless the
/// alphabet is reverse canonical.
double inner_rho(const CantorSpec& spec, int n, double rho);

}  // namespace ctfl
