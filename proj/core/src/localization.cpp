#include "ctfl/localization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "ctfl/errors.hpp"
#include "ctfl/special_fn.hpp"

namespace ctfl {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_rho(double rho) {
    if (!(rho >= 0.0) || !std::isfinite(rho))
        throw ValidationError("rho must be finite and nonnegative");
}

void check_k(int k) {
    if (k < 0) throw ValidationError("eigenvalue index must be nonnegative, got " + std::to_string(k));
}

double log_sum_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

// ln sum_{i<count} e^{-(first+i) t}
double log_run_sum(const LetterRun& r, double t) {
    const double n = static_cast<double>(r.count);
    if (t == 0.0) return std::log(n);
    return -static_cast<double>(r.first) * t + std::log(std::expm1(-n * t) / std::expm1(-t));
}

// ln sum_{a in A} e^{-a t}
double log_alphabet_sum(const Alphabet& alphabet, double t) {
    double s = -kInf;
    for (const auto& r : alphabet.runs()) s = log_sum_exp(s, log_run_sum(r, t));
    return s;
}

// ---------------------------------------------------------------- panels

constexpr int kNodes = 20;
constexpr double kPanelWidth = 1.0;
constexpr double kCutoff = 1e-300;
constexpr int kReseed = 16;

template <int N>
struct FullRule {
    std::array<double, N> x{};
    std::array<double, N> w{};
};

template <int N>
FullRule<N> full_gauss_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& a = G::abscissa();
    const auto& wt = G::weights();
    FullRule<N> r;
    int idx = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            r.x[idx] = 0.0;
            r.w[idx++] = wt[i];
            continue;
        }
        r.x[idx] = -a[i];
        r.w[idx++] = wt[i];
        r.x[idx] = a[i];
        r.w[idx++] = wt[i];
    }
    return r;
}

// Chebyshev points of the first kind with T_j evaluated there.
struct ChebyshevBasis {
    std::array<double, kNodes> t{};
    std::array<std::array<double, kNodes>, kNodes> T{};  // T[i][j] = T_j(t_i)
};

const ChebyshevBasis& chebyshev_basis() {
    static const ChebyshevBasis b = [] {
        ChebyshevBasis out;
        for (int i = 0; i < kNodes; ++i) {
            const double ti = std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * kNodes));
            out.t[i] = ti;
            for (int j = 0; j < kNodes; ++j) out.T[i][j] = std::cos(j * (2.0 * i + 1.0) * std::numbers::pi / (2.0 * kNodes));
        }
        return out;
    }();
    return b;
}

// Sup-norm error of degree-(Q-1) Chebyshev interpolation of any f_k on a
// panel of width h, using |f_k^{(Q)}| <= 2^Q.
double interpolation_bound() {
    double b = 2.0;
    for (int q = 1; q <= kNodes; ++q) b *= (0.5 * kPanelWidth) / q;
    return b;
}

class TableAccumulator {
public:
    explicit TableAccumulator(int k_max)
        : k_max_(k_max), value_(k_max + 1, 0.0), abs_(k_max + 1, 0.0), rel_(k_max + 1, 0.0) {}

    void add_node(double x, double w) {
        if (w == 0.0) return;
        const double aw = std::abs(w);
        sum_abs_w_ += aw;
        const int m = std::min(static_cast<int>(std::floor(x)), k_max_);
        walk(x, w, aw, 0.0, m, +1);
        if (m > 0) walk(x, w, aw, 0.0, m - 1, -1);
    }

    // Charges `e` times f_k(x) to the error of every k, for endpoint rounding.
    void add_bound(double x, double e) {
        if (e == 0.0) return;
        const int m = std::min(static_cast<int>(std::floor(x)), k_max_);
        walk(x, 0.0, 0.0, e, m, +1);
        if (m > 0) walk(x, 0.0, 0.0, e, m - 1, -1);
    }

    void add_mode_bound(int k, double e) {
        if (k < 0 || k > k_max_) return;
        rel_[static_cast<std::size_t>(k)] += e * poisson_weight(k, static_cast<double>(k));
    }

    void add_covered(double length) { covered_ += length; }

    std::vector<EigenvalueResult> finish() const {
        const double fixed = covered_ * interpolation_bound() + kCutoff * sum_abs_w_;
        std::vector<EigenvalueResult> out(static_cast<std::size_t>(k_max_) + 1);
        for (int k = 0; k <= k_max_; ++k) {
            const auto i = static_cast<std::size_t>(k);
            out[i].k = k;
            out[i].value = std::clamp(value_[i], 0.0, 1.0);
            out[i].err = fixed + (16.0 + kNodes) * kEps * abs_[i] + rel_[i];
        }
        return out;
    }

private:
    // Walks away from the mode in direction `dir`, where f_k(x) decreases.
    void walk(double x, double w, double aw, double extra, int k, int dir) {
        while (k >= 0 && k <= k_max_) {
            const double lf = log_poisson_weight(k, x);
            double f = std::exp(lf);
            if (f < kCutoff) return;
            const double rel_seed = 4.0 * kEps * (4.0 + std::abs(lf) + std::log1p(static_cast<double>(k)));
            for (int s = 0; s < kReseed; ++s) {
                const auto i = static_cast<std::size_t>(k);
                value_[i] += w * f;
                abs_[i] += aw * f;
                rel_[i] += aw * f * (rel_seed + 2.0 * kEps * s) + extra * f;
                if (dir > 0) {
                    f *= x / (k + 1);
                    ++k;
                    if (k > k_max_) return;
                } else {
                    f *= k / x;
                    --k;
                    if (k < 0) return;
                }
                if (f < kCutoff) return;
            }
        }
    }

    int k_max_;
    std::vector<double> value_, abs_, rel_;
    double covered_ = 0.0;
    double sum_abs_w_ = 0.0;
};

}  // namespace

// ---------------------------------------------------------------- problem

LocalizationProblem LocalizationProblem::fixed(const CantorSpec& spec, int n, double rho, std::size_t cap) {
    check_rho(rho);
    if (n < 0) throw ValidationError("iterate must be nonnegative");
    if (rho == 0.0) {
        IterateIntervals empty;
        empty.scale = 0.0;
        empty.iterate = n;
        empty.origin = spec;
        return {std::move(empty), 0.0};
    }
    return {continuous_iterate(spec, n, rho, cap), rho};
}

LocalizationProblem LocalizationProblem::indexed(const IndexedCantorSpec& spec, double rho, std::size_t cap) {
    check_rho(rho);
    if (rho == 0.0) {
        IterateIntervals empty;
        empty.scale = 0.0;
        empty.iterate = spec.depth();
        empty.origin = spec;
        return {std::move(empty), 0.0};
    }
    return {continuous_iterate(spec, rho, cap), rho};
}

double ball_bound(double measure) {
    return -std::expm1(-measure);
}

EigenvalueResult eigenvalue(const LocalizationProblem& p, int k) {
    check_k(k);
    EigenvalueResult out;
    out.k = k;
    double sum = 0.0;
    double err = 0.0;
    for (const auto& iv : p.intervals()) {
        const SegmentMass m = segment_mass(k, iv.lo, iv.hi);
        sum += m.value;
        err += m.value * m.rel_err_bound;
        // Endpoints carry a rounding of eps |x|; f_k peaks at x = k.
        double peak = std::max(poisson_weight(k, iv.lo), poisson_weight(k, iv.hi));
        if (iv.lo < k && k < iv.hi) peak = poisson_weight(k, static_cast<double>(k));
        err += kEps * (iv.lo + iv.hi) * peak;
    }
    out.value = std::min(sum, 1.0);
    out.err = err + static_cast<double>(p.intervals().size()) * kEps * sum;
    return out;
}

std::vector<EigenvalueResult> eigenvalue_table(const LocalizationProblem& p, int k_max) {
    check_k(k_max);
    static const FullRule<10> moment_rule = full_gauss_rule<10>();  // exact through degree 19
    const ChebyshevBasis& basis = chebyshev_basis();
    constexpr double half = 0.5 * kPanelWidth;

    TableAccumulator acc(k_max);
    std::array<double, kNodes> mu{};
    double covered = 0.0;
    double endpoint_err = 0.0;
    long panel = -1;

    auto flush = [&] {
        if (panel < 0 || covered == 0.0) return;
        const double c = (static_cast<double>(panel) + 0.5) * kPanelWidth;
        for (int i = 0; i < kNodes; ++i) {
            double s = mu[0];
            for (int j = 1; j < kNodes; ++j) s += 2.0 * basis.T[i][j] * mu[j];
            acc.add_node(c + half * basis.t[i], half * s / kNodes);
        }
        acc.add_covered(covered);
        const double a = static_cast<double>(panel) * kPanelWidth;
        acc.add_bound(a, endpoint_err);
        acc.add_bound(a + kPanelWidth, endpoint_err);
        acc.add_mode_bound(static_cast<int>(panel), endpoint_err);
        acc.add_mode_bound(static_cast<int>(panel) + 1, endpoint_err);
        mu.fill(0.0);
        covered = 0.0;
        endpoint_err = 0.0;
    };

    for (const auto& iv : p.intervals()) {
        double lo = iv.lo;
        while (lo < iv.hi) {
            const long idx = static_cast<long>(std::floor(lo / kPanelWidth));
            const double hi = std::min(iv.hi, (static_cast<double>(idx) + 1.0) * kPanelWidth);
            if (idx != panel) {
                flush();
                panel = idx;
            }
            const double c = (static_cast<double>(idx) + 0.5) * kPanelWidth;
            // Width from hi - lo directly; differencing the mapped ends loses digits.
            const double mid = (0.5 * (lo + hi) - c) / half;
            const double hw = 0.5 * (hi - lo) / half;
            for (std::size_t g = 0; g < moment_rule.x.size(); ++g) {
                const double t = mid + hw * moment_rule.x[g];
                const double wg = hw * moment_rule.w[g];
                double t0 = 1.0, t1 = t;
                mu[0] += wg;
                mu[1] += wg * t;
                for (int j = 2; j < kNodes; ++j) {
                    const double t2 = 2.0 * t * t1 - t0;
                    mu[j] += wg * t2;
                    t0 = t1;
                    t1 = t2;
                }
            }
            covered += hi - lo;
            endpoint_err += kEps * (lo + hi);
            lo = hi;
        }
    }
    flush();
    return acc.finish();
}

NormResult operator_norm(const LocalizationProblem& p, const NormOptions& options) {
    const double rho = p.rho();
    NormResult out;
    if (options.start_at_inner_index) {
        const auto* spec = std::get_if<CantorSpec>(&p.spec());
        if (!spec) throw ValidationError("the inner-index scan start needs a fixed-base problem");
        out.k_start = static_cast<int>(std::floor(inner_rho(*spec, p.iterate(), rho)));
    }

    // Every stopping threshold is at least abs_floor, so the first index past
    // rho with a tail below abs_floor bounds the scan.
    int k_upper = static_cast<int>(std::floor(rho)) + 1;
    while (regularized_lower_gamma(k_upper + 1, rho) >= options.abs_floor) ++k_upper;
    k_upper = std::max(k_upper, out.k_start);

    const auto table = eigenvalue_table(p, k_upper);
    double best = -1.0;
    for (int k = out.k_start; k <= k_upper; ++k) {
        const auto& e = table[static_cast<std::size_t>(k)];
        if (e.value > best) {
            best = e.value;
            out.argmax_k = k;
            out.err = e.err;
        }
        if (static_cast<double>(k) > rho) {
            const double tail = regularized_lower_gamma(k + 1, rho);
            if (tail < std::max(options.abs_floor, best * options.rel_tol)) {
                out.k_truncation = k;
                out.tail_bound = tail;
                break;
            }
        }
    }
    out.value = std::max(best, 0.0);
    return out;
}

// ------------------------------------------------------------ closed forms

double lambda0_closed_form(const CantorSpec& spec, int n, double rho) {
    check_rho(rho);
    if (n < 0) throw ValidationError("iterate must be nonnegative");
    if (rho == 0.0) return 0.0;
    const double m = static_cast<double>(spec.base());
    double t = rho;
    double log_value = 0.0;
    for (int j = 1; j <= n; ++j) {
        t /= m;
        log_value += log_alphabet_sum(spec.alphabet(), t);
    }
    log_value += std::log(-std::expm1(-t));
    return std::exp(log_value);
}

double lambda0_canonical_geometric(std::int64_t base, std::int64_t size, int n, double rho) {
    check_rho(rho);
    if (base < 2 || size < 1 || size >= base) throw ValidationError("need 1 <= size < base");
    if (rho == 0.0) return 0.0;
    const double m = static_cast<double>(base);
    const double a = static_cast<double>(size);
    double t = rho;
    double log_value = 0.0;
    for (int j = 1; j <= n; ++j) {
        t /= m;
        log_value += t == 0.0 ? std::log(a) : std::log(std::expm1(-a * t) / std::expm1(-t));
    }
    log_value += std::log(-std::expm1(-t));
    return std::exp(log_value);
}

double log_lambda0_indexed(const IndexedCantorSpec& spec, double rho) {
    check_rho(rho);
    if (rho == 0.0) return -kInf;
    double T = rho;
    double log_value = std::log(-std::expm1(-rho));
    for (const auto& level : spec.levels()) {
        log_value += std::log(relative_area_k0(level.base(), level.alphabet(), T));
        T /= static_cast<double>(level.base());
    }
    return log_value;
}

double lambda0_indexed(const IndexedCantorSpec& spec, double rho) {
    return std::exp(log_lambda0_indexed(spec, rho));
}

// ---------------------------------------------------------- relative areas

double relative_area_k0(std::int64_t base, const Alphabet& alphabet, double T) {
    if (!(T >= 0.0)) throw DomainError("relative area needs T >= 0");
    if (alphabet.empty() || alphabet.max_letter() >= base) throw ValidationError("alphabet out of range for base");
    const double m = static_cast<double>(base);
    if (T == 0.0) return static_cast<double>(alphabet.size()) / m;
    // sum_runs e^{-first u} (1 - e^{-count u}) / (1 - e^{-T}), u = T / M
    const double u = T / m;
    double log_num = -kInf;
    for (const auto& r : alphabet.runs())
        log_num = log_sum_exp(log_num, -static_cast<double>(r.first) * u +
                                           std::log(-std::expm1(-static_cast<double>(r.count) * u)));
    return std::min(1.0, std::exp(log_num - std::log(-std::expm1(-T))));
}

double relative_area_k0(double theta, double T) {
    if (!(T > 0.0)) throw DomainError("relative area needs T > 0");
    return std::expm1(-theta * T) / std::expm1(-T);
}

double relative_area(std::int64_t base, const Alphabet& alphabet, int k, double s, double T) {
    check_k(k);
    if (base < 2) throw ValidationError("base must be at least 2");
    if (alphabet.empty() || alphabet.max_letter() >= base) throw ValidationError("alphabet out of range for base");
    if (!(s >= 0.0)) throw DomainError("relative area needs s >= 0");
    if (!(T > 0.0)) throw DomainError("relative area needs T > 0");
    // e^{-s} cancels for k = 0; the offset masses would lose |s| eps.
    if (k == 0) return relative_area_k0(base, alphabet, T);
    const double log_den = log_segment_mass(k, s, s + T).log_value;
    if (!std::isfinite(log_den))
        throw DegenerateError("relative area: mass of [s, s+T] vanishes for k=" + std::to_string(k));
    const double step = T / static_cast<double>(base);
    double ratio = 0.0;
    for (const auto& r : alphabet.runs()) {
        const double lo = s + static_cast<double>(r.first) * step;
        const double hi = r.first + r.count == base ? s + T : s + static_cast<double>(r.first + r.count) * step;
        const double ln = log_segment_mass(k, lo, hi).log_value;
        if (ln != -kInf) ratio += std::exp(ln - log_den);
    }
    return std::clamp(ratio, 0.0, 1.0);
}

double relative_area(const CantorSpec& spec, int k, double s, double T) {
    return relative_area(spec.base(), spec.alphabet(), k, s, T);
}

double limit_relative_area(double theta, double a, double T) {
    if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("theta must lie in (0, 1]");
    if (!(a >= 1.0)) throw DomainError("limit relative area needs a >= 1");
    if (!(T > 0.0)) throw DomainError("limit relative area needs T > 0");
    const double c = T * (1.0 - 1.0 / a);
    if (c == 0.0) return theta;
    return std::expm1(-theta * c) / std::expm1(-c);
}

double inner_rho(const CantorSpec& spec, int n, double rho) {
    check_rho(rho);
    if (n < 0) throw ValidationError("iterate must be nonnegative");
    if (!spec.is_reverse_canonical())
        throw ValidationError("inner radius needs a reverse canonical alphabet, got " + spec.to_string());
    const double m = static_cast<double>(spec.base());
    double p = 1.0;
    double geometric = 0.0;
    for (int j = 1; j <= n; ++j) {
        p /= m;
        geometric += p;
    }
    return rho * static_cast<double>(spec.base() - spec.size()) * geometric;
}

}  // namespace ctfl
