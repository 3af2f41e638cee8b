#pragma once

// Reference implementations used only by tests. None of them call into the
// library, so agreement is a genuine cross-check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

using Real = long double;

struct Span {
    Real lo = 0;
    Real hi = 0;
};

// ln f_k(r) = k ln r - r - ln k!
inline Real log_density(int k, Real r) {
    if (r == 0) return k == 0 ? 0.0L : -INFINITY;
    return k * std::log(r) - r - std::lgamma(static_cast<Real>(k) + 1);
}

namespace detail {
template <class F>
Real simpson(const F& f, Real a, Real b, Real fa, Real fm, Real fb, Real whole, Real tol, int depth) {
    const Real m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
    const Real flm = f(lm), frm = f(rm);
    const Real left = (m - a) / 6 * (fa + 4 * flm + fm);
    const Real right = (b - m) / 6 * (fm + 4 * frm + fb);
    const Real diff = left + right - whole;
    if (depth <= 0 || std::fabs(diff) <= 15 * tol) return left + right + diff / 15;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}
}  // namespace detail

// ln int_a^b f_k by adaptive Simpson on the integrand scaled to peak 1.
inline Real log_segment_mass(int k, Real a, Real b) {
    if (!(b > a)) return -INFINITY;
    const Real peak = std::clamp(static_cast<Real>(k), a, b);
    const Real L = log_density(k, peak);
    // ln f_k(r) - ln f_k(peak) = k ln(1 + d/peak) - d, d = r - peak; this
    // form has no large cancelling terms, so g is smooth to long-double eps.
    const auto g = [&](Real r) {
        const Real d = r - peak;
        if (k == 0) return std::exp(-d);
        return std::exp(k * std::log1p(d / peak) - d);
    };
    // Split at the peak so each piece is monotone.
    Real total = 0;
    for (const auto& [lo, hi] : {std::pair{a, peak}, std::pair{peak, b}}) {
        if (!(hi > lo)) continue;
        // Coarse presplit keeps the recursion from missing a narrow bulge.
        const int pieces = 64;
        for (int i = 0; i < pieces; ++i) {
            const Real x0 = lo + (hi - lo) * i / pieces;
            const Real x1 = i + 1 == pieces ? hi : lo + (hi - lo) * (i + 1) / pieces;
            const Real f0 = g(x0), f1 = g(x1), fm = g((x0 + x1) / 2);
            const Real whole = (x1 - x0) / 6 * (f0 + 4 * fm + f1);
            total += detail::simpson(g, x0, x1, f0, fm, f1, whole, 1e-16L * (x1 - x0), 30);
        }
    }
    return L + std::log(total);
}

// Iterate intervals on [0, scale], levels given coarsest first, touching
// neighbours merged. Labels are exact integers, so only the final scaling
// rounds.
inline std::vector<Span> intervals(const std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>>& levels,
                                   Real scale) {
    std::vector<std::int64_t> labels{0};
    Real denom = 1;
    for (const auto& [m, letters] : levels) {
        std::vector<std::int64_t> next;
        next.reserve(labels.size() * letters.size());
        for (const auto v : labels)
            for (const auto a : letters) next.push_back(v * m + a);
        labels = std::move(next);
        denom *= static_cast<Real>(m);
    }
    std::sort(labels.begin(), labels.end());
    std::vector<Span> out;
    for (const auto v : labels) {
        const Real lo = static_cast<Real>(v) / denom * scale;
        const Real hi = static_cast<Real>(v + 1) / denom * scale;
        if (!out.empty() && out.back().hi >= lo)
            out.back().hi = hi;
        else
            out.push_back({lo, hi});
    }
    return out;
}

inline std::vector<Span> intervals(std::int64_t m, const std::vector<std::int64_t>& letters, int n, Real scale) {
    return intervals(std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>>(static_cast<std::size_t>(n),
                                                                                     {m, letters}),
                     scale);
}

inline Real total_length(const std::vector<Span>& set) {
    Real s = 0;
    for (const auto& iv : set) s += iv.hi - iv.lo;
    return s;
}

// |C ∩ [0, x]| / |C| on [0, 1].
inline Real cantor_function(const std::vector<Span>& set, Real x) {
    Real s = 0;
    for (const auto& iv : set) {
        if (iv.lo >= x) break;
        s += std::min(iv.hi, x) - iv.lo;
    }
    return s / total_length(set);
}

// lambda_0 = int_C e^{-r} dr, summed per interval.
inline Real lambda0(const std::vector<Span>& set) {
    Real s = 0;
    for (const auto& iv : set) s += std::exp(-iv.lo) * -std::expm1(-(iv.hi - iv.lo));
    return s;
}

// lambda_k by per-interval quadrature (slow; small sets only).
inline Real eigenvalue(const std::vector<Span>& set, int k) {
    Real s = 0;
    for (const auto& iv : set) s += std::exp(log_segment_mass(k, iv.lo, iv.hi));
    return s;
}

inline std::vector<std::int64_t> canonical(std::int64_t size) {
    std::vector<std::int64_t> v(static_cast<std::size_t>(size));
    for (std::int64_t i = 0; i < size; ++i) v[static_cast<std::size_t>(i)] = i;
    return v;
}

inline std::vector<std::int64_t> reverse_canonical(std::int64_t m, std::int64_t size) {
    std::vector<std::int64_t> v;
    for (std::int64_t i = m - size; i < m; ++i) v.push_back(i);
    return v;
}

}  // namespace oracle
