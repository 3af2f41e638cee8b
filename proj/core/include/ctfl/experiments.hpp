#pragma once

// Sweep drivers over the iterate n: fixed-base norm asymptotics, the reverse
// canonical counterexample, and the indexed decay / non-decay constructions.
// All sweeps run sequentially and return rows ordered by n.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ctfl/cantor.hpp"
#include "ctfl/localization.hpp"

namespace ctfl {

enum class ScheduleKind { power_half, capped, indexed_sqrt };

/// rho(n) as a function of the iterate.
class RadiusSchedule {
public:
    /// gamma * M^{n/2}
    static RadiusSchedule power_half(double gamma = 1.0);
    /// Explicit nondecreasing values rho(0), rho(1), ...; each must satisfy rho(n) <= M^n.
    static RadiusSchedule capped(std::vector<double> values);
    /// gamma * (M_1 ... M_n)^{1/2}
    static RadiusSchedule indexed_sqrt(double gamma = 1.0);

    ScheduleKind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    const std::vector<double>& values() const { return values_; }

    /// Fixed-base radius; throws ValidationError if rho(n) > M^n.
    double rho(std::int64_t base, int n) const;
    /// Indexed radius for the given level prefix.
    double rho(const IndexedCantorSpec& levels) const;

    std::string to_string() const;

private:
    ScheduleKind kind_ = ScheduleKind::power_half;
    double gamma_ = 1.0;
    std::vector<double> values_;
};

struct SweepRow {
    int n = 0;
    double rho = 0.0;
    double norm = 0.0;
    double lambda0_canonical = 0.0;
    /// norm (M/|A|)^n rho^{d-1}, d = ln|A| / ln M
    double scaled_norm = 0.0;
    /// (rho+1)^d / (|A|^n (1 - e^{-M^{-n} rho})) * norm
    double thm32_ratio = 0.0;
    /// "scan" for a certified norm, "lambda0" when enumeration was over the
    /// cap and the first eigenvalue stands in for the norm.
    std::string norm_source = "scan";

    bool operator==(const SweepRow&) const = default;
};

struct SweepOptions {
    NormOptions norm{};
    std::size_t cap = enumeration_cap();
};

std::vector<SweepRow> sweep_fixed(const CantorSpec& spec, const RadiusSchedule& schedule, int n_max,
                                  const SweepOptions& options = {});

struct RatioRow {
    int n = 0;
    double rho = 0.0;
    double norm_reverse = 0.0;
    double norm_canonical = 0.0;
    double ratio = 0.0;
};

/// Norm of the reverse canonical iterate over that of the canonical one.
/// Throws ValidationError unless 1 <= size <= M-1, and CapExceeded when
/// size^n_max exceeds the enumeration cap.
std::vector<RatioRow> sweep_reverse_counterexample(std::int64_t base, std::int64_t size,
                                                   const RadiusSchedule& schedule, int n_max,
                                                   const SweepOptions& options = {});

struct IndexedDecayParams {
    std::int64_t base = 3;
    double delta = 0.5;
    double epsilon = 2.0 / 3.0;
    double gamma = 1.0;
    int n_max = 20;
    std::uint64_t seed = 42;
};

/// Draws level j (1-based) from the stream.
using LevelGenerator = std::function<CantorSpec(int j, std::mt19937_64& rng)>;

/// Uniform base in [M, floor(M^{1+delta})], uniform size in [1, floor(epsilon M_j)],
/// canonical alphabet.
LevelGenerator uniform_level_generator(const IndexedDecayParams& params);

struct IndexedDecayRow {
    int n = 0;
    double rho = 0.0;
    double lambda0 = 0.0;
    double log_lambda0 = 0.0;
    /// The sweep's fitted beta, repeated on every row.
    double fitted_beta = 0.0;
};

struct IndexedDecayResult {
    std::vector<IndexedDecayRow> rows;
    IndexedCantorSpec levels;
    /// Minus the least-squares slope of ln lambda0 against n over the last
    /// ceil(n_max/2) rows, and its standard error.
    double beta = 0.0;
    double beta_stderr = 0.0;
    std::uint64_t seed = 0;
};

/// Throws ValidationError when a generated level breaks |A_j|/M_j <= epsilon
/// or M_j in [M, M^{1+delta}], or when a level is not canonical.
IndexedDecayResult sweep_indexed_decay(const IndexedDecayParams& params, const LevelGenerator& generator);
IndexedDecayResult sweep_indexed_decay(const IndexedDecayParams& params);

/// Least-squares slope and its standard error.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct IndexedCounterexampleRow {
    int n = 0;
    std::int64_t level_base = 0;
    std::int64_t level_size = 0;
    double rho = 0.0;
    double lambda0 = 0.0;
    double lower_bound_product = 0.0;
};

struct IndexedCounterexampleResult {
    std::vector<IndexedCounterexampleRow> rows;
    IndexedCantorSpec levels;
    double theta = 0.0;
    /// min_n lambda0(n) / lambda0(1) over n >= 1
    double min_ratio_to_first = 0.0;
};

/// Bases M_1 = M, M_j = M_1 ... M_{j-1}, canonical alphabets of size theta M_j
/// with theta = size / M. Requires n_max <= 6.
IndexedCantorSpec doubling_levels(std::int64_t base, std::int64_t size, int n);
IndexedCounterexampleResult sweep_indexed_counterexample(std::int64_t base, std::int64_t size, double gamma,
                                                         int n_max);

/// prod_{m=2..m_max} (1 - e^{-theta N^m}); m_max < 0 runs until the factors
/// round to 1.
double lower_bound_product(double theta, double N, int m_max = -1);

struct PositiveMeasureRow {
    int n = 0;
    double measure = 0.0;
    double lambda0 = 0.0;
    /// e^{-rho} * measure
    double lower_bound = 0.0;
};

struct PositiveMeasureResult {
    std::vector<PositiveMeasureRow> rows;
    double measure_limit_estimate = 0.0;
    double norm_lower_bound = 0.0;
};

/// M_j = 2^j with canonical alphabets of size 2^j - 1.
IndexedCantorSpec positive_measure_levels(int n);
PositiveMeasureResult positive_measure_demo(const IndexedCantorSpec& levels, double rho);

}  // namespace ctfl
