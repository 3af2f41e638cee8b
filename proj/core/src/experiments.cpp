#include "ctfl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ctfl/errors.hpp"

namespace ctfl {

namespace {

constexpr double kRelSlack = 1e-12;

void check_n_max(int n_max) {
    if (n_max < 0) throw ValidationError("n_max must be nonnegative");
}

double pow_int(double base, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= base;
    return r;
}

}  // namespace

// --------------------------------------------------------------- schedule

RadiusSchedule RadiusSchedule::power_half(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be positive");
    RadiusSchedule s;
    s.kind_ = ScheduleKind::power_half;
    s.gamma_ = gamma;
    return s;
}

RadiusSchedule RadiusSchedule::capped(std::vector<double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
            throw ValidationError("capped schedule values must be finite and nonnegative");
        if (i > 0 && values[i] < values[i - 1]) throw ValidationError("capped schedule must be nondecreasing");
    }
    RadiusSchedule s;
    s.kind_ = ScheduleKind::capped;
    s.values_ = std::move(values);
    return s;
}

RadiusSchedule RadiusSchedule::indexed_sqrt(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be positive");
    RadiusSchedule s;
    s.kind_ = ScheduleKind::indexed_sqrt;
    s.gamma_ = gamma;
    return s;
}

double RadiusSchedule::rho(std::int64_t base, int n) const {
    if (n < 0) throw ValidationError("iterate must be nonnegative");
    const double m = static_cast<double>(base);
    double r = 0.0;
    switch (kind_) {
        case ScheduleKind::power_half:
            r = gamma_ * std::pow(m, 0.5 * n);
            break;
        case ScheduleKind::capped:
            if (static_cast<std::size_t>(n) >= values_.size())
                throw ValidationError("capped schedule has no value for n = " + std::to_string(n));
            r = values_[static_cast<std::size_t>(n)];
            break;
        case ScheduleKind::indexed_sqrt:
            r = gamma_ * std::pow(m, 0.5 * n);
            break;
    }
    if (kind_ != ScheduleKind::indexed_sqrt && r > pow_int(m, n) * (1.0 + kRelSlack)) {
        std::ostringstream os;
        os << "schedule gives rho(" << n << ") = " << r << " above M^n = " << pow_int(m, n);
        throw ValidationError(os.str());
    }
    return r;
}

double RadiusSchedule::rho(const IndexedCantorSpec& levels) const {
    if (kind_ != ScheduleKind::indexed_sqrt) throw ValidationError("indexed radius needs an indexed_sqrt schedule");
    return gamma_ * std::sqrt(levels.base_product());
}

std::string RadiusSchedule::to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case ScheduleKind::power_half:
            os << "power_half(gamma=" << gamma_ << ")";
            break;
        case ScheduleKind::indexed_sqrt:
            os << "indexed_sqrt(gamma=" << gamma_ << ")";
            break;
        case ScheduleKind::capped:
            os << "capped(";
            for (std::size_t i = 0; i < values_.size(); ++i) os << (i ? "," : "") << values_[i];
            os << ")";
            break;
    }
    return os.str();
}

// ------------------------------------------------------------- fixed base

std::vector<SweepRow> sweep_fixed(const CantorSpec& spec, const RadiusSchedule& schedule, int n_max,
                                  const SweepOptions& options) {
    check_n_max(n_max);
    const CantorSpec canonical = canonical_of(spec);
    const double m = static_cast<double>(spec.base());
    const double a = static_cast<double>(spec.size());
    const double d = spec.dimension();

    std::vector<SweepRow> rows;
    rows.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        SweepRow row;
        row.n = n;
        row.rho = schedule.rho(spec.base(), n);
        row.lambda0_canonical = lambda0_closed_form(canonical, n, row.rho);
        if (pow_int(a, n) <= static_cast<double>(options.cap)) {
            const auto p = LocalizationProblem::fixed(spec, n, row.rho, options.cap);
            row.norm = operator_norm(p, options.norm).value;
            row.norm_source = "scan";
        } else {
            row.norm = spec.is_canonical() ? row.lambda0_canonical : lambda0_closed_form(spec, n, row.rho);
            row.norm_source = "lambda0";
        }
        if (row.rho > 0.0 && row.norm > 0.0) {
            row.scaled_norm = std::exp(std::log(row.norm) + n * std::log(m / a) + (d - 1.0) * std::log(row.rho));
            row.thm32_ratio = std::exp(d * std::log1p(row.rho) - n * std::log(a) -
                                       std::log(-std::expm1(-row.rho / pow_int(m, n))) + std::log(row.norm));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<RatioRow> sweep_reverse_counterexample(std::int64_t base, std::int64_t size,
                                                   const RadiusSchedule& schedule, int n_max,
                                                   const SweepOptions& options) {
    check_n_max(n_max);
    if (base < 2) throw ValidationError("base must be at least 2");
    if (size < 1 || size > base - 1)
        throw ValidationError("alphabet size must lie in [1, M-1], got " + std::to_string(size));
    if (pow_int(static_cast<double>(size), n_max) > static_cast<double>(options.cap))
        throw CapExceeded("reverse counterexample needs full norm scans; size^n_max exceeds the enumeration cap");
    const CantorSpec reverse(base, Alphabet::run(base - size, size));
    const CantorSpec canonical(base, Alphabet::canonical(size));

    std::vector<RatioRow> rows;
    for (int n = 0; n <= n_max; ++n) {
        RatioRow row;
        row.n = n;
        row.rho = schedule.rho(base, n);
        row.norm_reverse = operator_norm(LocalizationProblem::fixed(reverse, n, row.rho, options.cap), options.norm).value;
        row.norm_canonical =
            operator_norm(LocalizationProblem::fixed(canonical, n, row.rho, options.cap), options.norm).value;
        row.ratio = row.norm_canonical > 0.0 ? row.norm_reverse / row.norm_canonical : 0.0;
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------- indexed decay

LevelGenerator uniform_level_generator(const IndexedDecayParams& params) {
    const std::int64_t lo = params.base;
    const auto hi = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(params.base), 1.0 + params.delta) + 1e-9));
    const double eps = params.epsilon;
    return [lo, hi, eps](int, std::mt19937_64& rng) {
        const std::int64_t m = std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
        const auto top = static_cast<std::int64_t>(std::floor(eps * static_cast<double>(m) + 1e-12));
        if (top < 1) throw ValidationError("epsilon too small: no alphabet size fits base " + std::to_string(m));
        const std::int64_t size = std::uniform_int_distribution<std::int64_t>(1, std::min(top, m - 1))(rng);
        return CantorSpec(m, Alphabet::canonical(size));
    };
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("line fit needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            ssr += r * r;
        }
        fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
    }
    return fit;
}

IndexedDecayResult sweep_indexed_decay(const IndexedDecayParams& params, const LevelGenerator& generator) {
    check_n_max(params.n_max);
    if (params.base < 2) throw ValidationError("base must be at least 2");
    if (!(params.delta > 0.0)) throw ValidationError("delta must be positive");
    if (!(params.epsilon > 0.0 && params.epsilon < 1.0)) throw ValidationError("epsilon must lie in (0, 1)");
    const auto schedule = RadiusSchedule::indexed_sqrt(params.gamma);

    // Every level is drawn before any evaluation so the stream alone fixes the run.
    std::mt19937_64 rng(params.seed);
    std::vector<CantorSpec> levels;
    const double m_hi = std::pow(static_cast<double>(params.base), 1.0 + params.delta) * (1.0 + kRelSlack);
    for (int j = 1; j <= params.n_max; ++j) {
        CantorSpec level = generator(j, rng);
        if (level.base() < params.base || static_cast<double>(level.base()) > m_hi)
            throw ValidationError("level " + std::to_string(j) + " base " + std::to_string(level.base()) +
                                  " outside [M, M^{1+delta}]");
        if (level.ratio() > params.epsilon * (1.0 + kRelSlack))
            throw ValidationError("level " + std::to_string(j) + " has |A_j|/M_j above epsilon");
        if (!level.is_canonical()) throw ValidationError("level " + std::to_string(j) + " is not canonical");
        levels.push_back(std::move(level));
    }

    IndexedDecayResult out;
    out.levels = IndexedCantorSpec(levels);
    out.seed = params.seed;
    for (int n = 0; n <= params.n_max; ++n) {
        const IndexedCantorSpec prefix = out.levels.prefix(n);
        IndexedDecayRow row;
        row.n = n;
        row.rho = schedule.rho(prefix);
        row.log_lambda0 = log_lambda0_indexed(prefix, row.rho);
        row.lambda0 = std::exp(row.log_lambda0);
        out.rows.push_back(row);
    }

    const int tail = (params.n_max + 1) / 2;
    if (tail >= 2) {
        std::vector<double> x, y;
        for (int n = params.n_max - tail + 1; n <= params.n_max; ++n) {
            x.push_back(n);
            y.push_back(out.rows[static_cast<std::size_t>(n)].log_lambda0);
        }
        const LineFit fit = fit_line(x, y);
        out.beta = -fit.slope;
        out.beta_stderr = fit.slope_stderr;
    }
    for (auto& row : out.rows) row.fitted_beta = out.beta;
    return out;
}

IndexedDecayResult sweep_indexed_decay(const IndexedDecayParams& params) {
    return sweep_indexed_decay(params, uniform_level_generator(params));
}

// ------------------------------------------------- indexed counterexample

IndexedCantorSpec doubling_levels(std::int64_t base, std::int64_t size, int n) {
    if (base < 2) throw ValidationError("base must be at least 2");
    if (size < 1 || size > base - 1) throw ValidationError("alphabet size must lie in [1, M-1]");
    if (n < 0 || n > 6) throw ValidationError("doubling construction supports 0 <= n <= 6, got " + std::to_string(n));
    std::vector<CantorSpec> levels;
    std::int64_t product = 1;
    for (int j = 1; j <= n; ++j) {
        const std::int64_t mj = j == 1 ? base : product;
        if ((size % base) * (mj % base) % base != 0)
            throw ValidationError("level " + std::to_string(j) + ": theta * M_j is not an integer");
        const std::int64_t sj = (mj / base) * size + (mj % base) * size / base;
        levels.emplace_back(mj, Alphabet::canonical(sj));
        if (product > std::numeric_limits<std::int64_t>::max() / mj)
            throw ValidationError("doubling construction overflows 64-bit bases");
        product *= mj;
    }
    return IndexedCantorSpec(std::move(levels));
}

double lower_bound_product(double theta, double N, int m_max) {
    double p = 1.0;
    double power = N;
    for (int m = 2; m_max < 0 || m <= m_max; ++m) {
        power *= N;
        const double factor = -std::expm1(-theta * power);
        if (m_max < 0 && factor == 1.0) break;
        p *= factor;
        if (m > 100000) break;
    }
    return p;
}

IndexedCounterexampleResult sweep_indexed_counterexample(std::int64_t base, std::int64_t size, double gamma,
                                                         int n_max) {
    check_n_max(n_max);
    const auto schedule = RadiusSchedule::indexed_sqrt(gamma);
    IndexedCounterexampleResult out;
    out.levels = doubling_levels(base, size, n_max);
    out.theta = static_cast<double>(size) / static_cast<double>(base);
    const double floor_product = lower_bound_product(out.theta, std::sqrt(static_cast<double>(base)));

    double first = 0.0;
    out.min_ratio_to_first = n_max >= 1 ? std::numeric_limits<double>::infinity() : 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const IndexedCantorSpec prefix = out.levels.prefix(n);
        IndexedCounterexampleRow row;
        row.n = n;
        if (n > 0) {
            row.level_base = prefix.levels().back().base();
            row.level_size = prefix.levels().back().size();
        }
        row.rho = schedule.rho(prefix);
        row.lambda0 = lambda0_indexed(prefix, row.rho);
        row.lower_bound_product = floor_product;
        if (n == 1) first = row.lambda0;
        if (n >= 1) out.min_ratio_to_first = std::min(out.min_ratio_to_first, row.lambda0 / first);
        out.rows.push_back(row);
    }
    return out;
}

// -------------------------------------------------------- positive measure

IndexedCantorSpec positive_measure_levels(int n) {
    if (n < 0 || n > 62) throw ValidationError("positive-measure levels support 0 <= n <= 62");
    std::vector<CantorSpec> levels;
    for (int j = 1; j <= n; ++j) {
        const std::int64_t m = std::int64_t{1} << j;
        levels.emplace_back(m, Alphabet::canonical(m - 1));
    }
    return IndexedCantorSpec(std::move(levels));
}

PositiveMeasureResult positive_measure_demo(const IndexedCantorSpec& levels, double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw ValidationError("rho must be positive");
    PositiveMeasureResult out;
    for (int n = 0; n <= levels.depth(); ++n) {
        const IndexedCantorSpec prefix = levels.prefix(n);
        PositiveMeasureRow row;
        row.n = n;
        row.measure = iterate_measure(prefix, rho);
        row.lambda0 = lambda0_indexed(prefix, rho);
        row.lower_bound = std::exp(-rho) * row.measure;
        out.rows.push_back(row);
    }
    out.measure_limit_estimate = out.rows.back().measure;
    out.norm_lower_bound = out.rows.back().lower_bound;
    return out;
}

}  // namespace ctfl
