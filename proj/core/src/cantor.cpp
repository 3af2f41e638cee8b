#include "ctfl/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>

#include "ctfl/errors.hpp"

namespace ctfl {

// ---------------------------------------------------------------- Alphabet

Alphabet Alphabet::from_letters(std::span<const std::int64_t> letters) {
    Alphabet out;
    for (std::size_t i = 0; i < letters.size(); ++i) {
        const std::int64_t a = letters[i];
        if (a < 0) throw ValidationError("alphabet letters must be nonnegative");
        if (i > 0 && a <= letters[i - 1])
            throw ValidationError("alphabet letters must be strictly increasing");
        if (!out.runs_.empty() && out.runs_.back().first + out.runs_.back().count == a)
            ++out.runs_.back().count;
        else
            out.runs_.push_back({a, 1});
    }
    out.size_ = static_cast<std::int64_t>(letters.size());
    return out;
}

Alphabet Alphabet::canonical(std::int64_t size) {
    return run(0, size);
}

Alphabet Alphabet::run(std::int64_t first, std::int64_t count) {
    if (first < 0 || count < 0) throw ValidationError("alphabet run must be nonnegative");
    Alphabet out;
    if (count > 0) out.runs_.push_back({first, count});
    out.size_ = count;
    return out;
}

std::int64_t Alphabet::min_letter() const {
    if (runs_.empty()) throw ValidationError("empty alphabet");
    return runs_.front().first;
}

std::int64_t Alphabet::max_letter() const {
    if (runs_.empty()) throw ValidationError("empty alphabet");
    return runs_.back().first + runs_.back().count - 1;
}

std::vector<std::int64_t> Alphabet::letters() const {
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(size_));
    for (const auto& r : runs_)
        for (std::int64_t i = 0; i < r.count; ++i) out.push_back(r.first + i);
    return out;
}

std::int64_t Alphabet::count_below(std::int64_t d) const {
    std::int64_t n = 0;
    for (const auto& r : runs_) {
        if (d <= r.first) break;
        n += std::min(r.count, d - r.first);
    }
    return n;
}

bool Alphabet::contains(std::int64_t d) const {
    for (const auto& r : runs_)
        if (d >= r.first && d < r.first + r.count) return true;
    return false;
}

// -------------------------------------------------------------- CantorSpec

CantorSpec::CantorSpec(std::int64_t base, Alphabet alphabet) : base_(base), alphabet_(std::move(alphabet)) {
    if (base_ < 2) throw ValidationError("base must be at least 2, got " + std::to_string(base_));
    if (alphabet_.empty()) throw ValidationError("alphabet must be non-empty");
    if (alphabet_.max_letter() > base_ - 1)
        throw ValidationError("alphabet letter " + std::to_string(alphabet_.max_letter()) +
                              " out of range for base " + std::to_string(base_));
    if (alphabet_.size() >= base_)
        throw ValidationError("alphabet must be a proper subset of {0,...,M-1}");
}

CantorSpec::CantorSpec(std::int64_t base, std::span<const std::int64_t> letters)
    : CantorSpec(base, Alphabet::from_letters(letters)) {}

CantorSpec::CantorSpec(std::int64_t base, std::initializer_list<std::int64_t> letters)
    : CantorSpec(base, std::span<const std::int64_t>(letters.begin(), letters.size())) {}

double CantorSpec::dimension() const {
    return std::log(static_cast<double>(size())) / std::log(static_cast<double>(base_));
}

bool CantorSpec::is_canonical() const {
    return alphabet_.runs().size() == 1 && alphabet_.min_letter() == 0;
}

bool CantorSpec::is_reverse_canonical() const {
    return alphabet_.runs().size() == 1 && alphabet_.max_letter() == base_ - 1;
}

std::string CantorSpec::to_string() const {
    std::ostringstream os;
    os << base_ << ';';
    bool first = true;
    for (const auto& r : alphabet_.runs()) {
        if (r.count > 64) {
            os << (first ? "" : ",") << r.first << ".." << (r.first + r.count - 1);
            first = false;
            continue;
        }
        for (std::int64_t i = 0; i < r.count; ++i) {
            os << (first ? "" : ",") << r.first + i;
            first = false;
        }
    }
    return os.str();
}

// ------------------------------------------------------- IndexedCantorSpec

IndexedCantorSpec::IndexedCantorSpec(std::vector<CantorSpec> levels) : levels_(std::move(levels)) {}

IndexedCantorSpec IndexedCantorSpec::repeated(const CantorSpec& spec, int n) {
    if (n < 0) throw ValidationError("iterate must be nonnegative");
    return IndexedCantorSpec(std::vector<CantorSpec>(static_cast<std::size_t>(n), spec));
}

double IndexedCantorSpec::measure_ratio() const {
    double r = 1.0;
    for (const auto& l : levels_) r *= l.ratio();
    return r;
}

double IndexedCantorSpec::base_product() const {
    double p = 1.0;
    for (const auto& l : levels_) p *= static_cast<double>(l.base());
    return p;
}

IndexedCantorSpec IndexedCantorSpec::canonical() const {
    std::vector<CantorSpec> out;
    out.reserve(levels_.size());
    for (const auto& l : levels_) out.push_back(canonical_of(l));
    return IndexedCantorSpec(std::move(out));
}

IndexedCantorSpec IndexedCantorSpec::prefix(int n) const {
    if (n < 0 || n > depth()) throw ValidationError("prefix length out of range");
    return IndexedCantorSpec(std::vector<CantorSpec>(levels_.begin(), levels_.begin() + n));
}

// --------------------------------------------------------------- iterates

double IterateIntervals::total_length() const {
    double s = 0.0;
    for (const auto& iv : intervals) s += iv.length();
    return s;
}

std::size_t enumeration_cap() {
    if (const char* env = std::getenv("CTFL_MAX_INTERVALS")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return 10'000'000;
}

namespace {

void check_cap(std::span<const CantorSpec> levels, std::size_t cap) {
    long double count = 1.0L;
    for (const auto& l : levels) count *= static_cast<long double>(l.size());
    if (count > static_cast<long double>(cap)) {
        std::ostringstream os;
        os << "iterate has " << static_cast<double>(count) << " blocks, above the enumeration cap of " << cap
           << "; use the closed-form first-eigenvalue path (lambda0) instead";
        throw CapExceeded(os.str());
    }
}

// Emits merged intervals of an iterate whose levels are given coarsest first.
// Uses exact integer block indices when the finest grid fits in 53 bits.
std::vector<Interval> enumerate(std::span<const CantorSpec> levels, double scale) {
    const int n = static_cast<int>(levels.size());
    std::vector<Interval> out;
    if (n == 0) {
        out.push_back({0.0, scale});
        return out;
    }

    long double grid = 1.0L;
    for (const auto& l : levels) grid *= static_cast<long double>(l.base());
    const bool exact = grid <= 9007199254740992.0L;  // 2^53

    if (exact) {
        std::vector<std::uint64_t> unit(static_cast<std::size_t>(n));
        std::uint64_t u = 1;
        for (int j = n - 1; j >= 0; --j) {
            unit[static_cast<std::size_t>(j)] = u;
            u *= static_cast<std::uint64_t>(levels[static_cast<std::size_t>(j)].base());
        }
        const double per_unit = scale / static_cast<double>(u);
        std::uint64_t run_lo = 0, run_hi = 0;
        bool open = false;
        auto emit = [&](std::uint64_t lo, std::uint64_t len) {
            if (open && lo == run_hi) {
                run_hi += len;
                return;
            }
            if (open) out.push_back({static_cast<double>(run_lo) * per_unit, static_cast<double>(run_hi) * per_unit});
            run_lo = lo;
            run_hi = lo + len;
            open = true;
        };
        std::function<void(int, std::uint64_t)> dfs = [&](int j, std::uint64_t offset) {
            const auto& spec = levels[static_cast<std::size_t>(j)];
            const std::uint64_t w = unit[static_cast<std::size_t>(j)];
            for (const auto& r : spec.alphabet().runs()) {
                if (j == n - 1) {
                    emit(offset + static_cast<std::uint64_t>(r.first) * w, static_cast<std::uint64_t>(r.count) * w);
                    continue;
                }
                for (std::int64_t i = 0; i < r.count; ++i)
                    dfs(j + 1, offset + static_cast<std::uint64_t>(r.first + i) * w);
            }
        };
        dfs(0, 0);
        if (open) out.push_back({static_cast<double>(run_lo) * per_unit, static_cast<double>(run_hi) * per_unit});
        if (!out.empty()) out.back().hi = std::min(out.back().hi, scale);
        return out;
    }

    // Grid too fine for exact indices: positions in floating point, merging
    // gaps far below the finest block width.
    std::vector<double> width(static_cast<std::size_t>(n));
    double w = scale;
    for (int j = 0; j < n; ++j) {
        w /= static_cast<double>(levels[static_cast<std::size_t>(j)].base());
        width[static_cast<std::size_t>(j)] = w;
    }
    const double snap = 1e-6 * width.back();
    std::function<void(int, double)> dfs = [&](int j, double offset) {
        const auto& spec = levels[static_cast<std::size_t>(j)];
        const double wj = width[static_cast<std::size_t>(j)];
        for (const auto& r : spec.alphabet().runs()) {
            if (j == n - 1) {
                const double lo = offset + static_cast<double>(r.first) * wj;
                const double hi = lo + static_cast<double>(r.count) * wj;
                if (!out.empty() && std::abs(lo - out.back().hi) <= snap)
                    out.back().hi = hi;
                else
                    out.push_back({lo, hi});
                continue;
            }
            for (std::int64_t i = 0; i < r.count; ++i)
                dfs(j + 1, offset + static_cast<double>(r.first + i) * wj);
        }
    };
    dfs(0, 0.0);
    return out;
}

}  // namespace

std::vector<std::int64_t> discrete_iterate(const CantorSpec& spec, int n, std::size_t cap) {
    if (n < 0) throw ValidationError("iterate must be nonnegative");
    const std::vector<CantorSpec> levels(static_cast<std::size_t>(n), spec);
    check_cap(levels, cap);
    std::int64_t top = 1;
    for (int j = 0; j < n; ++j) {
        if (top > std::numeric_limits<std::int64_t>::max() / spec.base())
            throw CapExceeded("discrete iterate values exceed the 64-bit range");
        top *= spec.base();
    }
    const auto letters = spec.alphabet().letters();
    std::vector<std::int64_t> cur{0};
    for (int j = 0; j < n; ++j) {
        std::vector<std::int64_t> next;
        next.reserve(cur.size() * letters.size());
        for (const std::int64_t v : cur)
            for (const std::int64_t a : letters) next.push_back(v * spec.base() + a);
        cur = std::move(next);
    }
    return cur;
}

IterateIntervals continuous_iterate(const CantorSpec& spec, int n, double scale, std::size_t cap) {
    if (n < 0) throw ValidationError("iterate must be nonnegative");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("scale must be positive and finite");
    const std::vector<CantorSpec> levels(static_cast<std::size_t>(n), spec);
    check_cap(levels, cap);
    IterateIntervals out;
    out.intervals = enumerate(levels, scale);
    out.scale = scale;
    out.iterate = n;
    out.origin = spec;
    return out;
}

IterateIntervals continuous_iterate(const IndexedCantorSpec& spec, double scale, std::size_t cap) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("scale must be positive and finite");
    check_cap(spec.levels(), cap);
    IterateIntervals out;
    out.intervals = enumerate(spec.levels(), scale);
    out.scale = scale;
    out.iterate = spec.depth();
    out.origin = spec;
    return out;
}

double iterate_measure(const CantorSpec& spec, int n, double scale) {
    return scale * std::pow(spec.ratio(), n);
}

double iterate_measure(const IndexedCantorSpec& spec, double scale) {
    return scale * spec.measure_ratio();
}

double cantor_function(const CantorSpec& spec, int n, double x) {
    if (!(x > 0.0)) return 0.0;
    if (x >= 1.0) return 1.0;
    const auto& alpha = spec.alphabet();
    const double m = static_cast<double>(spec.base());
    const double size = static_cast<double>(alpha.size());
    double g = 0.0;
    double weight = 1.0;
    for (int j = 0; j < n; ++j) {
        const double y = x * m;
        auto d = static_cast<std::int64_t>(std::floor(y));
        d = std::clamp<std::int64_t>(d, 0, spec.base() - 1);
        x = y - static_cast<double>(d);
        g += weight * static_cast<double>(alpha.count_below(d)) / size;
        if (!alpha.contains(d)) return g;
        weight /= size;
    }
    return std::min(1.0, g + weight * x);
}

CantorSpec canonical_of(const CantorSpec& spec) {
    return CantorSpec(spec.base(), Alphabet::canonical(spec.size()));
}

CantorSpec reverse_canonical_of(const CantorSpec& spec) {
    return CantorSpec(spec.base(), Alphabet::run(spec.base() - spec.size(), spec.size()));
}

ShiftDecomposition shift_decomposition(const CantorSpec& spec, int n, double scale) {
    if (!spec.is_reverse_canonical())
        throw ValidationError("shift decomposition needs a reverse canonical alphabet, got " + spec.to_string());
    const double m = static_cast<double>(spec.base());
    double geometric = 0.0;
    double p = 1.0;
    for (int j = 1; j <= n; ++j) {
        p /= m;
        geometric += p;
    }
    ShiftDecomposition out;
    out.shift = scale * static_cast<double>(spec.base() - spec.size()) * geometric;
    out.canonical = continuous_iterate(canonical_of(spec), n, scale);
    return out;
}

std::vector<Interval> translated(std::span<const Interval> intervals, double shift) {
    std::vector<Interval> out;
    out.reserve(intervals.size());
    for (const auto& iv : intervals) out.push_back({iv.lo + shift, iv.hi + shift});
    return out;
}

}  // namespace ctfl
