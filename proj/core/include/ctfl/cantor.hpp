#pragma once

// Fixed-base and indexed Cantor iterates.
//
// An n-iterate with base M and alphabet A keeps, inside every block of the
// previous iterate, the sub-blocks (of M equal pieces) whose labels lie in A.
// Indexed iterates let the base and alphabet vary per level; level 1 is the
// coarsest split.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ctfl {

/// A maximal block of consecutive letters {first, ..., first + count - 1}.
struct LetterRun {
    std::int64_t first = 0;
    std::int64_t count = 0;

    bool operator==(const LetterRun&) const = default;
};

/// Sorted, duplicate-free set of letters stored as runs, so that canonical
/// alphabets of any size cost O(1) memory.
class Alphabet {
public:
    Alphabet() = default;

    /// Letters must be strictly increasing and nonnegative.
    static Alphabet from_letters(std::span<const std::int64_t> letters);
    static Alphabet canonical(std::int64_t size);
    static Alphabet run(std::int64_t first, std::int64_t count);

    std::int64_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    const std::vector<LetterRun>& runs() const { return runs_; }
    std::int64_t min_letter() const;
    std::int64_t max_letter() const;

    /// Explicit letter list; only sensible for small alphabets.
    std::vector<std::int64_t> letters() const;
    /// Number of letters strictly below `d`.
    std::int64_t count_below(std::int64_t d) const;
    bool contains(std::int64_t d) const;

    bool operator==(const Alphabet&) const = default;

private:
    std::vector<LetterRun> runs_;
    std::int64_t size_ = 0;
};

/// Base M >= 2 and an alphabet that is a non-empty proper subset of {0..M-1}.
class CantorSpec {
public:
    CantorSpec(std::int64_t base, Alphabet alphabet);
    CantorSpec(std::int64_t base, std::span<const std::int64_t> letters);
    CantorSpec(std::int64_t base, std::initializer_list<std::int64_t> letters);

    std::int64_t base() const { return base_; }
    const Alphabet& alphabet() const { return alphabet_; }
    std::int64_t size() const { return alphabet_.size(); }
    /// |A| / M
    double ratio() const { return static_cast<double>(size()) / static_cast<double>(base_); }
    /// ln|A| / ln M
    double dimension() const;

    bool is_canonical() const;
    bool is_reverse_canonical() const;

    /// "M;a1,a2,..." (the level-file syntax).
    std::string to_string() const;

    bool operator==(const CantorSpec&) const = default;

private:
    std::int64_t base_;
    Alphabet alphabet_;
};

/// Per-level bases and alphabets; `depth()` levels.
class IndexedCantorSpec {
public:
    IndexedCantorSpec() = default;
    explicit IndexedCantorSpec(std::vector<CantorSpec> levels);
    static IndexedCantorSpec repeated(const CantorSpec& spec, int n);

    const std::vector<CantorSpec>& levels() const { return levels_; }
    int depth() const { return static_cast<int>(levels_.size()); }
    /// prod_j |A_j| / M_j
    double measure_ratio() const;
    /// prod_j M_j as a double (may be huge).
    double base_product() const;
    /// The same bases with canonical alphabets of the same sizes.
    IndexedCantorSpec canonical() const;
    /// Prefix with the first n levels.
    IndexedCantorSpec prefix(int n) const;

    bool operator==(const IndexedCantorSpec&) const = default;

private:
    std::vector<CantorSpec> levels_;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

using AnySpec = std::variant<CantorSpec, IndexedCantorSpec>;

/// An n-iterate scaled to [0, scale]: sorted, disjoint closed intervals with
/// touching neighbours merged.
struct IterateIntervals {
    std::vector<Interval> intervals;
    double scale = 1.0;
    int iterate = 0;
    AnySpec origin = IndexedCantorSpec{};

    double total_length() const;
};

/// Default 10^7, overridden by the CTFL_MAX_INTERVALS environment variable.
std::size_t enumeration_cap();

/// Sums sum_j a_j M^j over all digit strings, ascending.
std::vector<std::int64_t> discrete_iterate(const CantorSpec& spec, int n,
                                           std::size_t cap = enumeration_cap());

IterateIntervals continuous_iterate(const CantorSpec& spec, int n, double scale,
                                    std::size_t cap = enumeration_cap());
IterateIntervals continuous_iterate(const IndexedCantorSpec& spec, double scale,
                                    std::size_t cap = enumeration_cap());

/// L * prod_j |A_j| / M_j, without enumerating.
double iterate_measure(const CantorSpec& spec, int n, double scale);
double iterate_measure(const IndexedCantorSpec& spec, double scale);

/// Normalized measure of C_n(1, M, A) ∩ [0, x], by per-digit recursion in O(n).
double cantor_function(const CantorSpec& spec, int n, double x);

/// Alphabet {0, ..., |A|-1}.
CantorSpec canonical_of(const CantorSpec& spec);
/// Alphabet {M-|A|, ..., M-1}.
CantorSpec reverse_canonical_of(const CantorSpec& spec);

struct ShiftDecomposition {
    double shift = 0.0;
    IterateIntervals canonical;
};

/// A reverse canonical iterate is the canonical one translated by
/// L (M - |A|) sum_{j=1..n} M^{-j}. Throws ValidationError for other alphabets.
ShiftDecomposition shift_decomposition(const CantorSpec& spec, int n, double scale);

std::vector<Interval> translated(std::span<const Interval> intervals, double shift);

}  // namespace ctfl
