#pragma once

// Plain-text formats: CSV tables at 17 significant digits, and the level
// file syntax `M;a1,a2,...` (one level per line, `#` starts a comment,
// `lo..hi` abbreviates a run of letters).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctfl/cantor.hpp"
#include "ctfl/experiments.hpp"
#include "ctfl/localization.hpp"

namespace ctfl {

/// Always 17 significant digits, general notation.
std::string format_double(double value);
double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

/// "0,2,5" or "0..3,7" into sorted letters.
std::vector<std::int64_t> parse_alphabet(std::string_view text);
/// "M;a1,a2,..."
CantorSpec parse_level(std::string_view line);
IndexedCantorSpec parse_levels(std::istream& in);
std::string format_levels(const IndexedCantorSpec& spec);

enum class CellKind { integer, real, text };

/// Formatted cells plus the kind of each column, so that JSON output can emit
/// numbers as numbers.
struct Table {
    std::vector<std::string> columns;
    std::vector<CellKind> kinds;
    std::vector<std::vector<std::string>> rows;
};

/// Header row, then one line per row; no quoting (no field needs it).
void write_csv(std::ostream& out, const Table& table);
Table read_csv(std::istream& in);

Table to_table(std::span<const Interval> rows);
Table to_table(std::span<const EigenvalueResult> rows);
Table to_table(std::span<const SweepRow> rows);
Table to_table(std::span<const RatioRow> rows);
Table to_table(std::span<const IndexedDecayRow> rows);
Table to_table(std::span<const IndexedCounterexampleRow> rows);
Table to_table(std::span<const PositiveMeasureRow> rows);

/// Inverse of to_table; throws ValidationError when the columns differ.
template <class Row>
std::vector<Row> from_table(const Table& table);

}  // namespace ctfl
