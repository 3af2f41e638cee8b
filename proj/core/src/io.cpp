#include "ctfl/io.hpp"

#include <charconv>
#include <functional>
#include <istream>
#include <ostream>

#include "ctfl/errors.hpp"

namespace ctfl {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_commas(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

// Column descriptor bound to one member of a row type.
template <class Row>
struct Field {
    std::string name;
    CellKind kind;
    std::function<std::string(const Row&)> get;
    std::function<void(Row&, const std::string&)> set;
};

template <class Row>
Field<Row> field(std::string name, double Row::*m) {
    return {std::move(name), CellKind::real, [m](const Row& r) { return format_double(r.*m); },
            [m](Row& r, const std::string& s) { r.*m = parse_double(s); }};
}

template <class Row>
Field<Row> field(std::string name, int Row::*m) {
    return {std::move(name), CellKind::integer, [m](const Row& r) { return std::to_string(r.*m); },
            [m](Row& r, const std::string& s) { r.*m = static_cast<int>(parse_int(s)); }};
}

template <class Row>
Field<Row> field(std::string name, std::int64_t Row::*m) {
    return {std::move(name), CellKind::integer, [m](const Row& r) { return std::to_string(r.*m); },
            [m](Row& r, const std::string& s) { r.*m = parse_int(s); }};
}

template <class Row>
Field<Row> field(std::string name, std::string Row::*m) {
    return {std::move(name), CellKind::text, [m](const Row& r) { return r.*m; },
            [m](Row& r, const std::string& s) { r.*m = s; }};
}

template <class Row>
std::vector<Field<Row>> fields();

template <>
std::vector<Field<Interval>> fields<Interval>() {
    return {field("lo", &Interval::lo), field("hi", &Interval::hi)};
}

template <>
std::vector<Field<EigenvalueResult>> fields<EigenvalueResult>() {
    return {field("k", &EigenvalueResult::k), field("lambda", &EigenvalueResult::value),
            field("err", &EigenvalueResult::err)};
}

template <>
std::vector<Field<SweepRow>> fields<SweepRow>() {
    return {field("n", &SweepRow::n),
            field("rho", &SweepRow::rho),
            field("norm", &SweepRow::norm),
            field("lambda0_canonical", &SweepRow::lambda0_canonical),
            field("scaled_norm", &SweepRow::scaled_norm),
            field("thm32_ratio", &SweepRow::thm32_ratio),
            field("norm_source", &SweepRow::norm_source)};
}

template <>
std::vector<Field<RatioRow>> fields<RatioRow>() {
    return {field("n", &RatioRow::n), field("rho", &RatioRow::rho), field("norm_reverse", &RatioRow::norm_reverse),
            field("norm_canonical", &RatioRow::norm_canonical), field("ratio", &RatioRow::ratio)};
}

template <>
std::vector<Field<IndexedDecayRow>> fields<IndexedDecayRow>() {
    return {field("n", &IndexedDecayRow::n), field("rho", &IndexedDecayRow::rho),
            field("lambda0", &IndexedDecayRow::lambda0), field("log_lambda0", &IndexedDecayRow::log_lambda0),
            field("fitted_beta", &IndexedDecayRow::fitted_beta)};
}

template <>
std::vector<Field<IndexedCounterexampleRow>> fields<IndexedCounterexampleRow>() {
    return {field("n", &IndexedCounterexampleRow::n),
            field("level_base", &IndexedCounterexampleRow::level_base),
            field("level_size", &IndexedCounterexampleRow::level_size),
            field("rho", &IndexedCounterexampleRow::rho),
            field("lambda0", &IndexedCounterexampleRow::lambda0),
            field("lower_bound_product", &IndexedCounterexampleRow::lower_bound_product)};
}

template <>
std::vector<Field<PositiveMeasureRow>> fields<PositiveMeasureRow>() {
    return {field("n", &PositiveMeasureRow::n), field("measure", &PositiveMeasureRow::measure),
            field("lambda0", &PositiveMeasureRow::lambda0), field("lower_bound", &PositiveMeasureRow::lower_bound)};
}

template <class Row>
Table make_table(std::span<const Row> rows) {
    const auto fs = fields<Row>();
    Table t;
    for (const auto& f : fs) {
        t.columns.push_back(f.name);
        t.kinds.push_back(f.kind);
    }
    for (const auto& r : rows) {
        std::vector<std::string> cells;
        cells.reserve(fs.size());
        for (const auto& f : fs) cells.push_back(f.get(r));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return {buf, res.ptr};
}

double parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ValidationError("not a number: '" + std::string(text) + "'");
    return v;
}

std::int64_t parse_int(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    std::int64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ValidationError("not an integer: '" + std::string(text) + "'");
    return v;
}

std::vector<std::int64_t> parse_alphabet(std::string_view text) {
    std::vector<std::int64_t> letters;
    for (const auto& item : split_commas(trim(text))) {
        if (item.empty()) throw ValidationError("empty letter in alphabet '" + std::string(text) + "'");
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            letters.push_back(parse_int(item));
            continue;
        }
        const std::int64_t lo = parse_int(std::string_view(item).substr(0, dots));
        const std::int64_t hi = parse_int(std::string_view(item).substr(dots + 2));
        if (hi < lo) throw ValidationError("empty letter range '" + item + "'");
        if (hi - lo > 100'000'000) throw ValidationError("letter range too long: '" + item + "'");
        for (std::int64_t a = lo; a <= hi; ++a) letters.push_back(a);
    }
    return letters;
}

CantorSpec parse_level(std::string_view line) {
    line = trim(line);
    const auto semi = line.find(';');
    if (semi == std::string_view::npos)
        throw ValidationError("level line must read 'M;a1,a2,...': '" + std::string(line) + "'");
    const std::int64_t base = parse_int(line.substr(0, semi));
    const std::string_view rest = trim(line.substr(semi + 1));
    // A lone run stays a run, so huge canonical alphabets never get expanded.
    const auto dots = rest.find("..");
    if (dots != std::string_view::npos && rest.find(',') == std::string_view::npos) {
        const std::int64_t lo = parse_int(rest.substr(0, dots));
        const std::int64_t hi = parse_int(rest.substr(dots + 2));
        if (hi < lo) throw ValidationError("empty letter range in '" + std::string(line) + "'");
        return CantorSpec(base, Alphabet::run(lo, hi - lo + 1));
    }
    const auto letters = parse_alphabet(rest);
    return CantorSpec(base, letters);
}

IndexedCantorSpec parse_levels(std::istream& in) {
    std::vector<CantorSpec> levels;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view body = line;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        levels.push_back(parse_level(body));
    }
    return IndexedCantorSpec(std::move(levels));
}

std::string format_levels(const IndexedCantorSpec& spec) {
    std::string out;
    for (const auto& level : spec.levels()) out += level.to_string() + "\n";
    return out;
}

void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

Table read_csv(std::istream& in) {
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("CSV input is empty");
    t.columns = split_commas(trim(line));
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split_commas(trim(line));
        if (cells.size() != t.columns.size())
            throw ValidationError("CSV row has " + std::to_string(cells.size()) + " fields, expected " +
                                  std::to_string(t.columns.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

Table to_table(std::span<const Interval> rows) { return make_table(rows); }
Table to_table(std::span<const EigenvalueResult> rows) { return make_table(rows); }
Table to_table(std::span<const SweepRow> rows) { return make_table(rows); }
Table to_table(std::span<const RatioRow> rows) { return make_table(rows); }
Table to_table(std::span<const IndexedDecayRow> rows) { return make_table(rows); }
Table to_table(std::span<const IndexedCounterexampleRow> rows) { return make_table(rows); }
Table to_table(std::span<const PositiveMeasureRow> rows) { return make_table(rows); }

template <class Row>
std::vector<Row> from_table(const Table& table) {
    const auto fs = fields<Row>();
    if (table.columns.size() != fs.size()) throw ValidationError("CSV column count does not match the row type");
    for (std::size_t i = 0; i < fs.size(); ++i)
        if (table.columns[i] != fs[i].name)
            throw ValidationError("CSV column '" + table.columns[i] + "' where '" + fs[i].name + "' was expected");
    std::vector<Row> out;
    out.reserve(table.rows.size());
    for (const auto& cells : table.rows) {
        Row r{};
        for (std::size_t i = 0; i < fs.size(); ++i) fs[i].set(r, cells[i]);
        out.push_back(std::move(r));
    }
    return out;
}

template std::vector<Interval> from_table<Interval>(const Table&);
template std::vector<EigenvalueResult> from_table<EigenvalueResult>(const Table&);
template std::vector<SweepRow> from_table<SweepRow>(const Table&);
template std::vector<RatioRow> from_table<RatioRow>(const Table&);
template std::vector<IndexedDecayRow> from_table<IndexedDecayRow>(const Table&);
template std::vector<IndexedCounterexampleRow> from_table<IndexedCounterexampleRow>(const Table&);
template std::vector<PositiveMeasureRow> from_table<PositiveMeasureRow>(const Table&);

}  // namespace ctfl
