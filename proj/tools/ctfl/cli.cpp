#include "ctfl/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "ctfl/cantor.hpp"
#include "ctfl/errors.hpp"
#include "ctfl/experiments.hpp"
#include "ctfl/io.hpp"
#include "ctfl/localization.hpp"
#include "ctfl/verify.hpp"

#ifndef CTFL_VERSION
#define CTFL_VERSION "0.0.0"
#endif

namespace ctfl::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Common {
    std::string out_path;
    std::string format = "csv";
    std::uint64_t seed = 42;
    double tol = NormOptions{}.rel_tol;

    NormOptions norm() const {
        NormOptions o;
        o.rel_tol = tol;
        return o;
    }
};

struct SpecFlags {
    std::int64_t base = 3;
    std::string alphabet = "0,2";
    int iterate = 0;
    double rho = 1.0;
    std::string levels_path;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--out", c.out_path, "Output file (default: stdout)");
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", c.seed, "64-bit seed for randomized runs");
    cmd->add_option("--tol", c.tol, "Relative truncation tolerance of norm scans")->check(CLI::PositiveNumber);
}

void add_spec(CLI::App* cmd, SpecFlags& s, bool with_levels) {
    auto* base = cmd->add_option("--base", s.base, "Base M");
    auto* alphabet = cmd->add_option("--alphabet", s.alphabet, "Comma-separated letters, runs as a..b");
    auto* iterate = cmd->add_option("--iterate", s.iterate, "Iterate n");
    cmd->add_option("--rho", s.rho, "Outer radius pi R^2");
    if (with_levels) {
        cmd->add_option("--levels", s.levels_path, "Indexed spec file, one 'M;a1,a2,...' per line")
            ->excludes(base)
            ->excludes(alphabet)
            ->excludes(iterate);
    }
}

IndexedCantorSpec read_levels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read levels file '" + path + "'");
    return parse_levels(in);
}

Json level_strings(const IndexedCantorSpec& spec) {
    Json arr = Json::array();
    for (const auto& level : spec.levels()) arr.push_back(level.to_string());
    return arr;
}

Json metadata(const Common& c, Json spec, Json schedule, Json gamma, Json h_equivalent) {
    Json m;
    m["spec"] = std::move(spec);
    m["schedule"] = std::move(schedule);
    m["gamma"] = std::move(gamma);
    m["seed"] = c.seed;
    m["tolerances"] = {{"rel_tol", c.tol}, {"abs_floor", NormOptions{}.abs_floor}};
    m["cap"] = enumeration_cap();
    m["h_equivalent"] = std::move(h_equivalent);
    m["version"] = CTFL_VERSION;
    return m;
}

Json rows_json(const Table& t) {
    Json rows = Json::array();
    for (const auto& cells : t.rows) {
        Json row;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            switch (t.kinds[i]) {
                case CellKind::integer: row[t.columns[i]] = parse_int(cells[i]); break;
                case CellKind::real: row[t.columns[i]] = parse_double(cells[i]); break;
                case CellKind::text: row[t.columns[i]] = cells[i]; break;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_to(const Common& c, std::ostream& out, const std::function<void(std::ostream&)>& body) {
    if (c.out_path.empty()) {
        body(out);
        return;
    }
    std::ofstream file(c.out_path, std::ios::binary);
    if (!file) throw ValidationError("cannot open '" + c.out_path + "' for writing");
    body(file);
}

void emit(const Common& c, std::ostream& out, const Table& table, const Json& meta) {
    write_to(c, out, [&](std::ostream& os) {
        if (c.format == "json") {
            Json doc;
            doc["metadata"] = meta;
            doc["rows"] = rows_json(table);
            os << doc.dump(2) << '\n';
        } else {
            write_csv(os, table);
        }
    });
}

struct Loaded {
    LocalizationProblem problem;
    Json spec;
    double h = 1.0;
};

Loaded load_problem(const SpecFlags& s) {
    if (!s.levels_path.empty()) {
        const auto levels = read_levels(s.levels_path);
        return {LocalizationProblem::indexed(levels, s.rho), level_strings(levels), 1.0 / levels.base_product()};
    }
    const CantorSpec spec(s.base, parse_alphabet(s.alphabet));
    if (s.iterate < 0) throw ValidationError("--iterate must be >= 0");
    const double h = std::pow(static_cast<double>(s.base), -s.iterate);
    return {LocalizationProblem::fixed(spec, s.iterate, s.rho), Json{{"level", spec.to_string()}, {"iterate", s.iterate}},
            h};
}

Json fixed_schedule(double rho) { return "fixed(rho=" + format_double(rho) + ")"; }

int cmd_eigs(const Common& c, const SpecFlags& s, const std::string& kmax, std::ostream& out) {
    std::optional<int> k_max;
    if (kmax != "auto") {
        const auto v = parse_int(kmax);
        if (v < 0 || v > 10'000'000) throw ValidationError("--kmax must be 'auto' or in [0, 1e7]");
        k_max = static_cast<int>(v);
    }
    const auto loaded = load_problem(s);
    // The row after the truncation index sits below the certified tail bound.
    const int K = k_max ? *k_max : operator_norm(loaded.problem, c.norm()).k_truncation + 1;
    const auto rows = eigenvalue_table(loaded.problem, K);
    emit(c, out, to_table(std::span<const EigenvalueResult>(rows)),
         metadata(c, loaded.spec, fixed_schedule(s.rho), nullptr, loaded.h));
    return ok;
}

int cmd_norm(const Common& c, const SpecFlags& s, bool inner_start, std::ostream& out) {
    const auto loaded = load_problem(s);
    auto options = c.norm();
    options.start_at_inner_index = inner_start;
    const auto r = operator_norm(loaded.problem, options);
    Table t;
    t.columns = {"value", "err", "argmax_k", "k_start", "k_truncation", "tail_bound"};
    t.kinds = {CellKind::real, CellKind::real, CellKind::integer, CellKind::integer, CellKind::integer, CellKind::real};
    t.rows.push_back({format_double(r.value), format_double(r.err), std::to_string(r.argmax_k),
                      std::to_string(r.k_start), std::to_string(r.k_truncation), format_double(r.tail_bound)});
    emit(c, out, t, metadata(c, loaded.spec, fixed_schedule(s.rho), nullptr, loaded.h));
    return ok;
}

int cmd_cantor_fn(const Common& c, const SpecFlags& s, const std::vector<double>& xs, std::ostream& out) {
    const CantorSpec spec(s.base, parse_alphabet(s.alphabet));
    if (s.iterate < 0) throw ValidationError("--iterate must be >= 0");
    Table t;
    t.columns = {"x", "F"};
    t.kinds = {CellKind::real, CellKind::real};
    for (const double x : xs) t.rows.push_back({format_double(x), format_double(cantor_function(spec, s.iterate, x))});
    emit(c, out, t,
         metadata(c, Json{{"level", spec.to_string()}, {"iterate", s.iterate}}, nullptr, nullptr,
                  std::pow(static_cast<double>(s.base), -s.iterate)));
    return ok;
}

struct SweepFlags {
    std::string experiment;
    int n_max = -1;
    std::int64_t size = 2;
    double gamma = 1.0;
    double delta = 0.5;
    double epsilon = 2.0 / 3.0;
};

Json powers(double base, int n_max) {
    Json h = Json::array();
    for (int n = 0; n <= n_max; ++n) h.push_back(std::pow(base, -n));
    return h;
}

Json prefix_powers(const IndexedCantorSpec& levels, int n_max) {
    Json h = Json::array();
    for (int n = 0; n <= n_max; ++n) h.push_back(1.0 / levels.prefix(n).base_product());
    return h;
}

int cmd_sweep(const Common& c, const SpecFlags& s, const SweepFlags& w, std::ostream& out, std::ostream& err) {
    const auto n_or = [&](int fallback) { return w.n_max < 0 ? fallback : w.n_max; };
    SweepOptions options;
    options.norm = c.norm();

    if (w.experiment == "precise") {
        const CantorSpec spec(s.base, parse_alphabet(s.alphabet));
        const int n_max = n_or(10);
        const auto schedule = RadiusSchedule::power_half(w.gamma);
        const auto rows = sweep_fixed(spec, schedule, n_max, options);
        for (const auto& row : rows)
            if (row.norm_source != "scan")
                err << "ctfl: n=" << row.n << " is over the enumeration cap; norm column holds lambda0\n";
        emit(c, out, to_table(std::span<const SweepRow>(rows)),
             metadata(c, spec.to_string(), schedule.to_string(), w.gamma, powers(double(s.base), n_max)));
        return ok;
    }
    if (w.experiment == "reverse") {
        const int n_max = n_or(10);
        const auto schedule = RadiusSchedule::power_half(w.gamma);
        const auto rows = sweep_reverse_counterexample(s.base, w.size, schedule, n_max, options);
        Json spec = {{"base", s.base}, {"size", w.size}, {"alphabets", "reverse canonical vs canonical"}};
        emit(c, out, to_table(std::span<const RatioRow>(rows)),
             metadata(c, spec, schedule.to_string(), w.gamma, powers(double(s.base), n_max)));
        return ok;
    }
    if (w.experiment == "indexed-decay") {
        IndexedDecayParams params;
        params.base = s.base;
        params.delta = w.delta;
        params.epsilon = w.epsilon;
        params.gamma = w.gamma;
        params.n_max = n_or(20);
        params.seed = c.seed;
        const auto res = sweep_indexed_decay(params);
        auto meta = metadata(c, level_strings(res.levels), RadiusSchedule::indexed_sqrt(w.gamma).to_string(), w.gamma,
                             prefix_powers(res.levels, params.n_max));
        meta["summary"] = {{"beta", res.beta}, {"beta_stderr", res.beta_stderr}};
        err << "ctfl: seed=" << c.seed << " beta=" << format_double(res.beta)
            << " stderr=" << format_double(res.beta_stderr) << '\n';
        emit(c, out, to_table(std::span<const IndexedDecayRow>(res.rows)), meta);
        return ok;
    }
    if (w.experiment == "indexed-counterexample") {
        const int n_max = n_or(5);
        const auto res = sweep_indexed_counterexample(s.base, w.size, w.gamma, n_max);
        auto meta = metadata(c, level_strings(res.levels), RadiusSchedule::indexed_sqrt(w.gamma).to_string(), w.gamma,
                             prefix_powers(res.levels, n_max));
        meta["summary"] = {{"theta", res.theta}, {"min_ratio_to_first", res.min_ratio_to_first}};
        err << "ctfl: theta=" << format_double(res.theta)
            << " min_ratio_to_first=" << format_double(res.min_ratio_to_first) << '\n';
        emit(c, out, to_table(std::span<const IndexedCounterexampleRow>(res.rows)), meta);
        return ok;
    }
    if (w.experiment == "positive-measure") {
        const auto levels = s.levels_path.empty() ? positive_measure_levels(n_or(12)) : read_levels(s.levels_path);
        const auto res = positive_measure_demo(levels, s.rho);
        auto meta =
            metadata(c, level_strings(levels), fixed_schedule(s.rho), nullptr, prefix_powers(levels, levels.depth()));
        meta["summary"] = {{"measure_limit_estimate", res.measure_limit_estimate},
                           {"norm_lower_bound", res.norm_lower_bound}};
        emit(c, out, to_table(std::span<const PositiveMeasureRow>(res.rows)), meta);
        return ok;
    }
    throw ValidationError("unknown experiment '" + w.experiment + "'");
}

int cmd_verify(const Common& c, const std::string& suite, int samples, std::ostream& out) {
    if (samples < 1) throw ValidationError("--samples must be >= 1");
    VerifyConfig cfg;
    cfg.seed = c.seed;
    cfg.samples = samples;
    const auto outcomes = run_verify(suite, cfg);
    std::size_t passed = 0;
    for (const auto& o : outcomes) passed += o.passed ? 1 : 0;

    write_to(c, out, [&](std::ostream& os) {
        if (c.format == "json") {
            Json doc;
            doc["metadata"] = {{"suite", suite}, {"seed", c.seed}, {"samples", samples}, {"version", CTFL_VERSION}};
            Json rows = Json::array();
            for (const auto& o : outcomes)
                rows.push_back({{"suite", o.suite},
                                {"name", o.name},
                                {"passed", o.passed},
                                {"worst_slack", o.worst_slack},
                                {"samples", o.samples},
                                {"note", o.note}});
            doc["rows"] = std::move(rows);
            os << doc.dump(2) << '\n';
            return;
        }
        for (const auto& o : outcomes) {
            os << (o.passed ? "PASS " : "FAIL ") << o.suite << '.' << o.name
               << " worst_slack=" << format_double(o.worst_slack) << " samples=" << o.samples;
            if (!o.note.empty()) os << "  # " << o.note;
            os << '\n';
        }
        os << passed << '/' << outcomes.size() << " properties passed\n";
    });
    return passed == outcomes.size() ? ok : verify_failed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectra and norms of localization operators on radial Cantor sets", "ctfl"};
    app.set_version_flag("--version", std::string(CTFL_VERSION));
    app.require_subcommand(1);

    Common common;
    SpecFlags spec;

    auto* eigs = app.add_subcommand("eigs", "Eigenvalue table k,lambda,err");
    add_common(eigs, common);
    add_spec(eigs, spec, true);
    std::string kmax = "auto";
    eigs->add_option("--kmax", kmax, "Largest k, or 'auto' to stop past the norm certificate");

    auto* norm = app.add_subcommand("norm", "Certified operator norm");
    add_common(norm, common);
    add_spec(norm, spec, true);
    bool inner_start = false;
    norm->add_flag("--inner-start", inner_start, "Start the scan at the inner radius (reverse canonical only)");

    auto* cfn = app.add_subcommand("cantor-fn", "Cantor function of a fixed-base iterate");
    add_common(cfn, common);
    add_spec(cfn, spec, false);
    std::vector<double> xs;
    cfn->add_option("--x", xs, "Query point in [0,1], repeatable")->required();

    auto* sweep = app.add_subcommand("sweep", "Asymptotic experiments over the iterate n");
    add_common(sweep, common);
    add_spec(sweep, spec, true);
    SweepFlags sweep_flags;
    sweep->add_option("--experiment", sweep_flags.experiment)
        ->required()
        ->check(CLI::IsMember(
            {"precise", "reverse", "indexed-decay", "indexed-counterexample", "positive-measure"}));
    sweep->add_option("--nmax", sweep_flags.n_max, "Largest iterate (default depends on the experiment)");
    sweep->add_option("--size", sweep_flags.size, "Alphabet size for reverse and indexed-counterexample");
    sweep->add_option("--gamma", sweep_flags.gamma, "Radius constant")->check(CLI::PositiveNumber);
    sweep->add_option("--delta", sweep_flags.delta, "Base growth exponent for indexed-decay");
    sweep->add_option("--epsilon", sweep_flags.epsilon, "Density cap for indexed-decay");

    auto* verify = app.add_subcommand("verify", "Seeded property suites");
    add_common(verify, common);
    std::string suite = "all";
    std::vector<std::string> suite_names = verify_suites();
    suite_names.push_back("all");
    verify->add_option("--suite", suite)->check(CLI::IsMember(suite_names));
    int samples = VerifyConfig{}.samples;
    verify->add_option("--samples", samples, "Base sample count per property");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? ok : usage;
    }

    try {
        if (*eigs) return cmd_eigs(common, spec, kmax, out);
        if (*norm) return cmd_norm(common, spec, inner_start, out);
        if (*cfn) return cmd_cantor_fn(common, spec, xs, out);
        if (*sweep) return cmd_sweep(common, spec, sweep_flags, out, err);
        if (*verify) return cmd_verify(common, suite, samples, out);
    } catch (const CapExceeded& e) {
        err << "ctfl: " << e.what() << '\n';
        return cap;
    } catch (const ValidationError& e) {
        err << "ctfl: " << e.what() << '\n';
        return usage;
    } catch (const DomainError& e) {
        err << "ctfl: " << e.what() << '\n';
        return usage;
    } catch (const DegenerateError& e) {
        err << "ctfl: " << e.what() << '\n';
        return usage;
    }
    return usage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"ctfl"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ctfl::cli
