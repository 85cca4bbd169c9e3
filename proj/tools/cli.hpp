#pragma once

// Command-line front end. Subcommands:
//   bound      sharp bound for a triple (--theorem 1) or a local query (--theorem 2)
//   extremize  build g0, a staircase, or the local extremal pair; report achieved/bound
//   verify     run the audit suites; exit 1 on any violation
//   sweep      bounds and achieved values over a parameter grid
//   maximal    maximal function of a LeafFunction JSON file
//   search     hill-climb the Hardy integral and write the trace
//
// Exit codes: 0 success, 1 verification failure, 2 usage or constraint error.

#include "dyadic/audit.hpp"
#include "dyadic/bellman.hpp"
#include "dyadic/io.hpp"
#include "dyadic/search.hpp"
#include "dyadic/step_function.hpp"
#include "dyadic/tree.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dyadic::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_violation = 1;
inline constexpr int exit_usage = 2;

/// Environment variable naming a directory that relative --out paths resolve against.
inline constexpr const char* out_dir_env = "DYADIC_OUT_DIR";

struct RunConfig {
    std::string subcommand;

    int theorem = 1;
    double f = 1.0;
    double m1 = 2.0;
    double m2 = 0.0;
    double m = 2.0;
    double k = 1.0;

    std::string kind = "g0"; // extremize: g0 | staircase | theorem2
    std::string over = "t1"; // sweep: t1 | t2
    std::vector<double> f_list{1.0};
    std::vector<double> m1_list{2.0};
    std::vector<double> m2_list{0.0};
    std::vector<double> m_list{2.0};
    std::vector<double> k_list{0.125, 0.25, 0.5, 1.0};

    int arity = 2;
    int depth = 16;
    int levels = 4;
    std::size_t pieces = 64;
    std::size_t budget = 100000;
    std::optional<std::size_t> samples;
    std::uint64_t seed = 1;
    std::string preset = "default";
    double time_limit = 0.0;
    bool summary = false;

    std::string format; // empty: the subcommand's default
    std::string output; // empty: stdout
    std::string input;  // maximal: path or "-"
};

class UsageError : public Error {
public:
    using Error::Error;
};

/// Thrown by parse_args for -h/--help; carries the rendered help text.
struct HelpRequested {
    std::string text;
};

/// Parses argv into a RunConfig. Throws CLI::ParseError (including help requests)
/// or ConstraintError when a parameter violates its operation's precondition.
inline RunConfig parse_args(int argc, const char* const* argv)
{
    RunConfig config;
    CLI::App app{"Sharp L1 bounds for the dyadic maximal operator"};
    app.require_subcommand(1);

    auto add_format = [&](CLI::App* sub, std::initializer_list<std::string> allowed) {
        sub->add_option("--format", config.format, "output format")->check(CLI::IsMember(allowed));
        sub->add_option("--out", config.output, "output file (default stdout)");
    };
    auto add_tree = [&](CLI::App* sub) {
        sub->add_option("--arity", config.arity, "tree arity")->check(CLI::Range(2, 1 << 24));
        sub->add_option("--depth", config.depth, "tree depth")->check(CLI::Range(0, Tree::max_depth));
        sub->add_option("--levels", config.levels, "staircase levels")->check(CLI::Range(1, 64));
    };

    auto* bound = app.add_subcommand("bound", "evaluate a sharp bound");
    bound->add_option("--theorem", config.theorem, "1: (M1,f,M2) bound, 2: (f,M,k) bound")
        ->check(CLI::IsMember({1, 2}));
    bound->add_option("--f", config.f, "integral of phi");
    bound->add_option("--m1", config.m1, "sup of phi");
    bound->add_option("--m2", config.m2, "inf of phi");
    bound->add_option("--m", config.m, "sup of phi (local bound)");
    bound->add_option("--k", config.k, "measure of K (local bound)");
    add_format(bound, {"text", "json"});

    auto* extremize = app.add_subcommand("extremize", "build an extremal function and report achieved/bound");
    extremize->add_option("--kind", config.kind, "g0 | staircase | theorem2")
        ->check(CLI::IsMember({"g0", "staircase", "theorem2"}));
    extremize->add_option("--f", config.f, "integral of phi");
    extremize->add_option("--m1", config.m1, "sup of phi");
    extremize->add_option("--m2", config.m2, "inf of phi");
    extremize->add_option("--m", config.m, "sup of phi (theorem2)");
    extremize->add_option("--k", config.k, "measure of K (theorem2)");
    extremize->add_flag("--summary", config.summary, "omit the function itself");
    add_tree(extremize);
    add_format(extremize, {"json", "csv"});

    auto* verify = app.add_subcommand("verify", "run the audit suites");
    verify->add_option("--preset", config.preset, "quick | default | acceptance")
        ->check(CLI::IsMember({"quick", "default", "acceptance"}));
    verify->add_option("--seed", config.seed, "random seed");
    verify->add_option("--samples", config.samples, "override per-suite sample counts");
    verify->add_option("--time-limit", config.time_limit, "seconds before the report is cut short (0: none)")
        ->check(CLI::NonNegativeNumber);
    add_format(verify, {"json"});

    auto* sweep = app.add_subcommand("sweep", "bounds and achieved values over a parameter grid");
    sweep->add_option("--over", config.over, "t1: grid over (M1,f,M2); t2: grid over (f,M,k)")
        ->check(CLI::IsMember({"t1", "t2"}));
    sweep->add_option("--f", config.f_list, "integral values")->delimiter(',');
    sweep->add_option("--m1", config.m1_list, "sup values (t1)")->delimiter(',');
    sweep->add_option("--m2", config.m2_list, "inf values (t1)")->delimiter(',');
    sweep->add_option("--m", config.m_list, "sup values (t2)")->delimiter(',');
    sweep->add_option("--k", config.k_list, "measures of K (t2)")->delimiter(',');
    add_tree(sweep);
    add_format(sweep, {"csv", "json"});

    auto* maximal = app.add_subcommand("maximal", "maximal function of a LeafFunction JSON file");
    maximal->add_option("--in", config.input, "input LeafFunction JSON ('-' for stdin)")->required();
    add_format(maximal, {"json"});

    auto* search = app.add_subcommand("search", "hill-climb the Hardy integral");
    search->add_option("--f", config.f, "integral");
    search->add_option("--m1", config.m1, "sup");
    search->add_option("--m2", config.m2, "inf");
    search->add_option("--pieces", config.pieces, "maximum number of pieces")->check(CLI::Range(2, 1 << 20));
    search->add_option("--budget", config.budget, "iterations")->check(CLI::Range(1, 1 << 30));
    search->add_option("--seed", config.seed, "random seed");
    add_format(search, {"csv", "json"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        throw HelpRequested{subs.empty() ? app.help() : subs.front()->help()};
    }
    config.subcommand = app.get_subcommands().front()->get_name();

    // Constraint checks that belong to the target operation.
    if (config.subcommand == "bound" || config.subcommand == "extremize") {
        const bool local = config.subcommand == "bound" ? config.theorem == 2 : config.kind == "theorem2";
        if (local)
            (void)LocalBoundQuery(config.f, config.m, config.k);
        else
            (void)AdmissibleTriple(config.m1, config.f, config.m2);
    }
    if (config.subcommand == "search")
        (void)AdmissibleTriple(config.m1, config.f, config.m2);
    if (config.subcommand == "extremize" && config.kind != "g0") {
        const Tree tree(config.arity, config.depth);
        if (tree.depth() < config.levels)
            throw ResourceError("--levels " + std::to_string(config.levels) + " needs --depth >= " +
                                std::to_string(config.levels));
    }
    if (config.subcommand == "sweep")
        (void)Tree(config.arity, config.depth);
    return config;
}

namespace detail {

inline std::string number(double x)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", x);
    return buffer;
}

inline std::filesystem::path resolve_output(const std::string& path)
{
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(out_dir_env); dir != nullptr && *dir != '\0')
            return std::filesystem::path(dir) / p;
    }
    return p;
}

inline void emit(const RunConfig& config, const std::string& text, std::ostream& out)
{
    if (config.output.empty()) {
        out << text;
        return;
    }
    const auto path = resolve_output(config.output);
    std::ofstream file(path);
    if (!file)
        throw UsageError("cannot open output file " + path.string());
    file << text;
}

inline std::string format_or(const RunConfig& config, const char* fallback)
{
    return config.format.empty() ? fallback : config.format;
}

// Bound at the parameters phi actually realizes (leaf quantization can move them).
inline double realized_triple_bound(const LeafFunction& phi)
{
    const double f = phi.integral();
    const double lo = phi.min();
    if (!(f > lo))
        return f;
    return sharp_bound({std::max(phi.max(), f), f, lo});
}

struct Row {
    json fields;
    double bound = 0.0;
    double achieved = 0.0;
};

inline std::string render_rows(const std::vector<std::string>& columns, const std::vector<Row>& rows,
                               const std::string& format)
{
    if (format == "json") {
        json array = json::array();
        for (const auto& row : rows) {
            json entry = row.fields;
            entry["bound"] = row.bound;
            entry["achieved"] = row.achieved;
            entry["ratio"] = row.achieved / row.bound;
            array.push_back(entry);
        }
        return array.dump(2) + "\n";
    }
    std::ostringstream csv;
    for (const auto& c : columns)
        csv << c << ',';
    csv << "bound,achieved,ratio\n";
    for (const auto& row : rows) {
        for (const auto& c : columns) {
            const auto& v = row.fields.at(c);
            csv << (v.is_string() ? v.get<std::string>() : number(v.get<double>())) << ',';
        }
        csv << number(row.bound) << ',' << number(row.achieved) << ',' << number(row.achieved / row.bound) << '\n';
    }
    return csv.str();
}

inline Row staircase_row(const Tree& tree, const AdmissibleTriple& c, int levels, json* function)
{
    const auto phi = staircase_extremizer(tree, c, levels);
    const auto mphi = maximal_function(phi);
    if (function != nullptr)
        *function = to_json(phi);
    json fields{{"m1", c.m1()}, {"f", c.f()}, {"m2", c.m2()}, {"realized_f", phi.integral()}};
    return {fields, realized_triple_bound(phi), mphi.integral()};
}

inline Row local_row(const Tree& tree, const LocalBoundQuery& q, int levels, json* function)
{
    const LocalExtremal pair =
        q.plateau_branch() ? plateau_extremizer(tree, q) : local_staircase_extremizer(tree, q, levels);
    const auto mphi = maximal_function(pair.phi);
    const double f = pair.phi.integral();
    const LocalBoundQuery realized(f, std::max(pair.phi.max(), f), pair.support.measure());
    if (function != nullptr) {
        (*function)["function"] = to_json(pair.phi);
        (*function)["support"] = to_json(pair.support);
    }
    json fields{{"f", q.f()},
                {"m", q.m()},
                {"k", q.k()},
                {"branch", q.plateau_branch() ? "plateau" : "staircase"},
                {"realized_f", f}};
    return {fields, sharp_local_bound(realized), integrate_over(mphi, pair.support)};
}

inline double snap_to_leaves(const Tree& tree, double k)
{
    const auto count = std::clamp<long long>(std::llround(k * static_cast<double>(tree.leaf_count())), 1,
                                             static_cast<long long>(tree.leaf_count()));
    return static_cast<double>(count) * tree.leaf_measure();
}

inline int run_bound(const RunConfig& config, std::ostream& out)
{
    const double value = config.theorem == 1 ? sharp_bound({config.m1, config.f, config.m2})
                                             : sharp_local_bound({config.f, config.m, config.k});
    if (format_or(config, "text") == "json")
        emit(config, json{{"bound", value}}.dump() + "\n", out);
    else
        emit(config, number(value) + "\n", out);
    return exit_ok;
}

inline int run_extremize(const RunConfig& config, std::ostream& out)
{
    json doc{{"kind", config.kind}};
    json function;
    json* sink = config.summary ? nullptr : &function;
    Row row;
    std::vector<std::string> columns;
    if (config.kind == "g0") {
        const AdmissibleTriple c(config.m1, config.f, config.m2);
        const auto g0 = two_level_extremizer(c);
        function = to_json(g0);
        row = {json{{"m1", c.m1()}, {"f", c.f()}, {"m2", c.m2()}}, sharp_bound(c), hardy_integral(g0)};
        columns = {"m1", "f", "m2"};
    } else {
        const Tree tree(config.arity, config.depth);
        doc["tree"] = {{"arity", tree.arity()}, {"depth", tree.depth()}};
        doc["levels"] = config.levels;
        if (config.kind == "staircase") {
            row = staircase_row(tree, {config.m1, config.f, config.m2}, config.levels, sink);
            columns = {"m1", "f", "m2", "realized_f"};
        } else {
            row = local_row(tree, {config.f, config.m, config.k}, config.levels, sink);
            columns = {"f", "m", "k", "branch", "realized_f"};
        }
    }
    if (format_or(config, "json") == "csv") {
        emit(config, render_rows(columns, {row}, "csv"), out);
        return exit_ok;
    }
    doc["parameters"] = row.fields;
    doc["bound"] = row.bound;
    doc["achieved"] = row.achieved;
    doc["ratio"] = row.achieved / row.bound;
    if (!config.summary) {
        if (function.contains("function"))
            doc.update(function);
        else
            doc["function"] = function;
    }
    emit(config, doc.dump() + "\n", out);
    return exit_ok;
}

inline int run_verify(const RunConfig& config, std::ostream& out)
{
    auto audit = AuditConfig::preset(config.preset, config.seed);
    audit.time_limit_seconds = config.time_limit;
    if (config.samples) {
        audit.samples_per_triple = *config.samples;
        audit.leaf_functions = *config.samples;
        if (*config.samples == 0) {
            audit.triples = 0;
            audit.random_sets = 0;
        }
    }
    const auto report = audit_bounds(audit);
    emit(config, to_json(report).dump(2) + "\n", out);
    return report.passed() ? exit_ok : exit_violation;
}

inline int run_sweep(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    const Tree tree(config.arity, config.depth);
    std::vector<Row> rows;
    std::size_t skipped = 0;
    std::vector<std::string> columns;
    if (config.over == "t1") {
        columns = {"m1", "f", "m2", "realized_f"};
        for (double m1 : config.m1_list)
            for (double f : config.f_list)
                for (double m2 : config.m2_list) {
                    try {
                        rows.push_back(staircase_row(tree, {m1, f, m2}, config.levels, nullptr));
                    } catch (const ConstraintError&) {
                        ++skipped;
                    }
                }
    } else {
        columns = {"f", "m", "k", "branch", "realized_f"};
        for (double f : config.f_list)
            for (double m : config.m_list)
                for (double k : config.k_list) {
                    try {
                        const LocalBoundQuery requested(f, m, k);
                        rows.push_back(local_row(tree, {f, m, snap_to_leaves(tree, requested.k())}, config.levels,
                                                 nullptr));
                        rows.back().fields["k"] = k;
                        rows.back().fields["k_used"] = snap_to_leaves(tree, k);
                    } catch (const ConstraintError&) {
                        ++skipped;
                    }
                }
        columns.insert(columns.begin() + 3, "k_used");
    }
    if (skipped > 0)
        err << "sweep: skipped " << skipped << " parameter combinations violating constraints\n";
    emit(config, render_rows(columns, rows, format_or(config, "csv")), out);
    return exit_ok;
}

inline int run_maximal(const RunConfig& config, std::istream& in, std::ostream& out)
{
    json doc;
    try {
        if (config.input == "-") {
            in >> doc;
        } else {
            std::ifstream file(config.input);
            if (!file)
                throw UsageError("cannot open input file " + config.input);
            file >> doc;
        }
    } catch (const json::exception& e) {
        throw UsageError(std::string("malformed JSON input: ") + e.what());
    }
    const auto phi = leaf_function_from_json(doc);
    const auto mphi = maximal_function(phi);
    const json result{{"maximal", to_json(mphi)}, {"integral", mphi.integral()}, {"input_integral", phi.integral()}};
    emit(config, result.dump() + "\n", out);
    return exit_ok;
}

inline int run_search(const RunConfig& config, std::ostream& out)
{
    const AdmissibleTriple c(config.m1, config.f, config.m2);
    const auto trace = maximize_hardy_integral(c, config.pieces, config.budget, config.seed);
    if (format_or(config, "csv") == "json") {
        json records = json::array();
        for (const auto& r : trace.records)
            records.push_back({{"iteration", r.iteration},
                               {"value", r.value},
                               {"gap", r.gap},
                               {"l1_distance", r.l1_distance}});
        emit(config,
             json{{"seed", trace.seed}, {"bound", trace.bound}, {"records", records}, {"best", to_json(trace.best)}}
                     .dump() +
                 "\n",
             out);
        return exit_ok;
    }
    std::ostringstream csv;
    csv << "iteration,value,gap,l1_distance\n";
    for (const auto& r : trace.records)
        csv << r.iteration << ',' << number(r.value) << ',' << number(r.gap) << ',' << number(r.l1_distance) << '\n';
    emit(config, csv.str(), out);
    return exit_ok;
}

} // namespace detail

/// Executes a parsed configuration.
inline int run(const RunConfig& config, std::istream& in, std::ostream& out, std::ostream& err)
{
    try {
        if (config.subcommand == "bound")
            return detail::run_bound(config, out);
        if (config.subcommand == "extremize")
            return detail::run_extremize(config, out);
        if (config.subcommand == "verify")
            return detail::run_verify(config, out);
        if (config.subcommand == "sweep")
            return detail::run_sweep(config, out, err);
        if (config.subcommand == "maximal")
            return detail::run_maximal(config, in, out);
        if (config.subcommand == "search")
            return detail::run_search(config, out);
        err << "unknown subcommand: " << config.subcommand << '\n';
        return exit_usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

/// Parse and run; the process entry point.
inline int main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err)
{
    RunConfig config;
    try {
        config = parse_args(argc, argv);
    } catch (const HelpRequested& help) {
        out << help.text;
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return exit_ok;
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return run(config, in, out, err);
}

} // namespace dyadic::cli
