// Command-line front end: evaluate the action/area functionals on a
// trajectory, verify the action-area identity across families, tabulate
// velocity sweeps, optimize paths, and compute Nambu-Goto areas.
//
// Exit codes: 0 success, 1 input error, 2 numerical failure. Diagnostics go
// to stderr as a single line `code=<n> reason=<text>`; data never mixes with
// diagnostics. Identical invocations produce byte-identical output.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "worldline/worldline.hpp"

namespace fs = std::filesystem;
using namespace worldline;

namespace {

// --- shared option plumbing --------------------------------------------------

struct CommonOpts {
    std::string units = "natural";
    double planck = 0.0;
    double light_speed = 0.0;
    bool planck_set = false;
    bool light_speed_set = false;
    double mass = 1.0;
    std::string quad = "adaptive:1e-12,1e-10";
    std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_mass = true) {
    cmd->add_option("--units", o.units, "Unit mode: si or natural")
        ->check(CLI::IsMember({"si", "natural"}))
        ->capture_default_str();
    cmd->add_option("--planck", o.planck, "Override h (SI mode only)");
    cmd->add_option("--light-speed", o.light_speed, "Override c (SI mode only)");
    if (with_mass) cmd->add_option("--mass", o.mass, "Rest mass m0")->capture_default_str();
    cmd->add_option("--quad", o.quad,
                    "Quadrature: simpson:N or adaptive:abs,rel[,max_depth]")
        ->capture_default_str();
    cmd->add_option("--out", o.out, "Output file (default: stdout)");
}

UnitSystem make_units(const CLI::App* cmd, const CommonOpts& o) {
    const bool planck_set = cmd->count("--planck") > 0;
    const bool light_set = cmd->count("--light-speed") > 0;
    if (o.units == "natural") {
        if (planck_set || light_set)
            throw InputError("constant overrides require --units si (natural pins h=c=1)");
        return UnitSystem::natural();
    }
    return UnitSystem::si(planck_set ? o.planck : kPlanckSI,
                          light_set ? o.light_speed : kLightSpeedSI);
}

double parse_number(std::string_view text, const std::string& what) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw InputError("malformed " + what + ": '" + std::string(text) + "'");
    return v;
}

QuadratureSpec parse_quad(const std::string& s) {
    if (s.rfind("simpson:", 0) == 0) {
        const double n = parse_number(s.substr(8), "simpson interval count");
        if (n != static_cast<int>(n)) throw InputError("simpson:N needs an integer N");
        return QuadratureSpec::composite(static_cast<int>(n));
    }
    if (s.rfind("adaptive:", 0) == 0) {
        std::vector<std::string> parts;
        std::string field;
        std::istringstream rest(s.substr(9));
        while (std::getline(rest, field, ',')) parts.push_back(field);
        if (parts.size() < 2 || parts.size() > 3)
            throw InputError("adaptive quadrature needs abs,rel[,max_depth]");
        const double abs_tol = parse_number(parts[0], "absolute tolerance");
        const double rel_tol = parse_number(parts[1], "relative tolerance");
        int depth = 40;
        if (parts.size() == 3) {
            const double d = parse_number(parts[2], "max depth");
            if (d != static_cast<int>(d)) throw InputError("max depth must be an integer");
            depth = static_cast<int>(d);
        }
        return QuadratureSpec::adaptive(abs_tol, rel_tol, depth);
    }
    throw InputError("unknown quadrature spec '" + s + "' (simpson:N or adaptive:abs,rel)");
}

struct ParamRange {
    std::string name;
    double start = 0.0;
    double stop = 0.0;
    int steps = 0;
};

ParamRange parse_param(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
        throw InputError("--param needs the form name=start:stop:steps");
    ParamRange r;
    r.name = s.substr(0, eq);
    std::vector<std::string> parts;
    std::string field;
    std::istringstream rest(s.substr(eq + 1));
    while (std::getline(rest, field, ':')) parts.push_back(field);
    if (parts.size() != 3) throw InputError("--param needs the form name=start:stop:steps");
    r.start = parse_number(parts[0], "param start");
    r.stop = parse_number(parts[1], "param stop");
    const double n = parse_number(parts[2], "param steps");
    if (n != static_cast<int>(n) || n < 1) throw InputError("param steps must be a positive integer");
    r.steps = static_cast<int>(n);
    return r;
}

std::vector<double> range_values(const ParamRange& r) {
    std::vector<double> out;
    if (r.steps == 1) {
        out.push_back(r.start);
        return out;
    }
    for (int i = 0; i < r.steps; ++i)
        out.push_back(r.start + (r.stop - r.start) * i / (r.steps - 1));
    return out;
}

// Replaces standalone identifier tokens equal to `name`; numbers and other
// identifiers pass through, so a parameter named "a" never touches "tanh".
std::string substitute_parameter(const std::string& text, const std::string& name,
                                 double value) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        const unsigned char ch = static_cast<unsigned char>(text[i]);
        if (std::isdigit(ch) || ch == '.') {
            const std::size_t start = i;
            while (i < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.'))
                ++i;
            if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
                if (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
                    i = j;
                    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
                        ++i;
                }
            }
            out += text.substr(start, i - start);
        } else if (std::isalpha(ch) || ch == '_') {
            const std::size_t start = i;
            while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                                       text[i] == '_'))
                ++i;
            const std::string ident = text.substr(start, i - start);
            if (ident == name) out += "(" + format_double(value) + ")";
            else out += ident;
        } else {
            out += text[i];
            ++i;
        }
    }
    return out;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open output file: " + path);
    f << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// --- trajectory sources ------------------------------------------------------

struct SourceOpts {
    std::string expr;
    std::string expr_file;
    std::string csv;
    double t0 = 0.0;
    double t1 = 0.0;
};

void add_source(CLI::App* cmd, SourceOpts& s) {
    cmd->add_option("--expr", s.expr, "Trajectory expression x(t)");
    cmd->add_option("--expr-file", s.expr_file, "File whose first line is x(t)");
    cmd->add_option("--csv", s.csv, "Sampled trajectory CSV (header t,x)");
    cmd->add_option("--t0", s.t0, "Domain start (expression sources)");
    cmd->add_option("--t1", s.t1, "Domain end (expression sources)");
}

std::string source_expression(const CLI::App* cmd, const SourceOpts& s) {
    if (cmd->count("--expr") > 0) return s.expr;
    std::istringstream in(read_text_file(s.expr_file));
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw InputError("expression file is empty: " + s.expr_file);
    return line;
}

Trajectory load_trajectory(const CLI::App* cmd, const SourceOpts& s, const UnitSystem& u) {
    const int n_expr = (cmd->count("--expr") > 0) + (cmd->count("--expr-file") > 0);
    const int n_csv = cmd->count("--csv") > 0;
    if (n_expr + n_csv != 1)
        throw InputError("exactly one trajectory source: --expr, --expr-file, or --csv");
    if (n_csv) {
        if (cmd->count("--t0") > 0 || cmd->count("--t1") > 0)
            throw InputError("--t0/--t1 come from the CSV; do not pass them with --csv");
        std::istringstream in(read_text_file(s.csv));
        return read_trajectory_csv(in, u);
    }
    if (cmd->count("--t0") == 0 || cmd->count("--t1") == 0)
        throw InputError("expression sources need --t0 and --t1");
    return Trajectory::from_expression(Expr::parse(source_expression(cmd, s)), s.t0, s.t1, u);
}

// --- subcommands ---------------------------------------------------------

int cmd_eval(const CLI::App* cmd, const CommonOpts& common, const SourceOpts& source,
             int samples, double v_floor) {
    const UnitSystem u = make_units(cmd, common);
    const QuadratureSpec q = parse_quad(common.quad);
    const Particle p(common.mass);
    const Trajectory tr = load_trajectory(cmd, source, u);

    const ActionReport rep = verify_identity(tr, p, u, q);
    if (!rep.converged) throw NumericalError("unconverged quadrature");

    std::string report = report_key_value_block(rep);
    // Independent spatial-quadrature route, where its preconditions hold.
    report += "area_A_spatial=";
    try {
        const FunctionalResult spatial = swept_area_spatial(tr, p, u, q, v_floor);
        if (!spatial.converged) throw NumericalError("unconverged quadrature (spatial)");
        report += format_double(spatial.value);
    } catch (const InputError&) {
        report += "unavailable";
    }
    report += "\n";
    for (int i = 0; i < 5; ++i) {
        const double t = tr.t_start() + (tr.t_end() - tr.t_start()) * i / 4.0;
        const double v = tr.velocity_at(t);
        report += "lambda_B[t=" + format_double(t) + "]=";
        report += v == 0.0 ? "inf" : format_double(de_broglie_length(p, v, u));
        report += "\n";
    }
    std::cout << report;

    if (!common.out.empty()) {
        std::string csv = "t,x,v,lambda_B\n";
        for (int i = 0; i < samples; ++i) {
            const double t =
                tr.t_start() + (tr.t_end() - tr.t_start()) * i / (samples - 1.0);
            const double v = tr.velocity_at(t);
            csv += format_double(t) + "," + format_double(tr.position_at(t)) + "," +
                   format_double(v) + ",";
            csv += v == 0.0 ? "inf" : format_double(de_broglie_length(p, v, u));
            csv += "\n";
        }
        write_output(common.out, csv);
    }
    return 0;
}

int cmd_verify(const CLI::App* cmd, const CommonOpts& common, const SourceOpts& source,
               const std::string& param, double threshold) {
    const UnitSystem u = make_units(cmd, common);
    const QuadratureSpec q = parse_quad(common.quad);
    const Particle p(common.mass);

    struct Member {
        std::string id;
        std::optional<Trajectory> tr;
        std::string note;
    };
    std::vector<Member> members;

    const bool expr_mode = cmd->count("--expr") > 0 || cmd->count("--expr-file") > 0;
    if (expr_mode == (cmd->count("--csv") > 0))
        throw InputError("verify needs either an expression family or a CSV directory");
    if (expr_mode) {
        if (param.empty()) throw InputError("expression families need --param name=a:b:n");
        if (cmd->count("--t0") == 0 || cmd->count("--t1") == 0)
            throw InputError("expression sources need --t0 and --t1");
        const std::string text = source_expression(cmd, source);
        const ParamRange range = parse_param(param);
        for (double value : range_values(range)) {
            Member m;
            m.id = range.name + "=" + format_double(value);
            try {
                m.tr = Trajectory::from_expression(
                    Expr::parse(substitute_parameter(text, range.name, value)), source.t0,
                    source.t1, u);
            } catch (const Error& e) {
                m.note = e.what();
            }
            members.push_back(std::move(m));
        }
    } else {
        if (!fs::is_directory(source.csv))
            throw InputError("verify --csv expects a directory of trajectory CSVs");
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(source.csv))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw InputError("no .csv files in " + source.csv);
        for (const auto& file : files) {
            Member m;
            m.id = file.filename().string();
            try {
                std::istringstream in(read_text_file(file.string()));
                m.tr = read_trajectory_csv(in, u);
            } catch (const Error& e) {
                m.note = e.what();
            }
            members.push_back(std::move(m));
        }
    }

    auto sanitize = [](std::string s) {
        std::replace(s.begin(), s.end(), ',', ';');
        std::replace(s.begin(), s.end(), '\n', ' ');
        return s;
    };

    std::string csv = "id,S,A,kA,residual,note\n";
    double max_residual = -1.0;
    int usable = 0;
    for (auto& m : members) {
        if (!m.tr) {
            csv += m.id + ",,,,," + sanitize(m.note) + "\n";
            continue;
        }
        const ActionReport rep = verify_identity(*m.tr, p, u, q);
        std::string note;
        if (!rep.converged) note = "unconverged quadrature";
        else if (!rep.residual_defined) note = "A=0: residual undefined";
        csv += m.id + "," + format_double(rep.action_S) + "," + format_double(rep.area_A) +
               "," + format_double(rep.constant_k * rep.area_A) + ",";
        csv += rep.residual_defined ? format_double(rep.identity_residual) : "undefined";
        csv += "," + note + "\n";
        if (rep.converged && rep.residual_defined) {
            ++usable;
            max_residual = std::max(max_residual, rep.identity_residual);
        }
    }
    write_output(common.out, csv);
    std::cout << "max_residual="
              << (usable > 0 ? format_double(max_residual) : std::string("undefined")) << "\n";
    if (usable == 0) throw InputError("no family member produced a defined residual");
    if (!(max_residual < threshold))
        throw NumericalError("max residual " + format_double(max_residual) +
                             " exceeds threshold " + format_double(threshold));
    return 0;
}

int cmd_sweep(const CLI::App* cmd, const CommonOpts& common, const std::string& param) {
    const UnitSystem u = make_units(cmd, common);
    const Particle p(common.mass);
    if (param.empty()) throw InputError("sweep needs --param v=a:b:n");
    const ParamRange range = parse_param(param);
    if (!(range.start > 0.0) || !(std::max(range.start, range.stop) < u.c()))
        throw InputError("sweep range must stay strictly inside (0, c)");
    if (range.stop < range.start) throw InputError("sweep range must be increasing");

    std::string csv = "v,lambda_B,gamma,dA_dt,dS_dt\n";
    for (double v : range_values(range)) {
        const double rate = proper_time_rate(v, u);
        csv += format_double(v) + "," + format_double(de_broglie_length(p, v, u)) + "," +
               format_double(1.0 / rate) + "," +
               format_double(u.h() / p.rest_mass() * rate) + "," +
               format_double(-p.rest_mass() * u.c() * u.c() * rate) + "\n";
    }
    write_output(common.out, csv);
    return 0;
}

int cmd_optimize(const CLI::App* cmd, const CommonOpts& common, double t0, double t1,
                 double x0, double x1, int nodes, const std::string& objective,
                 const std::string& init, double grad_tol, std::int64_t max_iter,
                 double v_max) {
    const UnitSystem u = make_units(cmd, common);
    const Particle p(common.mass);
    if (!(t0 < t1)) throw InputError("optimize needs --t0 < --t1");
    if (!(std::abs((x1 - x0) / (t1 - t0)) < v_max * u.c()))
        throw InputError("infeasible endpoints: |dx/dt| >= v_max");
    if (common.out.empty()) throw InputError("optimize needs --out for the path CSV");

    const PathVariable initial =
        init == "line" ? PathVariable::straight_line(t0, x0, t1, x1, nodes, u, v_max)
                       : PathVariable::zigzag(t0, x0, t1, x1, nodes, u, v_max);
    OptimizeSettings settings;
    settings.grad_tol = grad_tol;
    settings.max_iter = max_iter;
    const Objective which = objective == "action" ? Objective::ActionS : Objective::AreaA;
    const OptimizeResult res = optimize(initial, which, p, u, settings);

    std::ostringstream path_csv;
    write_samples_csv(path_csv, res.path.samples());
    write_output(common.out, path_csv.str());

    std::cout << "objective=" << objective << "\n"
              << "value=" << format_double(res.objective) << "\n"
              << "iterations=" << res.iterations << "\n"
              << "gradient_norm=" << format_double(res.gradient_norm) << "\n"
              << "converged=" << (res.converged ? "true" : "false") << "\n";
    if (!res.converged) throw NumericalError("optimizer did not reach grad_tol");
    return 0;
}

int cmd_nambu_goto(const CLI::App* cmd, const CommonOpts& common, const std::string& preset,
                   const std::string& csv, double length, double duration, double tension) {
    const QuadratureSpec q = parse_quad(common.quad);
    if ((cmd->count("--preset") > 0) == (cmd->count("--csv") > 0))
        throw InputError("nambu-goto needs exactly one of --preset or --csv");

    Worldsheet ws = [&] {
        if (cmd->count("--csv") > 0) {
            std::istringstream in(read_text_file(csv));
            return read_worldsheet_csv(in);
        }
        if (preset == "static-string") return Worldsheet::static_string(length, duration);
        throw InputError("unknown preset '" + preset + "' (available: static-string)");
    }();

    const FunctionalResult area = nambu_goto_area(ws, q);
    const FunctionalResult action = nambu_goto_action(ws, tension, q);
    std::string report;
    report += "area=" + format_double(area.value) + "\n";
    report += "area_abs_error=" + format_double(area.abs_error_estimate) + "\n";
    report += "tension=" + format_double(tension) + "\n";
    report += "action=" + format_double(action.value) + "\n";
    report += "evaluations=" + std::to_string(area.evaluations) + "\n";
    report += std::string("converged=") + (area.converged ? "true" : "false") + "\n";
    write_output(common.out, report);
    if (!area.converged) throw NumericalError("unconverged quadrature");
    return 0;
}

int fail(int code, std::string reason) {
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    std::cerr << "code=" << code << " reason=" << reason << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relativistic world-line actions, De Broglie swept areas, and "
                 "Nambu-Goto worldsheet areas"};
    app.require_subcommand(1);

    CommonOpts eval_common, verify_common, sweep_common, opt_common, ng_common;
    SourceOpts eval_source, verify_source;
    int eval_samples = 101;
    double eval_v_floor = kDefaultVFloorFraction;
    std::string verify_param, sweep_param;
    double verify_threshold = 1e-6;
    double opt_t0 = 0.0, opt_t1 = 1.0, opt_x0 = 0.0, opt_x1 = 0.0;
    int opt_nodes = 32;
    std::string opt_objective = "action", opt_init = "zigzag";
    double opt_grad_tol = 1e-10, opt_v_max = 0.99;
    std::int64_t opt_max_iter = 100000;
    std::string ng_preset, ng_csv;
    double ng_length = 1.0, ng_duration = 1.0, ng_tension = 1.0;

    CLI::App* eval = app.add_subcommand("eval", "Evaluate S, A, L, k and Lambda_B");
    add_common(eval, eval_common);
    add_source(eval, eval_source);
    eval->add_option("--samples", eval_samples, "Rows in the --out CSV")
        ->check(CLI::Range(2, 10000000))
        ->capture_default_str();
    eval->add_option("--v-floor", eval_v_floor,
                     "Min |v| (fraction of c) for the spatial cross-check")
        ->capture_default_str();

    CLI::App* verify = app.add_subcommand("verify", "Check |S| = k*A across a family");
    add_common(verify, verify_common);
    add_source(verify, verify_source);
    verify->add_option("--param", verify_param, "Family parameter name=a:b:n");
    verify->add_option("--threshold", verify_threshold, "Max acceptable residual")
        ->capture_default_str();

    CLI::App* sweep = app.add_subcommand("sweep", "Tabulate Lambda_B, gamma and rates vs v");
    add_common(sweep, sweep_common);
    sweep->add_option("--param", sweep_param, "Velocity range v=a:b:n");

    CLI::App* opt = app.add_subcommand("optimize", "Fixed-endpoint path optimization");
    add_common(opt, opt_common);
    opt->add_option("--t0", opt_t0, "Start time")->required();
    opt->add_option("--t1", opt_t1, "End time")->required();
    opt->add_option("--x0", opt_x0, "Start position")->required();
    opt->add_option("--x1", opt_x1, "End position")->required();
    opt->add_option("--nodes", opt_nodes, "Grid intervals N")->capture_default_str();
    opt->add_option("--objective", opt_objective, "action or area")
        ->check(CLI::IsMember({"action", "area"}))
        ->capture_default_str();
    opt->add_option("--init", opt_init, "Initial path: zigzag or line")
        ->check(CLI::IsMember({"zigzag", "line"}))
        ->capture_default_str();
    opt->add_option("--grad-tol", opt_grad_tol, "Convergence tolerance")
        ->capture_default_str();
    opt->add_option("--max-iter", opt_max_iter, "Iteration budget")->capture_default_str();
    opt->add_option("--v-max", opt_v_max, "Speed bound as a fraction of c")
        ->capture_default_str();

    CLI::App* ng = app.add_subcommand("nambu-goto", "Worldsheet area and string action");
    add_common(ng, ng_common, /*with_mass=*/false);
    ng->add_option("--preset", ng_preset, "Worldsheet preset (static-string)");
    ng->add_option("--csv", ng_csv, "Worldsheet grid CSV");
    ng->add_option("--length", ng_length, "Preset string length")->capture_default_str();
    ng->add_option("--duration", ng_duration, "Preset duration")->capture_default_str();
    ng->add_option("--tension", ng_tension, "String tension T > 0")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(1, e.what());
    }

    try {
        if (eval->parsed())
            return cmd_eval(eval, eval_common, eval_source, eval_samples, eval_v_floor);
        if (verify->parsed())
            return cmd_verify(verify, verify_common, verify_source, verify_param,
                              verify_threshold);
        if (sweep->parsed()) return cmd_sweep(sweep, sweep_common, sweep_param);
        if (opt->parsed())
            return cmd_optimize(opt, opt_common, opt_t0, opt_t1, opt_x0, opt_x1, opt_nodes,
                                opt_objective, opt_init, opt_grad_tol, opt_max_iter,
                                opt_v_max);
        if (ng->parsed())
            return cmd_nambu_goto(ng, ng_common, ng_preset, ng_csv, ng_length, ng_duration,
                                  ng_tension);
    } catch (const NumericalError& e) {
        return fail(2, e.what());
    } catch (const InputError& e) {
        return fail(1, e.what());
    } catch (const Error& e) {
        return fail(1, e.what());
    } catch (const std::exception& e) {
        return fail(1, e.what());
    }
    return 0;
}
