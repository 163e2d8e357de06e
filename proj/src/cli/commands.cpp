#include "cli/commands.hpp"

#include "cli/config.hpp"
#include "spdelab/feedback.hpp"
#include "spdelab/ldp.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/path_io.hpp"
#include "spdelab/salins.hpp"
#include "spdelab/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace spdelab::cli {

namespace fs = std::filesystem;

namespace {

/// Stream ids per subcommand, so that experiments never share noise.
enum StreamId : std::uint64_t { simulate_stream = 1, salins_stream, c1_stream, ldp_stream, probe_stream };

/// Raised after artifacts are written when a probe or check did not pass.
struct CheckFailed : Error {
    int code;
    CheckFailed(const std::string& what, int c) : Error(what), code(c) {}
};

struct Options {
    std::string config_path;
    std::string model_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    std::string out;
    bool spectral = false;
    std::optional<double> eps, t;
    std::optional<int> steps, paths;
    std::string phi = "zero";
};

struct Context {
    Config config;
    Setup setup;
    Field x;
    std::string hash;
    fs::path out_dir;
    std::vector<fs::path> outputs;
    std::ostream& out;
};

std::string file_hash(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return hex64(fnv1a64(ss.str()));
}

/// Opens `name` in the output directory and writes the config-hash comment.
class Output {
public:
    Output(Context& ctx, const std::string& name) : path_(ctx.out_dir / name), file_(path_), csv_(file_)
    {
        if (!file_) throw Error("cannot write '" + path_.string() + "'");
        csv_.comment("config_hash=" + ctx.hash);
        ctx.outputs.push_back(path_);
    }
    CsvWriter& csv() { return csv_; }

private:
    fs::path path_;
    std::ofstream file_;
    CsvWriter csv_;
};

std::string cell(double v) { return format_number(v); }
std::string cell(bool v) { return v ? "true" : "false"; }

void write_paths(Context& ctx, const std::string& name, const std::vector<Path>& paths, bool spectral)
{
    const SpatialGrid& grid = ctx.setup.grid();
    Output o(ctx, name);
    o.csv().comment("grid n_points=" + std::to_string(grid.n_points()) + " n_modes=" + std::to_string(grid.n_modes()));
    const int width = spectral ? grid.n_modes() : grid.n_points();
    std::vector<std::string> cols{"path_id", "time"};
    for (int j = 1; j <= width; ++j) cols.push_back((spectral ? "c" : "x") + std::to_string(j));
    o.csv().header(cols);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (int m = 0; m <= paths[i].n_steps(); ++m) {
            const Eigen::VectorXd v =
                spectral ? grid.to_spectral(paths[i].field(m)) : Eigen::VectorXd(paths[i].field(m));
            std::vector<std::string> cells{std::to_string(i), cell(paths[i].time(m))};
            for (int j = 0; j < width; ++j) cells.push_back(cell(v[j]));
            o.csv().row(cells);
        }
    }
}

struct CheckRow {
    std::string check;
    bool pass;
    std::string detail;
};

std::vector<CheckRow> run_checks(const Context& ctx)
{
    std::vector<CheckRow> rows;
    const Config& c = ctx.config;
    const NoiseSpec& noise = ctx.setup.noise;
    noise.validate();
    const HypothesisReport h3 =
        validate_hypothesis(noise, 1, TailModel::from(parse_decay(c.get("noise.lambda_decay"))));
    rows.push_back({"H3 noise", h3.pass, h3.detail});

    const ReactionSpec& f = ctx.setup.model.reaction;
    const DissipativityReport h1 = check_dissipativity(f.f, f.k, c.number("reaction.probe_range"));
    rows.push_back({"H1 reaction", h1.pass,
                    "max difference quotient " + format_number(h1.max_quotient) + " against k = " +
                        format_number(f.k) + " on [-R, R], R = " + c.get("reaction.probe_range")});

    const double h = c.number("time.t") / c.integer("time.steps");
    const bool step_ok = 0.5 * h * f.k < 1.0;
    rows.push_back({"reaction step", step_ok, "(h/2) k = " + format_number(0.5 * h * f.k) + " must be < 1"});

    const SigmaSpec& s = ctx.setup.model.sigma;
    rows.push_back({"H1 sigma", std::isfinite(s.lipschitz()),
                    "Lipschitz constant " + format_number(s.lipschitz())});
    return rows;
}

void require_valid(const Context& ctx)
{
    for (const CheckRow& r : run_checks(ctx))
        if (!r.pass) throw CheckFailed(r.check + " violated: " + r.detail, exit_validation);
}

SpdeRun make_run(const Context& ctx, const Options& opt)
{
    SpdeRun run;
    run.eps = opt.eps.value_or(ctx.config.number("run.eps"));
    run.t_end = opt.t.value_or(ctx.config.number("time.t"));
    run.n_steps = opt.steps.value_or(ctx.config.integer("time.steps"));
    run.picard_tol = ctx.config.number("run.picard_tol");
    run.picard_max = ctx.config.integer("run.picard_max");
    run.x = ctx.x;
    return run;
}

StreamKey key(const Context& ctx, StreamId id)
{
    return {ctx.config.unsigned_integer("seed"), id};
}

void cmd_validate(Context& ctx, const Options&)
{
    const auto rows = run_checks(ctx);
    Output o(ctx, "validate.csv");
    o.csv().header({"check", "pass", "detail"});
    bool ok = true;
    for (const CheckRow& r : rows) {
        o.csv().row({r.check, cell(r.pass), r.detail});
        ctx.out << (r.pass ? "pass  " : "FAIL  ") << r.check << ": " << r.detail << "\n";
        ok = ok && r.pass;
    }
    if (!ok) throw CheckFailed("validation failed", exit_validation);
}

void cmd_simulate(Context& ctx, const Options& opt)
{
    require_valid(ctx);
    const SpdeRun run = make_run(ctx, opt);
    const int n_paths = opt.paths.value_or(ctx.config.integer("run.paths"));
    if (n_paths < 1) throw DomainError("--paths must be >= 1");
    const ValueFunction vf = build_value_function(ctx.config);
    std::vector<Path> paths(n_paths);
    std::vector<int> iterations(n_paths);
    parallel_for(n_paths, [&](int i) {
        PicardResult r = picard_solve(ctx.setup, run, vf, key(ctx, simulate_stream).child(i));
        paths[i] = std::move(r.path);
        iterations[i] = r.diagnostics.iterations;
    });
    write_paths(ctx, opt.out.empty() ? "paths.csv" : opt.out, paths, opt.spectral);
    int worst = 0;
    for (int it : iterations) worst = std::max(worst, it);
    ctx.out << "simulated " << n_paths << " path(s), eps = " << run.eps << ", at most " << worst
            << " Picard iteration(s)\n";
}

Control parse_phi(const std::string& spec, double t, int n_steps, const NoiseSpec& noise)
{
    if (spec == "zero") return Control(0.0, t, 1, n_steps);
    std::stringstream ss(spec);
    std::string kind, mode_text, value_text;
    std::getline(ss, kind, ':');
    std::getline(ss, mode_text, ':');
    std::getline(ss, value_text);
    if (kind != "const" || mode_text.empty() || value_text.empty())
        throw ConfigError("--phi must be 'zero' or 'const:<mode>:<value>'");
    int mode = 0;
    double value = 0.0;
    try {
        mode = std::stoi(mode_text);
        value = std::stod(value_text);
    } catch (const std::exception&) {
        throw ConfigError("--phi: cannot parse '" + spec + "'");
    }
    if (mode < 1 || mode > noise.n_modes()) throw ConfigError("--phi: mode out of range");
    Control c(0.0, t, mode, n_steps);
    c.phi.row(mode - 1).setConstant(value);
    return c;
}

void cmd_skeleton(Context& ctx, const Options& opt)
{
    require_valid(ctx);
    const SpdeRun run = make_run(ctx, opt);
    const Control phi = parse_phi(opt.phi, run.t_end, run.n_steps, ctx.setup.noise);
    const Path X = solve_skeleton(ctx.setup, ctx.x, phi);
    write_paths(ctx, opt.out.empty() ? "skeleton.csv" : opt.out, {X}, opt.spectral);
    ctx.out << "skeleton with control cost " << rate_functional(phi) << "\n";
}

void cmd_salins_probe(Context& ctx, const Options& opt)
{
    require_valid(ctx);
    const Config& c = ctx.config;
    const double window = c.number("salins.window");
    const int steps = opt.steps.value_or(c.integer("time.steps"));
    SalinsProblem problem{ctx.setup.model.reaction, ctx.setup.semigroup,
                          Path(0.0, window, ctx.setup.grid().n_points(), steps)};
    LipschitzProbeOptions po;
    po.n_pairs = c.integer("salins.pairs");
    po.perturbation_scale = c.number("salins.scale");
    SalinsOptions so;
    const std::string& scheme = c.get("salins.scheme");
    if (scheme == "yosida")
        so.scheme = SalinsScheme::yosida;
    else if (scheme != "splitting")
        throw ConfigError("salins.scheme must be splitting or yosida");
    so.yosida_n = c.integer("salins.yosida_n");
    const LipschitzReport rep = lipschitz_probe(problem, po, key(ctx, salins_stream), so);

    Output o(ctx, opt.out.empty() ? "salins_probe.csv" : opt.out);
    o.csv().header({"pair_id", "ratio", "bound", "pass"});
    for (std::size_t i = 0; i < rep.pairs.size(); ++i)
        o.csv().row({std::to_string(i), cell(rep.pairs[i].ratio), cell(rep.bound), cell(rep.pairs[i].pass)});
    ctx.out << "max Lipschitz ratio " << rep.max_ratio << " against bound " << rep.bound << "\n";
    if (!rep.pass) throw CheckFailed("salins-probe: Lipschitz bound exceeded", exit_validation);
}

RateOptions rate_options(const Context& ctx, int steps)
{
    RateOptions ro;
    ro.n_ctrl = ctx.config.integer("ldp.n_ctrl");
    ro.tol_target = ctx.config.number("ldp.tol_target");
    ro.n_steps = steps;
    return ro;
}

void cmd_rate(Context& ctx, const Options& opt)
{
    require_valid(ctx);
    const Config& c = ctx.config;
    const double t = opt.t.value_or(c.number("time.t"));
    const int steps = opt.steps.value_or(c.integer("time.steps"));
    const int mode = c.integer("ldp.mode");
    const double level = c.number("ldp.level");
    const RateResult r = minimize_rate(ctx.setup, ctx.x, t, RateTarget::functional(mode, level), rate_options(ctx, steps));

    Output o(ctx, opt.out.empty() ? "rate.csv" : opt.out);
    o.csv().header({"mode", "level", "value", "violation", "reachable", "converged"});
    o.csv().row({std::to_string(mode), cell(level), cell(r.value), cell(r.violation), cell(r.reachable),
                 cell(r.converged)});
    ctx.out << "rate value " << r.value << " (target mismatch " << r.violation << ")\n";
    if (!r.reachable) throw CheckFailed("rate: " + r.detail, exit_validation);
    if (!r.converged) throw CheckFailed("rate: " + r.detail, exit_numerical);
}

void cmd_ldp_verify(Context& ctx, const Options& opt)
{
    require_valid(ctx);
    const Config& c = ctx.config;
    RareEventOptions ro;
    ro.n_paths = opt.paths.value_or(c.integer("ldp.paths"));
    ro.n_steps = opt.steps.value_or(c.integer("time.steps"));
    ro.importance = c.flag("ldp.importance");
    ro.rate = rate_options(ctx, ro.n_steps);
    const RareEventReport rep = rare_event_compare(ctx.setup, ctx.x, opt.t.value_or(c.number("time.t")),
                                                   {c.integer("ldp.mode"), c.number("ldp.level")},
                                                   c.numbers("ldp.eps_grid"), ro, key(ctx, ldp_stream));

    Output o(ctx, opt.out.empty() ? "ldp_verify.csv" : opt.out);
    o.csv().header({"eps", "estimate", "stderr", "hits", "eps_log_p", "I_star", "gap"});
    for (const RareEventRow& r : rep.rows)
        o.csv().row({cell(r.eps), cell(r.estimate), cell(r.stderr_), std::to_string(r.hits), cell(r.eps_log_p),
                     cell(rep.I_star), cell(r.gap)});
    ctx.out << "I* = " << rep.I_star << "\n";
    if (!std::isfinite(rep.I_star)) throw CheckFailed("ldp-verify: rate minimization failed", exit_numerical);
}

void cmd_c1_test(Context& ctx, const Options& opt)
{
    require_valid(ctx);
    const Config& c = ctx.config;
    const SpdeRun run = make_run(ctx, opt);
    const int mode = c.integer("c1.mode");
    if (mode < 1 || mode > ctx.setup.noise.n_modes()) throw ConfigError("c1.mode out of range");
    Control phi(0.0, run.t_end, mode, run.n_steps);
    phi.phi.row(mode - 1).setConstant(c.number("c1.value"));
    const std::vector<double> eps = c.numbers("c1.eps_grid");
    const C1Report rep =
        c1_convergence_test(ctx.setup, ctx.x, std::vector<Control>(eps.size(), phi), phi, eps,
                            opt.paths.value_or(c.integer("c1.paths")), build_value_function(c), key(ctx, c1_stream));

    Output o(ctx, opt.out.empty() ? "c1_test.csv" : opt.out);
    o.csv().header({"eps", "error", "stderr"});
    for (const C1Row& r : rep.rows) o.csv().row({cell(r.eps), cell(r.error), cell(r.stderr_)});
    ctx.out << "log-log slope " << rep.slope << (rep.monotone ? "" : " (not monotone)") << "\n";
}

void cmd_eps_probe(Context& ctx, const Options& opt)
{
    require_valid(ctx);
    const Config& c = ctx.config;
    const ThresholdReport rep =
        epsilon_threshold_probe(ctx.setup, make_run(ctx, opt), c.numbers("probe.eps_grid"),
                                c.integer("probe.n_noise"), build_value_function(c), key(ctx, probe_stream));
    Output o(ctx, opt.out.empty() ? "eps_probe.csv" : opt.out);
    o.csv().header({"eps", "mean_ratio", "stderr", "n_noise"});
    for (const ThresholdRow& r : rep.rows)
        o.csv().row({cell(r.eps), cell(r.mean_ratio), cell(r.stderr_), std::to_string(r.n_noise)});
    ctx.out << "largest eps with mean ratio < 1: " << rep.eps_star << "\n";
}

void write_artifacts(Context& ctx, const std::string& subcommand, double seconds)
{
    const fs::path cfg = ctx.out_dir / "resolved.cfg";
    {
        std::ofstream f(cfg);
        f << ctx.config.resolved();
    }
    nlohmann::json files = nlohmann::json::array();
    for (const fs::path& p : ctx.outputs) files.push_back({{"file", p.filename().string()}, {"fnv1a64", file_hash(p)}});
    nlohmann::json manifest{
        {"subcommand", subcommand},
        {"config_hash", ctx.hash},
        {"seed", ctx.config.get("seed")},
        {"version", version},
        {"outputs", files},
        {"wall_clock_s", seconds},
    };
    std::ofstream(ctx.out_dir / "manifest.json") << manifest.dump(2) << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"spdelab: stochastic reaction-diffusion equations with conditional-expectation feedback"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_option("--config", opt.config_path, "key = value configuration file");
    app.add_option("--set", opt.overrides, "override a config key, e.g. --set run.eps=0.01");
    app.add_option("--out-dir", opt.out_dir, "directory for CSV, resolved.cfg and manifest.json");

    using Handler = void (*)(Context&, const Options&);
    std::vector<std::pair<CLI::App*, Handler>> commands;
    auto add = [&](const std::string& name, const std::string& help, Handler h) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--out", opt.out, "output CSV file name (inside --out-dir)");
        commands.emplace_back(sub, h);
        return sub;
    };
    add("validate", "check the noise and reaction hypotheses", cmd_validate);
    CLI::App* sim = add("simulate", "sample paths of the feedback SPDE", cmd_simulate);
    sim->add_option("--eps", opt.eps, "noise intensity");
    sim->add_option("--t", opt.t, "terminal time");
    sim->add_option("--steps", opt.steps, "time steps");
    sim->add_option("--paths", opt.paths, "number of paths");
    sim->add_option("--model", opt.model_path, "config file with model keys, applied after --config");
    sim->add_flag("--spectral", opt.spectral, "write sine coefficients instead of node values");
    CLI::App* skel = add("skeleton", "solve the controlled skeleton equation", cmd_skeleton);
    skel->add_option("--phi", opt.phi, "zero or const:<mode>:<value> (H0 coordinate)");
    skel->add_option("--t", opt.t, "terminal time");
    skel->add_option("--steps", opt.steps, "time steps");
    skel->add_option("--model", opt.model_path, "config file with model keys, applied after --config");
    skel->add_flag("--spectral", opt.spectral, "write sine coefficients instead of node values");
    CLI::App* sp = add("salins-probe", "empirical Lipschitz constant of the solution map", cmd_salins_probe);
    sp->add_option("--steps", opt.steps, "time steps");
    CLI::App* rate = add("rate", "minimize the rate functional for a terminal level", cmd_rate);
    rate->add_option("--t", opt.t, "terminal time");
    rate->add_option("--steps", opt.steps, "time steps");
    CLI::App* ldp = add("ldp-verify", "compare rare-event probabilities with the rate", cmd_ldp_verify);
    ldp->add_option("--t", opt.t, "terminal time");
    ldp->add_option("--steps", opt.steps, "time steps");
    ldp->add_option("--paths", opt.paths, "paths per eps");
    CLI::App* c1 = add("c1-test", "convergence of controlled solutions as eps -> 0", cmd_c1_test);
    c1->add_option("--t", opt.t, "terminal time");
    c1->add_option("--steps", opt.steps, "time steps");
    c1->add_option("--paths", opt.paths, "paths per eps");
    CLI::App* probe = add("eps-probe", "first-iteration Picard contraction ratio against eps", cmd_eps_probe);
    probe->add_option("--steps", opt.steps, "time steps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    const auto start = std::chrono::steady_clock::now();
    std::string name;
    try {
        Config config;
        if (!opt.config_path.empty()) config.load_file(opt.config_path);
        if (!opt.model_path.empty()) config.load_file(opt.model_path);
        for (const std::string& s : opt.overrides) config.set(s);
        Context ctx{config, build_setup(config), {}, hex64(config.hash()), opt.out_dir, {}, out};
        ctx.x = build_initial(config, ctx.setup.grid());
        fs::create_directories(ctx.out_dir);

        int code = exit_ok;
        for (const auto& [sub, handler] : commands) {
            if (!sub->parsed()) continue;
            name = sub->get_name();
            try {
                handler(ctx, opt);
            } catch (const CheckFailed& e) {
                err << "spdelab " << name << ": " << e.what() << "\n";
                code = e.code;
            }
        }
        write_artifacts(ctx, name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        return code;
    } catch (const ContractionFailure& e) {
        err << "spdelab " << name << ": contraction failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const StepSizeError& e) {
        err << "spdelab " << name << ": " << e.what() << "\n";
        return exit_numerical;
    } catch (const ResolventError& e) {
        err << "spdelab " << name << ": " << e.what() << "\n";
        return exit_numerical;
    } catch (const ConfigError& e) {
        err << "spdelab: config error: " << e.what() << "\n";
        return exit_validation;
    } catch (const DomainError& e) {
        err << "spdelab " << name << ": " << e.what() << "\n";
        return exit_validation;
    } catch (const NotInH0Error& e) {
        err << "spdelab " << name << ": " << e.what() << "\n";
        return exit_validation;
    } catch (const DimensionError& e) {
        err << "spdelab " << name << ": " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        err << "spdelab " << name << ": " << e.what() << "\n";
        return exit_error;
    }
}

}  // namespace spdelab::cli
