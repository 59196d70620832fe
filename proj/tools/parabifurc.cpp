#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "parabifurc/bifurcation.hpp"
#include "parabifurc/config.hpp"
#include "parabifurc/motions.hpp"
#include "parabifurc/parabolic.hpp"
#include "parabifurc/transversality.hpp"

using namespace parabifurc;

namespace {

constexpr int kExitDomain = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 64;

/// Raw flag values; applied on top of the config file after parsing.
struct Flags {
    std::string config;
    std::optional<std::string> family;
    std::vector<std::string> params;
    std::optional<double> newton_tol, class_tol, degeneracy_tol, lambda_eps;
    std::optional<std::string> t_range;
    std::optional<int> grid_n, threads;
    std::optional<std::string> output, format;

    std::vector<std::string> seeds;
    int period = 1;
    double alpha = 0.5;
    double radius = 0.05;
    double omega_r = 0.1;
    int flower_grid = 0;
    long budget = 10000;
    std::string raster;
    int N = 60;
    int lifts = 0;
    std::string csv;
    std::vector<double> rho;
    bool pitchfork = false;
    double to = 0.0;
    int q_max = 256;
    int burn = 900;
    int total = 1000;
    int keep = 100;
    int samples = 100;
    double eps = 1e-4;
    std::string pgm;
    int width = 800, height = 600;
    int validation_samples = 64;
};

RunConfig resolve(const std::string& command, const Flags& f) {
    RunConfig cfg;
    if (!f.config.empty()) cfg = load_config(f.config);
    cfg.command = command;
    if (f.family) cfg.family = *f.family;
    for (const auto& p : f.params) cfg.set_param(p);
    if (f.newton_tol) cfg.newton_tol = *f.newton_tol;
    if (f.class_tol) cfg.class_tol = *f.class_tol;
    if (f.degeneracy_tol) cfg.degeneracy_tol = *f.degeneracy_tol;
    if (f.lambda_eps) cfg.lambda_eps = *f.lambda_eps;
    if (f.t_range) cfg.t_range = parse_range(*f.t_range);
    if (f.grid_n) cfg.grid_n = *f.grid_n;
    if (f.threads) cfg.threads = *f.threads;
    if (f.output) cfg.output = *f.output;
    if (f.format) cfg.format = *f.format;
    cfg.validate();
    return cfg;
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output.empty() || cfg.output == "-")
        std::cout << text << std::flush;
    else
        write_text(cfg.output, text);
}

json envelope(const RunConfig& cfg, const AnalyticFamily& fam) {
    json j;
    j["command"] = cfg.command;
    j["family"] = fam.to_json();
    return j;
}

cplx require_parameter(const RunConfig& cfg) {
    if (!cfg.parameter) throw DomainError(cfg.command + " needs the family parameter, e.g. --param c=-0.5");
    return *cfg.parameter;
}

std::pair<double, double> require_range(const RunConfig& cfg) {
    if (!cfg.t_range) throw DomainError(cfg.command + " needs a parameter range, e.g. --t 2.5:4");
    return *cfg.t_range;
}

std::vector<cplx> parse_seeds(const std::vector<std::string>& s) {
    std::vector<cplx> out;
    for (const auto& x : s) out.push_back(parse_complex(x, "seed"));
    return out;
}

NewtonOptions newton(const RunConfig& cfg) {
    NewtonOptions o;
    o.tol = cfg.newton_tol;
    o.class_tol = cfg.class_tol;
    return o;
}

Cycle solve_cycle(const AnalyticFamily& fam, const RunConfig& cfg, const Flags& f) {
    const auto seeds = parse_seeds(f.seeds);
    if (static_cast<int>(seeds.size()) != f.period)
        throw DomainError("give one --seed per cycle point (" + std::to_string(f.period) + " expected, " +
                          std::to_string(seeds.size()) + " given)");
    return find_cycle(fam, require_parameter(cfg), f.period, seeds, newton(cfg));
}

int run_cycle(const RunConfig& cfg, const Flags& f) {
    const auto fam = cfg.make();
    json j = envelope(cfg, fam);
    j["cycle"] = solve_cycle(fam, cfg, f).to_json();
    emit(cfg, dump_json(j));
    return 0;
}

int run_transversality(const RunConfig& cfg, const Flags& f) {
    const auto fam = cfg.make();
    TransversalityOptions opt;
    opt.tol = cfg.degeneracy_tol;
    json j = envelope(cfg, fam);
    Cycle cyc;
    if (f.pitchfork) {
        if (!fam.odd) throw NotOdd(fam.id + " is not odd; --pitchfork needs an odd family");
        // Defaults locate the symmetric 2-cycle of w sin z near w = -2.26.
        const cplx w_seed = cfg.parameter.value_or(-2.26);
        std::vector<cplx> half = f.seeds.empty() ? std::vector<cplx>{-2.03} : parse_seeds(f.seeds);
        const auto [w, c] = find_symmetric_parabolic(fam, w_seed, half, 1.0, newton(cfg));
        j["w_star"] = cjson(w);
        cyc = c;
    } else {
        cyc = solve_cycle(fam, cfg, f);
    }
    j["report"] = transversality_report(fam, cyc, opt).to_json();
    emit(cfg, dump_json(j));
    return 0;
}

int run_petals(const RunConfig& cfg, const Flags& f) {
    const auto fam = cfg.make();
    const Cycle cyc = solve_cycle(fam, cfg, f);
    const auto g = petal_geometry(fam, cyc, f.alpha, f.radius);
    json j = envelope(cfg, fam);
    j["geometry"] = g.to_json();
    if (f.flower_grid > 0) {
        const auto rep = flower_escape_check(fam, cyc, g, f.omega_r, f.flower_grid, f.budget, cfg.threads);
        j["flower"] = rep.to_json();
        if (!f.raster.empty()) write_text(f.raster, pgm_bytes(f.flower_grid, f.flower_grid, rep.rasters.front()));
    }
    emit(cfg, dump_json(j));
    return 0;
}

int run_motion(const RunConfig& cfg, const Flags& f) {
    const auto fam = cfg.make();
    const cplx w = require_parameter(cfg);
    const auto lams = radial_lambdas(cfg.lambda_eps, cfg.lambda_eps * 1e-3);
    const auto h = speed_motion(fam, w, f.N, lams);
    json j = envelope(cfg, fam);
    const auto sf = speed_field(fam, w, f.N);
    j["speed_field"] = sf.to_json();
    j["speed_motion_order"] = invariance_order(fam, h).to_json();
    if (f.lifts > 0) {
        const auto a = average_of_lifts(fam, h, f.lifts, resolve_threads(cfg.threads));
        j["lifts"] = f.lifts;
        j["average_order"] = invariance_order(fam, a).to_json();
        if (!f.csv.empty()) write_text(f.csv, a.to_csv());
    } else if (!f.csv.empty()) {
        write_text(f.csv, h.to_csv());
    }
    emit(cfg, dump_json(j));
    return 0;
}

int run_drho(const RunConfig& cfg, const Flags& f) {
    const auto fam = cfg.make();
    const cplx w = require_parameter(cfg);
    std::vector<double> rhos = f.rho;
    if (rhos.empty())
        for (int k = 1; k <= 9; ++k) rhos.push_back(0.1 * k);
    json j = envelope(cfg, fam);
    json arr = json::array();
    bool any_bad = false;
    for (double r : rhos) {
        const auto rep = d_rho(fam, w, r, f.N);
        any_bad = any_bad || rep.non_positive;
        arr.push_back(rep.to_json());
    }
    j["series"] = arr;
    j["all_positive"] = !any_bad;
    emit(cfg, dump_json(j));
    return 0;
}

ScanOptions scan_options(const RunConfig& cfg, const Flags& f) {
    ScanOptions o;
    o.burn = f.burn;
    o.total = f.total;
    o.q_max = f.q_max;
    o.threads = cfg.threads;
    if (!f.seeds.empty()) o.seed = parse_real(f.seeds.front(), "seed");
    return o;
}

int run_scan(const RunConfig& cfg, const Flags& f) {
    const auto fam = cfg.make();
    const auto [lo, hi] = require_range(cfg);
    const auto s = scan(fam, lo, hi, cfg.grid_n, scan_options(cfg, f));
    if (cfg.format == "json") {
        json j = envelope(cfg, fam);
        json arr = json::array();
        for (const auto& p : s) arr.push_back(p.to_json());
        j["scan"] = arr;
        emit(cfg, dump_json(j));
    } else {
        emit(cfg, scan_to_csv(s));
    }
    return 0;
}

std::vector<AttractingWindow> windows_for(const AnalyticFamily& fam, const RunConfig& cfg, const Flags& f) {
    const auto [lo, hi] = require_range(cfg);
    WindowOptions wo;
    wo.samples = f.samples;
    return detect_windows(fam, scan(fam, lo, hi, cfg.grid_n, scan_options(cfg, f)), wo);
}

int run_windows(const RunConfig& cfg, const Flags& f) {
    const auto fam = cfg.make();
    json j = envelope(cfg, fam);
    json arr = json::array();
    for (const auto& w : windows_for(fam, cfg, f)) arr.push_back(w.to_json());
    j["windows"] = arr;
    emit(cfg, dump_json(j));
    return 0;
}

int run_events(const RunConfig& cfg, const Flags& f) {
    const auto fam = cfg.make();
    EventOptions eo;
    eo.eps = f.eps;
    eo.degeneracy_tol = cfg.degeneracy_tol;
    json j = envelope(cfg, fam);
    json arr = json::array();
    for (const auto& e : events_from_windows(fam, windows_for(fam, cfg, f), eo)) arr.push_back(e.to_json());
    j["events"] = arr;
    emit(cfg, dump_json(j));
    return 0;
}

int run_continue(const RunConfig& cfg, const Flags& f) {
    const auto fam = cfg.make();
    const Cycle start = solve_cycle(fam, cfg, f);
    const auto r = continue_right(fam, start, f.to);
    json j = envelope(cfg, fam);
    j["continuation"] = r.to_json();
    emit(cfg, dump_json(j));
    return r.survived ? 0 : kExitNumerical;
}

int run_diagram(const RunConfig& cfg, const Flags& f) {
    const auto fam = cfg.make();
    const auto [lo, hi] = require_range(cfg);
    DiagramOptions o;
    o.burn = f.burn;
    o.keep = f.keep;
    o.threads = cfg.threads;
    if (!f.seeds.empty()) o.seed = parse_real(f.seeds.front(), "seed");
    const auto d = diagram(fam, lo, hi, cfg.grid_n, o);
    if (!f.pgm.empty()) write_text(f.pgm, d.to_pgm(f.width, f.height));
    emit(cfg, d.to_csv());
    return 0;
}

int run_validate(const RunConfig& cfg, const Flags& f) {
    const auto fam = cfg.make();
    const auto rep = validate_family(fam, f.validation_samples);
    emit(cfg, dump_json(rep.to_json()));
    return rep.all_passed() ? 0 : kExitDomain;
}

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "key = value file; flags override its entries")->check(CLI::ExistingFile);
    sub->add_option("--family", f.family, "family id: quad, logistic, sine-mult, sine2-mult, exp-mult, flat-add");
    sub->add_option("--param", f.params,
                    "name=value; c, w or t set the family parameter (complex allowed, e.g. 0.1+0.2i), other "
                    "names are constructor parameters (quad: d; flat-add: b, l)");
    sub->add_option("--newton-tol", f.newton_tol, "relative Newton residual stop [1e-12]");
    sub->add_option("--class-tol", f.class_tol, "multiplier classification tolerance [1e-08]");
    sub->add_option("--degeneracy-tol", f.degeneracy_tol, "transversality / fold degeneracy tolerance [1e-08]");
    sub->add_option("--threads", f.threads, "worker threads; 0 uses PARABIFURC_THREADS or all cores [0]");
    sub->add_option("--out", f.output, "output file; stdout when omitted");
}

void add_cycle_input(CLI::App* sub, Flags& f) {
    sub->add_option("--period", f.period, "cycle period q")->capture_default_str();
    sub->add_option("--seed", f.seeds, "seed point(s), one per cycle point; comma separated or repeated")
        ->delimiter(',')
        ->allow_extra_args(false);
}

void add_range(CLI::App* sub, Flags& f) {
    sub->add_option("--t", f.t_range, "parameter range lo:hi (write --t=-10:10 for a negative lower bound)");
    sub->add_option("--grid-n", f.grid_n, "number of grid parameters [201]");
}

std::string markdown_reference(const CLI::App& app) {
    std::ostringstream md;
    md << "# parabifurc command reference\n\n";
    md << app.get_description() << "\n\n";
    md << "Exit codes: 0 success, 2 domain or validation error, 3 numerical failure, 64 usage error.\n\n";
    md << "The thread count falls back to the `PARABIFURC_THREADS` environment variable.\n\n";
    for (const CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        md << "## " << sub->get_name() << "\n\n" << sub->get_description() << "\n\n";
        md << "| option | description | default |\n|---|---|---|\n";
        for (const CLI::Option* o : sub->get_options()) {
            if (o->get_name() == "--help") continue;
            std::string name = o->get_name();
            std::string def = o->get_default_str();
            md << "| `" << name << "` | " << o->get_description() << " | " << (def.empty() ? "" : "`" + def + "`")
               << " |\n";
        }
        md << "\n";
    }
    return md.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cycles, transversality, parabolic geometry, holomorphic-motion truncations and real bifurcations "
                 "of one-parameter analytic families."};
    app.require_subcommand(0, 1);
    bool reference = false;
    app.add_flag("--markdown-reference", reference, "print the command reference as Markdown and exit");
    Flags f;
    std::string chosen;

    auto sub = [&](const std::string& name, const std::string& desc) {
        CLI::App* s = app.add_subcommand(name, desc);
        add_common(s, f);
        s->callback([&chosen, name] { chosen = name; });
        return s;
    };

    auto* cycle = sub("cycle", "Newton-solve a periodic cycle and classify it (JSON).");
    add_cycle_input(cycle, f);

    auto* trans = sub("transversality", "Q, Q', D^2 g^q, kappa' and the transversality verdict of a cycle (JSON).");
    add_cycle_input(trans, f);
    trans->add_flag("--pitchfork", f.pitchfork,
                    "locate the symmetric parabolic cycle of an odd family instead; --seed gives the half cycle "
                    "(default -2.03 with parameter -2.26)");

    auto* petals = sub("petals", "Leau-Fatou directions at a parabolic cycle, optionally the flower check (JSON).");
    add_cycle_input(petals, f);
    petals->add_option("--alpha", f.alpha, "cusp exponent in (0,1)")->capture_default_str();
    petals->add_option("--radius", f.radius, "cusp radius tau")->capture_default_str();
    petals->add_option("--flower-grid", f.flower_grid, "grid size of the flower check; 0 skips it")->capture_default_str();
    petals->add_option("--omega-r", f.omega_r, "radius r of Omega_r in the flower check")->capture_default_str();
    petals->add_option("--budget", f.budget, "iteration budget per grid point")->capture_default_str();
    petals->add_option("--raster", f.raster, "PGM file for the classification raster of the first cycle point");

    auto* motion = sub("motion", "Speed-field motion, its invariance order and averaged lifts (JSON, optional CSV).");
    motion->add_option("--N", f.N, "marked orbit points in the support")->capture_default_str();
    motion->add_option("--lifts", f.lifts, "average the motion with this many successive lifts")->capture_default_str();
    motion->add_option("--lambda-eps", f.lambda_eps, "largest |lambda| of the radial samples [0.01]");
    motion->add_option("--csv", f.csv, "CSV file for the (averaged) truncation");

    auto* drho = sub("drho", "Partial sums of D(rho) with tail bounds (JSON).");
    drho->add_option("--rho", f.rho, "rho values in (0,1); default 0.1, 0.2, ..., 0.9")->delimiter(',');
    drho->add_option("--N", f.N, "number of series terms")->capture_default_str();

    auto add_scan_opts = [&](CLI::App* s) {
        add_range(s, f);
        s->add_option("--seed", f.seeds, "orbit seed; default the critical point")->expected(1);
        s->add_option("--q-max", f.q_max, "largest detected period")->capture_default_str();
        s->add_option("--burn", f.burn, "transient iterations")->capture_default_str();
        s->add_option("--total", f.total, "iterations including the transient")->capture_default_str();
    };
    auto* scan_cmd = sub("scan", "Attractor period and multiplier over a parameter grid (CSV, or JSON with --format json).");
    add_scan_opts(scan_cmd);
    scan_cmd->add_option("--format", f.format, "csv or json [csv]");

    auto* windows = sub("windows", "Attracting windows with bisected edges and multiplier samples (JSON).");
    add_scan_opts(windows);
    windows->add_option("--samples", f.samples, "multiplier samples per window")->capture_default_str();

    auto* events = sub("events", "Saddle-node, period-doubling and pitchfork events at window edges (JSON).");
    add_scan_opts(events);
    events->add_option("--samples", f.samples, "multiplier samples per window")->capture_default_str();
    events->add_option("--eps", f.eps, "first census offset |t - t*|")->capture_default_str();

    auto* cont = sub("continue", "Continue a real cycle to a target parameter (JSON; exit 3 if the branch dies).");
    add_cycle_input(cont, f);
    cont->add_option("--to", f.to, "target parameter")->required();

    auto* diag = sub("diagram", "Bifurcation diagram point cloud (CSV t,x; optional PGM raster).");
    add_range(diag, f);
    diag->add_option("--seed", f.seeds, "orbit seed, e.g. pi/2; default the critical point")->expected(1);
    diag->add_option("--burn", f.burn, "discarded iterations")->capture_default_str();
    diag->add_option("--keep", f.keep, "kept iterations per parameter")->capture_default_str();
    diag->add_option("--pgm", f.pgm, "PGM raster file");
    diag->add_option("--width", f.width, "raster width")->capture_default_str();
    diag->add_option("--height", f.height, "raster height")->capture_default_str();

    auto* validate = sub("validate", "Spot-check the declared family flags (JSON; exit 2 on a failed check).");
    validate->add_option("--samples", f.validation_samples, "random sample points")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    if (reference) {
        std::cout << markdown_reference(app);
        return 0;
    }
    if (chosen.empty()) {
        std::cerr << app.help();
        return kExitUsage;
    }

    try {
        const RunConfig cfg = resolve(chosen, f);
        if (chosen == "cycle") return run_cycle(cfg, f);
        if (chosen == "transversality") return run_transversality(cfg, f);
        if (chosen == "petals") return run_petals(cfg, f);
        if (chosen == "motion") return run_motion(cfg, f);
        if (chosen == "drho") return run_drho(cfg, f);
        if (chosen == "scan") return run_scan(cfg, f);
        if (chosen == "windows") return run_windows(cfg, f);
        if (chosen == "events") return run_events(cfg, f);
        if (chosen == "continue") return run_continue(cfg, f);
        if (chosen == "diagram") return run_diagram(cfg, f);
        if (chosen == "validate") return run_validate(cfg, f);
    } catch (const Error& e) {
        std::cerr << "parabifurc " << chosen << ": " << e.what() << "\n";
        return e.kind() == ErrorKind::Domain ? kExitDomain : kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "parabifurc " << chosen << ": " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
