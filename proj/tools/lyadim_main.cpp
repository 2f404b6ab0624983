// lyadim: finite-time Lyapunov exponents, Kaplan-Yorke dimensions, exact
// dimension formulas and attractor classification for the benchmark catalog.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure,
// 4 verification failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lyadim/atlas.hpp"
#include "lyadim/errors.hpp"
#include "lyadim/exact.hpp"
#include "lyadim/flow.hpp"
#include "lyadim/lyap.hpp"
#include "lyadim/report.hpp"
#include "lyadim/smallmat.hpp"
#include "lyadim/systems.hpp"
#include "lyadim/verify.hpp"

namespace {

using namespace lyadim;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerification = 4;

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + ": invalid number '" + text + "'");
    }
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
    std::map<std::string, double> out;
    for (const std::string& item : items) {
        std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--params expects name=value, got '" + item + "'");
        out[item.substr(0, eq)] = parse_number(item.substr(eq + 1), "--params " + item);
    }
    return out;
}

std::vector<double> parse_seed(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string tok =
            comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
        out.push_back(parse_number(tok, "--seed"));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

Vec to_vec(const std::vector<double>& v) {
    Vec out(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
    return out;
}

int jobs_from_env() {
    const char* env = std::getenv("LYADIM_JOBS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1)
        throw ConfigError(std::string("LYADIM_JOBS must be a positive integer, got '") + env +
                          "'");
    return static_cast<int>(v);
}

// Flags shared by the computing subcommands; mirrors RunConfig so a config
// file value is used unless the flag of the same name was passed.
struct FlagSet {
    std::string config_path;
    std::string system;
    std::vector<std::string> params;
    std::string seed;
    double seg_len = 0.0;
    int n_factors = 0;
    int sweeps = 0;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    double initial_step = 0.0;
    double transient = 0.0;
    int grid = 0;
    int jobs = 0;
    bool json = false;
    std::string svg;
};

void attach_flags(CLI::App* cmd, FlagSet& f) {
    cmd->add_option("--config", f.config_path, "JSON config file (flat schema)");
    cmd->add_option("--system", f.system, "catalog system id (see `lyadim systems`)");
    cmd->add_option("--params", f.params, "parameter overrides, name=value");
    cmd->add_option("--seed", f.seed, "initial state, comma-separated");
    cmd->add_option("--seg-len", f.seg_len, "segment length (flows: time, maps: iterations)");
    cmd->add_option("--n-factors", f.n_factors, "number of chain segments");
    cmd->add_option("--sweeps", f.sweeps, "product SVD sweep count");
    cmd->add_option("--rel-tol", f.rel_tol, "integrator relative tolerance");
    cmd->add_option("--abs-tol", f.abs_tol, "integrator absolute tolerance");
    cmd->add_option("--initial-step", f.initial_step, "integrator initial step");
    cmd->add_option("--transient", f.transient, "settling time dropped before sampling");
    cmd->add_option("--grid", f.grid, "number of sweep grid points");
    cmd->add_option("--jobs", f.jobs, "worker threads (default: LYADIM_JOBS or 1)");
    cmd->add_flag("--json", f.json, "machine-readable JSON output");
    cmd->add_option("--svg", f.svg, "write an SVG scatter of the attractor sample");
}

RunConfig build_config(const CLI::App* cmd, const FlagSet& f) {
    RunConfig c;
    bool seg_len_given = cmd->count("--seg-len") > 0;
    if (cmd->count("--config")) {
        std::ifstream in(f.config_path);
        if (!in) throw ConfigError("config: cannot read '" + f.config_path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw ConfigError("config: " + std::string(e.what()));
        }
        c = run_config_from_json(j);
        seg_len_given = seg_len_given || j.contains("seg_len");
    }
    if (cmd->count("--system")) c.system = f.system;
    if (cmd->count("--params"))
        for (const auto& [k, v] : parse_params(f.params)) c.params[k] = v;
    if (cmd->count("--seed")) c.seed = parse_seed(f.seed);
    if (cmd->count("--seg-len")) c.seg_len = f.seg_len;
    if (cmd->count("--n-factors")) c.n_factors = f.n_factors;
    if (cmd->count("--sweeps")) c.sweeps = f.sweeps;
    if (cmd->count("--rel-tol")) c.rel_tol = f.rel_tol;
    if (cmd->count("--abs-tol")) c.abs_tol = f.abs_tol;
    if (cmd->count("--initial-step")) c.initial_step = f.initial_step;
    if (cmd->count("--transient")) c.transient = f.transient;
    if (cmd->count("--grid")) c.grid = f.grid;
    if (cmd->count("--json")) c.json = true;
    if (cmd->count("--svg")) c.svg = f.svg;

    int env_jobs = jobs_from_env();
    if (cmd->count("--jobs"))
        c.jobs = f.jobs;
    else if (env_jobs > 0)
        c.jobs = env_jobs;

    // Map chains default to one iteration per segment unless asked otherwise.
    if (!seg_len_given) {
        auto id = SystemSpec::parse_id(c.system);
        if (id && SystemSpec::info(*id).kind == SystemKind::map) c.seg_len = 1.0;
    }
    return c;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << content;
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

int cmd_systems(bool json) {
    if (json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const SystemInfo& info : SystemSpec::catalog()) {
            nlohmann::json params = nlohmann::json::array();
            for (const ParamInfo& p : info.params)
                params.push_back(nlohmann::json{
                    {"name", p.name}, {"default", p.default_value}, {"constraint", p.constraint}});
            arr.push_back(nlohmann::json{{"name", info.name},
                                         {"kind", info.kind == SystemKind::flow ? "flow" : "map"},
                                         {"dim", info.dim},
                                         {"params", params}});
        }
        std::cout << arr.dump(2) << "\n";
        return kExitOk;
    }
    for (const SystemInfo& info : SystemSpec::catalog()) {
        std::cout << info.name << " (" << (info.kind == SystemKind::flow ? "flow" : "map")
                  << ", dim " << info.dim << "):";
        for (const ParamInfo& p : info.params)
            std::cout << " " << p.name << "=" << format_double(p.default_value) << " ["
                      << p.constraint << "]";
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_les(const RunConfig& cfg) {
    SystemSpec spec = validate(cfg);
    IntegratorConfig icfg = integrator_config(cfg);
    Vec seed = cfg.seed.empty() ? spec.default_seed() : to_vec(cfg.seed);
    FtLeSpectrum sp = finite_time_les(spec, seed, cfg.seg_len, cfg.n_factors, cfg.sweeps, icfg);
    KyDimension ky = kaplan_yorke(sp.les);
    if (cfg.json)
        std::cout << to_json(sp, ky).dump(2) << "\n";
    else
        std::cout << les_csv(sp, ky, spec.kind());
    return kExitOk;
}

int cmd_exact(const RunConfig& cfg) {
    SystemSpec spec = validate(cfg);
    ExactDimReport rep = [&] {
        switch (spec.id()) {
        case SystemId::lorenz:
            return lorenz_exact(spec.param("sigma"), spec.param("r"), spec.param("b"));
        case SystemId::generalized_lorenz:
            return gd_exact(spec.param("sigma"), spec.param("r"), spec.param("b"),
                            spec.param("A"));
        case SystemId::glukhovsky_dolzhansky: {
            GenLorenzParams p = gd_to_generalized_lorenz(spec.param("sigma"), spec.param("R"),
                                                         spec.param("a0"));
            return gd_exact(p.sigma, p.r, p.b, p.A);
        }
        case SystemId::yang:
            return yang_exact(spec.param("sigma"), spec.param("r"), spec.param("b"));
        case SystemId::tigan: {
            YangParams p = tigan_to_yang(spec.param("a"), spec.param("b"), spec.param("c"));
            return yang_exact(p.sigma, p.r, p.b);
        }
        case SystemId::shimizu_morioka:
        case SystemId::shimizu_morioka_transformed:
            return shimizu_morioka_exact(spec.param("alpha"), spec.param("lambda"));
        case SystemId::henon:
            return henon_exact(spec.param("a"), spec.param("b"));
        }
        throw ConfigError("exact: unknown system");
    }();
    std::cout << to_json(rep).dump(2) << "\n";
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, double trial_transient, double trial_time,
              double epsilon_scale, double delta_attr) {
    SystemSpec spec = validate(cfg);
    IntegratorConfig icfg = integrator_config(cfg);
    Vec seed = cfg.seed.empty() ? spec.default_seed() : to_vec(cfg.seed);
    const bool is_map = spec.kind() == SystemKind::map;
    const double sample_every = 1.0;

    AttractorSample sample = settle(spec, seed, cfg.transient,
                                    static_cast<double>(cfg.grid) * sample_every, sample_every,
                                    icfg);
    if (sample.classification == AttractorClass::unbounded) {
        std::cerr << "sweep: trajectory unbounded: " << sample.reason << "\n";
        return kExitNumeric;
    }
    if (sample.classification == AttractorClass::pending) {
        ClassifyOptions copt;
        copt.trial_transient = trial_transient;
        copt.trial_time = trial_time;
        copt.sample_every = is_map ? 1.0 : 0.25;
        copt.epsilon_scale = epsilon_scale;
        copt.delta_attr = delta_attr;
        copt.jobs = cfg.jobs;
        sample = classify_excitation(spec, std::move(sample), copt, icfg);
    }

    std::vector<Vec> pts = grid_points(sample, cfg.grid);
    SweepResult res =
        sweep_max_dimension(spec, pts, cfg.seg_len, cfg.n_factors, cfg.sweeps, icfg, cfg.jobs);

    if (!cfg.svg.empty()) {
        int iy = spec.dim() >= 3 ? 2 : 1;
        write_file(cfg.svg, svg_scatter(sample.points, 0, iy,
                                        cfg.system + " attractor sample"));
    }
    if (cfg.json) {
        nlohmann::json out{{"classification", to_json(sample, false)}, {"sweep", to_json(res)}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << sweep_csv(res);
        std::cerr << "classification: " << to_string(sample.classification)
                  << ", max d = " << format_double(res.max_dim.d) << " at grid index "
                  << res.argmax_index << "\n";
    }
    return kExitOk;
}

int cmd_verify(bool fast, int jobs, bool json) {
    AcceptanceOptions opt;
    opt.fast = fast;
    opt.jobs = jobs;
    std::vector<CriterionResult> results = run_acceptance(opt);
    if (json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const CriterionResult& r : results)
            arr.push_back(nlohmann::json{{"index", r.index},
                                         {"name", r.name},
                                         {"passed", r.passed},
                                         {"skipped", r.skipped},
                                         {"seconds", r.seconds},
                                         {"detail", r.detail}});
        std::cout << arr.dump(2) << "\n";
    } else {
        std::cout << acceptance_report(results);
    }
    return all_passed(results) ? kExitOk : kExitVerification;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lyapunov dimension toolkit for benchmark flows and maps"};
    app.require_subcommand(1);

    CLI::App* systems = app.add_subcommand("systems", "list the system catalog");
    bool systems_json = false;
    systems->add_flag("--json", systems_json, "machine-readable JSON output");

    CLI::App* les = app.add_subcommand("les", "finite-time Lyapunov exponents and KY dimension");
    FlagSet les_flags;
    attach_flags(les, les_flags);

    CLI::App* exact = app.add_subcommand("exact", "closed-form Lyapunov dimension report");
    FlagSet exact_flags;
    attach_flags(exact, exact_flags);

    CLI::App* sweep =
        app.add_subcommand("sweep", "settle, classify, and sweep dimensions over a grid");
    FlagSet sweep_flags;
    attach_flags(sweep, sweep_flags);
    double trial_transient = 300.0, trial_time = 100.0, epsilon_scale = 1e-3, delta_attr = 1.0;
    sweep->add_option("--trial-transient", trial_transient,
                      "settling time for each excitation trial");
    sweep->add_option("--trial-time", trial_time, "sampled time per excitation trial");
    sweep->add_option("--trial-radius", epsilon_scale,
                      "trial radius scale around each equilibrium");
    sweep->add_option("--delta-attr", delta_attr, "attracted-cloud distance threshold");

    CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
    bool fast = false, verify_json = false;
    int verify_jobs = 0;
    verify->add_flag("--fast", fast, "skip the long attractor sweep");
    verify->add_flag("--json", verify_json, "machine-readable JSON output");
    verify->add_option("--jobs", verify_jobs, "worker threads (default: LYADIM_JOBS or 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (systems->parsed()) return cmd_systems(systems_json);
        if (les->parsed()) return cmd_les(build_config(les, les_flags));
        if (exact->parsed()) return cmd_exact(build_config(exact, exact_flags));
        if (sweep->parsed())
            return cmd_sweep(build_config(sweep, sweep_flags), trial_transient, trial_time,
                             epsilon_scale, delta_attr);
        if (verify->parsed()) {
            int jobs = verify_jobs;
            if (!verify->count("--jobs")) {
                int env_jobs = jobs_from_env();
                jobs = env_jobs > 0 ? env_jobs : 1;
            }
            return cmd_verify(fast, jobs, verify_json);
        }
        std::cerr << "no subcommand\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
