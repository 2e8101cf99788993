#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chawkes/ergodicity.hpp"
#include "chawkes/estimate.hpp"
#include "chawkes/hawkes_core.hpp"
#include "chawkes/lob.hpp"
#include "chawkes/model.hpp"
#include "chawkes/parallel.hpp"

namespace {

constexpr const char* kToolVersion = "chawkes 0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitPositivity = 3;
constexpr int kExitTransient = 4;
constexpr int kExitInconclusive = 5;

using chawkes::ModelSpec;

int thread_count(int cli_threads) {
    // CHAWKES_THREADS wins over --threads.
    if (const char* env = std::getenv("CHAWKES_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    if (cli_threads > 0) return cli_threads;
    return chawkes::resolve_threads(0);
}

ModelSpec load_or_exit(const std::string& path) {
    try {
        return chawkes::load_spec_file(path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kExitValidation);
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        std::exit(kExitValidation);
    }
    out << content;
}

// The manifest lands on disk before any result file so an interrupted run
// can still be reproduced exactly. Thread count is omitted on purpose:
// results do not depend on it.
void write_manifest(const std::string& out_prefix, const std::string& command,
                    const ModelSpec& spec, const std::string& spec_path, std::uint64_t seed,
                    const nlohmann::json& params, const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["tool"] = kToolVersion;
    j["command"] = command;
    j["spec_path"] = spec_path;
    j["spec_hash"] = chawkes::spec_hash_hex(spec);
    j["seed"] = seed;
    j["params"] = params;
    j["outputs"] = outputs;
    write_file(out_prefix + ".manifest.json", j.dump(2) + "\n");
}

std::vector<int> parse_init_s(const std::string& text, int q) {
    std::vector<int> s(static_cast<std::size_t>(q), 1);
    if (text.empty()) return s;
    std::stringstream ss(text);
    std::string item;
    std::size_t k = 0;
    while (std::getline(ss, item, ',')) {
        if (k >= s.size()) throw std::invalid_argument("--init-s has more than q entries");
        s[k++] = std::stoi(item);
    }
    if (k != s.size()) throw std::invalid_argument("--init-s must have exactly q entries");
    for (int v : s)
        if (v < 1) throw std::invalid_argument("--init-s entries must be >= 1");
    return s;
}

chawkes::WeightFunction parse_weights(const std::string& text, const ModelSpec& spec) {
    if (text == "mid") {
        if (spec.p != 4)
            throw std::invalid_argument("weight alias 'mid' needs a p=4 model");
        return chawkes::lob_mid_weights();
    }
    chawkes::WeightFunction w;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) w.values.push_back(std::stod(item));
    if (w.values.size() != static_cast<std::size_t>(spec.p))
        throw std::invalid_argument("weight vector must have length p");
    return w;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
    return grid;
}

int run_simulate(const std::string& spec_path, std::optional<std::int64_t> events,
                 std::optional<double> horizon, std::uint64_t seed, const std::string& out_prefix,
                 const std::string& init_s, bool snapshots, bool price_series, double p0) {
    const ModelSpec spec = load_or_exit(spec_path);
    if (events.has_value() == horizon.has_value()) {
        std::cerr << "error: exactly one of --events / --horizon is required\n";
        return kExitValidation;
    }
    if (price_series && !chawkes::is_lob_shaped(spec)) {
        std::cerr << "error: --price-series needs a four-event order book model\n";
        return kExitValidation;
    }

    chawkes::ChainState init = chawkes::initial_state(spec);
    try {
        init.s = parse_init_s(init_s, spec.q);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    nlohmann::json params;
    if (events) params["events"] = *events;
    if (horizon) params["horizon"] = *horizon;
    params["init_s"] = init.s;
    params["snapshots"] = snapshots;
    const std::string csv_path = out_prefix + ".events.csv";
    std::vector<std::string> outputs = {csv_path};
    if (price_series) {
        params["p0"] = p0;
        outputs.push_back(out_prefix + ".mid.csv");
        outputs.push_back(out_prefix + ".spread.csv");
    }
    write_manifest(out_prefix, "simulate", spec, spec_path, seed, params, outputs);

    const chawkes::StopRule stop = events ? chawkes::StopRule::event_count(*events)
                                          : chawkes::StopRule::time_horizon(*horizon);
    try {
        const chawkes::EventLog log =
            chawkes::simulate(spec, init, stop, chawkes::SeedInfo{seed, 0}, snapshots);
        std::ofstream out(csv_path);
        chawkes::write_event_csv(log, spec, out);
        if (price_series) {
            std::ofstream mid(out_prefix + ".mid.csv");
            chawkes::write_price_csv(chawkes::mid_price_series(log, spec, p0), mid);
            std::ofstream spread(out_prefix + ".spread.csv");
            chawkes::write_price_csv(chawkes::spread_series(log, spec), spread);
        }
        std::cout << log.events.size() << " events -> " << csv_path << "\n";
    } catch (const chawkes::StatePositivityViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPositivity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

int run_check(const std::string& spec_path, int k_access, int max_len, std::int64_t mc_events,
              int reps, std::uint64_t seed, const std::string& out_prefix, int threads) {
    const ModelSpec spec = load_or_exit(spec_path);

    chawkes::CheckParams params;
    params.access_k = k_access;
    params.access_max_len = max_len;
    params.mc.events = mc_events;
    params.mc.replications = reps;
    params.mc.seed = seed;
    params.mc.threads = threads;

    nlohmann::json manifest_params{{"K", k_access},
                                   {"max_len", max_len},
                                   {"mc_events", mc_events},
                                   {"replications", reps}};
    write_manifest(out_prefix, "check", spec, spec_path, seed, manifest_params,
                   {out_prefix + ".report.json"});

    chawkes::ErgodicityReport report;
    try {
        report = chawkes::check_model(spec, params);
    } catch (const chawkes::StatePositivityViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPositivity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    std::cout << chawkes::report_to_text(report);
    write_file(out_prefix + ".report.json", chawkes::report_to_json(report));

    switch (report.classification) {
        case chawkes::Classification::GeometricallyErgodic: return kExitOk;
        case chawkes::Classification::Transient: return kExitTransient;
        default: return kExitInconclusive;
    }
}

int run_fclt(const std::string& spec_path, const std::string& w_text, double horizon, int reps,
             const std::string& grid_text, std::uint64_t seed, const std::string& out_prefix,
             bool force, int threads, std::int64_t check_events, int check_reps) {
    const ModelSpec spec = load_or_exit(spec_path);
    if (reps < 30) {
        std::cerr << "error: --reps must be at least 30 for the replication estimators\n";
        return kExitValidation;
    }

    chawkes::WeightFunction w;
    std::vector<double> grid;
    try {
        w = parse_weights(w_text, spec);
        grid = parse_grid(grid_text);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    if (!force) {
        chawkes::CheckParams cp;
        cp.mc.events = check_events;
        cp.mc.replications = check_reps;
        cp.mc.seed = seed;
        cp.mc.threads = threads;
        const chawkes::ErgodicityReport report = chawkes::check_model(spec, cp);
        if (report.classification != chawkes::Classification::GeometricallyErgodic) {
            std::cerr << "error: model not certified geometrically ergodic ("
                      << report.justification << "); rerun with --force to override\n";
            return kExitInconclusive;
        }
    }

    nlohmann::json params{{"w", w_text}, {"T", horizon}, {"reps", reps}, {"tgrid", grid_text},
                          {"force", force}};
    const std::string reps_path = out_prefix + ".reps.csv";
    const std::string diag_path = out_prefix + ".diagnostics.json";
    write_manifest(out_prefix, "fclt", spec, spec_path, seed, params, {reps_path, diag_path});

    chawkes::FcltParams fp;
    fp.horizon = horizon;
    fp.replications = reps;
    fp.t_grid = grid;
    fp.seed = seed;
    fp.threads = threads;

    try {
        const chawkes::FcltResult res =
            chawkes::fclt_experiment(spec, w, chawkes::initial_state(spec), fp);
        std::ofstream out(reps_path);
        chawkes::write_replication_csv(res, out);
        write_file(diag_path, chawkes::fclt_diagnostics_json(res));
        std::cout << "pilot E(w)=" << res.pilot.E_w
                  << " v(w)/E[Delta]=" << res.pilot.time_variance_rate()
                  << " endpoint var=" << res.endpoint_variance
                  << " KS p=" << res.endpoint_normality.p_value << "\n";
    } catch (const chawkes::StatePositivityViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPositivity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

int run_lob_demo(const std::string& spec_path, double horizon, int reps, std::uint64_t seed,
                 const std::string& out_prefix, bool force, int threads) {
    const ModelSpec spec = load_or_exit(spec_path);
    if (!chawkes::is_lob_shaped(spec)) {
        std::cerr << "error: spec is not a four-event order book model\n";
        return kExitValidation;
    }
    if (!force) {
        chawkes::CheckParams cp;
        cp.mc.seed = seed;
        cp.mc.threads = threads;
        const chawkes::ErgodicityReport report = chawkes::check_model(spec, cp);
        if (report.classification != chawkes::Classification::GeometricallyErgodic) {
            std::cerr << "error: model not certified geometrically ergodic ("
                      << report.justification << "); rerun with --force to override\n";
            return kExitInconclusive;
        }
    }

    nlohmann::json params{{"T", horizon}, {"reps", reps}};
    write_manifest(out_prefix, "lob-demo", spec, spec_path, seed, params,
                   {out_prefix + ".demo.json"});
    try {
        const chawkes::LobDemoReport rep =
            chawkes::mid_price_scaling_demo(spec, horizon, reps, seed, threads);
        write_file(out_prefix + ".demo.json", chawkes::lob_demo_to_json(rep));
        std::cout << chawkes::lob_demo_to_text(rep);
    } catch (const chawkes::StatePositivityViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPositivity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained Hawkes process simulator and analyzer"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: machine parallelism)");

    std::string spec_path;
    std::string out_prefix = "chawkes_run";
    std::uint64_t seed = 0;

    auto* sim = app.add_subcommand("simulate", "sample one event log");
    std::optional<std::int64_t> events;
    std::optional<double> horizon;
    std::string init_s;
    bool snapshots = false;
    bool price_series = false;
    double p0 = 100.0;
    sim->add_option("spec", spec_path, "model document (JSON)")->required();
    sim->add_option("--events", events, "stop after this many events");
    sim->add_option("--horizon", horizon, "stop at this time horizon");
    sim->add_option("--seed", seed, "master seed");
    sim->add_option("--out", out_prefix, "output prefix");
    sim->add_option("--init-s", init_s, "initial constraint vector, comma separated");
    sim->add_flag("--snapshots", snapshots, "record per-event state columns");
    sim->add_flag("--price-series", price_series,
                  "also write mid-price and spread CSVs (book models only)");
    sim->add_option("--p0", p0, "initial mid price for --price-series");

    auto* chk = app.add_subcommand("check", "ergodicity classification");
    int k_access = 5;
    int max_len = 0;
    std::int64_t mc_events = 200000;
    int mc_reps = 4;
    std::string chk_out = "chawkes_run";
    chk->add_option("spec", spec_path, "model document (JSON)")->required();
    chk->add_option("--K", k_access, "box size for the admissible-path search");
    chk->add_option("--max-len", max_len, "admissible-path length budget (0 = auto)");
    chk->add_option("--mc-events", mc_events, "post-burn-in events per Monte-Carlo run");
    chk->add_option("--reps", mc_reps, "Monte-Carlo replications per condition");
    chk->add_option("--seed", seed, "master seed");
    chk->add_option("--out", chk_out, "output prefix (writes report JSON)");

    auto* fc = app.add_subcommand("fclt", "scaling-limit replication experiment");
    std::string w_text = "mid";
    double fclt_T = 1000.0;
    int fclt_reps = 200;
    std::string grid_text = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
    bool force = false;
    fc->add_option("spec", spec_path, "model document (JSON)")->required();
    fc->add_option("--w", w_text, "weights: comma separated reals or 'mid'");
    fc->add_option("--T", fclt_T, "physical-time horizon per replication");
    fc->add_option("--reps", fclt_reps, "replications (minimum 30)");
    fc->add_option("--tgrid", grid_text, "grid of t fractions in [0,1]");
    fc->add_option("--seed", seed, "master seed");
    fc->add_option("--out", out_prefix, "output prefix");
    fc->add_flag("--force", force, "skip the ergodicity certification gate");

    auto* demo = app.add_subcommand("lob-demo", "mid-price diffusion demonstration");
    double demo_T = 2000.0;
    int demo_reps = 200;
    demo->add_option("spec", spec_path, "model document (JSON)")->required();
    demo->add_option("--T", demo_T, "horizon");
    demo->add_option("--reps", demo_reps, "replications");
    demo->add_option("--seed", seed, "master seed");
    demo->add_option("--out", out_prefix, "output prefix");
    demo->add_flag("--force", force, "skip the ergodicity certification gate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    const int nthreads = thread_count(threads);
    if (sim->parsed())
        return run_simulate(spec_path, events, horizon, seed, out_prefix, init_s, snapshots,
                            price_series, p0);
    if (chk->parsed())
        return run_check(spec_path, k_access, max_len, mc_events, mc_reps, seed, chk_out,
                         nthreads);
    if (fc->parsed())
        return run_fclt(spec_path, w_text, fclt_T, fclt_reps, grid_text, seed, out_prefix, force,
                        nthreads, mc_events, mc_reps);
    if (demo->parsed())
        return run_lob_demo(spec_path, demo_T, demo_reps, seed, out_prefix, force, nthreads);
    return kExitValidation;
}
