#include "chawkes/lob.hpp"

#include <cstdio>
#include <cmath>
#include <ostream>
#include <sstream>

#include "chawkes/parallel.hpp"
#include "json.hpp"

namespace chawkes {

bool is_lob_shaped(const ModelSpec& spec) {
    if (spec.p != 4 || spec.q != 1) return false;
    const std::vector<std::vector<int>> jumps = {{1}, {-1}, {-1}, {1}};
    if (spec.jumps != jumps) return false;
    for (int i : {2, 3}) {
        const ConstraintSet& comp =
            spec.constraints[static_cast<std::size_t>(i - 1)][0];
        if (comp != ConstraintSet{1}) return false;
    }
    return spec.constraints[0][0].empty() && spec.constraints[3][0].empty();
}

namespace {

void require_lob_shape(const ModelSpec& spec, const char* who) {
    if (!is_lob_shaped(spec))
        throw SpecShapeMismatch(std::string(who) +
                                ": spec is not a four-event order book model");
}

PriceSeries weighted_series(const EventLog& log, const WeightFunction& w, double start,
                            double tick) {
    PriceSeries series;
    series.tick = tick;
    series.times.reserve(log.events.size() + 1);
    series.values.reserve(log.events.size() + 1);
    series.times.push_back(log.initial.t);
    series.values.push_back(start);
    double value = start;
    for (const Event& ev : log.events) {
        value += w.at(ev.mark);
        series.times.push_back(ev.time);
        series.values.push_back(value);
    }
    return series;
}

} // namespace

PriceSeries mid_price_series(const EventLog& log, const ModelSpec& spec, double p0, double tick) {
    require_lob_shape(spec, "mid_price_series");
    return weighted_series(log, lob_mid_weights(), p0, tick);
}

PriceSeries spread_series(const EventLog& log, const ModelSpec& spec) {
    require_lob_shape(spec, "spread_series");
    return weighted_series(log, lob_spread_weights(),
                           static_cast<double>(log.initial.s.at(0)), 1.0);
}

void write_price_csv(const PriceSeries& series, std::ostream& out) {
    out << "time,value\n";
    char buf[80];
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", series.times[i], series.values[i]);
        out << buf << "\n";
    }
}

LobDemoReport mid_price_scaling_demo(const ModelSpec& spec, double horizon, int replications,
                                     std::uint64_t seed, int threads) {
    require_lob_shape(spec, "mid_price_scaling_demo");
    if (replications < 8)
        throw std::invalid_argument("mid_price_scaling_demo: need at least 8 replications");

    LobDemoReport rep;
    rep.horizon = horizon;
    rep.replications = replications;

    FcltParams params;
    params.horizon = horizon;
    params.replications = replications;
    params.t_grid = {0.25, 0.5, 0.75, 1.0};
    params.seed = seed;
    params.threads = threads;
    // The demo quotes the diffusion coefficient, so tighten the batch-means
    // spread (se/v ~ sqrt(2/batches)) beyond the general-purpose default.
    params.pilot_batches = 256;
    rep.fclt = fclt_experiment(spec, lob_mid_weights(), initial_state(spec), params);

    rep.diffusion_coefficient = rep.fclt.pilot.time_variance_rate();
    rep.diffusion_se = rep.fclt.pilot.v_w_se / rep.fclt.pilot.mean_delta;
    rep.endpoint_variance = rep.fclt.endpoint_variance;
    rep.ks_p_value = rep.fclt.endpoint_normality.p_value;
    rep.endpoint_skewness = rep.fclt.endpoint_skewness;
    rep.endpoint_skewness_se = rep.fclt.endpoint_skewness_se;

    // Drift and spread scaling from a second wave of paths; the spread is
    // sampled at horizon/4 and horizon on the same path.
    const std::size_t reps = static_cast<std::size_t>(replications);
    std::vector<double> drift(reps, 0.0);
    std::vector<double> spread_quarter(reps, 0.0);
    std::vector<double> spread_full(reps, 0.0);
    const WeightFunction w_mid = lob_mid_weights();
    parallel_for_index(reps, threads, [&](std::size_t r) {
        ChainSimulator sim(spec, initial_state(spec),
                           SeedInfo{seed, static_cast<std::uint64_t>(reps + 1 + r)});
        double mid = 0.0;
        double spread_now = static_cast<double>(sim.state().s[0]);
        bool got_quarter = false;
        while (true) {
            const Event ev = sim.next();
            // S is constant between events, so the pre-event value rules at
            // any sampling time the event jumped over.
            if (!got_quarter && ev.time > horizon / 4.0) {
                spread_quarter[r] = spread_now;
                got_quarter = true;
            }
            if (ev.time > horizon) break;
            mid += w_mid.at(ev.mark);
            spread_now = static_cast<double>(sim.state().s[0]);
        }
        spread_full[r] = spread_now;
        drift[r] = mid / horizon;
    });

    rep.drift_mean = mean(drift);
    rep.drift_se = std::sqrt(variance(drift, 1) / static_cast<double>(reps));

    auto scaled_var = [](std::vector<double>& x, double t) {
        const double m = mean(x);
        for (double& v : x) v = (v - m) / std::sqrt(t);
        return variance(x, 1);
    };
    rep.spread_scaling_var_quarter = scaled_var(spread_quarter, horizon / 4.0);
    rep.spread_scaling_var_full = scaled_var(spread_full, horizon);
    return rep;
}

std::string lob_demo_to_json(const LobDemoReport& report) {
    nlohmann::json j;
    j["horizon"] = report.horizon;
    j["replications"] = report.replications;
    j["drift"] = {{"mean", report.drift_mean}, {"se", report.drift_se}};
    j["diffusion"] = {{"coefficient", report.diffusion_coefficient},
                      {"se", report.diffusion_se}};
    j["endpoint"] = {{"variance", report.endpoint_variance},
                     {"ks_p_value", report.ks_p_value},
                     {"skewness", report.endpoint_skewness},
                     {"skewness_se", report.endpoint_skewness_se}};
    j["spread_scaling_variance"] = {{"quarter_horizon", report.spread_scaling_var_quarter},
                                    {"full_horizon", report.spread_scaling_var_full}};
    j["pilot"] = {{"E_w", report.fclt.pilot.E_w},
                  {"mean_delta", report.fclt.pilot.mean_delta},
                  {"v_w_per_step", report.fclt.pilot.v_w}};
    return j.dump(2) + "\n";
}

std::string lob_demo_to_text(const LobDemoReport& report) {
    std::ostringstream os;
    os << "horizon                    " << report.horizon << "\n";
    os << "replications               " << report.replications << "\n";
    os << "mid drift E(w)             " << report.drift_mean << " +- " << report.drift_se
       << "\n";
    os << "diffusion v(w)/E[Delta]    " << report.diffusion_coefficient << " +- "
       << report.diffusion_se << "\n";
    os << "endpoint variance          " << report.endpoint_variance << "\n";
    os << "endpoint normality KS p    " << report.ks_p_value << "\n";
    os << "endpoint skewness          " << report.endpoint_skewness << " (se "
       << report.endpoint_skewness_se << ")\n";
    os << "spread var at T/4          " << report.spread_scaling_var_quarter << "\n";
    os << "spread var at T            " << report.spread_scaling_var_full << "\n";
    return os.str();
}

} // namespace chawkes
