#include "chawkes/estimate.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <ostream>

#include "chawkes/parallel.hpp"
#include "json.hpp"

namespace chawkes {

std::pair<double, double> estimate_E(const EventLog& log, const WeightFunction& w) {
    if (log.events.empty()) throw std::invalid_argument("estimate_E: empty log");
    if (w.values.size() != log.initial.lambda.size())
        throw std::invalid_argument("estimate_E: weight length mismatch");
    double sum = 0.0;
    for (const Event& ev : log.events) sum += w.at(ev.mark);
    const double t_n = log.events.back().time - log.initial.t;
    return {sum / t_n, t_n / static_cast<double>(log.events.size())};
}

std::pair<double, double> estimate_v(const EventLog& log, const WeightFunction& w, double E_w,
                                     int batches) {
    if (batches < 2) throw std::invalid_argument("estimate_v: need at least 2 batches");
    const std::int64_t n = static_cast<std::int64_t>(log.events.size());
    if (n < 20LL * batches)
        throw std::invalid_argument("estimate_v: insufficient data, need >= 20 events per batch");

    const std::int64_t len = n / batches;
    std::vector<double> sums(static_cast<std::size_t>(batches), 0.0);
    for (int b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::int64_t k = b * len; k < (b + 1) * len; ++k) {
            const Event& ev = log.events[static_cast<std::size_t>(k)];
            s += w.at(ev.mark) - E_w * ev.delta;
        }
        sums[static_cast<std::size_t>(b)] = s;
    }
    const double v = variance(sums, 1) / static_cast<double>(len);
    // chi-square spread of a variance estimate on `batches` batches
    const double se = v * std::sqrt(2.0 / (batches - 1));
    return {v, se};
}

ScalingEstimate scaling_estimate(const EventLog& log, const WeightFunction& w, int batches) {
    ScalingEstimate est;
    std::tie(est.E_w, est.mean_delta) = estimate_E(log, w);
    std::tie(est.v_w, est.v_w_se) = estimate_v(log, w, est.E_w, batches);
    est.batches = batches;
    est.batch_len = static_cast<std::int64_t>(log.events.size()) / batches;
    return est;
}

FcltResult fclt_experiment(const ModelSpec& spec, const WeightFunction& w,
                           const ChainState& init, const FcltParams& params) {
    if (!(params.horizon > 0.0)) throw std::invalid_argument("fclt_experiment: horizon must be > 0");
    if (params.replications < 8)
        throw std::invalid_argument(
            "fclt_experiment: need at least 8 replications for the diagnostics");
    if (params.t_grid.empty() ||
        !std::is_sorted(params.t_grid.begin(), params.t_grid.end()) ||
        params.t_grid.front() < 0.0 || params.t_grid.back() > 1.0)
        throw std::invalid_argument("fclt_experiment: t_grid must be increasing within [0,1]");

    FcltResult res;
    res.t_grid = params.t_grid;

    // Pilot run on stream 0, an order of magnitude longer than the experiment,
    // freezes the centering rate so replications stay independent of it. The
    // batch count is capped by the realized pilot length; the estimate
    // reports the count actually used.
    {
        const EventLog pilot = simulate(spec, init,
                                        StopRule::time_horizon(params.pilot_factor *
                                                               params.horizon),
                                        SeedInfo{params.seed, 0});
        const int batches = std::max(
            2, std::min<int>(params.pilot_batches,
                             static_cast<int>(pilot.events.size() / 20)));
        res.pilot = scaling_estimate(pilot, w, batches);
    }

    const double T = params.horizon;
    const double sqrt_T = std::sqrt(T);
    const double E_pilot = res.pilot.E_w;
    const std::size_t grid_n = params.t_grid.size();
    const std::size_t reps = static_cast<std::size_t>(params.replications);

    res.values.assign(reps, std::vector<double>(grid_n, 0.0));
    parallel_for_index(reps, params.threads, [&](std::size_t r) {
        ChainSimulator sim(spec, init, SeedInfo{params.seed, static_cast<std::uint64_t>(r) + 1});
        std::vector<double>& row = res.values[r];
        double cum = 0.0;
        std::size_t g = 0;
        while (g < grid_n) {
            const Event ev = sim.next();
            while (g < grid_n && ev.time > params.t_grid[g] * T) {
                row[g] = (cum - params.t_grid[g] * T * E_pilot) / sqrt_T;
                ++g;
            }
            if (g >= grid_n) break;
            cum += w.at(ev.mark);
        }
    });

    res.per_t_variance.assign(grid_n, 0.0);
    std::vector<double> col(reps, 0.0);
    for (std::size_t g = 0; g < grid_n; ++g) {
        for (std::size_t r = 0; r < reps; ++r) col[r] = res.values[r][g];
        res.per_t_variance[g] = variance(col, 1);
    }

    std::vector<double> endpoint(reps, 0.0);
    for (std::size_t r = 0; r < reps; ++r) endpoint[r] = res.values[r][grid_n - 1];
    res.endpoint_mean = mean(endpoint);
    res.endpoint_variance = variance(endpoint, 1);
    res.endpoint_skewness = sample_skewness(endpoint);
    res.endpoint_skewness_se = skewness_se(reps);
    res.endpoint_normality = ks_test_normality(endpoint);

    // Correlation between consecutive grid increments; near zero for a
    // Brownian limit with independent increments.
    std::vector<double> prev(reps), cur(reps);
    for (std::size_t g = 2; g < grid_n; ++g) {
        for (std::size_t r = 0; r < reps; ++r) {
            prev[r] = res.values[r][g - 1] - res.values[r][g - 2];
            cur[r] = res.values[r][g] - res.values[r][g - 1];
        }
        res.increment_correlations.push_back(pearson_correlation(prev, cur));
    }
    for (double c : res.increment_correlations)
        res.max_increment_correlation = std::max(res.max_increment_correlation, std::abs(c));
    return res;
}

void write_replication_csv(const FcltResult& result, std::ostream& out) {
    out << "rep,t,value\n";
    char buf[64];
    for (std::size_t r = 0; r < result.values.size(); ++r) {
        for (std::size_t g = 0; g < result.t_grid.size(); ++g) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g", r + 1, result.t_grid[g],
                          result.values[r][g]);
            out << buf << "\n";
        }
    }
}

std::string fclt_diagnostics_json(const FcltResult& result) {
    nlohmann::json j;
    j["pilot"] = {{"E_w", result.pilot.E_w},
                  {"mean_delta", result.pilot.mean_delta},
                  {"v_w_per_step", result.pilot.v_w},
                  {"v_w_se", result.pilot.v_w_se},
                  {"time_variance_rate", result.pilot.time_variance_rate()},
                  {"batches", result.pilot.batches}};
    nlohmann::json grid = nlohmann::json::array();
    for (std::size_t g = 0; g < result.t_grid.size(); ++g)
        grid.push_back({{"t", result.t_grid[g]}, {"variance", result.per_t_variance[g]}});
    j["per_t_variance"] = std::move(grid);
    j["endpoint"] = {{"mean", result.endpoint_mean},
                     {"variance", result.endpoint_variance},
                     {"skewness", result.endpoint_skewness},
                     {"skewness_se", result.endpoint_skewness_se},
                     {"ks_statistic", result.endpoint_normality.statistic},
                     {"ks_p_value", result.endpoint_normality.p_value}};
    j["increment_correlations"] = result.increment_correlations;
    j["max_increment_correlation"] = result.max_increment_correlation;
    return j.dump(2) + "\n";
}

} // namespace chawkes
