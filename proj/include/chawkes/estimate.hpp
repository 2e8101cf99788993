#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chawkes/hawkes_core.hpp"
#include "chawkes/model.hpp"
#include "chawkes/stats.hpp"

namespace chawkes {

struct ScalingEstimate {
    double E_w = 0.0;        // events-weighted rate per unit time
    double mean_delta = 0.0; // mean inter-arrival of the embedded chain
    double v_w = 0.0;        // per-step asymptotic variance of the centered sums
    double v_w_se = 0.0;
    int batches = 0;
    std::int64_t batch_len = 0;

    // Variance rate in physical time, the diffusion coefficient of the FCLT.
    double time_variance_rate() const { return v_w / mean_delta; }
};

// Ratio estimator: E_w = sum_k w(I_k) / T_N, mean_delta = T_N / N.
std::pair<double, double> estimate_E(const EventLog& log, const WeightFunction& w);

// Batch-means estimate of the per-step variance of partial sums of
// g(Z_k) = w(I_k) - E_w * Delta_k. Requires at least 20 events per batch.
std::pair<double, double> estimate_v(const EventLog& log, const WeightFunction& w, double E_w,
                                     int batches);

ScalingEstimate scaling_estimate(const EventLog& log, const WeightFunction& w, int batches = 64);

struct FcltParams {
    double horizon = 0.0;          // T
    int replications = 0;          // R
    std::vector<double> t_grid;    // fractions of T in [0,1], increasing
    std::uint64_t seed = 0;
    int threads = 0;               // <= 0: hardware concurrency
    double pilot_factor = 10.0;    // pilot horizon = pilot_factor * T
    int pilot_batches = 64;
};

struct FcltResult {
    std::vector<double> t_grid;
    std::vector<std::vector<double>> values; // [replication][grid point]
    ScalingEstimate pilot;                    // long-run pilot estimates

    std::vector<double> per_t_variance;
    double endpoint_mean = 0.0;
    double endpoint_variance = 0.0;
    double endpoint_skewness = 0.0;
    double endpoint_skewness_se = 0.0;
    KsResult endpoint_normality;
    std::vector<double> increment_correlations; // consecutive grid increments
    double max_increment_correlation = 0.0;
};

// Monte-Carlo replication of the rescaled counting functional
// (N(w on [0, tT]) - tT E(w)) / sqrt(T) on the grid, with E(w) frozen from
// one pilot run. Stream 0 is the pilot; replication r uses stream r+1.
FcltResult fclt_experiment(const ModelSpec& spec, const WeightFunction& w,
                           const ChainState& init, const FcltParams& params);

void write_replication_csv(const FcltResult& result, std::ostream& out);
std::string fclt_diagnostics_json(const FcltResult& result);

} // namespace chawkes
