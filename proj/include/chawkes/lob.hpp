#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "chawkes/estimate.hpp"
#include "chawkes/hawkes_core.hpp"
#include "chawkes/model.hpp"

namespace chawkes {

struct SpecShapeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Piecewise-constant price path sampled at event times; the value at
/// times[k] holds from that instant until the next event.
struct PriceSeries {
    std::vector<double> times;
    std::vector<double> values;
    double tick = 1.0;
};

// True when the model has the four-event book shape: p=4, q=1, spread jumps
// (+1,-1,-1,+1) and the spread-decreasing marks blocked at spread 1.
bool is_lob_shaped(const ModelSpec& spec);

// P(T_k) = P0 + sum_{j<=k} w_mid(I_j); mark-0 events leave the price alone.
PriceSeries mid_price_series(const EventLog& log, const ModelSpec& spec, double p0,
                             double tick = 1.0);

// Spread path S(T_k); integer valued, never below 1.
PriceSeries spread_series(const EventLog& log, const ModelSpec& spec);

void write_price_csv(const PriceSeries& series, std::ostream& out);

struct LobDemoReport {
    double horizon = 0.0;
    int replications = 0;

    double drift_mean = 0.0; // E(w_mid) across replications
    double drift_se = 0.0;

    double diffusion_coefficient = 0.0; // v(w_mid)/mean_delta from the pilot
    double diffusion_se = 0.0;

    double endpoint_variance = 0.0;
    double ks_p_value = 0.0;
    double endpoint_skewness = 0.0;
    double endpoint_skewness_se = 0.0;

    // Var(S(T')/sqrt(T')) at T' = horizon/4 and horizon; the spread does not
    // scale, so the longer horizon must come out smaller.
    double spread_scaling_var_quarter = 0.0;
    double spread_scaling_var_full = 0.0;

    FcltResult fclt;
};

// Mid-price diffusion demonstration: FCLT replications with mid weights plus
// the degenerate scaling of the spread on the same model.
LobDemoReport mid_price_scaling_demo(const ModelSpec& spec, double horizon, int replications,
                                     std::uint64_t seed, int threads = 0);

std::string lob_demo_to_json(const LobDemoReport& report);
std::string lob_demo_to_text(const LobDemoReport& report);

} // namespace chawkes
