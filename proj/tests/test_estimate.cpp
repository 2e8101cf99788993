#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chawkes/estimate.hpp"
#include "chawkes/model.hpp"

using namespace chawkes;

namespace {

ModelSpec poisson2(const std::vector<double>& mu0) {
    ModelSpec spec;
    spec.p = static_cast<int>(mu0.size());
    spec.q = 0;
    spec.beta = 1.0;
    spec.fertility = Matrix(mu0.size(), mu0.size(), 0.0);
    spec.mu0 = mu0;
    spec.mu0_null = 1.0;
    spec.constraints.assign(mu0.size(), {});
    spec.jumps.assign(mu0.size(), {});
    REQUIRE(validate(spec).ok());
    return spec;
}

ModelSpec lob_spec() {
    Matrix fert(4, 4, 0.0);
    for (std::size_t i = 0; i < 4; ++i) fert(i, i) = 0.1;
    return lob_preset({0.1, 0.2, 0.2, 0.1}, fert, 1.0);
}

} // namespace

TEST_CASE("estimate_E: zero weights, empty logs, rate recovery") {
    const ModelSpec spec = poisson2({1.0});
    const EventLog log = simulate(spec, initial_state(spec), StopRule::event_count(100000), {5, 0});

    const auto [zero, md0] = estimate_E(log, WeightFunction{{0.0}});
    CHECK(zero == 0.0);
    CHECK(md0 > 0.0);

    // unit-rate mark against a rate-2 embedded chain
    const auto [e, md] = estimate_E(log, WeightFunction{{1.0}});
    const double t_n = log.last_time();
    const double se = std::sqrt(e / t_n); // Poisson counts: var N(T) = T * rate
    CHECK(std::abs(e - 1.0) <= 3.0 * se);
    CHECK(md == doctest::Approx(0.5).epsilon(0.02));

    EventLog empty = log;
    empty.events.clear();
    CHECK_THROWS_AS(estimate_E(empty, WeightFunction{{1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(estimate_E(log, WeightFunction{{1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("estimate_E: stationary spread weights have no drift") {
    const ModelSpec spec = lob_spec();
    const EventLog log =
        simulate(spec, initial_state(spec), StopRule::event_count(20000), {6, 0});
    const auto [e, md] = estimate_E(log, lob_spread_weights());
    // sum of spread jumps telescopes to S(T)-S(0), which stays tight
    CHECK(std::abs(e) < 0.01);
    CHECK(md > 0.0);
}

TEST_CASE("the ratio estimator centers its own partial sum exactly") {
    const ModelSpec spec = lob_spec();
    const EventLog log =
        simulate(spec, initial_state(spec), StopRule::event_count(5000), {7, 0});
    for (const WeightFunction& w :
         {lob_mid_weights(), lob_spread_weights(), WeightFunction{{1.0, 0.3, -2.0, 0.0}}}) {
        const auto [e, md] = estimate_E(log, w);
        (void)md;
        double g_sum = 0.0;
        double w_scale = 0.0;
        for (const Event& ev : log.events) {
            g_sum += w.at(ev.mark) - e * ev.delta;
            w_scale += std::abs(w.at(ev.mark));
        }
        CHECK(std::abs(g_sum) <= 1e-9 * std::max(1.0, w_scale));
    }
}

TEST_CASE("estimate_v: degenerate and insufficient inputs") {
    const ModelSpec spec = poisson2({1.0});
    const EventLog log = simulate(spec, initial_state(spec), StopRule::event_count(5000), {8, 0});
    const auto [v, se] = estimate_v(log, WeightFunction{{0.0}}, 0.0, 32);
    CHECK(v == 0.0);
    CHECK(se == 0.0);
    CHECK_THROWS_AS(estimate_v(log, WeightFunction{{1.0}}, 1.0, 1000), std::invalid_argument);
    CHECK_THROWS_AS(estimate_v(log, WeightFunction{{1.0}}, 1.0, 1), std::invalid_argument);
}

TEST_CASE("estimate_v: compound-Poisson variance identity") {
    // q=0, zero fertility: the counting functional is compound Poisson and its
    // physical-time variance rate is sum mu0(i) w(i)^2.
    const ModelSpec spec = poisson2({0.7, 0.4});
    const WeightFunction w{{0.9, -1.3}};
    const double want = 0.7 * 0.81 + 0.4 * 1.69;

    const EventLog log =
        simulate(spec, initial_state(spec), StopRule::event_count(200000), {9, 0});
    const ScalingEstimate est = scaling_estimate(log, w, 64);
    CHECK(std::abs(est.time_variance_rate() - want) <= 3.0 * est.v_w_se / est.mean_delta);
}

TEST_CASE("estimate_v: self-excited covariance structure") {
    // For an unconstrained process the asymptotic covariance rate of the
    // counting vector is (I-A)^{-1} diag(rates) (I-A)^{-T}; with
    // A = [[.2,.3],[.1,.4]] and rates (1,1) the quadratic forms below are
    // exact. This exercises the cross-excitation second moments, which the
    // zero-fertility oracle cannot see.
    ModelSpec spec;
    spec.p = 2;
    spec.q = 0;
    spec.beta = 1.0;
    spec.fertility = Matrix(2, 2);
    spec.fertility(0, 0) = 0.2;
    spec.fertility(0, 1) = 0.3;
    spec.fertility(1, 0) = 0.1;
    spec.fertility(1, 1) = 0.4;
    spec.mu0 = {0.5, 0.5};
    spec.constraints = {{}, {}};
    spec.jumps = {{}, {}};
    REQUIRE(validate(spec).ok());

    const EventLog log =
        simulate(spec, initial_state(spec), StopRule::event_count(500000), {777, 0});
    const std::pair<WeightFunction, double> cases[] = {
        {{{1.0, 0.0}}, 20.0 / 9.0},   // Sigma_11
        {{{1.0, 1.0}}, 680.0 / 81.0}, // u^T diag(rates) u with u = (14/9, 22/9)
        {{{1.0, -1.0}}, 2.4691358},   // Sigma_11 - 2 Sigma_12 + Sigma_22
    };
    for (const auto& [w, want] : cases) {
        const ScalingEstimate est = scaling_estimate(log, w, 256);
        CHECK(std::abs(est.time_variance_rate() - want) <= 3.0 * est.v_w_se / est.mean_delta);
    }
}

TEST_CASE("estimate_v: the spread series does not scale") {
    const ModelSpec spec = lob_spec();
    const EventLog log =
        simulate(spec, initial_state(spec), StopRule::event_count(200000), {10, 0});
    const ScalingEstimate est = scaling_estimate(log, lob_spread_weights(), 64);
    // partial sums are S_n - S_0 - E_w T_n with S_n tight, so v -> 0 as the
    // batch length grows
    CHECK(est.v_w < 0.02);

    const ScalingEstimate mid = scaling_estimate(log, lob_mid_weights(), 64);
    CHECK(mid.v_w > 10.0 * est.v_w);
}

TEST_CASE("fclt_experiment: grid handling and determinism across thread counts") {
    const ModelSpec spec = poisson2({1.0});
    FcltParams params;
    params.horizon = 200.0;
    params.replications = 40;
    params.t_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    params.seed = 11;
    params.threads = 1;
    const FcltResult a = fclt_experiment(spec, WeightFunction{{1.0}}, initial_state(spec), params);

    for (const auto& row : a.values) CHECK(row[0] == 0.0);

    params.threads = 4;
    const FcltResult b = fclt_experiment(spec, WeightFunction{{1.0}}, initial_state(spec), params);
    CHECK(a.values == b.values);
    CHECK(a.pilot.E_w == b.pilot.E_w);

    FcltParams bad = params;
    bad.t_grid = {0.5, 0.2};
    CHECK_THROWS_AS(fclt_experiment(spec, WeightFunction{{1.0}}, initial_state(spec), bad),
                    std::invalid_argument);
    bad = params;
    bad.replications = 1;
    CHECK_THROWS_AS(fclt_experiment(spec, WeightFunction{{1.0}}, initial_state(spec), bad),
                    std::invalid_argument);
}

TEST_CASE("fclt_experiment: Poisson control at reduced scale") {
    const ModelSpec spec = poisson2({1.0});
    FcltParams params;
    params.horizon = 2000.0;
    params.replications = 80;
    params.t_grid = {0.25, 0.5, 0.75, 1.0};
    params.seed = 12;
    const FcltResult res =
        fclt_experiment(spec, WeightFunction{{1.0}}, initial_state(spec), params);

    CHECK(res.pilot.E_w == doctest::Approx(1.0).epsilon(0.05));
    CHECK(res.endpoint_variance == doctest::Approx(1.0).epsilon(0.35));
    CHECK(res.endpoint_normality.p_value > 0.001);
    CHECK(res.per_t_variance[3] / res.per_t_variance[1] == doctest::Approx(2.0).epsilon(0.4));
    CHECK(res.max_increment_correlation < 0.35);
    CHECK(res.values.size() == 80);
    CHECK(res.values[0].size() == 4);
}

TEST_CASE("replication csv layout") {
    const ModelSpec spec = poisson2({1.0});
    FcltParams params;
    params.horizon = 50.0;
    params.replications = 8;
    params.t_grid = {0.5, 1.0};
    params.seed = 13;
    params.pilot_batches = 8;
    const FcltResult res =
        fclt_experiment(spec, WeightFunction{{1.0}}, initial_state(spec), params);
    std::ostringstream os;
    write_replication_csv(res, os);
    const std::string text = os.str();
    CHECK(text.rfind("rep,t,value\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 17); // header + 8*2 rows

    const std::string diag = fclt_diagnostics_json(res);
    CHECK(diag.find("\"pilot\"") != std::string::npos);
    CHECK(diag.find("\"ks_p_value\"") != std::string::npos);
}
