#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chawkes/model.hpp"
#include "chawkes/rng.hpp"

namespace chawkes {

/// State of the embedded chain: constraint vector, self-excitation
/// intensities and the current chain time.
struct ChainState {
    std::vector<int> s;          // length q, every component >= 1
    std::vector<double> lambda;  // length p, every component >= 0
    double t = 0.0;

    bool operator==(const ChainState&) const = default;
};

// Default initial condition: S all ones, empty history (lambda = 0), t = 0.
ChainState initial_state(const ModelSpec& spec);

struct Event {
    std::int64_t index = 0; // n, 1-based in a log
    double time = 0.0;      // T_n
    double delta = 0.0;     // T_n - T_{n-1}
    int mark = 0;           // I_n in {0,...,p}; 0 = auxiliary arrival

    bool operator==(const Event&) const = default;
};

struct SeedInfo {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
};

/// A simulated path of the embedded chain. Replaying seed+stream against the
/// same spec reproduces the log bit-exactly.
struct EventLog {
    std::string spec_hash;
    SeedInfo seed;
    ChainState initial;
    std::vector<Event> events;
    // Optional per-event snapshots, parallel to events.
    bool snapshots_enabled = false;
    std::vector<std::vector<int>> s_snapshots;
    std::vector<std::vector<double>> lambda_snapshots;

    bool has_snapshots() const {
        return snapshots_enabled && s_snapshots.size() == events.size();
    }
    double last_time() const { return events.empty() ? initial.t : events.back().time; }
};

struct StatePositivityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HazardParams {
    double a = 0.0; // constant part: mu0_null + sum_i mu0(i)
    double b = 0.0; // decaying part: sum_i lambda(i)
};

// Total hazard of the next inter-arrival is a + b*exp(-beta u); the constraint
// state only shuffles mass between marks, never the total.
HazardParams total_hazard_params(const ChainState& state, const ModelSpec& spec);

// Inverts the integrated hazard a*d + (b/beta)*(1 - exp(-beta d)) = e by
// safeguarded Newton on the bracket (e/(a+b), e/a]. Relative residual 1e-10.
double sample_interarrival(double a, double b, double beta, double e);

// Conditional mark distribution over {0,...,p} given the inter-arrival delta.
// Blocked marks get exactly 0; their hazard mass is carried by mark 0.
std::vector<double> mark_probabilities(const ChainState& state, double delta,
                                       const ModelSpec& spec);

// One transition of the embedded chain; consumes exactly one counter block
// (two uniforms). Throws StatePositivityViolation if the jump would push a
// constraint component below 1.
std::pair<Event, ChainState> step(const ChainState& state, const ModelSpec& spec,
                                  CounterRng& rng);

struct StopRule {
    enum class Kind { EventCount, Horizon };
    Kind kind = Kind::EventCount;
    std::int64_t events = 0;
    double horizon = 0.0;

    static StopRule event_count(std::int64_t n) { return {Kind::EventCount, n, 0.0}; }
    static StopRule time_horizon(double t) { return {Kind::Horizon, 0, t}; }
};

/// Incremental simulator over one (seed, stream) lane. Estimators that do not
/// need a stored log stream events straight from next().
class ChainSimulator {
public:
    ChainSimulator(const ModelSpec& spec, ChainState init, SeedInfo seed);

    // Generates the next event and advances the state.
    Event next();

    const ChainState& state() const { return state_; }
    std::int64_t count() const { return count_; }
    const SeedInfo& seed() const { return seed_; }

private:
    const ModelSpec& spec_;
    ChainState state_;
    SeedInfo seed_;
    CounterRng rng_;
    std::int64_t count_ = 0;
};

EventLog simulate(const ModelSpec& spec, const ChainState& init, StopRule stop, SeedInfo seed,
                  bool snapshots = false);

// Interpolated intensity vector at time t: lambda_n * exp(-beta (t - T_n)) on
// [T_n, T_{n+1}). Requires snapshots and 0 <= t <= last event time.
std::vector<double> intensity_at(const EventLog& log, const ModelSpec& spec, double t);

// N(1_(u,t] (x) w) = sum of w over marks of events in (u, t]; mark 0 counts 0.
double counting_functional(const EventLog& log, const WeightFunction& w, double u, double t);

// Drops the constraint components listed in remove (1-based indices) together
// with their jump columns; removing all of them yields the unconstrained spec.
ModelSpec reduce_constraints(const ModelSpec& spec, const std::set<int>& remove);

// CSV export: n,time,delta,mark[,S_1..S_q,lambda_1..lambda_p], 17 significant
// digits, one row per event.
void write_event_csv(const EventLog& log, const ModelSpec& spec, std::ostream& out);

} // namespace chawkes
