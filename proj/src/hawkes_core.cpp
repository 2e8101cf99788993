#include "chawkes/hawkes_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace chawkes {

ChainState initial_state(const ModelSpec& spec) {
    ChainState st;
    st.s.assign(static_cast<std::size_t>(spec.q), 1);
    st.lambda.assign(static_cast<std::size_t>(spec.p), 0.0);
    st.t = 0.0;
    return st;
}

HazardParams total_hazard_params(const ChainState& state, const ModelSpec& spec) {
    HazardParams hp;
    hp.a = spec.mu0_null;
    for (double m : spec.mu0) hp.a += m;
    for (double l : state.lambda) hp.b += l;
    return hp;
}

namespace {

inline double integrated_hazard(double a, double b, double beta, double d) {
    // a*d - (b/beta)*expm1(-beta*d); expm1 keeps small beta*d exact.
    return a * d - (b / beta) * std::expm1(-beta * d);
}

} // namespace

double sample_interarrival(double a, double b, double beta, double e) {
    if (!(a > 0.0) || !(b >= 0.0) || !(beta > 0.0) || !(e > 0.0))
        throw std::invalid_argument("sample_interarrival: need a>0, b>=0, beta>0, e>0");
    if (b == 0.0) return e / a;

    const double hi = e / a;
    double lo = e / (a + b);
    double d = lo;

    // Lambda is increasing and concave, so Newton from the left bracket end
    // climbs monotonically to the root.
    const double tol = 1e-11 * std::max(1.0, e);
    for (int it = 0; it < 200; ++it) {
        const double f = integrated_hazard(a, b, beta, d) - e;
        if (std::abs(f) <= tol) return d;
        const double fp = a + b * std::exp(-beta * d);
        double next = d - f / fp;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (d + hi); // safeguard
        if (next == d) return d;
        d = next;
    }

    // Bisection fallback; unreachable for sane inputs but guarantees the
    // residual contract.
    double blo = lo;
    double bhi = hi;
    for (int it = 0; it < 200; ++it) {
        d = 0.5 * (blo + bhi);
        const double f = integrated_hazard(a, b, beta, d) - e;
        if (std::abs(f) <= tol || d == blo || d == bhi) return d;
        (f < 0.0 ? blo : bhi) = d;
    }
    throw std::runtime_error("sample_interarrival: inversion did not converge");
}

std::vector<double> mark_probabilities(const ChainState& state, double delta,
                                       const ModelSpec& spec) {
    if (!(delta >= 0.0)) throw std::invalid_argument("mark_probabilities: delta must be >= 0");
    const std::size_t p = static_cast<std::size_t>(spec.p);
    const double decay = std::exp(-spec.beta * delta);

    std::vector<double> h(p + 1, 0.0);
    h[0] = spec.mu0_null;
    double total = spec.mu0_null;
    for (std::size_t i = 0; i < p; ++i) {
        const double hi = spec.mu0[i] + state.lambda[i] * decay;
        total += hi;
        if (spec.blocked(static_cast<int>(i) + 1, state.s)) {
            h[0] += hi; // blocked mass is absorbed by the auxiliary mark
        } else {
            h[i + 1] = hi;
        }
    }
    for (double& v : h) v /= total;
    return h;
}

namespace {

// Shared transition core; u1 drives the inter-arrival, u2 the mark.
void step_core(const ModelSpec& spec, ChainState& state, const UniformPair& u, Event& ev) {
    const HazardParams hp = total_hazard_params(state, spec);
    const double e = -std::log(u.u1);
    const double delta = sample_interarrival(hp.a, hp.b, spec.beta, e);
    const double decay = std::exp(-spec.beta * delta);

    // Draw the mark from the conditional hazards without normalizing.
    const double total = hp.a + hp.b * decay;
    double threshold = u.u2 * total;
    int mark = 0;
    double acc = spec.mu0_null;
    const std::size_t p = static_cast<std::size_t>(spec.p);
    if (threshold > acc) {
        for (std::size_t i = 0; i < p; ++i) {
            const double hi = spec.mu0[i] + state.lambda[i] * decay;
            if (spec.blocked(static_cast<int>(i) + 1, state.s)) continue;
            acc += hi;
            if (threshold <= acc) {
                mark = static_cast<int>(i) + 1;
                break;
            }
        }
        // Rounding at the top of the accumulated mass falls back to mark 0,
        // mirroring the blocked-mass convention.
    }

    if (mark >= 1) {
        const auto& jr = spec.jumps[static_cast<std::size_t>(mark - 1)];
        for (std::size_t k = 0; k < jr.size(); ++k) {
            state.s[k] += jr[k];
            if (state.s[k] < 1)
                throw StatePositivityViolation(
                    "constraint component " + std::to_string(k + 1) + " dropped to " +
                    std::to_string(state.s[k]) + " after a mark-" + std::to_string(mark) +
                    " event; constraint sets do not guard Z_+^q");
        }
    }
    for (std::size_t i = 0; i < p; ++i) {
        double l = state.lambda[i] * decay;
        if (mark >= 1) l += spec.beta * spec.fertility(i, static_cast<std::size_t>(mark - 1));
        state.lambda[i] = l;
    }
    state.t += delta;

    ev.time = state.t;
    ev.delta = delta;
    ev.mark = mark;
}

} // namespace

std::pair<Event, ChainState> step(const ChainState& state, const ModelSpec& spec,
                                  CounterRng& rng) {
    ChainState next = state;
    Event ev;
    step_core(spec, next, rng.next_pair(), ev);
    return {ev, std::move(next)};
}

ChainSimulator::ChainSimulator(const ModelSpec& spec, ChainState init, SeedInfo seed)
    : spec_(spec), state_(std::move(init)), seed_(seed), rng_(seed.master, seed.stream) {
    if (state_.s.size() != static_cast<std::size_t>(spec.q) ||
        state_.lambda.size() != static_cast<std::size_t>(spec.p))
        throw std::invalid_argument("ChainSimulator: initial state shape mismatch");
    for (int v : state_.s)
        if (v < 1) throw std::invalid_argument("ChainSimulator: initial S must be >= 1");
    for (double l : state_.lambda)
        if (!(l >= 0.0)) throw std::invalid_argument("ChainSimulator: initial lambda must be >= 0");
}

Event ChainSimulator::next() {
    Event ev;
    step_core(spec_, state_, rng_.next_pair(), ev);
    ev.index = ++count_;
    return ev;
}

EventLog simulate(const ModelSpec& spec, const ChainState& init, StopRule stop, SeedInfo seed,
                  bool snapshots) {
    EventLog log;
    log.spec_hash = spec_hash_hex(spec);
    log.seed = seed;
    log.initial = init;
    log.snapshots_enabled = snapshots;

    ChainSimulator sim(spec, init, seed);
    if (stop.kind == StopRule::Kind::EventCount) {
        log.events.reserve(static_cast<std::size_t>(std::max<std::int64_t>(stop.events, 0)));
        while (sim.count() < stop.events) {
            log.events.push_back(sim.next());
            if (snapshots) {
                log.s_snapshots.push_back(sim.state().s);
                log.lambda_snapshots.push_back(sim.state().lambda);
            }
        }
    } else {
        while (true) {
            const Event ev = sim.next();
            if (ev.time > stop.horizon) break;
            log.events.push_back(ev);
            if (snapshots) {
                log.s_snapshots.push_back(sim.state().s);
                log.lambda_snapshots.push_back(sim.state().lambda);
            }
        }
    }
    return log;
}

std::vector<double> intensity_at(const EventLog& log, const ModelSpec& spec, double t) {
    if (!log.has_snapshots())
        throw std::invalid_argument("intensity_at: log was recorded without snapshots");
    if (t < log.initial.t || t > log.last_time())
        throw std::out_of_range("intensity_at: t outside the recorded path");

    // Last event with time <= t; before the first event the initial state rules.
    std::size_t lo = 0;
    std::size_t hi = log.events.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (log.events[mid].time <= t)
            lo = mid + 1;
        else
            hi = mid;
    }

    const std::vector<double>* lam = &log.initial.lambda;
    double tn = log.initial.t;
    if (lo > 0) {
        lam = &log.lambda_snapshots[lo - 1];
        tn = log.events[lo - 1].time;
    }
    std::vector<double> out(*lam);
    const double decay = std::exp(-spec.beta * (t - tn));
    for (double& v : out) v *= decay;
    return out;
}

double counting_functional(const EventLog& log, const WeightFunction& w, double u, double t) {
    if (!(u >= 0.0) || !(t >= u)) throw std::invalid_argument("counting_functional: need 0<=u<=t");
    auto cmp = [](const Event& ev, double x) { return ev.time <= x; };
    const auto first = std::lower_bound(log.events.begin(), log.events.end(), u, cmp);
    double sum = 0.0;
    for (auto it = first; it != log.events.end() && it->time <= t; ++it) sum += w.at(it->mark);
    return sum;
}

ModelSpec reduce_constraints(const ModelSpec& spec, const std::set<int>& remove) {
    for (int j : remove) {
        if (j < 1 || j > spec.q)
            throw std::invalid_argument("reduce_constraints: component index " +
                                        std::to_string(j) + " outside 1..q");
    }
    ModelSpec out = spec;
    out.q = spec.q - static_cast<int>(remove.size());
    for (int i = 0; i < spec.p; ++i) {
        std::vector<ConstraintSet> sets;
        std::vector<int> jr;
        for (int k = 0; k < spec.q; ++k) {
            if (remove.count(k + 1)) continue;
            sets.push_back(spec.constraints[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
            jr.push_back(spec.jumps[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
        }
        out.constraints[static_cast<std::size_t>(i)] = std::move(sets);
        out.jumps[static_cast<std::size_t>(i)] = std::move(jr);
    }
    return out;
}

void write_event_csv(const EventLog& log, const ModelSpec& spec, std::ostream& out) {
    out << "n,time,delta,mark";
    if (log.has_snapshots()) {
        for (int k = 1; k <= spec.q; ++k) out << ",S_" << k;
        for (int i = 1; i <= spec.p; ++i) out << ",lambda_" << i;
    }
    out << "\n";

    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ',' << buf;
    };
    for (std::size_t n = 0; n < log.events.size(); ++n) {
        const Event& ev = log.events[n];
        out << ev.index;
        put(ev.time);
        put(ev.delta);
        out << ',' << ev.mark;
        if (log.has_snapshots()) {
            for (int v : log.s_snapshots[n]) out << ',' << v;
            for (double v : log.lambda_snapshots[n]) put(v);
        }
        out << "\n";
    }
}

} // namespace chawkes
