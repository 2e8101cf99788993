// Acceptance suite: one check per release criterion, each at its stated
// tolerance, printed as a single PASS/FAIL line. Every criterion runs on the
// same fixed master seed, so the suite is deterministic end to end.

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "chawkes/ergodicity.hpp"
#include "chawkes/estimate.hpp"
#include "chawkes/hawkes_core.hpp"
#include "chawkes/lob.hpp"
#include "chawkes/model.hpp"
#include "chawkes/rng.hpp"
#include "chawkes/stats.hpp"

using namespace chawkes;
namespace fs = std::filesystem;

namespace {

// Fixed by default so the suite is deterministic; CHAWKES_ACCEPT_SEED
// overrides it for robustness sweeps.
std::uint64_t acceptance_seed() {
    if (const char* env = std::getenv("CHAWKES_ACCEPT_SEED")) {
        const unsigned long long v = std::strtoull(env, nullptr, 10);
        if (v != 0) return v;
    }
    return 20260809;
}
const std::uint64_t kSeed = acceptance_seed();

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Checker {
public:
    void require(bool ok, const std::string& what) {
        if (!ok) {
            out_.pass = false;
            failures_ += (failures_.empty() ? "" : "; ") + what;
        }
        checks_.push_back(what);
    }
    Outcome finish(const std::string& summary) {
        out_.detail = summary;
        if (!out_.pass) out_.detail += " | violated: " + failures_;
        return out_;
    }

private:
    Outcome out_;
    std::string failures_;
    std::vector<std::string> checks_;
};

ModelSpec two_mark_hawkes() {
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
    spec.mu0_null = 1.0;
    spec.constraints = {{}, {}};
    spec.jumps = {{}, {}};
    return spec;
}

ModelSpec birth_death(double up, double down) {
    ModelSpec spec;
    spec.p = 2;
    spec.q = 1;
    spec.beta = 1.0;
    spec.fertility = Matrix(2, 2, 0.0);
    spec.mu0 = {up, down};
    spec.mu0_null = 1.0;
    spec.constraints = {{{}}, {{1}}};
    spec.jumps = {{1}, {-1}};
    return spec;
}

ModelSpec ergodic_lob() {
    Matrix fert(4, 4, 0.0);
    for (std::size_t i = 0; i < 4; ++i) fert(i, i) = 0.1;
    return lob_preset({0.1, 0.2, 0.2, 0.1}, fert, 1.0);
}

// -------------------------------------------------------------------------
// 1. Long-run per-mark rates of the unconstrained process match
//    (Id - A)^{-1} mu0 = (1, 1) within 3 batch-means SEs.
Outcome criterion_rate_law() {
    const ModelSpec spec = two_mark_hawkes();
    const double horizon = 100000.0;
    const int windows = 64;
    const double wlen = horizon / windows;

    std::vector<std::vector<double>> window_rates(2, std::vector<double>(windows, 0.0));
    ChainSimulator sim(spec, initial_state(spec), {kSeed, 0});
    while (true) {
        const Event ev = sim.next();
        if (ev.time > horizon) break;
        const int w = std::min(windows - 1, static_cast<int>(ev.time / wlen));
        if (ev.mark >= 1) window_rates[static_cast<std::size_t>(ev.mark - 1)]
                                      [static_cast<std::size_t>(w)] += 1.0 / wlen;
    }

    Checker chk;
    std::ostringstream os;
    os << "rates";
    for (int i = 0; i < 2; ++i) {
        const double m = mean(window_rates[static_cast<std::size_t>(i)]);
        const double se =
            std::sqrt(variance(window_rates[static_cast<std::size_t>(i)], 1) / windows);
        os << " mark" << i + 1 << "=" << m << "+-" << se;
        chk.require(std::abs(m - 1.0) <= 3.0 * se,
                    "mark " + std::to_string(i + 1) + " rate off the oracle 1.0");
    }
    return chk.finish(os.str());
}

// -------------------------------------------------------------------------
// 2. Embedded-chain frequency of mark 1 matches the stationary moment
//    formula value 1/3 within 3 batch-means SEs.
Outcome criterion_mark_moment() {
    const ModelSpec spec = two_mark_hawkes();
    const double want = unconstrained_mark_moment(spec, WeightFunction{{1.0, 0.0}});

    ChainSimulator sim(spec, initial_state(spec), {kSeed, 1});
    std::vector<double> indicator;
    indicator.reserve(300000);
    for (int n = 0; n < 300000; ++n) indicator.push_back(sim.next().mark == 1 ? 1.0 : 0.0);
    const MeanWithError est = batch_means(indicator, 64);

    Checker chk;
    chk.require(std::abs(want - 1.0 / 3.0) < 1e-12, "formula value is not 1/3");
    chk.require(std::abs(est.mean - want) <= 3.0 * est.se, "frequency off the formula value");
    std::ostringstream os;
    os << "freq=" << est.mean << "+-" << est.se << " oracle=" << want;
    return chk.finish(os.str());
}

// -------------------------------------------------------------------------
// 3. Birth-death book: stationary histogram ratios 2/3 (+-0.05) in the
//    ergodic direction; S(T)/T near the positive drift in the reversed one.
Outcome criterion_birth_death() {
    Checker chk;
    std::ostringstream os;

    {
        const ModelSpec spec = birth_death(0.4, 0.6);
        ChainSimulator sim(spec, initial_state(spec), {kSeed, 2});
        std::map<int, long> hist;
        for (int n = 0; n < 2000000; ++n) {
            sim.next();
            ++hist[sim.state().s[0]];
        }
        // The histogram's successive ratio over the states with >= 1e3
        // visits: visit-weighted, which telescopes to the exact geometric
        // ratio for a geometric law whatever the cutoff.
        int pairs = 0;
        double worst = 0.0;
        double lo_total = 0.0;
        double hi_total = 0.0;
        for (int s = 1; hist.count(s) && hist.count(s + 1); ++s) {
            if (hist[s] < 1000 || hist[s + 1] < 1000) break;
            lo_total += static_cast<double>(hist[s]);
            hi_total += static_cast<double>(hist[s + 1]);
            const double ratio = static_cast<double>(hist[s + 1]) / hist[s];
            worst = std::max(worst, std::abs(ratio - 2.0 / 3.0));
            ++pairs;
        }
        const double pooled = hi_total / lo_total;
        chk.require(pairs >= 5, "fewer than 5 qualifying histogram states");
        chk.require(std::abs(pooled - 2.0 / 3.0) <= 0.05,
                    "histogram successive ratio off 2/3 by more than 0.05");
        os << "hist pairs=" << pairs << " ratio=" << pooled
           << " worst single pair dev=" << worst;
    }

    {
        const ModelSpec spec = birth_death(0.6, 0.4);
        const int reps = 64;
        const double horizon = 10000.0;
        std::vector<double> slope(reps, 0.0);
        for (int r = 0; r < reps; ++r) {
            ChainSimulator sim(spec, initial_state(spec),
                               {kSeed, 100 + static_cast<std::uint64_t>(r)});
            int s_now = 1;
            while (true) {
                const Event ev = sim.next();
                if (ev.time > horizon) break;
                s_now = sim.state().s[0];
            }
            slope[static_cast<std::size_t>(r)] = s_now / horizon;
        }
        const double m = mean(slope);
        const double se = std::sqrt(variance(slope, 1) / reps);
        chk.require(m - 3.0 * se > 0.0, "reversed rates: S(T)/T not separated from 0");
        chk.require(std::abs(m - 0.2) <= 3.0 * se,
                    "reversed rates: S(T)/T off the drift 0.2");
        os << " | transient S(T)/T=" << m << "+-" << se;
    }
    return chk.finish(os.str());
}

// -------------------------------------------------------------------------
// 4. Sampler exactness: inversion residual, hazard bookkeeping, and the
//    competing-clocks quadrature oracle.
Outcome criterion_sampler_exactness() {
    Checker chk;
    std::ostringstream os;

    { // inversion residual on 1e6 randomized draws
        CounterRng rng(kSeed, 3);
        long bad = 0;
        double worst = 0.0;
        for (int n = 0; n < 1000000; ++n) {
            const double a = 0.01 + 10.0 * rng.next_u01();
            const double b = (n % 9 == 0) ? 0.0 : 20.0 * rng.next_u01();
            const double beta = 0.01 + 5.0 * rng.next_u01();
            const double e = -std::log(rng.next_u01());
            const double d = sample_interarrival(a, b, beta, e);
            const double lam = a * d - (b / beta) * std::expm1(-beta * d);
            const double resid = std::abs(lam - e) / std::max(1.0, e);
            worst = std::max(worst, resid);
            if (resid > 1e-10 || d < e / (a + b) - 1e-15 || d > e / a * (1.0 + 1e-15)) ++bad;
        }
        chk.require(bad == 0, "inversion residual or bracket violated");
        os << "worst inversion residual=" << worst;
    }

    { // hazard conservation and simplex on 1e5 randomized states
        Matrix fert(4, 4, 0.0);
        for (std::size_t i = 0; i < 4; ++i) fert(i, i) = 0.1;
        const ModelSpec spec = lob_preset({0.1, 0.2, 0.2, 0.1}, fert, 1.3);
        CounterRng rng(kSeed, 4);
        long bad = 0;
        for (int n = 0; n < 100000; ++n) {
            ChainState st = initial_state(spec);
            st.s[0] = 1 + static_cast<int>(rng.next_u01() * 5);
            for (auto& l : st.lambda) l = 4.0 * rng.next_u01();
            const double delta = 2.5 * rng.next_u01();

            const auto probs = mark_probabilities(st, delta, spec);
            double sum = 0.0;
            for (double p : probs) {
                if (p < 0.0 || p > 1.0) ++bad;
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-12) ++bad;
            if (st.s[0] == 1 && (probs[2] != 0.0 || probs[3] != 0.0)) ++bad;

            const double decay = std::exp(-spec.beta * delta);
            const HazardParams hp = total_hazard_params(st, spec);
            double hsum = spec.mu0_null;
            for (int i = 1; i <= spec.p; ++i)
                hsum += spec.mu0[static_cast<std::size_t>(i - 1)] +
                        st.lambda[static_cast<std::size_t>(i - 1)] * decay;
            if (std::abs(hsum - (hp.a + hp.b * decay)) > 1e-12 * hsum) ++bad;
        }
        chk.require(bad == 0, "mark-probability simplex or hazard conservation violated");
    }

    { // competing-clocks law at t in {0.5, 1, 2}
        ModelSpec spec;
        spec.p = 2;
        spec.q = 1;
        spec.beta = 1.0;
        spec.fertility = Matrix(2, 2, 0.1);
        spec.mu0 = {0.5, 0.5};
        spec.constraints = {{{}}, {{1}}};
        spec.jumps = {{1}, {-1}};
        ChainState st = initial_state(spec);
        st.lambda = {0.3, 0.7};

        auto hazard_i = [&](int i, double u) {
            const double decay = std::exp(-u);
            if (i == 0) return 1.0 + 0.5 + 0.7 * decay;
            if (i == 1) return 0.5 + 0.3 * decay;
            return 0.0;
        };
        auto joint_cdf = [&](int i, double t) {
            const int n = 4000;
            const double h = t / n;
            auto f = [&](double u) {
                return hazard_i(i, u) * std::exp(-(2.0 * u + (1.0 - std::exp(-u))));
            };
            double s = f(0.0) + f(t);
            for (int k = 1; k < n; ++k) s += f(k * h) * (k % 2 == 1 ? 4.0 : 2.0);
            return s * h / 3.0;
        };

        const int m = 400000;
        CounterRng rng(kSeed, 5);
        long counts[3][3] = {};
        const double grid[3] = {0.5, 1.0, 2.0};
        for (int n = 0; n < m; ++n) {
            const auto [ev, next] = step(st, spec, rng);
            for (int g = 0; g < 3; ++g)
                if (ev.delta <= grid[g]) ++counts[ev.mark][g];
        }
        double worst_sigma = 0.0;
        for (int i = 0; i <= 2; ++i) {
            for (int g = 0; g < 3; ++g) {
                const double want = joint_cdf(i, grid[g]);
                const double got = counts[i][g] / static_cast<double>(m);
                const double se = std::sqrt(std::max(want * (1.0 - want), 1e-12) / m);
                worst_sigma = std::max(worst_sigma, std::abs(got - want) / se);
            }
        }
        chk.require(worst_sigma <= 3.0, "competing-clocks oracle off by more than 3 SEs");
        os << " | clock oracle worst z=" << worst_sigma;
    }
    return chk.finish(os.str());
}

// -------------------------------------------------------------------------
// 5. FCLT on the Poisson control: unit endpoint variance (15%), normal
//    endpoint (KS p > 0.01), Brownian variance ratio (20%).
Outcome criterion_fclt_control() {
    ModelSpec spec;
    spec.p = 1;
    spec.q = 0;
    spec.beta = 1.0;
    spec.fertility = Matrix(1, 1, 0.0);
    spec.mu0 = {1.0};
    spec.constraints = {{}};
    spec.jumps = {{}};

    FcltParams params;
    params.horizon = 10000.0;
    params.replications = 300;
    params.t_grid = {0.5, 1.0};
    params.seed = kSeed;
    const FcltResult res =
        fclt_experiment(spec, WeightFunction{{1.0}}, initial_state(spec), params);

    Checker chk;
    chk.require(std::abs(res.endpoint_variance - 1.0) <= 0.15,
                "endpoint variance outside 1 +- 15%");
    chk.require(res.endpoint_normality.p_value > 0.01, "endpoint KS normality p <= 0.01");
    const double ratio = res.per_t_variance[1] / res.per_t_variance[0];
    chk.require(std::abs(ratio - 2.0) <= 0.4, "variance ratio t=1 vs t=0.5 outside 2 +- 20%");

    std::ostringstream os;
    os << "endpoint var=" << res.endpoint_variance
       << " KS p=" << res.endpoint_normality.p_value << " var ratio=" << ratio;
    return chk.finish(os.str());
}

// -------------------------------------------------------------------------
// 6. Compound-Poisson variance oracle for a seed-randomized weight vector.
Outcome criterion_compound_poisson() {
    CounterRng rng(kSeed, 6);
    ModelSpec spec;
    spec.p = 3;
    spec.q = 0;
    spec.beta = 1.0;
    spec.fertility = Matrix(3, 3, 0.0);
    spec.mu0 = {0.2 + rng.next_u01(), 0.2 + rng.next_u01(), 0.2 + rng.next_u01()};
    spec.mu0_null = 1.0;
    spec.constraints = {{}, {}, {}};
    spec.jumps = {{}, {}, {}};

    WeightFunction w{{3.0 * rng.next_u01() - 1.5, 3.0 * rng.next_u01() - 1.5,
                      3.0 * rng.next_u01() - 1.5}};
    double want = 0.0;
    for (int i = 0; i < 3; ++i)
        want += spec.mu0[static_cast<std::size_t>(i)] * w.values[static_cast<std::size_t>(i)] *
                w.values[static_cast<std::size_t>(i)];

    const EventLog log =
        simulate(spec, initial_state(spec), StopRule::event_count(200000), {kSeed, 7});
    const ScalingEstimate est = scaling_estimate(log, w, 64);
    const double got = est.time_variance_rate();
    const double se = est.v_w_se / est.mean_delta;

    Checker chk;
    chk.require(std::abs(got - want) <= 3.0 * se, "variance rate off the oracle by > 3 SE");
    std::ostringstream os;
    os << "rate=" << got << "+-" << se << " oracle=" << want;
    return chk.finish(os.str());
}

// -------------------------------------------------------------------------
// 7. Spread degeneracy: Var(S(T)/sqrt(T)) strictly smaller at T=4000 than
//    at T=1000 across 200 replications.
Outcome criterion_spread_degeneracy() {
    const ModelSpec spec = ergodic_lob();
    const int reps = 200;
    std::vector<double> s_short(reps, 0.0);
    std::vector<double> s_long(reps, 0.0);
    for (int r = 0; r < reps; ++r) {
        ChainSimulator sim(spec, initial_state(spec),
                           {kSeed, 1000 + static_cast<std::uint64_t>(r)});
        double s_now = 1.0;
        bool got_short = false;
        while (true) {
            const Event ev = sim.next();
            if (!got_short && ev.time > 1000.0) {
                s_short[static_cast<std::size_t>(r)] = s_now;
                got_short = true;
            }
            if (ev.time > 4000.0) break;
            s_now = sim.state().s[0];
        }
        s_long[static_cast<std::size_t>(r)] = s_now;
    }
    auto scaled_var = [](std::vector<double> x, double t) {
        const double m = mean(x);
        for (double& v : x) v = (v - m) / std::sqrt(t);
        return variance(x, 1);
    };
    const double v_short = scaled_var(s_short, 1000.0);
    const double v_long = scaled_var(s_long, 4000.0);

    Checker chk;
    chk.require(v_long < v_short, "scaled spread variance did not shrink with the horizon");
    std::ostringstream os;
    os << "var@1000=" << v_short << " var@4000=" << v_long;
    return chk.finish(os.str());
}

// -------------------------------------------------------------------------
// 8. Bid/ask symmetry: mid-price drift 0 within 3 SE, endpoint skewness 0
//    within 3 SE.
Outcome criterion_lob_symmetry() {
    const ModelSpec spec = ergodic_lob(); // mu0 invariant under 1<->4, 2<->3
    const LobDemoReport rep = mid_price_scaling_demo(spec, 2000.0, 200, kSeed, 0);

    Checker chk;
    chk.require(std::abs(rep.drift_mean) <= 3.0 * rep.drift_se, "mid drift off 0 by > 3 SE");
    chk.require(std::abs(rep.endpoint_skewness) <= 3.0 * rep.endpoint_skewness_se,
                "endpoint skewness off 0 by > 3 SE");
    std::ostringstream os;
    os << "drift=" << rep.drift_mean << "+-" << rep.drift_se
       << " skew=" << rep.endpoint_skewness << "+-" << rep.endpoint_skewness_se;
    return chk.finish(os.str());
}

// -------------------------------------------------------------------------
// 9. Admissible-path checker reproduces the book construction at K=5 and
//    every witness survives the independent validator.
Outcome criterion_access_checker() {
    const ModelSpec spec = ergodic_lob();
    const AccessReport rep = check_access(spec, 5, 30);

    Checker chk;
    chk.require(rep.ok, "checker did not succeed");
    chk.require(rep.target == std::vector<int>{2}, "target is not s_o = 2");
    chk.require(rep.witnesses.size() == 5, "expected one witness per start in {1..5}");
    for (const AccessWitness& w : rep.witnesses) {
        std::string why;
        chk.require(validate_admissible_path(spec, w.start, w.path, rep.target, &why),
                    "witness failed independent validation: " + why);
        chk.require(static_cast<int>(w.path.size()) == rep.common_length,
                    "witness length differs from the common length");
    }
    std::ostringstream os;
    os << "s_o=" << (rep.target.empty() ? 0 : rep.target[0]) << " m=" << rep.common_length;
    return chk.finish(os.str());
}

// -------------------------------------------------------------------------
// 10. CLI determinism: identical output bytes across 1 and 4 worker threads
//     under a fixed seed, for every command.
Outcome criterion_determinism() {
    const char* bin = std::getenv("CHAWKES_BIN");
    Checker chk;
    if (!bin) {
        chk.require(false, "CHAWKES_BIN not set");
        return chk.finish("cannot locate CLI");
    }
    const fs::path dir =
        fs::temp_directory_path() / ("chawkes_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path spec_path = dir / "lob.json";
    save_spec_file(ergodic_lob(), spec_path.string());

    auto run = [&](const std::string& args) {
        const std::string cmd = std::string(bin) + " " + args + " > " +
                                (dir / "cmd.out").string() + " 2> " +
                                (dir / "cmd.err").string();
        const int status = std::system(cmd.c_str());
        return status == -1 ? -1 : WEXITSTATUS(status);
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    auto compare_across_threads = [&](const std::string& args,
                                      const std::vector<std::string>& files,
                                      const std::string& what) {
        const std::string prefix = (dir / "run").string();
        chk.require(run("--threads 1 " + args + " --out " + prefix) == 0,
                    what + " failed single-threaded");
        std::map<std::string, std::string> first;
        for (const auto& f : files) first[f] = slurp(prefix + f);
        chk.require(run("--threads 4 " + args + " --out " + prefix) == 0,
                    what + " failed multi-threaded");
        for (const auto& f : files) {
            chk.require(!first[f].empty(), what + " produced no " + f);
            chk.require(first[f] == slurp(prefix + f),
                        what + " differs across worker counts in " + f);
        }
    };

    compare_across_threads("simulate " + spec_path.string() + " --events 3000 --seed 5 --snapshots",
                           {".events.csv", ".manifest.json"}, "simulate");
    compare_across_threads("check " + spec_path.string() + " --seed 5",
                           {".report.json", ".manifest.json"}, "check");
    compare_across_threads("fclt " + spec_path.string() +
                               " --w mid --T 300 --reps 40 --tgrid 0.5,1.0 --seed 5",
                           {".reps.csv", ".diagnostics.json", ".manifest.json"}, "fclt");
    compare_across_threads("lob-demo " + spec_path.string() + " --T 200 --reps 32 --seed 5",
                           {".demo.json", ".manifest.json"}, "lob-demo");

    fs::remove_all(dir);
    return chk.finish("simulate/check/fclt/lob-demo byte-identical across 1 and 4 threads");
}

struct Criterion {
    const char* name;
    std::function<Outcome()> fn;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"unconstrained-rate-law", criterion_rate_law},
        {"stationary-mark-moment", criterion_mark_moment},
        {"birth-death-book", criterion_birth_death},
        {"sampler-exactness", criterion_sampler_exactness},
        {"fclt-poisson-control", criterion_fclt_control},
        {"compound-poisson-variance", criterion_compound_poisson},
        {"spread-degeneracy", criterion_spread_degeneracy},
        {"lob-symmetry", criterion_lob_symmetry},
        {"admissible-path-checker", criterion_access_checker},
        {"cli-determinism", criterion_determinism},
    };

    int only = 0;
    if (argc >= 3 && std::strcmp(argv[1], "--only") == 0) only = std::atoi(argv[2]);

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i + 1) != only) continue;
        Outcome out;
        try {
            out = criteria[i].fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << i + 1 << ". " << criteria[i].name
                  << " — " << out.detail << "\n";
        if (!out.pass) ++failures;
    }
    return failures;
}
