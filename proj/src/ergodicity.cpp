#include "chawkes/ergodicity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <sstream>
#include <unordered_map>

#include "chawkes/parallel.hpp"
#include "chawkes/stats.hpp"
#include "json.hpp"

namespace chawkes {

double fertility_spectral_radius(const Matrix& fertility) {
    return spectral_radius(fertility);
}

namespace {

void require_subcritical(const Matrix& fertility, const char* who) {
    const double rho = spectral_radius(fertility);
    if (!(rho < 1.0))
        throw NotSubcritical(std::string(who) + ": spectral radius " + std::to_string(rho) +
                             " is not < 1");
}

} // namespace

std::vector<double> branching_vector(const Matrix& fertility) {
    require_subcritical(fertility, "branching_vector");
    const std::size_t p = fertility.rows();
    Matrix a = Matrix::identity(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) a(i, j) -= fertility(j, i);
    return solve_linear(std::move(a), std::vector<double>(p, 1.0));
}

std::vector<double> mean_event_rates(const ModelSpec& spec) {
    require_subcritical(spec.fertility, "mean_event_rates");
    const std::size_t p = static_cast<std::size_t>(spec.p);
    Matrix a = Matrix::identity(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) a(i, j) -= spec.fertility(i, j);
    return solve_linear(std::move(a), spec.mu0);
}

std::string subset_to_string(SubsetMask mask) {
    std::string out = "{";
    bool first = true;
    for (int k = 0; k < 32; ++k) {
        if (mask & (SubsetMask{1} << k)) {
            if (!first) out += ",";
            out += std::to_string(k + 1);
            first = false;
        }
    }
    return out + "}";
}

std::vector<int> summed_jump(const ModelSpec& spec, SubsetMask mask) {
    std::vector<int> out(static_cast<std::size_t>(spec.p), 0);
    for (int k = 0; k < spec.q; ++k) {
        if (!(mask & (SubsetMask{1} << k))) continue;
        for (int i = 0; i < spec.p; ++i)
            out[static_cast<std::size_t>(i)] +=
                spec.jumps[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    return out;
}

double drift_indicator(const ModelSpec& spec, SubsetMask mask) {
    if (mask == 0) throw std::invalid_argument("drift_indicator: subset must be nonempty");
    if (mask >= (SubsetMask{1} << spec.q))
        throw std::invalid_argument("drift_indicator: subset outside 1..q");
    const std::vector<double> rates = mean_event_rates(spec);
    const std::vector<int> jj = summed_jump(spec, mask);
    double s = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) s += jj[i] * rates[i];
    return s;
}

double unconstrained_mark_moment(const ModelSpec& spec, const WeightFunction& w) {
    if (w.values.size() != static_cast<std::size_t>(spec.p))
        throw std::invalid_argument("unconstrained_mark_moment: weight length must be p");
    const std::vector<double> rates = mean_event_rates(spec);
    double num = 0.0;
    double den = spec.mu0_null;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        num += w.values[i] * rates[i];
        den += rates[i];
    }
    return num / den;
}

// ---------------------------------------------------------------------------
// Admissible-path search
// ---------------------------------------------------------------------------

namespace {

struct AccessSearch {
    const ModelSpec& spec;
    int box = 0;          // per-component bound: states live in {1..box}^q
    int max_len = 0;
    std::uint64_t mask_span = 0; // 2^p
    bool positivity_pruned = false;

    explicit AccessSearch(const ModelSpec& s) : spec(s) {}

    std::uint64_t encode_state(const std::vector<int>& s) const {
        std::uint64_t code = 0;
        for (int k = spec.q - 1; k >= 0; --k)
            code = code * static_cast<std::uint64_t>(box) +
                   static_cast<std::uint64_t>(s[static_cast<std::size_t>(k)] - 1);
        return code;
    }

    std::vector<int> decode_state(std::uint64_t code) const {
        std::vector<int> s(static_cast<std::size_t>(spec.q));
        for (int k = 0; k < spec.q; ++k) {
            s[static_cast<std::size_t>(k)] = static_cast<int>(code % box) + 1;
            code /= static_cast<std::uint64_t>(box);
        }
        return s;
    }

    struct PerStart {
        // (state,mask) -> packed parent key and mark; roots map to themselves.
        std::unordered_map<std::uint64_t, std::pair<std::uint64_t, std::int8_t>> parent;
        // completed target state code -> (depth, completing node key)
        std::unordered_map<std::uint64_t, std::pair<int, std::uint64_t>> done;
        bool depth_capped = false;
    };

    std::uint64_t node_key(std::uint64_t state_code, std::uint32_t mask) const {
        return state_code * mask_span + mask;
    }

    // Breadth-first over (state, suffix-marks-used). Mark 0 never moves the
    // state, so zero-padding is applied at reconstruction, not searched.
    PerStart bfs(const std::vector<int>& start) const {
        PerStart out;
        const std::uint32_t full = static_cast<std::uint32_t>(mask_span - 1);
        std::deque<std::uint64_t> frontier;
        const std::uint64_t root = node_key(encode_state(start), 0);
        out.parent.emplace(root, std::make_pair(root, std::int8_t{-1}));
        frontier.push_back(root);

        auto* self = const_cast<AccessSearch*>(this);
        int depth = 0;
        while (!frontier.empty()) {
            if (depth >= max_len) {
                out.depth_capped = true;
                break;
            }
            ++depth;
            std::size_t level = frontier.size();
            while (level-- > 0) {
                const std::uint64_t key = frontier.front();
                frontier.pop_front();
                const std::uint32_t mask = static_cast<std::uint32_t>(key % mask_span);
                const std::uint64_t code = key / mask_span;
                const std::vector<int> s = decode_state(code);

                for (int i = 1; i <= spec.p; ++i) {
                    if (mask != 0 && (mask & (1u << (i - 1)))) continue; // suffix mark reuse
                    if (spec.blocked(i, s)) continue;

                    std::vector<int> ns = s;
                    bool fits = true;
                    const auto& jr = spec.jumps[static_cast<std::size_t>(i - 1)];
                    for (int k = 0; k < spec.q; ++k) {
                        ns[static_cast<std::size_t>(k)] += jr[static_cast<std::size_t>(k)];
                        const int v = ns[static_cast<std::size_t>(k)];
                        if (v < 1) {
                            self->positivity_pruned = true;
                            fits = false;
                            break;
                        }
                        if (v > box) {
                            fits = false;
                            break;
                        }
                    }
                    if (!fits) continue;

                    const std::uint64_t ncode = encode_state(ns);
                    // From a prefix node the same move may either extend the
                    // prefix or open the suffix.
                    std::uint32_t next_masks[2];
                    int n_next = 0;
                    if (mask == 0) {
                        next_masks[n_next++] = 0;
                        next_masks[n_next++] = 1u << (i - 1);
                    } else {
                        next_masks[n_next++] = mask | (1u << (i - 1));
                    }
                    for (int m = 0; m < n_next; ++m) {
                        const std::uint32_t nm = next_masks[m];
                        if (nm == full) {
                            if (!out.done.count(ncode)) {
                                const std::uint64_t fk = node_key(ncode, full);
                                if (out.parent.emplace(fk, std::make_pair(key, std::int8_t(i)))
                                        .second)
                                    out.done.emplace(ncode, std::make_pair(depth, fk));
                            }
                            continue;
                        }
                        const std::uint64_t nk = node_key(ncode, nm);
                        if (out.parent.emplace(nk, std::make_pair(key, std::int8_t(i))).second)
                            frontier.push_back(nk);
                    }
                }
            }
        }
        return out;
    }

    std::vector<int> rebuild_path(const PerStart& ps, std::uint64_t final_key) const {
        std::vector<int> marks;
        std::uint64_t key = final_key;
        while (true) {
            const auto& [prev, mark] = ps.parent.at(key);
            if (mark < 0) break;
            marks.push_back(mark);
            key = prev;
        }
        std::reverse(marks.begin(), marks.end());
        return marks;
    }
};

std::vector<std::vector<int>> enumerate_box(int q, int k_max) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(q), 1);
    while (true) {
        out.push_back(cur);
        int k = 0;
        while (k < q && cur[static_cast<std::size_t>(k)] == k_max) {
            cur[static_cast<std::size_t>(k)] = 1;
            ++k;
        }
        if (k == q) break;
        ++cur[static_cast<std::size_t>(k)];
    }
    // lexicographic by leading component
    std::sort(out.begin(), out.end());
    return out;
}

std::string state_to_string(const std::vector<int>& s) {
    std::string out = "(";
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(s[k]);
    }
    return out + ")";
}

} // namespace

AccessReport check_access(const ModelSpec& spec, int k_max, int max_len) {
    AccessReport rep;
    if (spec.q < 1) throw std::invalid_argument("check_access: requires q >= 1");
    if (k_max < 1) throw std::invalid_argument("check_access: K must be >= 1");
    if (max_len < spec.p + 1)
        throw std::invalid_argument("check_access: max_len must be at least p+1");
    if (spec.p > 20) throw std::invalid_argument("check_access: p too large for suffix masks");

    int jbar = 0;
    for (int i = 0; i < spec.p; ++i) {
        int row = 0;
        for (int k = 0; k < spec.q; ++k)
            row += std::abs(spec.jumps[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
        jbar = std::max(jbar, row);
    }

    AccessSearch search(spec);
    search.box = k_max + 1 + max_len * std::max(jbar, 1);
    search.max_len = max_len;
    search.mask_span = std::uint64_t{1} << spec.p;

    const double space = std::pow(static_cast<double>(search.box), spec.q) *
                         static_cast<double>(search.mask_span);
    if (space > 1e9)
        throw std::invalid_argument(
            "check_access: search space too large; reduce K or max_len");

    // Starts cover {1..K+1}^q; the outer ring probes K-independence of the target.
    const auto starts = enumerate_box(spec.q, k_max + 1);
    std::vector<AccessSearch::PerStart> results(starts.size());
    std::vector<bool> is_core(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        is_core[i] =
            *std::max_element(starts[i].begin(), starts[i].end()) <= k_max;
        results[i] = search.bfs(starts[i]);
    }
    rep.positivity_pruned = search.positivity_pruned;
    const bool any_capped =
        std::any_of(results.begin(), results.end(),
                    [](const AccessSearch::PerStart& r) { return r.depth_capped; });

    // No admissible completed path from some required start.
    for (std::size_t i = 0; i < starts.size(); ++i) {
        if (!is_core[i] || !results[i].done.empty()) continue;
        rep.budget_exceeded = any_capped;
        rep.failure = "no admissible path with a full mark suffix from s=" +
                      state_to_string(starts[i]);
        if (rep.positivity_pruned)
            rep.failure += " (paths were pruned by the positivity rule S >= 1)";
        if (rep.budget_exceeded) rep.failure += "; search depth budget reached";
        return rep;
    }

    // Canonical target for a family of starts: reachable from all of them,
    // preferring states where no mark is blocked, then lexicographic order.
    auto canonical = [&](bool include_ring, std::vector<int>* out) -> bool {
        std::vector<std::uint64_t> common;
        bool first_set = true;
        for (std::size_t i = 0; i < starts.size(); ++i) {
            if (!include_ring && !is_core[i]) continue;
            if (first_set) {
                for (const auto& [code, info] : results[i].done) common.push_back(code);
                first_set = false;
                continue;
            }
            std::vector<std::uint64_t> keep;
            for (std::uint64_t code : common)
                if (results[i].done.count(code)) keep.push_back(code);
            common.swap(keep);
            if (common.empty()) return false;
        }
        std::vector<std::pair<std::vector<int>, std::uint64_t>> cand;
        for (std::uint64_t code : common) cand.emplace_back(search.decode_state(code), code);
        std::sort(cand.begin(), cand.end(),
                  [&](const auto& a, const auto& b) {
                      auto open = [&](const std::vector<int>& s) {
                          for (int i = 1; i <= spec.p; ++i)
                              if (spec.blocked(i, s)) return 1;
                          return 0;
                      };
                      const int oa = open(a.first);
                      const int ob = open(b.first);
                      if (oa != ob) return oa < ob;
                      return a.first < b.first;
                  });
        *out = cand.front().first;
        return true;
    };

    std::vector<int> target_core;
    std::vector<int> target_ring;
    if (!canonical(false, &target_core)) {
        rep.budget_exceeded = any_capped;
        rep.failure = "starts in {1.." + std::to_string(k_max) +
                      "}^q share no common reachable target";
        if (rep.budget_exceeded) rep.failure += "; search depth budget reached";
        return rep;
    }
    if (!canonical(true, &target_ring) || target_ring != target_core) {
        rep.budget_exceeded = any_capped;
        rep.failure = "no K-independent target: the canonical s_o changes between K=" +
                      std::to_string(k_max) + " (" + state_to_string(target_core) +
                      ") and K=" + std::to_string(k_max + 1) +
                      (target_ring.empty() ? std::string(" (none)")
                                           : " (" + state_to_string(target_ring) + ")");
        if (rep.budget_exceeded) rep.failure += "; search depth budget reached";
        return rep;
    }

    rep.target = target_core;
    const std::uint64_t target_code = search.encode_state(target_core);

    int common_len = spec.p + 1;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        if (!is_core[i]) continue;
        common_len = std::max(common_len, results[i].done.at(target_code).first);
    }
    rep.common_length = common_len;

    for (std::size_t i = 0; i < starts.size(); ++i) {
        if (!is_core[i]) continue;
        std::vector<int> marks =
            search.rebuild_path(results[i], results[i].done.at(target_code).second);
        std::vector<int> padded(static_cast<std::size_t>(common_len) - marks.size(), 0);
        padded.insert(padded.end(), marks.begin(), marks.end());
        rep.witnesses.push_back({starts[i], std::move(padded)});
    }
    rep.ok = true;
    return rep;
}

bool validate_admissible_path(const ModelSpec& spec, const std::vector<int>& start,
                              const std::vector<int>& path, const std::vector<int>& target,
                              std::string* why) {
    auto explain = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (static_cast<int>(path.size()) < spec.p + 1)
        return explain("path shorter than p+1");

    std::vector<int> s = start;
    for (std::size_t n = 0; n < path.size(); ++n) {
        const int mark = path[n];
        if (mark < 0 || mark > spec.p) return explain("mark outside {0..p}");
        if (spec.blocked(mark, s))
            return explain("step " + std::to_string(n + 1) + " uses blocked mark " +
                           std::to_string(mark) + " at state " + state_to_string(s));
        if (mark >= 1) {
            const auto& jr = spec.jumps[static_cast<std::size_t>(mark - 1)];
            for (int k = 0; k < spec.q; ++k) {
                s[static_cast<std::size_t>(k)] += jr[static_cast<std::size_t>(k)];
                if (s[static_cast<std::size_t>(k)] < 1)
                    return explain("state leaves Z_+^q at step " + std::to_string(n + 1));
            }
        }
    }
    if (s != target) return explain("path ends at " + state_to_string(s) + ", not the target");

    std::vector<bool> seen(static_cast<std::size_t>(spec.p) + 1, false);
    for (std::size_t n = path.size() - static_cast<std::size_t>(spec.p); n < path.size(); ++n) {
        const int mark = path[n];
        if (mark < 1 || seen[static_cast<std::size_t>(mark)])
            return explain("last p marks are not a permutation of {1..p}");
        seen[static_cast<std::size_t>(mark)] = true;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Induction conditions
// ---------------------------------------------------------------------------

std::string verdict_to_string(Verdict v) {
    switch (v) {
        case Verdict::Negative: return "negative";
        case Verdict::Positive: return "positive";
        default: return "inconclusive";
    }
}

namespace {

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
};

// Stationary mean of J_o^J(I) along the reduced chain, one replication.
McEstimate stationary_jump_moment(const ModelSpec& reduced, const std::vector<int>& jsum,
                                  std::int64_t events, int batches, SeedInfo seed) {
    const std::int64_t burn = std::max<std::int64_t>(10000, events / 4);
    ChainSimulator sim(reduced, initial_state(reduced), seed);
    for (std::int64_t n = 0; n < burn; ++n) sim.next();

    const std::int64_t batch_len = events / batches;
    std::vector<double> batch_mean(static_cast<std::size_t>(batches), 0.0);
    for (int b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::int64_t n = 0; n < batch_len; ++n) {
            const Event ev = sim.next();
            if (ev.mark >= 1) s += jsum[static_cast<std::size_t>(ev.mark - 1)];
        }
        batch_mean[static_cast<std::size_t>(b)] = s / static_cast<double>(batch_len);
    }
    McEstimate est;
    est.mean = mean(batch_mean);
    est.se = std::sqrt(variance(batch_mean, 1) / static_cast<double>(batches));
    return est;
}

} // namespace

InductionResult check_induction(const ModelSpec& spec, const McParams& mc) {
    require_subcritical(spec.fertility, "check_induction");
    if (spec.q > 12)
        throw std::invalid_argument(
            "check_induction: 2^q subsets impractical for q > 12");
    if (mc.replications < 1 || mc.replications > 256)
        throw std::invalid_argument("check_induction: replications must be in 1..256");

    InductionResult out;
    if (spec.q == 0) {
        out.all_negative = true;
        return out;
    }

    const SubsetMask full = (SubsetMask{1} << spec.q) - 1;
    std::vector<SubsetMask> order;
    for (SubsetMask m = 1; m <= full; ++m) order.push_back(m);
    std::stable_sort(order.begin(), order.end(), [](SubsetMask a, SubsetMask b) {
        return std::popcount(a) < std::popcount(b);
    });

    std::map<SubsetMask, bool> verified;
    bool all_negative = true;

    // Gather the Monte-Carlo jobs first so replication streams are assigned
    // deterministically, then run them in one parallel wave.
    struct Job {
        SubsetMask subset;
        SubsetMask kept;
        std::size_t cond_index;
    };
    std::vector<Job> jobs;

    for (SubsetMask subset : order) {
        const double indicator = drift_indicator(spec, subset);
        out.drift_indicators[subset] = indicator;
        bool branch_ok = indicator < 0.0;
        if (!(indicator < 0.0)) all_negative = false;

        for (SubsetMask kept = (subset - 1) & subset; kept != 0;
             kept = (kept - 1) & subset) {
            McCondition cond;
            cond.subset = subset;
            cond.kept = kept;
            if (!verified[kept]) {
                cond.verdict = Verdict::Inconclusive;
                cond.note = "prerequisite branch " + subset_to_string(kept) + " not verified";
                branch_ok = false;
                all_negative = false;
                out.mc_conditions.push_back(cond);
                continue;
            }
            out.mc_conditions.push_back(cond);
            jobs.push_back({subset, kept, out.mc_conditions.size() - 1});
        }

        // Provisional: MC verdicts patch this below.
        verified[subset] = branch_ok;
    }

    if (!jobs.empty()) {
        const int reps = mc.replications;
        std::vector<McEstimate> results(jobs.size() * static_cast<std::size_t>(reps));
        std::vector<ModelSpec> reduced(jobs.size());
        std::vector<std::vector<int>> jsums(jobs.size());
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            std::set<int> remove;
            for (int k = 0; k < spec.q; ++k)
                if (!(jobs[j].kept & (SubsetMask{1} << k))) remove.insert(k + 1);
            reduced[j] = reduce_constraints(spec, remove);
            jsums[j] = summed_jump(spec, jobs[j].subset);
        }

        parallel_for_index(results.size(), mc.threads, [&](std::size_t idx) {
            const std::size_t j = idx / static_cast<std::size_t>(reps);
            const std::size_t r = idx % static_cast<std::size_t>(reps);
            const SeedInfo seed{mc.seed, ((static_cast<std::uint64_t>(j) + 1) << 16) +
                                             static_cast<std::uint64_t>(r)};
            results[idx] = stationary_jump_moment(reduced[j], jsums[j], mc.events, mc.batches,
                                                  seed);
        });

        for (std::size_t j = 0; j < jobs.size(); ++j) {
            double m = 0.0;
            double var = 0.0;
            for (int r = 0; r < reps; ++r) {
                const McEstimate& e = results[j * static_cast<std::size_t>(reps) +
                                              static_cast<std::size_t>(r)];
                m += e.mean;
                var += e.se * e.se;
            }
            m /= reps;
            const double se = std::sqrt(var) / reps;

            McCondition& cond = out.mc_conditions[jobs[j].cond_index];
            cond.estimate = m;
            cond.se = se;
            if (m + 3.0 * se < 0.0)
                cond.verdict = Verdict::Negative;
            else if (m - 3.0 * se > 0.0)
                cond.verdict = Verdict::Positive;
            else
                cond.verdict = Verdict::Inconclusive;
        }

        // A branch invalidated by Monte Carlo invalidates every larger branch
        // that used it as a prerequisite. Popcount order makes one pass enough.
        for (SubsetMask subset : order) {
            bool branch_ok = out.drift_indicators.at(subset) < 0.0;
            for (McCondition& cond : out.mc_conditions) {
                if (cond.subset != subset) continue;
                if (!verified[cond.kept] && cond.note.empty()) {
                    cond.verdict = Verdict::Inconclusive;
                    cond.note = "prerequisite branch " + subset_to_string(cond.kept) +
                                " invalidated";
                }
                if (cond.verdict != Verdict::Negative) branch_ok = false;
            }
            verified[subset] = branch_ok;
            if (!branch_ok) all_negative = false;
        }
    }

    out.all_negative = all_negative;
    return out;
}

std::string classification_to_string(Classification c) {
    switch (c) {
        case Classification::GeometricallyErgodic: return "geometrically-ergodic";
        case Classification::Transient: return "transient";
        default: return "inconclusive";
    }
}

Classification classify(const ModelSpec& spec, ErgodicityReport& report) {
    std::ostringstream why;
    if (!(report.spectral_radius < 1.0)) {
        report.classification = Classification::Inconclusive;
        report.justification = "spectral radius of the fertility matrix is not < 1";
        return report.classification;
    }
    why << "rho(fertility)=" << report.spectral_radius << "<1";

    if (spec.q == 1) {
        const double ind = report.induction.drift_indicators.count(1)
                               ? report.induction.drift_indicators.at(1)
                               : drift_indicator(spec, 1);
        if (ind > 0.0) {
            report.classification = Classification::Transient;
            report.justification =
                "q=1 with positive drift indicator J^T (Id-A)^{-1} mu0 = " +
                std::to_string(ind);
            return report.classification;
        }
    }

    std::string blocker;
    if (!report.fertility_invertible)
        blocker = "fertility matrix is not invertible (min singular value " +
                  std::to_string(report.min_singular_value) + ")";
    else if (spec.q >= 1 && !report.access.ok)
        blocker = "admissible-path check failed: " + report.access.failure;
    else if (!report.induction.all_negative)
        blocker = "not every induction condition is negative";

    if (blocker.empty()) {
        report.classification = Classification::GeometricallyErgodic;
        why << "; fertility invertible";
        if (spec.q >= 1)
            why << "; access ok (s_o=" << state_to_string(report.access.target)
                << ", m=" << report.access.common_length << ")";
        why << "; all induction conditions negative";
        report.justification = why.str();
    } else {
        report.classification = Classification::Inconclusive;
        report.justification = blocker;
    }
    return report.classification;
}

ErgodicityReport check_model(const ModelSpec& spec, const CheckParams& params) {
    ErgodicityReport rep;
    rep.spectral_radius = fertility_spectral_radius(spec.fertility);
    rep.min_singular_value = min_singular_value(spec.fertility);
    rep.fertility_invertible =
        rep.min_singular_value > 1e-12 * inf_norm(spec.fertility);

    if (rep.spectral_radius < 1.0) {
        rep.u = branching_vector(spec.fertility);
        rep.mean_rates = mean_event_rates(spec);
        rep.induction = check_induction(spec, params.mc);
    }

    if (spec.q >= 1) {
        int max_len = params.access_max_len;
        if (max_len <= 0) max_len = spec.p + 2 + 4 * spec.q * (params.access_k + 1);
        rep.access = check_access(spec, params.access_k, max_len);
    } else {
        rep.access.ok = true; // no constraint variable to steer
    }

    classify(spec, rep);
    return rep;
}

std::string report_to_json(const ErgodicityReport& report) {
    nlohmann::json j;
    j["spectral_radius"] = report.spectral_radius;
    j["u"] = report.u;
    j["mean_rates"] = report.mean_rates;
    j["min_singular_value"] = report.min_singular_value;
    j["fertility_invertible"] = report.fertility_invertible;

    nlohmann::json ind = nlohmann::json::object();
    for (const auto& [mask, value] : report.induction.drift_indicators)
        ind[subset_to_string(mask)] = value;
    j["drift_indicators"] = std::move(ind);

    nlohmann::json mcs = nlohmann::json::array();
    for (const McCondition& c : report.induction.mc_conditions) {
        mcs.push_back({{"J", subset_to_string(c.subset)},
                       {"J_kept", subset_to_string(c.kept)},
                       {"estimate", c.estimate},
                       {"se", c.se},
                       {"verdict", verdict_to_string(c.verdict)},
                       {"note", c.note}});
    }
    j["mc_conditions"] = std::move(mcs);

    nlohmann::json acc;
    acc["ok"] = report.access.ok;
    acc["target"] = report.access.target;
    acc["common_length"] = report.access.common_length;
    acc["budget_exceeded"] = report.access.budget_exceeded;
    acc["failure"] = report.access.failure;
    nlohmann::json wits = nlohmann::json::array();
    for (const AccessWitness& w : report.access.witnesses)
        wits.push_back({{"start", w.start}, {"path", w.path}});
    acc["witnesses"] = std::move(wits);
    j["access"] = std::move(acc);

    j["classification"] = classification_to_string(report.classification);
    j["justification"] = report.justification;
    return j.dump(2) + "\n";
}

std::string report_to_text(const ErgodicityReport& report) {
    std::ostringstream os;
    os << "spectral radius        " << report.spectral_radius << "\n";
    os << "fertility invertible   " << (report.fertility_invertible ? "yes" : "no")
       << " (min singular value " << report.min_singular_value << ")\n";
    if (!report.u.empty()) {
        os << "u                     ";
        for (double v : report.u) os << " " << v;
        os << "\n";
        os << "mean rates            ";
        for (double v : report.mean_rates) os << " " << v;
        os << "\n";
    }
    for (const auto& [mask, value] : report.induction.drift_indicators)
        os << "indicator " << subset_to_string(mask) << "      " << value << "\n";
    for (const McCondition& c : report.induction.mc_conditions) {
        os << "mc " << subset_to_string(c.subset) << " via " << subset_to_string(c.kept)
           << "  " << c.estimate << " +- " << c.se << "  [" << verdict_to_string(c.verdict)
           << "]";
        if (!c.note.empty()) os << "  " << c.note;
        os << "\n";
    }
    if (report.access.ok) {
        os << "access                 ok, s_o=" << state_to_string(report.access.target)
           << ", common length " << report.access.common_length << "\n";
    } else if (!report.access.failure.empty()) {
        os << "access                 FAILED: " << report.access.failure << "\n";
    }
    os << "classification         " << classification_to_string(report.classification) << "\n";
    os << "justification          " << report.justification << "\n";
    return os.str();
}

} // namespace chawkes
