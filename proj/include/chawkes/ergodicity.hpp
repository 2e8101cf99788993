#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chawkes/hawkes_core.hpp"
#include "chawkes/model.hpp"

namespace chawkes {

struct NotSubcritical : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Perron root of the fertility matrix.
double fertility_spectral_radius(const Matrix& fertility);

// u = (Id - fertility^T)^{-1} 1_p; componentwise >= 1 under subcriticality.
std::vector<double> branching_vector(const Matrix& fertility);

// (Id - fertility)^{-1} mu0: long-run event rates of the unconstrained process.
std::vector<double> mean_event_rates(const ModelSpec& spec);

// Constraint subsets are bitmasks over components 1..q (bit k-1 = component k).
using SubsetMask = std::uint32_t;

std::string subset_to_string(SubsetMask mask);

// Summed jump J^subset(i) = sum_{k in subset} J_k(i) for marks i=1..p.
std::vector<int> summed_jump(const ModelSpec& spec, SubsetMask mask);

// (J^subset)^T (Id - fertility)^{-1} mu0. Negative values point towards
// ergodicity, positive values towards transience (q=1).
double drift_indicator(const ModelSpec& spec, SubsetMask mask);

// Stationary mark moment of the unconstrained embedded chain:
// w^T (Id-A)^{-1} mu0 / (mu0_null + 1^T (Id-A)^{-1} mu0).
double unconstrained_mark_moment(const ModelSpec& spec, const WeightFunction& w);

struct AccessWitness {
    std::vector<int> start; // length q
    std::vector<int> path;  // marks in {0,...,p}, common length for all starts
};

struct AccessReport {
    bool ok = false;
    bool budget_exceeded = false;
    bool positivity_pruned = false;
    std::vector<int> target;    // the common state s_o
    int common_length = 0;      // m; every witness has this length
    std::vector<AccessWitness> witnesses;
    std::string failure;        // empty on success
};

// Bounded search for the admissible-path property: from every start in
// {1..K}^q an admissible path of a common length m <= max_len must end at one
// common target with the last p marks exhausting {1,...,p}. The target must
// be the same canonical choice at K and K+1 (a target that drifts with K is
// no evidence of a K-independent one).
AccessReport check_access(const ModelSpec& spec, int k_max, int max_len);

// Independent replay of one witness against the raw spec: admissibility at
// every step, positivity, final state, and the mark-permutation suffix.
bool validate_admissible_path(const ModelSpec& spec, const std::vector<int>& start,
                              const std::vector<int>& path, const std::vector<int>& target,
                              std::string* why = nullptr);

enum class Verdict { Negative, Positive, Inconclusive };

std::string verdict_to_string(Verdict v);

struct McCondition {
    SubsetMask subset = 0;       // the set J being certified
    SubsetMask kept = 0;         // J' (constraint components kept in the reduced chain)
    double estimate = 0.0;       // mean of J_o^J(I) under the reduced chain
    double se = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    std::string note;
};

struct McParams {
    std::int64_t events = 200000; // post-burn-in events per replication
    int replications = 4;
    std::uint64_t seed = 0;
    int batches = 64;
    int threads = 0; // <= 0: hardware concurrency
};

struct InductionResult {
    std::map<SubsetMask, double> drift_indicators;
    std::vector<McCondition> mc_conditions;
    bool all_negative = false;
};

// Runs the induction schedule: for every nonempty subset J in increasing
// cardinality, the analytic indicator, plus Monte-Carlo estimates of the
// stationary J_o^J moment under every strictly intermediate reduced chain.
InductionResult check_induction(const ModelSpec& spec, const McParams& mc);

enum class Classification { GeometricallyErgodic, Transient, Inconclusive };

std::string classification_to_string(Classification c);

struct ErgodicityReport {
    double spectral_radius = 0.0;
    std::vector<double> u;
    std::vector<double> mean_rates;
    double min_singular_value = 0.0;
    bool fertility_invertible = false;
    AccessReport access;
    InductionResult induction;
    Classification classification = Classification::Inconclusive;
    std::string justification;
};

// Applies the classification rules to an assembled report. Geometric
// ergodicity needs subcriticality, invertible fertility, the access property
// and every induction verdict negative; a positive q=1 indicator means
// transience; anything else is inconclusive with the blocker named.
Classification classify(const ModelSpec& spec, ErgodicityReport& report);

struct CheckParams {
    int access_k = 5;
    int access_max_len = 0; // <= 0: derived from K, p, q and the jump magnitudes
    McParams mc;
};

ErgodicityReport check_model(const ModelSpec& spec, const CheckParams& params);

std::string report_to_json(const ErgodicityReport& report);
std::string report_to_text(const ErgodicityReport& report);

} // namespace chawkes
