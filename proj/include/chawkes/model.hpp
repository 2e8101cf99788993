#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "chawkes/linalg.hpp"

namespace chawkes {

// One constraint component A_i(k): a finite set of blocking values for one
// constraint coordinate, kept sorted and unique. A mark is blocked when any
// component's set contains the matching coordinate of S; empty components
// contribute nothing, so a mark with all components empty is never blocked.
using ConstraintSet = std::vector<int>;

/// Full parameterization of a constrained multivariate Hawkes model with
/// exponential kernels. Immutable by convention once validated; safe to share
/// across simulation workers.
struct ModelSpec {
    int p = 0;                     // number of event marks
    int q = 0;                     // number of constraint components (0 = unconstrained)
    double beta = 0.0;             // kernel decay rate, 1/time
    Matrix fertility;              // p x p, entry (i,j) = alpha_{i,j}
    std::vector<double> mu0;       // immigrant rates, length p
    double mu0_null = 1.0;         // auxiliary mark-0 sampling rate
    std::vector<std::vector<ConstraintSet>> constraints; // p entries of q components
    std::vector<std::vector<int>> jumps;                 // p rows x q columns

    // True when state s (length q) lies in the blocked region A_mark; marks
    // use 1-based indexing, mark 0 is never blocked.
    bool blocked(int mark, const std::vector<int>& s) const;

    // Row of the jump map for a mark in {0,...,p}; mark 0 maps to the zero row.
    std::vector<int> jump_row(int mark) const;
};

/// Mark weight function w with the implicit extension w(0) = 0.
struct WeightFunction {
    std::vector<double> values;

    double at(int mark) const {
        return mark >= 1 ? values[static_cast<std::size_t>(mark - 1)] : 0.0;
    }
};

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

// Checks every structural invariant, returning all violations at once.
// Warnings flag constraint sets that do not visibly keep S inside Z_+^q
// (positivity is then enforced at runtime by the simulator).
ValidationReport validate(const ModelSpec& spec);

struct SpecParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SpecValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// JSON model document round trip. load_spec throws SpecParseError on
// malformed or missing fields and SpecValidationError when validate() fails.
ModelSpec load_spec(const std::string& json_text);
ModelSpec load_spec_file(const std::string& path);
std::string save_spec(const ModelSpec& spec);
void save_spec_file(const ModelSpec& spec, const std::string& path);

// FNV-1a over the canonical serialized document.
std::uint64_t spec_hash(const ModelSpec& spec);
std::string spec_hash_hex(const ModelSpec& spec);

// Four-event limit order book model: marks are ask-up, ask-down, bid-up,
// bid-down; the single constraint component is the spread, with down moves
// of the spread blocked at spread 1.
ModelSpec lob_preset(const std::vector<double>& mu0, const Matrix& fertility, double beta,
                     double mu0_null = 1.0);

WeightFunction lob_mid_weights();    // (1/2, -1/2, 1/2, -1/2)
WeightFunction lob_ask_weights();    // (1, -1, 0, 0)
WeightFunction lob_bid_weights();    // (0, 0, 1, -1)
WeightFunction lob_spread_weights(); // jump column (1, -1, -1, 1)

} // namespace chawkes
