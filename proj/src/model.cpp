#include "chawkes/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace chawkes {

using nlohmann::json;

bool ModelSpec::blocked(int mark, const std::vector<int>& s) const {
    if (mark < 1 || q == 0) return false;
    const auto& sets = constraints[static_cast<std::size_t>(mark - 1)];
    for (int k = 0; k < q; ++k) {
        const ConstraintSet& comp = sets[static_cast<std::size_t>(k)];
        if (comp.empty()) continue; // empty component contributes nothing
        if (std::binary_search(comp.begin(), comp.end(), s[static_cast<std::size_t>(k)]))
            return true;
    }
    return false;
}

std::vector<int> ModelSpec::jump_row(int mark) const {
    if (mark < 1) return std::vector<int>(static_cast<std::size_t>(q), 0);
    return jumps[static_cast<std::size_t>(mark - 1)];
}

namespace {

bool positivity_guarded(const ModelSpec& spec, std::string& detail) {
    // Safe when every mark that can lower a component is blocked by that
    // component's own set at every boundary value it could cross.
    for (int i = 0; i < spec.p; ++i) {
        for (int k = 0; k < spec.q; ++k) {
            const int j = spec.jumps[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            if (j >= 0) continue;
            const ConstraintSet& comp =
                spec.constraints[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            for (int v = 1; v <= -j; ++v) {
                if (!std::binary_search(comp.begin(), comp.end(), v)) {
                    detail = "mark " + std::to_string(i + 1) + " lowers component " +
                             std::to_string(k + 1) + " by " + std::to_string(-j) +
                             " but is not blocked at value " + std::to_string(v);
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace

ValidationReport validate(const ModelSpec& spec) {
    ValidationReport rep;
    auto fail = [&rep](const std::string& msg) { rep.errors.push_back(msg); };

    if (spec.p < 1) fail("p must be a positive integer");
    if (spec.q < 0) fail("q must be non-negative");
    if (!(spec.beta > 0.0) || !std::isfinite(spec.beta)) fail("beta must be positive");
    if (!(spec.mu0_null > 0.0) || !std::isfinite(spec.mu0_null))
        fail("mu0_null must be positive");

    const auto p = static_cast<std::size_t>(std::max(spec.p, 0));
    const auto q = static_cast<std::size_t>(std::max(spec.q, 0));

    if (spec.mu0.size() != p) {
        fail("mu0 must have length p");
    } else {
        for (std::size_t i = 0; i < p; ++i) {
            if (!(spec.mu0[i] > 0.0) || !std::isfinite(spec.mu0[i]))
                fail("mu0[" + std::to_string(i + 1) + "] must be positive");
        }
    }

    if (spec.fertility.rows() != p || spec.fertility.cols() != p) {
        fail("fertility shape mismatch: expected " + std::to_string(spec.p) + "x" +
             std::to_string(spec.p));
    } else {
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) {
                const double a = spec.fertility(i, j);
                if (!(a >= 0.0) || !std::isfinite(a))
                    fail("fertility[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) +
                         "] must be a non-negative finite real");
            }
    }

    if (spec.constraints.size() != p) {
        fail("constraints must have one entry per mark");
    } else {
        for (std::size_t i = 0; i < p; ++i) {
            if (spec.constraints[i].size() != q) {
                fail("constraints[" + std::to_string(i + 1) + "] must have exactly q=" +
                     std::to_string(spec.q) + " components");
                continue;
            }
            for (std::size_t k = 0; k < q; ++k) {
                const ConstraintSet& comp = spec.constraints[i][k];
                for (int v : comp) {
                    if (v < 1)
                        fail("constraints[" + std::to_string(i + 1) + "][" +
                             std::to_string(k + 1) + "] contains " + std::to_string(v) +
                             "; members must be integers >= 1");
                }
                if (!std::is_sorted(comp.begin(), comp.end()) ||
                    std::adjacent_find(comp.begin(), comp.end()) != comp.end())
                    fail("constraints[" + std::to_string(i + 1) + "][" + std::to_string(k + 1) +
                         "] must be sorted with unique members");
            }
        }
    }

    if (spec.jumps.size() != p) {
        fail("jumps shape mismatch: expected " + std::to_string(spec.p) + " rows");
    } else {
        for (std::size_t i = 0; i < p; ++i) {
            if (spec.jumps[i].size() != q)
                fail("jumps shape mismatch: row " + std::to_string(i + 1) + " must have q=" +
                     std::to_string(spec.q) + " entries");
        }
    }

    if (rep.ok() && spec.q >= 1) {
        std::string detail;
        if (!positivity_guarded(spec, detail)) {
            rep.warnings.push_back(
                "constraint sets do not visibly keep S inside Z_+^q (" + detail +
                "); positivity is enforced at runtime");
        }
    }
    return rep;
}

namespace {

json spec_to_json(const ModelSpec& spec) {
    json j;
    j["p"] = spec.p;
    j["q"] = spec.q;
    j["beta"] = spec.beta;
    j["mu0_null"] = spec.mu0_null;
    j["mu0"] = spec.mu0;

    json fert = json::array();
    for (std::size_t i = 0; i < spec.fertility.rows(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < spec.fertility.cols(); ++k) row.push_back(spec.fertility(i, k));
        fert.push_back(std::move(row));
    }
    j["fertility"] = std::move(fert);
    j["constraints"] = spec.constraints;
    j["jumps"] = spec.jumps;
    return j;
}

void require_field(const json& j, const char* name) {
    if (!j.contains(name)) throw SpecParseError(std::string("missing field: ") + name);
}

template <typename T>
T field_as(const json& j, const char* name) {
    require_field(j, name);
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        throw SpecParseError(std::string("field '") + name + "' has wrong type: " + e.what());
    }
}

void reject_non_finite(const json& j, const char* name) {
    if (j.is_number_float() && !std::isfinite(j.get<double>()))
        throw SpecParseError(std::string("field '") + name + "' must be finite (no NaN/Inf)");
    if (j.is_array() || j.is_object()) {
        for (const auto& item : j) reject_non_finite(item, name);
    }
}

} // namespace

ModelSpec load_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw SpecParseError(std::string("model document is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SpecParseError("model document must be a JSON object");

    for (const char* name : {"p", "q", "beta", "mu0_null", "mu0", "fertility", "constraints",
                             "jumps"}) {
        require_field(j, name);
        reject_non_finite(j.at(name), name);
    }

    ModelSpec spec;
    spec.p = field_as<int>(j, "p");
    spec.q = field_as<int>(j, "q");
    spec.beta = field_as<double>(j, "beta");
    spec.mu0_null = field_as<double>(j, "mu0_null");
    spec.mu0 = field_as<std::vector<double>>(j, "mu0");

    const auto rows = field_as<std::vector<std::vector<double>>>(j, "fertility");
    spec.fertility = Matrix(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != spec.fertility.cols())
            throw SpecParseError("field 'fertility' must be rectangular");
        for (std::size_t k = 0; k < rows[i].size(); ++k) spec.fertility(i, k) = rows[i][k];
    }

    spec.constraints = field_as<std::vector<std::vector<ConstraintSet>>>(j, "constraints");
    for (auto& mark_sets : spec.constraints)
        for (auto& comp : mark_sets) std::sort(comp.begin(), comp.end());
    spec.jumps = field_as<std::vector<std::vector<int>>>(j, "jumps");

    const ValidationReport rep = validate(spec);
    if (!rep.ok()) {
        std::string msg = "model document failed validation:";
        for (const auto& e : rep.errors) msg += "\n  - " + e;
        throw SpecValidationError(msg);
    }
    return spec;
}

ModelSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecParseError("cannot open model document: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_spec(buf.str());
}

std::string save_spec(const ModelSpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

void save_spec_file(const ModelSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model document: " + path);
    out << save_spec(spec);
}

std::uint64_t spec_hash(const ModelSpec& spec) {
    const std::string doc = save_spec(spec);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : doc) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string spec_hash_hex(const ModelSpec& spec) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(spec_hash(spec)));
    return std::string(buf);
}

ModelSpec lob_preset(const std::vector<double>& mu0, const Matrix& fertility, double beta,
                     double mu0_null) {
    ModelSpec spec;
    spec.p = 4;
    spec.q = 1;
    spec.beta = beta;
    spec.fertility = fertility;
    spec.mu0 = mu0;
    spec.mu0_null = mu0_null;
    // Spread-decreasing events (ask down, bid up) are blocked at spread 1.
    spec.constraints = {{{}}, {{1}}, {{1}}, {{}}};
    spec.jumps = {{1}, {-1}, {-1}, {1}};

    const ValidationReport rep = validate(spec);
    if (!rep.ok()) {
        std::string msg = "lob_preset: invalid parameters:";
        for (const auto& e : rep.errors) msg += "\n  - " + e;
        throw SpecValidationError(msg);
    }
    return spec;
}

WeightFunction lob_mid_weights() { return {{0.5, -0.5, 0.5, -0.5}}; }
WeightFunction lob_ask_weights() { return {{1.0, -1.0, 0.0, 0.0}}; }
WeightFunction lob_bid_weights() { return {{0.0, 0.0, 1.0, -1.0}}; }
WeightFunction lob_spread_weights() { return {{1.0, -1.0, -1.0, 1.0}}; }

} // namespace chawkes
