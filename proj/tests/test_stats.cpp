#include "doctest.h"

#include <cmath>
#include <vector>

#include "chawkes/rng.hpp"
#include "chawkes/stats.hpp"

using namespace chawkes;

namespace {

// Box-Muller normals from the counter generator, test use only.
std::vector<double> normal_sample(std::size_t n, std::uint64_t stream) {
    std::vector<double> out;
    out.reserve(n);
    CounterRng rng(555, stream);
    while (out.size() < n) {
        const UniformPair u = rng.next_pair();
        const double r = std::sqrt(-2.0 * std::log(u.u1));
        out.push_back(r * std::cos(2.0 * M_PI * u.u2));
        if (out.size() < n) out.push_back(r * std::sin(2.0 * M_PI * u.u2));
    }
    return out;
}

} // namespace

TEST_CASE("moments of a fixed sample") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    CHECK(mean(x) == doctest::Approx(2.5));
    CHECK(variance(x, 1) == doctest::Approx(5.0 / 3.0));
    CHECK(variance(x, 0) == doctest::Approx(1.25));
}

TEST_CASE("skewness of a symmetric sample is zero") {
    const std::vector<double> x = {-2.0, -1.0, 0.0, 1.0, 2.0};
    CHECK(sample_skewness(x) == doctest::Approx(0.0));
    CHECK(skewness_se(300) == doctest::Approx(std::sqrt(6.0 / 300.0)).epsilon(0.05));
}

TEST_CASE("pearson correlation") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y = {2.0, 4.0, 6.0, 8.0};
    CHECK(pearson_correlation(x, y) == doctest::Approx(1.0));
    std::vector<double> z = {1.0, -1.0, 1.0, -1.0};
    CHECK(std::abs(pearson_correlation(x, z)) < 0.5);
}

TEST_CASE("batch means recovers the iid standard error") {
    const auto x = normal_sample(64000, 0);
    const MeanWithError est = batch_means(x, 64);
    CHECK(std::abs(est.mean) < 4.0 / std::sqrt(64000.0));
    const double iid_se = std::sqrt(variance(x, 1) / x.size());
    CHECK(est.se == doctest::Approx(iid_se).epsilon(0.5));
    CHECK(est.batch_len == 1000);
}

TEST_CASE("kolmogorov tail matches the classical critical values") {
    // P(D sqrt(n) > 1.358) ~ 0.05 and > 1.628 ~ 0.01
    CHECK(kolmogorov_q(1.358) == doctest::Approx(0.05).epsilon(0.02));
    CHECK(kolmogorov_q(1.628) == doctest::Approx(0.01).epsilon(0.03));
    CHECK(kolmogorov_q(0.0) == 1.0);
    CHECK(kolmogorov_q(0.5) > kolmogorov_q(1.0));
}

TEST_CASE("ks test accepts normal data and rejects uniform data") {
    const auto n = normal_sample(500, 1);
    CHECK(ks_test_normality(n).p_value > 0.01);

    std::vector<double> u(3000);
    CounterRng rng(556, 0);
    for (auto& v : u) v = rng.next_u01();
    CHECK(ks_test_normality(u).p_value < 0.01);

    // against the exact parameters
    CHECK(ks_test_normal(n, 0.0, 1.0).p_value > 0.01);
    CHECK(ks_test_normal(n, 3.0, 1.0).p_value < 1e-6);
}
