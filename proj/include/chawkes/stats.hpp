#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chawkes {

double mean(std::span<const double> x);

// Sample variance with ddof delta degrees of freedom (1 = unbiased).
double variance(std::span<const double> x, int ddof = 1);

double sample_skewness(std::span<const double> x);

// Standard error of the sample skewness under normality.
double skewness_se(std::size_t n);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

struct MeanWithError {
    double mean = 0.0;
    double se = 0.0;
    std::size_t batches = 0;
    std::size_t batch_len = 0;
};

// Non-overlapping batch-means standard error for a (possibly correlated)
// stationary series. Uses the first batches*floor(n/batches) points.
MeanWithError batch_means(std::span<const double> x, std::size_t batches);

double normal_cdf(double x);

// Kolmogorov asymptotic tail Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// One-sample KS test of x against N(mu, sigma^2).
KsResult ks_test_normal(std::vector<double> x, double mu, double sigma);

// Normality test: standardizes by the sample mean and sd, then KS against N(0,1).
KsResult ks_test_normality(const std::vector<double>& x);

} // namespace chawkes
