#include "chawkes/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chawkes {

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x, int ddof) {
    const std::size_t n = x.size();
    if (n <= static_cast<std::size_t>(ddof)) throw std::invalid_argument("variance: too few points");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(n - ddof);
}

double sample_skewness(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 3) throw std::invalid_argument("sample_skewness: need at least 3 points");
    const double m = mean(x);
    double m2 = 0.0;
    double m3 = 0.0;
    for (double v : x) {
        const double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    if (m2 <= 0.0) return 0.0;
    const double g1 = m3 / std::pow(m2, 1.5);
    const double nn = static_cast<double>(n);
    return g1 * std::sqrt(nn * (nn - 1.0)) / (nn - 2.0);
}

double skewness_se(std::size_t n) {
    const double nn = static_cast<double>(n);
    return std::sqrt(6.0 * nn * (nn - 1.0) / ((nn - 2.0) * (nn + 1.0) * (nn + 3.0)));
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson_correlation: bad input sizes");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

MeanWithError batch_means(std::span<const double> x, std::size_t batches) {
    if (batches < 2) throw std::invalid_argument("batch_means: need at least 2 batches");
    const std::size_t len = x.size() / batches;
    if (len < 1) throw std::invalid_argument("batch_means: series shorter than batch count");

    std::vector<double> bm(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += x[i];
        bm[b] = s / static_cast<double>(len);
    }
    MeanWithError out;
    out.batches = batches;
    out.batch_len = len;
    out.mean = mean(bm);
    out.se = std::sqrt(variance(bm, 1) / static_cast<double>(batches));
    return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double q = 0.0;
    for (int k = 1; k <= 128; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        q += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(q, 0.0, 1.0);
}

KsResult ks_test_normal(std::vector<double> x, double mu, double sigma) {
    if (x.size() < 5) throw std::invalid_argument("ks_test_normal: too few points");
    if (sigma <= 0.0) throw std::invalid_argument("ks_test_normal: sigma must be positive");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = normal_cdf((x[i] - mu) / sigma);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(f - lo, hi - f));
    }
    // Stephens' finite-sample scaling of the Kolmogorov tail.
    const double lambda = d * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
    return {d, kolmogorov_q(lambda)};
}

KsResult ks_test_normality(const std::vector<double>& x) {
    const double mu = mean(x);
    const double sd = std::sqrt(variance(x, 1));
    if (sd <= 0.0) throw std::invalid_argument("ks_test_normality: degenerate sample");
    return ks_test_normal(x, mu, sd);
}

} // namespace chawkes
