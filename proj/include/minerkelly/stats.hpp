#pragma once

#include <cstddef>
#include <span>

namespace minerkelly::stats {

// Streaming central moments up to order four (one-pass update).
class Moments {
public:
    void add(double x) noexcept;
    void merge(const Moments& other) noexcept;

    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    // Unbiased sample variance.
    double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double standard_error() const noexcept;
    // Standard error of the sample variance, sqrt((mu4 - sigma^4) / n).
    double variance_standard_error() const noexcept;
    double central_moment4() const noexcept { return n_ > 0 ? m4_ / static_cast<double>(n_) : 0.0; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0, m2_ = 0.0, m3_ = 0.0, m4_ = 0.0;
};

struct KsResult {
    double statistic = 0.0;  // sup |F_a - F_b|
    double p_value = 1.0;
    bool rejected(double alpha) const noexcept { return p_value < alpha; }
};

// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda) noexcept;

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
// Q((sqrt(n_e) + 0.12 + 0.11 / sqrt(n_e)) D), n_e = n m / (n + m).
// Ties are handled by stepping over equal values together, so discrete
// samples give the exact sup distance (the p-value is then conservative).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

double median(std::span<const double> values);

}  // namespace minerkelly::stats
