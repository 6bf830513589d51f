#pragma once

// Small random-instance generators and brute-force oracles shared by the tests.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace testing_support {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// Grid maximizer of fn over [lo, hi]: coarse pass, then a fine pass around the
// coarse winner at `step`. Returns (argmax, max).
inline std::pair<double, double> grid_argmax(const std::function<double(double)>& fn, double lo, double hi,
                                             double step) {
    auto scan = [&](double a, double b, double h) {
        std::pair<double, double> best{a, fn(a)};
        const auto n = static_cast<long>(std::floor((b - a) / h));
        for (long k = 1; k <= n; ++k) {
            const double x = a + static_cast<double>(k) * h;
            const double y = fn(x);
            if (y > best.second) best = {x, y};
        }
        const double yb = fn(b);
        if (yb > best.second) best = {b, yb};
        return best;
    };
    const double coarse = std::max(step, (hi - lo) / 2000.0);
    const auto c = scan(lo, hi, coarse);
    return scan(std::max(lo, c.first - 2.0 * coarse), std::min(hi, c.first + 2.0 * coarse), step);
}

// Central finite difference of order 1 and 2.
inline double derivative(const std::function<double(double)>& fn, double x, double h) {
    return (fn(x + h) - fn(x - h)) / (2.0 * h);
}
inline double second_derivative(const std::function<double(double)>& fn, double x, double h) {
    return (fn(x + h) - 2.0 * fn(x) + fn(x - h)) / (h * h);
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs_floor);
}

}  // namespace testing_support
