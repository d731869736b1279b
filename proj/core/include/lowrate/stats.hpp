#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace lowrate {

inline double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * M_SQRT1_2);
}

/// Welford accumulator for mean / variance / standard error.
class RunningStat {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    void merge(const RunningStat& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) { *this = o; return; }
        const double nA = static_cast<double>(n_), nB = static_cast<double>(o.n_);
        const double d = o.mean_ - mean_;
        mean_ = (nA * mean_ + nB * o.mean_) / (nA + nB);
        m2_ += o.m2_ + d * d * nA * nB / (nA + nB);
        n_ += o.n_;
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const {
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    }
    double sd() const { return std::sqrt(variance()); }
    double se() const {
        return n_ > 0 ? sd() / std::sqrt(static_cast<double>(n_)) : 0.0;
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Kolmogorov-Smirnov sup-distance of a sample from the standard normal.
/// Sorts a copy of the input.
double ks_distance(std::span<const double> sample);

/// Least-squares slope of y against x with the slope's standard error.
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};
SlopeFit fit_slope(std::span<const double> x, std::span<const double> y);

} // namespace lowrate
