#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "hymlab/errors.hpp"

namespace hymlab {

/// Least-squares line in log-log coordinates; turns "lesssim" bounds into
/// testable exponents.
struct PowerLawFit {
    double exponent = 0.0;      // slope of log(value) against log(scale)
    double log_constant = 0.0;  // intercept
    double r_squared = 0.0;
    int sample_count = 0;

    double evaluate(double scale) const {
        return std::exp(log_constant + exponent * std::log(scale));
    }
};

inline PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 8)
        throw PreconditionError("fit_power_law needs at least 8 samples");
    const int n = static_cast<int>(samples.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::vector<double> lx(samples.size()), ly(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto [scale, value] = samples[i];
        if (!(scale > 0.0) || !(value > 0.0))
            throw PreconditionError("fit_power_law requires strictly positive data");
        lx[i] = std::log(scale);
        ly[i] = std::log(value);
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-30)
        throw PreconditionError("fit_power_law: degenerate abscissae");
    PowerLawFit fit;
    fit.exponent = (n * sxy - sx * sy) / det;
    fit.log_constant = (sy - fit.exponent * sx) / n;
    fit.sample_count = n;

    const double mean_y = sy / n;
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double pred = fit.log_constant + fit.exponent * lx[i];
        ss_tot += (ly[i] - mean_y) * (ly[i] - mean_y);
        ss_res += (ly[i] - pred) * (ly[i] - pred);
    }
    fit.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    return fit;
}

}  // namespace hymlab
