#include "invz/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace invz::diagnostics {

EstimatorSummary summarize(std::span<const SignedLog> estimates,
                           std::optional<double> true_log_inv_z) {
    if (estimates.empty())
        throw std::invalid_argument("summarize: empty estimate sequence");

    double offset;
    if (true_log_inv_z) {
        offset = *true_log_inv_z;
    } else {
        offset = kNegInf;
        for (const SignedLog& e : estimates)
            if (e.sign != 0) offset = std::max(offset, e.log_mag);
        if (offset == kNegInf) offset = 0.0; // all-zero estimates
    }

    const double n = static_cast<double>(estimates.size());
    double sum = 0.0;
    double sq_err = 0.0; // against the oracle (decoded to 1) when present
    std::int64_t positive = 0;
    for (const SignedLog& e : estimates) {
        const double x = e.value_shifted(offset);
        sum += x;
        if (true_log_inv_z) sq_err += (x - 1.0) * (x - 1.0);
        if (e.sign == +1) ++positive;
    }
    const double mean = sum / n;

    EstimatorSummary out;
    out.n_trials = static_cast<std::int64_t>(estimates.size());
    out.mean = SignedLog::from_value(mean).scaled(offset);
    out.frac_positive = static_cast<double>(positive) / n;
    if (true_log_inv_z) {
        out.rel_std = std::sqrt(sq_err / n); // true value decodes to exactly 1
    } else {
        double var = 0.0;
        for (const SignedLog& e : estimates) {
            const double d = e.value_shifted(offset) - mean;
            var += d * d;
        }
        out.rel_std = std::sqrt(var / n) / mean;
    }
    return out;
}

std::vector<double> autocorrelation(std::span<const double> series,
                                    std::size_t max_lag) {
    const std::size_t n = series.size();
    if (n <= max_lag)
        throw std::invalid_argument("autocorrelation: series shorter than max_lag");

    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(n);

    double c0 = 0.0;
    for (double x : series) c0 += (x - mean) * (x - mean);
    c0 /= static_cast<double>(n);
    if (c0 == 0.0)
        throw std::invalid_argument("autocorrelation: series has zero variance");

    std::vector<double> acf(max_lag + 1);
    acf[0] = 1.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t t = 0; t + k < n; ++t)
            ck += (series[t] - mean) * (series[t + k] - mean);
        ck /= static_cast<double>(n); // biased normalization
        acf[k] = ck / c0;
    }
    return acf;
}

} // namespace invz::diagnostics
