#ifndef INVZ_DIAGNOSTICS_HPP
#define INVZ_DIAGNOSTICS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "invz/signed_log.hpp"

namespace invz::diagnostics {

struct EstimatorSummary {
    std::int64_t n_trials = 0;
    SignedLog mean;
    double rel_std = 0.0;       // RMSE / (1/Z) with oracle; std/mean without
    double frac_positive = 0.0;
    std::optional<double> mean_coupled_at;
};

// Moments are computed after decoding with a shared exponent offset (the
// oracle's log 1/Z when given, else the largest magnitude present) so that
// estimates on large models stay representable.
EstimatorSummary summarize(std::span<const SignedLog> estimates,
                           std::optional<double> true_log_inv_z);

// Standard biased-normalization autocorrelation; acf[0] = 1.
std::vector<double> autocorrelation(std::span<const double> series,
                                    std::size_t max_lag);

} // namespace invz::diagnostics

#endif
