#ifndef INVZ_SIGNED_LOG_HPP
#define INVZ_SIGNED_LOG_HPP

#include <cassert>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace invz {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)), stable for any finite a, b.
inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

// log(1 - exp(d)) for d <= 0. Switches between expm1 and log1p forms to
// keep precision near both ends.
inline double log1m_exp(double d) {
    assert(d <= 0.0);
    if (d == 0.0) return kNegInf;
    if (d > -M_LN2) return std::log(-std::expm1(d));
    return std::log1p(-std::exp(d));
}

// log of the arithmetic mean of exp(v_i), max-shift stabilized.
// Exact when every input equals the maximum (the shifted terms are all 1,
// so the correction is log(m/m) = 0).
inline double log_mean_exp(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("log_mean_exp: empty input");
    double hi = kNegInf;
    for (double v : values) hi = std::max(hi, v);
    if (hi == kNegInf) return kNegInf;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - hi);
    return hi + std::log(sum / static_cast<double>(values.size()));
}

// A signed real carried as (sign, log|x|). Exact zero is a distinct sign
// state rather than a -inf sentinel, so cancellation is observable.
struct SignedLog {
    int sign = 0;             // -1, 0, +1
    double log_mag = kNegInf; // natural log of |x|; meaningless when sign == 0

    static SignedLog zero() { return SignedLog{}; }

    static SignedLog from_log(double log_mag, int sign = +1) {
        assert(sign == -1 || sign == +1);
        return SignedLog{sign, log_mag};
    }

    static SignedLog from_value(double v) {
        if (v == 0.0) return zero();
        return SignedLog{v > 0.0 ? +1 : -1, std::log(std::abs(v))};
    }

    double value() const {
        return sign == 0 ? 0.0 : sign * std::exp(log_mag);
    }

    // sign * exp(log_mag - log_offset); decode under a shared exponent shift.
    double value_shifted(double log_offset) const {
        return sign == 0 ? 0.0 : sign * std::exp(log_mag - log_offset);
    }

    bool is_zero() const { return sign == 0; }
    bool nonnegative() const { return sign >= 0; }

    // Multiply by exp(c); sign unchanged, zero stays zero.
    SignedLog scaled(double log_factor) const {
        if (sign == 0) return zero();
        return SignedLog{sign, log_mag + log_factor};
    }

    SignedLog operator-() const {
        return SignedLog{-sign, log_mag};
    }

    friend SignedLog operator+(const SignedLog& a, const SignedLog& b) {
        if (a.sign == 0) return b;
        if (b.sign == 0) return a;
        if (a.sign == b.sign)
            return SignedLog{a.sign, log_add_exp(a.log_mag, b.log_mag)};
        // Opposite signs: magnitude is a log-domain difference.
        if (a.log_mag == b.log_mag) return zero();
        const SignedLog& big = a.log_mag > b.log_mag ? a : b;
        const SignedLog& small = a.log_mag > b.log_mag ? b : a;
        return SignedLog{big.sign,
                         big.log_mag + log1m_exp(small.log_mag - big.log_mag)};
    }

    friend SignedLog operator-(const SignedLog& a, const SignedLog& b) {
        return a + (-b);
    }

    friend bool operator==(const SignedLog& a, const SignedLog& b) {
        if (a.sign != b.sign) return false;
        return a.sign == 0 || a.log_mag == b.log_mag;
    }
};

} // namespace invz

#endif
