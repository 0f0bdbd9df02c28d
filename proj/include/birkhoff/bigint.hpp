#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>

namespace birkhoff {

using BigInt = mpz_class;

inline std::string to_decimal(const BigInt& x) { return x.get_str(10); }

// natural log of a positive big integer; -infinity for zero
inline double log_of(const BigInt& x) {
    if (x == 0) return -std::numeric_limits<double>::infinity();
    signed long exp = 0;
    double mant = mpz_get_d_2exp(&exp, x.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace birkhoff
