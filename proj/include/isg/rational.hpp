#pragma once

#include <cstdint>
#include <string>

#include "isg/errors.hpp"

namespace isg {

// Nonnegative fraction num/den used for the heaviness thresholds, compared
// exactly through 128-bit cross multiplication.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    Rational() = default;
    Rational(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
        if (d == 0) throw ContractViolation("zero denominator");
    }

    // count / total > *this
    bool below_ratio(std::uint64_t count, std::uint64_t total) const {
        return static_cast<unsigned __int128>(count) * den > static_cast<unsigned __int128>(num) * total;
    }
    // count / total >= *this
    bool at_most_ratio(std::uint64_t count, std::uint64_t total) const {
        return static_cast<unsigned __int128>(count) * den >= static_cast<unsigned __int128>(num) * total;
    }
    std::string to_string() const { return std::to_string(num) + "/" + std::to_string(den); }
};

// Parses "a/b", an integer, or a decimal like "0.25" or "1e-8".
Rational parse_rational(const std::string& s);

}  // namespace isg
