#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace pwref {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_decimal(const BigInt& value) {
    return value.str();
}

inline std::optional<std::uint64_t> to_u64(const BigInt& value) {
    if (value < 0 || value > std::numeric_limits<std::uint64_t>::max()) {
        return std::nullopt;
    }
    return static_cast<std::uint64_t>(value);
}

inline double to_double(const Rational& value) {
    return static_cast<double>(value);
}

}  // namespace pwref
