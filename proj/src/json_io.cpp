#include "pwref/json_io.hpp"

#include <stdexcept>

namespace pwref {

nlohmann::json rational_to_json(const Rational& value) {
    return nlohmann::json{{"num", to_decimal(numerator(value))}, {"den", to_decimal(denominator(value))}};
}

Rational rational_from_json(const nlohmann::json& doc) {
    const BigInt num(doc.at("num").get<std::string>());
    const BigInt den(doc.at("den").get<std::string>());
    if (den == 0) {
        throw std::invalid_argument("rational with zero denominator");
    }
    return Rational(num, den);
}

}  // namespace pwref
