#include "isg/rational.hpp"

#include <cctype>

namespace isg {

namespace {

std::uint64_t parse_u64(const std::string& s) {
    if (s.empty()) throw ContractViolation("empty number");
    std::uint64_t v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) throw ContractViolation("bad number: " + s);
        if (v > (UINT64_MAX - 9) / 10) throw ContractViolation("number too large: " + s);
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

std::uint64_t pow10(int e) {
    if (e > 18) throw ContractViolation("exponent too large");
    std::uint64_t p = 1;
    while (e-- > 0) p *= 10;
    return p;
}

}  // namespace

Rational parse_rational(const std::string& s) {
    if (auto slash = s.find('/'); slash != std::string::npos)
        return Rational(parse_u64(s.substr(0, slash)), parse_u64(s.substr(slash + 1)));
    std::string mant = s;
    int exp = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        mant = s.substr(0, e);
        std::string es = s.substr(e + 1);
        bool neg = !es.empty() && es[0] == '-';
        if (!es.empty() && (es[0] == '-' || es[0] == '+')) es = es.substr(1);
        exp = static_cast<int>(parse_u64(es));
        if (neg) exp = -exp;
    }
    std::string digits = mant;
    if (auto dot = mant.find('.'); dot != std::string::npos) {
        digits = mant.substr(0, dot) + mant.substr(dot + 1);
        exp -= static_cast<int>(mant.size() - dot - 1);
    }
    std::uint64_t num = parse_u64(digits);
    if (exp >= 0) return Rational(num * pow10(exp), 1);
    return Rational(num, pow10(-exp));
}

}  // namespace isg
