#include "oseries/rational.hpp"

#include <stdexcept>

namespace oseries {

Rat rat_pow(const Rat& q, long n) {
    if (n == 0) return Rat(1);
    bool neg = n < 0;
    unsigned long k = neg ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    Rat base = q;
    Rat acc(1);
    while (k) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    if (neg) {
        if (acc == 0) throw std::domain_error("rat_pow: zero to negative power");
        acc = Rat(1) / acc;
    }
    return acc;
}

std::string rat_to_string(const Rat& q) {
    if (is_integer(q)) return rat_num(q).str();
    return rat_num(q).str() + "/" + rat_den(q).str();
}

long rat_msb(const Rat& q) {
    Int n = abs(rat_num(q));
    Int d = rat_den(q);
    if (n == 0) return 0;
    return static_cast<long>(msb(n)) - static_cast<long>(msb(d));
}

}  // namespace oseries
