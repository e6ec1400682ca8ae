#pragma once

#include <knncp/errors.hpp>

#include <cstdint>
#include <string>

// Integer arithmetic that reports overflow instead of wrapping.
namespace knncp::checked {

inline std::int64_t add(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        throw IntegerOverflow("integer overflow in " + std::to_string(a) + " + " + std::to_string(b));
    }
    return r;
}

inline std::int64_t sub(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_sub_overflow(a, b, &r)) {
        throw IntegerOverflow("integer overflow in " + std::to_string(a) + " - " + std::to_string(b));
    }
    return r;
}

inline std::int64_t mul(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw IntegerOverflow("integer overflow in " + std::to_string(a) + " * " + std::to_string(b));
    }
    return r;
}

inline std::int64_t mul(std::int64_t a, std::int64_t b, std::int64_t c) {
    return mul(mul(a, b), c);
}

} // namespace knncp::checked
