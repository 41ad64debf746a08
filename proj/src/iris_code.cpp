// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "iriszoo/iris_code.hpp"

#include <bit>
#include <cstring>

#include "iriszoo/errors.hpp"

namespace iriszoo {

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

constexpr char kHexDigits[] = "0123456789abcdef";

void check_same_shape(const IrisCode& a, const IrisCode& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw PreconditionError("iris code shape mismatch");
    }
}

} // namespace

IrisCode::IrisCode(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) {
        throw PreconditionError("iris code dimensions must be positive");
    }
    long long bits = static_cast<long long>(rows) * cols;
    if (bits % 8 != 0) {
        throw PreconditionError("iris code bit count must be byte-packable (multiple of 8)");
    }
    bytes_.assign(static_cast<size_t>(bits / 8), 0);
}

IrisCode IrisCode::from_hex(int rows, int cols, std::string_view hex) {
    IrisCode code(rows, cols);
    const size_t want = code.bytes_.size() * 2;
    if (hex.size() != want) {
        throw FormatError("hex payload has wrong length");
    }
    for (size_t b = 0; b < code.bytes_.size(); ++b) {
        int hi = hex_digit(hex[2 * b]);
        int lo = hex_digit(hex[2 * b + 1]);
        if (hi < 0 || lo < 0) {
            throw FormatError("hex payload contains a non-hex character");
        }
        code.bytes_[b] = static_cast<uint8_t>((hi << 4) | lo);
    }
    return code;
}

void IrisCode::set_bit(int k, bool v) {
    uint8_t mask = static_cast<uint8_t>(1u << (7 - (k & 7)));
    if (v) {
        bytes_[static_cast<size_t>(k) >> 3] |= mask;
    } else {
        bytes_[static_cast<size_t>(k) >> 3] &= static_cast<uint8_t>(~mask);
    }
}

void IrisCode::flip_bit(int k) {
    bytes_[static_cast<size_t>(k) >> 3] ^= static_cast<uint8_t>(1u << (7 - (k & 7)));
}

std::string IrisCode::to_hex() const {
    std::string out;
    out.reserve(bytes_.size() * 2);
    for (uint8_t b : bytes_) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0xf]);
    }
    return out;
}

int hamming_distance(const IrisCode& a, const IrisCode& b) {
    check_same_shape(a, b);
    const uint8_t* pa = a.bytes().data();
    const uint8_t* pb = b.bytes().data();
    const size_t n = a.bytes().size();
    int sum = 0;
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        uint64_t wa;
        uint64_t wb;
        std::memcpy(&wa, pa + i, 8);
        std::memcpy(&wb, pb + i, 8);
        sum += std::popcount(wa ^ wb);
    }
    for (; i < n; ++i) {
        sum += std::popcount(static_cast<unsigned>(pa[i] ^ pb[i]));
    }
    return sum;
}

double hamming_similarity(const IrisCode& a, const IrisCode& b) {
    int hd = hamming_distance(a, b);
    return 1.0 - static_cast<double>(hd) / static_cast<double>(a.bit_count());
}

int naive_hamming_distance(const IrisCode& a, const IrisCode& b) {
    check_same_shape(a, b);
    int count = 0;
    for (int k = 0; k < a.bit_count(); ++k) {
        if (a.bit(k) != b.bit(k)) {
            ++count;
        }
    }
    return count;
}

} // namespace iriszoo
