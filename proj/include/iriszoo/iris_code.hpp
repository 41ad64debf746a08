// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace iriszoo {

/// A packed binary iris template of rows x cols bits.
///
/// Bit k (k = r*cols + c) lives in byte k/8 at position (7 - k%8), i.e.
/// most significant bit first. That makes the hex serialization of a code
/// simply its bytes in order, two lowercase digits per byte, and each hex
/// digit covers four consecutive bits. rows*cols must be a multiple of 8;
/// there are no pad bits. Typical shapes are 16x256, 8x128 and 4x64.
class IrisCode {
public:
    IrisCode() = default;

    /// Zero-filled code. Throws PreconditionError unless rows, cols >= 1
    /// and rows*cols is a multiple of 8.
    IrisCode(int rows, int cols);

    /// Parses a lowercase hex payload of exactly rows*cols/4 characters.
    /// Throws FormatError on bad length or non-hex characters.
    static IrisCode from_hex(int rows, int cols, std::string_view hex);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int bit_count() const { return rows_ * cols_; }

    bool bit(int k) const {
        return (bytes_[static_cast<size_t>(k) >> 3] >> (7 - (k & 7))) & 1;
    }
    void set_bit(int k, bool v);
    void flip_bit(int k);

    std::string to_hex() const;
    const std::vector<uint8_t>& bytes() const { return bytes_; }

    friend bool operator==(const IrisCode&, const IrisCode&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<uint8_t> bytes_;
};

/// Number of differing bits, counted with 64-bit XOR + popcount over the
/// packed bytes. Throws PreconditionError when shapes differ.
int hamming_distance(const IrisCode& a, const IrisCode& b);

/// Matching score MS = 1 - hd/n_bits, in [0, 1]. The counts stay exact
/// integers until this single final division.
double hamming_similarity(const IrisCode& a, const IrisCode& b);

/// Reference implementation: walks the codes bit by bit. Slow on purpose;
/// exists so the packed path above can be checked against it exactly.
int naive_hamming_distance(const IrisCode& a, const IrisCode& b);

} // namespace iriszoo
