#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seclud/common.hpp"
#include "seclud/index.hpp"

namespace seclud {

class CodecError : public Error {
public:
    using Error::Error;
};

/// Append-only MSB-first bit string.
class BitWriter {
public:
    void put_bit(bool bit);
    /// Writes the low `count` bits of `value`, most significant first.
    void put_bits(std::uint64_t value, unsigned count);
    void put_unary(std::uint64_t q);  // q ones, then a zero

    std::size_t size() const { return size_; }
    std::vector<std::uint64_t> take_words() && { return std::move(words_); }
    const std::vector<std::uint64_t>& words() const { return words_; }
    std::string to_string() const;  // "0101..." for tests and debugging

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

class BitReader {
public:
    BitReader(std::span<const std::uint64_t> words, std::size_t size) : words_(words), size_(size) {}

    bool get_bit();
    std::uint64_t get_bits(unsigned count);
    /// Counts ones up to the terminating zero.
    std::uint64_t get_unary();
    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return size_ - pos_; }

private:
    std::span<const std::uint64_t> words_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

// Single-value codes. gamma and delta require value >= 1.
void write_gamma(BitWriter& out, std::uint64_t value);
std::uint64_t read_gamma(BitReader& in);
void write_delta(BitWriter& out, std::uint64_t value);
std::uint64_t read_delta(BitReader& in);
/// Quotient in unary, remainder in truncated binary.
void write_golomb(BitWriter& out, std::uint64_t value, std::uint64_t divisor);
std::uint64_t read_golomb(BitReader& in, std::uint64_t divisor);
void write_vbyte(BitWriter& out, std::uint64_t value);
std::uint64_t read_vbyte(BitReader& in);

enum class Codec : std::uint8_t { golomb = 0, gamma = 1, delta = 2, vbyte = 3 };

inline constexpr Codec kAllCodecs[] = {Codec::golomb, Codec::gamma, Codec::delta, Codec::vbyte};

std::string_view codec_name(Codec c);
Codec parse_codec(std::string_view name);

/// Golomb divisor max(1, ceil(0.69 * universe / list_length)).
std::uint64_t golomb_parameter(std::size_t list_length, std::size_t universe);

/// A compressed posting list. Gaps are d0 + 1, d_i - d_{i-1}.
struct EncodedList {
    Codec codec = Codec::gamma;
    std::uint64_t parameter = 0;  // Golomb divisor, 0 otherwise
    std::uint64_t length = 0;
    std::uint64_t bit_length = 0;
    std::uint64_t checksum = 0;  // over the decoded ids
    std::vector<std::uint64_t> bits;
};

EncodedList encode(std::span<const DocId> docs, Codec codec, std::size_t universe);
PostingList decode(const EncodedList& enc);

std::uint64_t posting_checksum(std::span<const DocId> docs);

/// Encoded size in bits of a list without materialising the payload.
std::uint64_t encoded_bits(std::span<const DocId> docs, Codec codec, std::size_t universe);

/// Total encoded bits over total postings.
double bits_per_posting(const InvertedIndex& index, Codec codec);

}  // namespace seclud
