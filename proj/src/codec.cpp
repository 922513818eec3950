#include "seclud/codec.hpp"

#include <bit>
#include <limits>

namespace seclud {

namespace {

constexpr std::uint64_t kMaxGap = std::uint64_t{1} << 32;

unsigned floor_log2(std::uint64_t v) { return 63u - static_cast<unsigned>(std::countl_zero(v)); }

struct TruncatedBinary {
    unsigned k;       // floor(log2 b)
    std::uint64_t u;  // 2^(k+1) - b: remainders below u take k bits
    explicit TruncatedBinary(std::uint64_t b) : k(floor_log2(b)), u((std::uint64_t{2} << floor_log2(b)) - b) {}
};

std::uint64_t gamma_bits(std::uint64_t v) { return 2 * floor_log2(v) + 1; }

std::uint64_t delta_bits(std::uint64_t v) {
    const unsigned l = floor_log2(v);
    return l + gamma_bits(l + 1);
}

std::uint64_t golomb_bits(std::uint64_t v, std::uint64_t b) {
    const TruncatedBinary tb(b);
    const std::uint64_t r = v % b;
    return v / b + 1 + (r < tb.u ? tb.k : tb.k + 1);
}

std::uint64_t vbyte_bits(std::uint64_t v) {
    std::uint64_t bytes = 1;
    while (v >= 128) {
        v >>= 7;
        ++bytes;
    }
    return 8 * bytes;
}

void check_sorted(std::span<const DocId> docs) {
    for (std::size_t i = 1; i < docs.size(); ++i) {
        if (docs[i] <= docs[i - 1]) throw Error("posting list must be strictly increasing");
    }
}

}  // namespace

void BitWriter::put_bit(bool bit) {
    if (size_ % 64 == 0) words_.push_back(0);
    if (bit) words_.back() |= std::uint64_t{1} << (63 - size_ % 64);
    ++size_;
}

void BitWriter::put_bits(std::uint64_t value, unsigned count) {
    for (unsigned i = count; i-- > 0;) put_bit((value >> i) & 1u);
}

void BitWriter::put_unary(std::uint64_t q) {
    for (std::uint64_t i = 0; i < q; ++i) put_bit(true);
    put_bit(false);
}

std::string BitWriter::to_string() const {
    std::string s;
    s.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) {
        s.push_back(((words_[i / 64] >> (63 - i % 64)) & 1u) ? '1' : '0');
    }
    return s;
}

bool BitReader::get_bit() {
    if (pos_ >= size_) throw CodecError("bit stream truncated");
    const bool bit = (words_[pos_ / 64] >> (63 - pos_ % 64)) & 1u;
    ++pos_;
    return bit;
}

std::uint64_t BitReader::get_bits(unsigned count) {
    if (count > remaining()) throw CodecError("bit stream truncated");
    std::uint64_t v = 0;
    for (unsigned i = 0; i < count; ++i) v = (v << 1) | static_cast<std::uint64_t>(get_bit());
    return v;
}

std::uint64_t BitReader::get_unary() {
    std::uint64_t q = 0;
    while (get_bit()) ++q;
    return q;
}

void write_gamma(BitWriter& out, std::uint64_t value) {
    if (value == 0) throw Error("Elias gamma cannot encode 0");
    const unsigned l = floor_log2(value);
    out.put_bits(0, l);
    out.put_bits(value, l + 1);
}

std::uint64_t read_gamma(BitReader& in) {
    unsigned zeros = 0;
    while (!in.get_bit()) {
        if (++zeros > 63) throw CodecError("Elias gamma prefix too long");
    }
    return (std::uint64_t{1} << zeros) | in.get_bits(zeros);
}

void write_delta(BitWriter& out, std::uint64_t value) {
    if (value == 0) throw Error("Elias delta cannot encode 0");
    const unsigned l = floor_log2(value);
    write_gamma(out, l + 1);
    out.put_bits(value, l);
}

std::uint64_t read_delta(BitReader& in) {
    const std::uint64_t l = read_gamma(in) - 1;
    if (l > 63) throw CodecError("Elias delta length out of range");
    return (std::uint64_t{1} << l) | in.get_bits(static_cast<unsigned>(l));
}

void write_golomb(BitWriter& out, std::uint64_t value, std::uint64_t divisor) {
    if (divisor == 0) throw Error("Golomb divisor must be positive");
    const TruncatedBinary tb(divisor);
    out.put_unary(value / divisor);
    const std::uint64_t r = value % divisor;
    if (r < tb.u) {
        out.put_bits(r, tb.k);
    } else {
        out.put_bits(r + tb.u, tb.k + 1);
    }
}

std::uint64_t read_golomb(BitReader& in, std::uint64_t divisor) {
    if (divisor == 0) throw CodecError("Golomb divisor must be positive");
    const TruncatedBinary tb(divisor);
    const std::uint64_t q = in.get_unary();
    if (q > kMaxGap / divisor) throw CodecError("Golomb quotient out of range");
    std::uint64_t r = in.get_bits(tb.k);
    if (r >= tb.u) r = ((r << 1) | static_cast<std::uint64_t>(in.get_bit())) - tb.u;
    if (r >= divisor) throw CodecError("Golomb remainder out of range");
    return q * divisor + r;
}

void write_vbyte(BitWriter& out, std::uint64_t value) {
    while (value >= 128) {
        out.put_bits((value & 127u) | 128u, 8);
        value >>= 7;
    }
    out.put_bits(value, 8);
}

std::uint64_t read_vbyte(BitReader& in) {
    std::uint64_t value = 0;
    for (unsigned shift = 0;; shift += 7) {
        if (shift > 35) throw CodecError("vbyte value too long");
        const std::uint64_t byte = in.get_bits(8);
        value |= (byte & 127u) << shift;
        if ((byte & 128u) == 0) break;
    }
    return value;
}

std::string_view codec_name(Codec c) {
    switch (c) {
        case Codec::golomb: return "golomb";
        case Codec::gamma: return "gamma";
        case Codec::delta: return "delta";
        case Codec::vbyte: return "vbyte";
    }
    return "unknown";
}

Codec parse_codec(std::string_view name) {
    for (Codec c : kAllCodecs) {
        if (codec_name(c) == name) return c;
    }
    throw Error("unknown codec '" + std::string(name) + "' (expected golomb, gamma, delta or vbyte)");
}

std::uint64_t golomb_parameter(std::size_t list_length, std::size_t universe) {
    if (list_length == 0) throw Error("Golomb parameter needs a non-empty list");
    // ceil(0.69 * universe / length) in exact integer arithmetic
    const std::uint64_t num = 69 * static_cast<std::uint64_t>(universe);
    const std::uint64_t den = 100 * static_cast<std::uint64_t>(list_length);
    return std::max<std::uint64_t>(1, (num + den - 1) / den);
}

std::uint64_t posting_checksum(std::span<const DocId> docs) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (DocId d : docs) {
        for (int i = 0; i < 4; ++i) {
            h ^= (d >> (8 * i)) & 0xFFu;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

EncodedList encode(std::span<const DocId> docs, Codec codec, std::size_t universe) {
    check_sorted(docs);
    EncodedList enc;
    enc.codec = codec;
    enc.length = docs.size();
    if (codec == Codec::golomb) {
        enc.parameter = docs.empty() ? 1 : golomb_parameter(docs.size(), universe);
    }
    BitWriter out;
    std::uint64_t prev = 0;
    bool first = true;
    for (DocId d : docs) {
        const std::uint64_t gap = first ? std::uint64_t{d} + 1 : std::uint64_t{d} - prev;
        first = false;
        prev = d;
        switch (codec) {
            case Codec::golomb: write_golomb(out, gap, enc.parameter); break;
            case Codec::gamma: write_gamma(out, gap); break;
            case Codec::delta: write_delta(out, gap); break;
            case Codec::vbyte: write_vbyte(out, gap); break;
        }
    }
    enc.bit_length = out.size();
    enc.checksum = posting_checksum(docs);
    enc.bits = std::move(out).take_words();
    return enc;
}

PostingList decode(const EncodedList& enc) {
    if (enc.bits.size() * 64 < enc.bit_length) throw CodecError("payload shorter than declared bit length");
    if (enc.length > enc.bit_length) throw CodecError("declared length exceeds bit length");
    BitReader in(enc.bits, enc.bit_length);
    PostingList docs;
    docs.reserve(enc.length);
    std::uint64_t next = 0;  // running sum of gaps; doc id = next - 1
    for (std::uint64_t i = 0; i < enc.length; ++i) {
        std::uint64_t gap = 0;
        switch (enc.codec) {
            case Codec::golomb: gap = read_golomb(in, enc.parameter); break;
            case Codec::gamma: gap = read_gamma(in); break;
            case Codec::delta: gap = read_delta(in); break;
            case Codec::vbyte: gap = read_vbyte(in); break;
            default: throw CodecError("unknown codec tag");
        }
        if (gap == 0) throw CodecError("zero gap in posting list");
        if (gap > kMaxGap || next + gap > kMaxGap) throw CodecError("document id out of range");
        next += gap;
        docs.push_back(static_cast<DocId>(next - 1));
    }
    if (in.remaining() != 0) throw CodecError("trailing bits after posting list");
    if (posting_checksum(docs) != enc.checksum) throw CodecError("posting list checksum mismatch");
    return docs;
}

std::uint64_t encoded_bits(std::span<const DocId> docs, Codec codec, std::size_t universe) {
    if (docs.empty()) return 0;
    const std::uint64_t b = codec == Codec::golomb ? golomb_parameter(docs.size(), universe) : 0;
    std::uint64_t bits = 0;
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const std::uint64_t gap = i == 0 ? std::uint64_t{docs[0]} + 1 : std::uint64_t{docs[i]} - prev;
        prev = docs[i];
        switch (codec) {
            case Codec::golomb: bits += golomb_bits(gap, b); break;
            case Codec::gamma: bits += gamma_bits(gap); break;
            case Codec::delta: bits += delta_bits(gap); break;
            case Codec::vbyte: bits += vbyte_bits(gap); break;
        }
    }
    return bits;
}

double bits_per_posting(const InvertedIndex& index, Codec codec) {
    std::uint64_t bits = 0;
    std::uint64_t postings = 0;
    for (const auto& list : index.lists) {
        bits += encoded_bits(list, codec, index.universe);
        postings += list.size();
    }
    if (postings == 0) throw Error("bits per posting of an empty index");
    return static_cast<double>(bits) / static_cast<double>(postings);
}

}  // namespace seclud
