#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "seclud/codec.hpp"

using namespace seclud;

namespace {

template <typename Write>
std::string bits(Write write) {
    BitWriter w;
    write(w);
    return w.to_string();
}

}  // namespace

TEST_CASE("Elias codes of 9") {
    CHECK(bits([](BitWriter& w) { write_gamma(w, 9); }) == "0001001");
    CHECK(bits([](BitWriter& w) { write_delta(w, 9); }) == "00100001");
    CHECK(bits([](BitWriter& w) { write_golomb(w, 9, 4); }) == "11001");
}

TEST_CASE("single-value codes agree with the string oracles") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20000; ++i) {
        const std::uint64_t v = 1 + (rng() >> (rng() % 60 + 4));
        const std::uint64_t b = 1 + rng() % 300;
        REQUIRE(bits([&](BitWriter& w) { write_gamma(w, v); }) == oracle::gamma(v));
        REQUIRE(bits([&](BitWriter& w) { write_delta(w, v); }) == oracle::delta(v));
        if (v / b < 2000) REQUIRE(bits([&](BitWriter& w) { write_golomb(w, v, b); }) == oracle::golomb(v, b));
    }
}

TEST_CASE("single-value roundtrip through the bit reader") {
    std::mt19937_64 rng(4);
    BitWriter w;
    std::vector<std::uint64_t> values;
    for (int i = 0; i < 5000; ++i) values.push_back(1 + rng() % 100000);
    for (auto v : values) {
        write_gamma(w, v);
        write_delta(w, v);
        write_golomb(w, v, 37);
        write_vbyte(w, v);
    }
    const auto size = w.size();
    const auto words = std::move(w).take_words();
    BitReader r(words, size);
    for (auto v : values) {
        REQUIRE(read_gamma(r) == v);
        REQUIRE(read_delta(r) == v);
        REQUIRE(read_golomb(r, 37) == v);
        REQUIRE(read_vbyte(r) == v);
    }
    CHECK(r.remaining() == 0);
    CHECK_THROWS_AS(r.get_bit(), CodecError);
}

TEST_CASE("zero cannot be Elias coded") {
    BitWriter w;
    CHECK_THROWS_AS(write_gamma(w, 0), Error);
    CHECK_THROWS_AS(write_delta(w, 0), Error);
    CHECK_THROWS_AS(write_golomb(w, 3, 0), Error);
}

TEST_CASE("golomb parameter") {
    CHECK(golomb_parameter(10, 1000) == 69);
    CHECK(golomb_parameter(1000, 1000) == 1);
    CHECK(golomb_parameter(1, 1) == 1);
    CHECK(golomb_parameter(5000, 10) == 1);
    CHECK_THROWS_AS(golomb_parameter(0, 10), Error);
}

TEST_CASE("codec names") {
    for (Codec c : kAllCodecs) CHECK(parse_codec(codec_name(c)) == c);
    CHECK_THROWS_AS(parse_codec("rice"), Error);
}

TEST_CASE("list roundtrip for every codec") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 2000; ++i) {
        const std::uint32_t universe = 1 + rng() % 100000;
        const auto docs = oracle::sorted_sample(rng, universe, 1 + rng() % 200);
        for (Codec c : kAllCodecs) {
            const auto enc = encode(docs, c, universe);
            REQUIRE(enc.bit_length == encoded_bits(docs, c, universe));
            REQUIRE(decode(enc) == docs);
        }
    }
}

TEST_CASE("empty and extreme lists") {
    for (Codec c : kAllCodecs) {
        const auto enc = encode(std::vector<DocId>{}, c, 10);
        CHECK(enc.bit_length == 0);
        CHECK(decode(enc).empty());
    }
    const std::vector<DocId> big{0, 0xfffffffeu};
    for (Codec c : kAllCodecs) CHECK(decode(encode(big, c, 0xffffffffu)) == big);
    CHECK_THROWS_AS(encode(std::vector<DocId>{3, 3}, Codec::gamma, 10), Error);
    CHECK_THROWS_AS(encode(std::vector<DocId>{4, 2}, Codec::gamma, 10), Error);
}

TEST_CASE("dense lists cost one bit per posting under gamma") {
    std::vector<DocId> all(1000);
    for (DocId i = 0; i < 1000; ++i) all[i] = i;
    InvertedIndex idx{1000, {all}};
    CHECK(bits_per_posting(idx, Codec::gamma) == 1.0);
    CHECK(bits_per_posting(idx, Codec::vbyte) == 8.0);
    CHECK_THROWS_AS(bits_per_posting(InvertedIndex{5, {{}}}, Codec::gamma), Error);
}

TEST_CASE("vbyte never beats a byte per posting") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
        const std::uint32_t universe = 1 + rng() % 1000000;
        InvertedIndex idx{universe, {oracle::sorted_sample(rng, universe, 1 + rng() % 500)}};
        CHECK(bits_per_posting(idx, Codec::vbyte) >= 8.0);
    }
}

TEST_CASE("corruption is detected, never decoded into a wrong list") {
    std::mt19937_64 rng(10);
    std::size_t detected = 0;
    std::size_t trials = 0;
    for (int i = 0; i < 300; ++i) {
        const std::uint32_t universe = 100 + rng() % 10000;
        const auto docs = oracle::sorted_sample(rng, universe, 2 + rng() % 100);
        for (Codec c : kAllCodecs) {
            auto enc = encode(docs, c, universe);
            const auto bit = rng() % enc.bit_length;
            enc.bits[bit / 64] ^= std::uint64_t{1} << (63 - bit % 64);
            ++trials;
            try {
                const auto out = decode(enc);
                REQUIRE(out == docs);
            } catch (const CodecError&) {
                ++detected;
            }
        }
    }
    CHECK(detected == trials);

    auto enc = encode(std::vector<DocId>{1, 2, 3}, Codec::gamma, 10);
    enc.bit_length -= 1;
    CHECK_THROWS_AS(decode(enc), CodecError);
    enc = encode(std::vector<DocId>{1, 2, 3}, Codec::gamma, 10);
    enc.length += 1;
    CHECK_THROWS_AS(decode(enc), CodecError);
}
