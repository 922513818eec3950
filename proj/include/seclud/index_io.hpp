#pragma once

#include <filesystem>
#include <iosfwd>

#include "seclud/codec.hpp"
#include "seclud/corpus.hpp"
#include "seclud/index.hpp"

namespace seclud {

// On-disk container, all integers little-endian:
//
//   "SCLD1"                             5-byte magic
//   u64 num_docs, u64 num_terms, u64 num_names (0 or num_docs)
//   num_terms  x (u64 byte length, UTF-8 bytes)    dictionary in TermId order
//   num_names  x (u64 byte length, UTF-8 bytes)    external document ids
//   num_terms  x (u8 codec, u64 parameter, u64 length, u64 bit length,
//                 u64 checksum, ceil(bit length / 64) x u64 payload words)
//
// Payload words hold the bit string MSB-first.
struct LoadedIndex {
    Corpus corpus;
    InvertedIndex index;
    Codec codec = Codec::gamma;
};

void save_index(std::ostream& out, const Corpus& corpus, const InvertedIndex& index, Codec codec);
LoadedIndex load_index(std::istream& in);

/// `path` may name the container file or a directory holding `index.scld`.
std::filesystem::path index_file(const std::filesystem::path& path);
void save_index_file(const std::filesystem::path& path, const Corpus& corpus, const InvertedIndex& index,
                     Codec codec);
LoadedIndex load_index_file(const std::filesystem::path& path);

}  // namespace seclud
