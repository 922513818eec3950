#include "seclud/index_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace seclud {

namespace {

constexpr std::array<char, 5> kMagic = {'S', 'C', 'L', 'D', '1'};
constexpr std::uint64_t kMaxString = std::uint64_t{1} << 30;

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> buf{};
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    out.write(buf.data(), buf.size());
}

void put_string(std::ostream& out, const std::string& s) {
    put_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> buf{};
    if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) throw Error("index file truncated");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
}

std::string get_string(std::istream& in) {
    const auto len = get_u64(in);
    if (len > kMaxString) throw Error("index file corrupt: string too long");
    std::string s(len, '\0');
    if (len > 0 && !in.read(s.data(), static_cast<std::streamsize>(len))) throw Error("index file truncated");
    return s;
}

}  // namespace

void save_index(std::ostream& out, const Corpus& corpus, const InvertedIndex& index, Codec codec) {
    if (index.lists.size() != corpus.num_terms()) throw Error("index and dictionary sizes differ");
    out.write(kMagic.data(), kMagic.size());
    put_u64(out, index.universe);
    put_u64(out, corpus.num_terms());
    put_u64(out, corpus.doc_names().size());
    for (const auto& term : corpus.dictionary()) put_string(out, term);
    for (const auto& name : corpus.doc_names()) put_string(out, name);
    for (const auto& list : index.lists) {
        const EncodedList enc = encode(list, codec, index.universe);
        out.put(static_cast<char>(enc.codec));
        put_u64(out, enc.parameter);
        put_u64(out, enc.length);
        put_u64(out, enc.bit_length);
        put_u64(out, enc.checksum);
        for (auto w : enc.bits) put_u64(out, w);
    }
    if (!out) throw Error("failed writing index");
}

LoadedIndex load_index(std::istream& in) {
    std::array<char, 5> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw Error("not an index file (bad magic)");
    LoadedIndex loaded;
    const auto num_docs = get_u64(in);
    const auto num_terms = get_u64(in);
    const auto num_names = get_u64(in);
    if (num_docs > std::numeric_limits<DocId>::max()) throw Error("index file corrupt: document count");
    if (num_names != 0 && num_names != num_docs) throw Error("index file corrupt: name count");
    std::vector<std::string> dict;
    for (std::uint64_t t = 0; t < num_terms; ++t) dict.push_back(get_string(in));
    std::vector<std::string> names;
    for (std::uint64_t i = 0; i < num_names; ++i) names.push_back(get_string(in));

    loaded.index.universe = num_docs;
    loaded.index.lists.resize(num_terms);
    bool first = true;
    for (std::uint64_t t = 0; t < num_terms; ++t) {
        EncodedList enc;
        const int tag = in.get();
        if (tag < 0 || tag > static_cast<int>(Codec::vbyte)) throw Error("index file corrupt: codec tag");
        enc.codec = static_cast<Codec>(tag);
        enc.parameter = get_u64(in);
        enc.length = get_u64(in);
        enc.bit_length = get_u64(in);
        enc.checksum = get_u64(in);
        if (enc.length > num_docs) throw Error("index file corrupt: list length");
        enc.bits.resize((enc.bit_length + 63) / 64);
        for (auto& w : enc.bits) w = get_u64(in);
        auto docs = decode(enc);
        if (!docs.empty() && docs.back() >= num_docs) throw Error("index file corrupt: id out of range");
        if (first && enc.length > 0) {
            loaded.codec = enc.codec;
            first = false;
        }
        loaded.index.lists[t] = std::move(docs);
    }
    for (std::uint64_t t = 1; t < num_terms; ++t) {
        if (loaded.index.lists[t].size() > loaded.index.lists[t - 1].size()) {
            throw Error("index file corrupt: terms not ranked by document frequency");
        }
    }
    loaded.corpus = Corpus::from_postings(std::move(dict), loaded.index.lists, num_docs, std::move(names));
    return loaded;
}

std::filesystem::path index_file(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path) || path.filename().empty()) return path / "index.scld";
    return path;
}

void save_index_file(const std::filesystem::path& path, const Corpus& corpus, const InvertedIndex& index,
                     Codec codec) {
    auto file = path;
    if (!path.has_extension()) {
        std::filesystem::create_directories(path);
        file = path / "index.scld";
    } else if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot open " + file.string() + " for writing");
    save_index(out, corpus, index, codec);
}

LoadedIndex load_index_file(const std::filesystem::path& path) {
    const auto file = index_file(path);
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open index " + file.string());
    return load_index(in);
}

}  // namespace seclud
