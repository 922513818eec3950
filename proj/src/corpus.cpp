#include "seclud/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <locale>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace seclud {

namespace {

const std::ctype<wchar_t>* unicode_ctype() {
    static const std::ctype<wchar_t>* facet = []() -> const std::ctype<wchar_t>* {
        for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
            try {
                static const std::locale loc(name);
                return &std::use_facet<std::ctype<wchar_t>>(loc);
            } catch (const std::runtime_error&) {
            }
        }
        return nullptr;
    }();
    return facet;
}

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at text[i]; advances i.
char32_t next_code_point(std::string_view text, std::size_t& i) {
    auto byte = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int extra = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
        extra = 1, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3, cp = b0 & 0x07, min = 0x10000;
    } else {
        ++i;
        return kReplacement;
    }
    if (i + extra >= text.size()) {
        ++i;
        return kReplacement;
    }
    for (int k = 1; k <= extra; ++k) {
        const unsigned char b = byte(i + k);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return kReplacement;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += extra + 1;
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return kReplacement;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_alnum(char32_t cp) {
    if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) != 0;
    const auto* ct = unicode_ctype();
    if (ct == nullptr || cp == kReplacement) return false;
    return ct->is(std::ctype_base::alnum, static_cast<wchar_t>(cp));
}

char32_t to_lower(char32_t cp) {
    if (cp < 0x80) return static_cast<char32_t>(std::tolower(static_cast<int>(cp)));
    const auto* ct = unicode_ctype();
    return ct ? static_cast<char32_t>(ct->tolower(static_cast<wchar_t>(cp))) : cp;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = next_code_point(text, i);
        if (is_alnum(cp)) {
            append_utf8(current, to_lower(cp));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

TermId Corpus::lookup(std::string_view term) const {
    auto it = index_.find(std::string(term));
    return it == index_.end() ? kNoTerm : it->second;
}

Corpus Corpus::from_postings(std::vector<std::string> dictionary,
                             const std::vector<std::vector<DocId>>& postings,
                             std::size_t num_docs, std::vector<std::string> names) {
    if (dictionary.size() != postings.size()) {
        throw Error("dictionary and posting list counts differ");
    }
    Corpus c;
    c.docs_.resize(num_docs);
    for (std::size_t d = 0; d < num_docs; ++d) c.docs_[d].doc = static_cast<DocId>(d);
    c.df_.resize(dictionary.size());
    for (TermId t = 0; t < postings.size(); ++t) {
        for (DocId d : postings[t]) {
            if (d >= num_docs) throw Error("posting references document beyond corpus size");
            c.docs_[d].terms.push_back(t);
        }
        c.df_[t] = postings[t].size();
        c.total_size_ += postings[t].size();
    }
    c.terms_ = std::move(dictionary);
    for (TermId t = 0; t < c.terms_.size(); ++t) c.index_.emplace(c.terms_[t], t);
    if (!names.empty() && names.size() != num_docs) throw Error("document name count mismatch");
    c.names_ = std::move(names);
    return c;
}

void Corpus::validate() const {
    std::vector<std::size_t> df(terms_.size(), 0);
    std::size_t total = 0;
    for (DocId d = 0; d < docs_.size(); ++d) {
        const auto& doc = docs_[d];
        SECLUD_CHECK(doc.doc == d, "document ids must be dense");
        for (std::size_t i = 0; i < doc.terms.size(); ++i) {
            SECLUD_CHECK(doc.terms[i] < terms_.size(), "term id out of range");
            SECLUD_CHECK(i == 0 || doc.terms[i - 1] < doc.terms[i], "document terms not strictly increasing");
            ++df[doc.terms[i]];
        }
        total += doc.terms.size();
    }
    SECLUD_CHECK(total == total_size_, "N does not match document sizes");
    SECLUD_CHECK(df == df_, "document frequencies inconsistent");
    for (TermId t = 1; t < df_.size(); ++t) {
        SECLUD_CHECK(df_[t - 1] >= df_[t], "term ids not ranked by document frequency");
    }
}

void CorpusBuilder::add_document(std::span<const std::string> tokens, std::string name) {
    std::vector<std::uint32_t> ids;
    ids.reserve(tokens.size());
    for (const auto& tok : tokens) {
        auto [it, inserted] = index_.try_emplace(tok, static_cast<std::uint32_t>(terms_.size()));
        if (inserted) terms_.push_back(tok);
        ids.push_back(it->second);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    docs_.push_back(std::move(ids));
    any_name_ = any_name_ || !name.empty();
    names_.push_back(std::move(name));
}

void CorpusBuilder::add_text(std::string_view text, std::string name) {
    const auto tokens = tokenize(text);
    add_document(tokens, std::move(name));
}

Corpus CorpusBuilder::finish() && {
    if (docs_.size() > std::numeric_limits<DocId>::max()) {
        throw Error("too many documents for 32-bit document ids");
    }
    std::vector<std::size_t> df(terms_.size(), 0);
    for (const auto& d : docs_) {
        for (auto t : d) ++df[t];
    }
    // Provisional ids are in first-occurrence order, so a stable sort on df
    // breaks ties by first occurrence.
    std::vector<std::uint32_t> order(terms_.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return df[a] > df[b]; });
    std::vector<TermId> rank(terms_.size());
    for (TermId r = 0; r < order.size(); ++r) rank[order[r]] = r;

    Corpus c;
    c.terms_.reserve(terms_.size());
    c.df_.reserve(terms_.size());
    for (auto old : order) {
        c.terms_.push_back(std::move(terms_[old]));
        c.df_.push_back(df[old]);
    }
    for (TermId t = 0; t < c.terms_.size(); ++t) c.index_.emplace(c.terms_[t], t);
    c.docs_.resize(docs_.size());
    for (DocId d = 0; d < docs_.size(); ++d) {
        auto& terms = c.docs_[d].terms;
        c.docs_[d].doc = d;
        terms.reserve(docs_[d].size());
        for (auto old : docs_[d]) terms.push_back(rank[old]);
        std::sort(terms.begin(), terms.end());
        c.total_size_ += terms.size();
    }
    if (any_name_) c.names_ = std::move(names_);
    return c;
}

InputFormat parse_input_format(std::string_view name) {
    if (name == "plain") return InputFormat::plain;
    if (name == "jsonl") return InputFormat::jsonl;
    throw Error("unknown input format '" + std::string(name) + "' (expected plain or jsonl)");
}

Corpus ingest(std::istream& in, InputFormat format) {
    CorpusBuilder builder;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (format == InputFormat::plain) {
            builder.add_text(line);
            continue;
        }
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
        }
        if (!obj.is_object() || !obj.contains("text") || !obj["text"].is_string()) {
            throw Error("line " + std::to_string(line_no) + ": expected an object with a string field 'text'");
        }
        std::string name;
        if (obj.contains("id")) {
            const auto& id = obj["id"];
            if (id.is_string()) {
                name = id.get<std::string>();
            } else if (id.is_number_integer()) {
                name = std::to_string(id.get<long long>());
            } else {
                throw Error("line " + std::to_string(line_no) + ": field 'id' must be a string");
            }
        }
        builder.add_text(obj["text"].get<std::string>(), std::move(name));
    }
    return std::move(builder).finish();
}

QueryLog read_query_log(std::istream& in) {
    QueryLog log;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::vector<std::string> raw;
        for (std::string tok; ss >> tok;) raw.push_back(std::move(tok));
        if (raw.size() != 2) {
            ++log.skipped;
            continue;
        }
        auto a = tokenize(raw[0]);
        auto b = tokenize(raw[1]);
        if (a.size() != 1 || b.size() != 1) {
            ++log.skipped;
            continue;
        }
        log.pairs.emplace_back(std::move(a[0]), std::move(b[0]));
    }
    return log;
}

double ProbTable::total() const {
    return std::accumulate(p.begin(), p.end(), 0.0);
}

ProbTable probabilities_from_log(std::span<const std::pair<std::string, std::string>> log,
                                 const Corpus& corpus, std::size_t tc) {
    if (tc == 0) throw Error("term cutoff must be at least 1");
    ProbTable table;
    table.source = ProbSource::query_log;
    table.p.assign(corpus.frequent_count(tc), 0.0);
    std::size_t hits = 0;
    auto count = [&](const std::string& term) {
        const TermId t = corpus.lookup(term);
        if (t != kNoTerm && t < table.p.size()) {
            table.p[t] += 1.0;
            ++hits;
        }
    };
    for (const auto& [a, b] : log) {
        count(a);
        count(b);
    }
    if (hits == 0) throw Error("empty workload intersection with frequent terms");
    for (auto& v : table.p) v /= static_cast<double>(hits);
    return table;
}

ProbTable probabilities_from_corpus(const Corpus& corpus, std::size_t tc) {
    if (tc == 0) throw Error("term cutoff must be at least 1");
    if (corpus.num_docs() == 0 || corpus.num_terms() == 0) {
        throw Error("cannot derive term probabilities from an empty corpus");
    }
    ProbTable table;
    table.source = ProbSource::corpus_frequency;
    const std::size_t m = corpus.frequent_count(tc);
    table.p.resize(m);
    double sum = 0.0;
    for (TermId t = 0; t < m; ++t) sum += static_cast<double>(corpus.df(t));
    for (TermId t = 0; t < m; ++t) table.p[t] = static_cast<double>(corpus.df(t)) / sum;
    return table;
}

}  // namespace seclud
