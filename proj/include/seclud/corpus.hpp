#pragma once

#include <algorithm>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "seclud/common.hpp"

namespace seclud {

// Lowercased maximal runs of alphanumeric code points. Invalid UTF-8 bytes
// are treated as U+FFFD, which is a separator.
std::vector<std::string> tokenize(std::string_view text);

/// A document as the set of distinct terms it contains (strictly increasing).
struct DocumentTerms {
    DocId doc = 0;
    std::vector<TermId> terms;
};

/// Dictionary, per-document term sets and document frequencies.
///
/// Term ids are ranked by descending document frequency, so the `tc` most
/// frequent terms are exactly the ids `[0, tc)`.
class Corpus {
public:
    Corpus() = default;

    std::size_t num_docs() const { return docs_.size(); }
    std::size_t num_terms() const { return terms_.size(); }
    /// Sum of |d| over all documents (distinct terms per document).
    std::size_t total_size() const { return total_size_; }

    const std::vector<DocumentTerms>& docs() const { return docs_; }
    const DocumentTerms& doc(DocId d) const { return docs_.at(d); }
    std::span<const TermId> terms_of(DocId d) const { return docs_[d].terms; }

    const std::string& term(TermId t) const { return terms_.at(t); }
    const std::vector<std::string>& dictionary() const { return terms_; }
    /// kNoTerm when the string is not in the dictionary.
    TermId lookup(std::string_view term) const;

    std::size_t df(TermId t) const { return df_.at(t); }
    const std::vector<std::size_t>& dfs() const { return df_; }

    /// External document names (jsonl `id`); empty when the input had none.
    const std::vector<std::string>& doc_names() const { return names_; }

    /// Number of frequent terms under cutoff tc.
    std::size_t frequent_count(std::size_t tc) const { return std::min(tc, terms_.size()); }

    /// Rebuilds a corpus from per-term document lists (already in rank order).
    static Corpus from_postings(std::vector<std::string> dictionary,
                                const std::vector<std::vector<DocId>>& postings,
                                std::size_t num_docs, std::vector<std::string> names = {});

    /// Throws InvariantViolation if df, N or the term ordering are inconsistent.
    void validate() const;

private:
    friend class CorpusBuilder;

    std::vector<DocumentTerms> docs_;
    std::vector<std::string> terms_;
    std::unordered_map<std::string, TermId> index_;
    std::vector<std::size_t> df_;
    std::vector<std::string> names_;
    std::size_t total_size_ = 0;
};

/// Accumulates documents, then assigns frequency-ranked term ids.
class CorpusBuilder {
public:
    void add_document(std::span<const std::string> tokens, std::string name = {});
    void add_text(std::string_view text, std::string name = {});
    std::size_t size() const { return docs_.size(); }
    Corpus finish() &&;

private:
    std::vector<std::vector<std::uint32_t>> docs_;  // provisional ids, first-occurrence order
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<std::string> names_;
    bool any_name_ = false;
};

enum class InputFormat { plain, jsonl };

InputFormat parse_input_format(std::string_view name);

Corpus ingest(std::istream& in, InputFormat format);

struct QueryLog {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::size_t skipped = 0;  // lines without exactly two tokens
};

// One query per line, exactly two whitespace separated terms. Terms are
// normalised with the document tokenizer.
QueryLog read_query_log(std::istream& in);

enum class ProbSource { corpus_frequency, query_log, explicit_values };

/// Query-term probabilities over the frequent terms [0, tc).
struct ProbTable {
    std::vector<double> p;
    ProbSource source = ProbSource::explicit_values;

    double operator()(TermId t) const { return t < p.size() ? p[t] : 0.0; }
    std::size_t size() const { return p.size(); }
    double total() const;
};

ProbTable probabilities_from_log(std::span<const std::pair<std::string, std::string>> log,
                                 const Corpus& corpus, std::size_t tc);
ProbTable probabilities_from_corpus(const Corpus& corpus, std::size_t tc);

}  // namespace seclud
