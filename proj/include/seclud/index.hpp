#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "seclud/common.hpp"
#include "seclud/corpus.hpp"

namespace seclud {

inline constexpr std::size_t kDefaultBucketSize = 16;
inline constexpr std::size_t kDefaultClusterIndexBucketSize = 8;

using PostingList = std::vector<DocId>;

/// Posting lists indexed by TermId over a universe of `universe` documents.
struct InvertedIndex {
    std::size_t universe = 0;
    std::vector<PostingList> lists;

    std::size_t num_postings() const;
};

InvertedIndex build_index(const Corpus& corpus);

/// Rewrites document ids through `new_id` (old -> new) and re-sorts each list.
InvertedIndex permute_index(const InvertedIndex& index, std::span<const DocId> new_id);

/// A sorted id list with a directory of fixed-width id ranges.
///
/// Id x lives in bucket x / width. The width is chosen so that buckets hold
/// about B ids on average, which makes locating x O(1) and scanning its bucket
/// expected O(B).
class BucketedList {
public:
    BucketedList() = default;
    BucketedList(std::vector<DocId> docs, std::size_t bucket_size, std::size_t universe);

    std::span<const DocId> docs() const { return docs_; }
    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }
    std::size_t universe() const { return universe_; }
    std::size_t bucket_width() const { return width_; }
    std::size_t num_buckets() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

    /// The contiguous run of ids x' with x'/width == x/width.
    std::span<const DocId> lookup_bucket(DocId x) const {
        const std::size_t b = x / width_;
        if (b >= num_buckets()) return {};
        return std::span<const DocId>(docs_).subspan(offsets_[b], offsets_[b + 1] - offsets_[b]);
    }

    bool contains(DocId x) const;

private:
    std::vector<DocId> docs_;
    std::vector<std::uint32_t> offsets_;
    std::size_t universe_ = 0;
    std::size_t width_ = 1;
};

/// Throws Error if bucket_size == 0 or an id is >= universe.
BucketedList bucketize(std::span<const DocId> docs, std::size_t bucket_size, std::size_t universe);

}  // namespace seclud
