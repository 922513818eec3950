#include "seclud/index.hpp"

#include <algorithm>

namespace seclud {

std::size_t InvertedIndex::num_postings() const {
    std::size_t total = 0;
    for (const auto& l : lists) total += l.size();
    return total;
}

InvertedIndex build_index(const Corpus& corpus) {
    InvertedIndex index;
    index.universe = corpus.num_docs();
    index.lists.resize(corpus.num_terms());
    for (TermId t = 0; t < corpus.num_terms(); ++t) index.lists[t].reserve(corpus.df(t));
    for (const auto& doc : corpus.docs()) {
        for (TermId t : doc.terms) index.lists[t].push_back(doc.doc);
    }
    return index;
}

InvertedIndex permute_index(const InvertedIndex& index, std::span<const DocId> new_id) {
    if (new_id.size() != index.universe) throw Error("permutation size does not match index universe");
    InvertedIndex out;
    out.universe = index.universe;
    out.lists.resize(index.lists.size());
    for (std::size_t t = 0; t < index.lists.size(); ++t) {
        auto& dst = out.lists[t];
        dst.reserve(index.lists[t].size());
        for (DocId d : index.lists[t]) dst.push_back(new_id[d]);
        std::sort(dst.begin(), dst.end());
    }
    return out;
}

BucketedList::BucketedList(std::vector<DocId> docs, std::size_t bucket_size, std::size_t universe)
    : docs_(std::move(docs)), universe_(universe) {
    if (bucket_size == 0) throw Error("bucket size must be at least 1");
    if (docs_.empty()) return;
    if (docs_.back() >= universe_) throw Error("posting id outside the index universe");
    // width = max(1, ceil(universe * B / length))
    const std::size_t len = docs_.size();
    width_ = std::max<std::size_t>(1, (universe_ * bucket_size + len - 1) / len);
    const std::size_t buckets = (universe_ + width_ - 1) / width_;
    offsets_.assign(buckets + 1, 0);
    for (DocId x : docs_) ++offsets_[x / width_ + 1];
    for (std::size_t b = 0; b < buckets; ++b) offsets_[b + 1] += offsets_[b];
}

bool BucketedList::contains(DocId x) const {
    const auto bucket = lookup_bucket(x);
    return std::find(bucket.begin(), bucket.end(), x) != bucket.end();
}

BucketedList bucketize(std::span<const DocId> docs, std::size_t bucket_size, std::size_t universe) {
    return BucketedList(std::vector<DocId>(docs.begin(), docs.end()), bucket_size, universe);
}

}  // namespace seclud
