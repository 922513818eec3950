#include "seclud/intersect.hpp"

#include <algorithm>
#include <cmath>

namespace seclud {

std::vector<DocId> intersect_merge(std::span<const DocId> a, std::span<const DocId> b) {
    std::vector<DocId> out;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            out.push_back(a[i]);
            ++i;
            ++j;
        }
    }
    return out;
}

std::vector<DocId> intersect_lookup(std::span<const DocId> small, const BucketedList& large,
                                    std::uint64_t* steps) {
    std::vector<DocId> out;
    if (steps) *steps += small.size();
    if (large.empty()) return out;
    for (DocId x : small) {
        const auto bucket = large.lookup_bucket(x);
        for (DocId y : bucket) {
            if (y >= x) {
                if (y == x) out.push_back(x);
                break;
            }
        }
    }
    return out;
}

std::vector<DocId> intersect_gallop(std::span<const DocId> a, std::span<const DocId> b, std::uint64_t* steps) {
    if (a.size() > b.size()) std::swap(a, b);
    std::vector<DocId> out;
    std::uint64_t comparisons = 0;
    std::size_t lo = 0;
    for (DocId x : a) {
        if (lo >= b.size()) break;
        // gallop: find hi with b[hi] >= x
        std::size_t step = 1;
        std::size_t hi = lo;
        while (hi < b.size() && b[hi] < x) {
            ++comparisons;
            lo = hi + 1;
            hi += step;
            step *= 2;
        }
        hi = std::min(hi + 1, b.size());
        // binary search in [lo, hi)
        while (lo < hi) {
            ++comparisons;
            const std::size_t mid = lo + (hi - lo) / 2;
            if (b[mid] < x) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if (lo < b.size() && b[lo] == x) {
            out.push_back(x);
            ++lo;
        }
    }
    if (steps) *steps += comparisons;
    return out;
}

std::string_view cost_model_name(CostModel m) {
    return m == CostModel::lookup_min ? "lookup-min" : "comparison-log";
}

double intersection_cost(CostModel model, double x, double y) {
    const double m = std::min(x, y);
    const double big = std::max(x, y);
    if (m <= 0.0) return 0.0;
    if (model == CostModel::lookup_min) return m;
    return m * (1.0 + std::log2(big / m));
}

}  // namespace seclud
