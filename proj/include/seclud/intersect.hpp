#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "seclud/common.hpp"
#include "seclud/index.hpp"

namespace seclud {

// Every kernel takes an optional step counter. Counting follows the analytic
// cost: the lookup kernel adds one step per element of the list it walks.

/// Linear merge; the reference every other kernel is tested against.
std::vector<DocId> intersect_merge(std::span<const DocId> a, std::span<const DocId> b);

/// Walks `small` and probes the bucket of each id in `large`. Adds |small|
/// to *steps.
std::vector<DocId> intersect_lookup(std::span<const DocId> small, const BucketedList& large,
                                    std::uint64_t* steps = nullptr);

/// Doubling search from the shorter list into the longer one. Adds the
/// number of comparisons to *steps.
std::vector<DocId> intersect_gallop(std::span<const DocId> a, std::span<const DocId> b,
                                    std::uint64_t* steps = nullptr);

enum class CostModel { lookup_min, comparison_log };

std::string_view cost_model_name(CostModel m);

/// Analytic intersection cost of lists of lengths x and y.
///   lookup_min:      min(x, y)
///   comparison_log:  m * (1 + log2(M / m)), 0 when m = 0
double intersection_cost(CostModel model, double x, double y);

}  // namespace seclud
