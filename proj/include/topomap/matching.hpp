#pragma once

#include <cstdint>
#include <vector>

namespace topomap {

struct WeightedEdge {
    int u;
    int v;
    int64_t weight;
};

/// Exact maximum-weight matching (Galil/Edmonds blossom algorithm, dual
/// formulation). With max_cardinality the matching is constrained to
/// maximum size. Returns mate[v] = partner or -1. Deterministic.
std::vector<int> max_weight_matching(int num_vertices, const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality);

/// Exact minimum-weight perfect matching on the complete graph given a
/// dense symmetric weight matrix (even order). Returns mate[i] = j.
std::vector<int> min_weight_perfect_matching(const std::vector<std::vector<int64_t>>& w);

}  // namespace topomap
