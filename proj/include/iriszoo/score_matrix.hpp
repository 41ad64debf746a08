// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "iriszoo/dataset.hpp"

namespace iriszoo {

enum class Label : uint8_t { genuine, imposter };

/// One unordered pair, stored once with i < j. The score stays an exact
/// integer pair (hd_count, n_bits); similarity() performs the only division.
struct Comparison {
    int i = 0;
    int j = 0;
    int hd_count = 0;
    int n_bits = 0;
    Label label = Label::imposter;

    double similarity() const {
        return 1.0 - static_cast<double>(hd_count) / static_cast<double>(n_bits);
    }

    friend bool operator==(const Comparison&, const Comparison&) = default;
};

/// All n*(n-1)/2 comparisons of a dataset in lexicographic (i, j) order.
/// A comparison is genuine iff both templates come from the same class.
struct ScoreMatrix {
    int n_templates = 0;
    int n_bits = 0;
    std::vector<Comparison> comparisons;

    friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;
};

/// Exhaustive all-to-all matching. The pair index space may be split across
/// `workers` threads; every worker writes disjoint, precomputed slots, so
/// the result is identical for any worker count.
ScoreMatrix compute_score_matrix(const Dataset& ds, int workers = 1);

/// CSV with header `i,j,hd_count,n_bits,label`, one row per comparison in
/// matrix order, integers only, label spelled out.
std::string scores_to_csv(const ScoreMatrix& m);
void save_scores_csv(const ScoreMatrix& m, const std::filesystem::path& path);

/// Rejects anything that is not a complete, canonically ordered matrix.
ScoreMatrix load_scores_csv(const std::filesystem::path& path);

} // namespace iriszoo
