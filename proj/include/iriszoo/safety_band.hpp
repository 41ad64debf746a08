// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "iriszoo/score_matrix.hpp"

namespace iriszoo {

/// Closed score interval [lower, upper] inside which a comparison is
/// undecidable under the 3-valent decision model.
struct SafetyBand {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }

    friend bool operator==(const SafetyBand&, const SafetyBand&) = default;
};

enum class BandDecision { imposter, undecidable, genuine };

/// Strictly below the band: imposter. Strictly above: genuine. Inside,
/// endpoints included: undecidable.
BandDecision decide(double score, const SafetyBand& band);

struct FalseAccept {
    int i = 0;
    int j = 0;
    double score = 0.0;
};

/// Error bookkeeping at one operating point. Both participants of an
/// erroneous comparison are charged: a genuine pair scoring below the band
/// is a false reject for both templates, an imposter pair scoring above it
/// a false accept for both.
struct ErrorCounts {
    std::vector<int> false_accepts;               // per template
    std::vector<int> false_rejects;               // per template
    std::vector<FalseAccept> fa_pairs;            // the false-accept comparisons
    int fa_comparisons = 0;
    int fr_comparisons = 0;
    int n_genuine = 0;
    int n_imposter = 0;

    double induced_far() const {
        return n_imposter ? static_cast<double>(fa_comparisons) / n_imposter : 0.0;
    }
    double induced_frr() const {
        return n_genuine ? static_cast<double>(fr_comparisons) / n_genuine : 0.0;
    }
};

ErrorCounts band_errors(const ScoreMatrix& m, const SafetyBand& band);

/// 2-valent threshold model: MS >= t is accepted as genuine. Differs from
/// band_errors on the degenerate band [t, t] only for scores exactly at t.
ErrorCounts threshold_errors(const ScoreMatrix& m, double t);

} // namespace iriszoo
