// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <filesystem>
#include <vector>

#include "iriszoo/distributions.hpp"
#include "iriszoo/menagerie.hpp"

namespace iriszoo {

struct NarrowingStep {
    SafetyBand band;
    double induced_far = 0.0;
    double induced_frr = 0.0;
    std::vector<int> false_accepts;  // per template, cumulative at this band
    std::vector<int> false_rejects;
    int n_wolves = 0;
    int n_goats = 0;
    int n_lambs = 0;
};

enum class StopReason { populated, reached_t_eer };

/// Step 0 is always the maximal band [mGS, MIS]; later bands are strictly
/// nested and all contain the narrowing target.
struct NarrowingTrace {
    std::vector<NarrowingStep> steps;
    StopReason stop_reason = StopReason::reached_t_eer;
};

/// Shrinks the maximal band toward t_EER one observed score at a time.
///
/// Each iteration considers raising the lower bound to the next distinct
/// genuine score and lowering the upper bound to the next distinct imposter
/// score (both clamped at t_EER) and applies whichever move leaves the
/// smaller |FRR - FAR|; on a tie the side currently contributing less error
/// moves, and the lower bound wins a full tie. The walk stops as soon as
/// the wolf and goat sets are both non-empty, or once both bounds sit on
/// t_EER. Requires overlapping distributions.
NarrowingTrace narrow_balanced(const DistributionSummary& d, const ScoreMatrix& m,
                               const MenagerieParams& params);

/// The marginal menagerie: classification at the stopping band of
/// narrow_balanced. Without overlap there is nothing to narrow and the
/// report is all sheep, taken at the separating band [MIS, mGS].
/// Pass trace_out to also receive the band walk.
MenagerieReport first_templates(const DistributionSummary& d, const ScoreMatrix& m,
                                const MenagerieParams& params,
                                NarrowingTrace* trace_out = nullptr);

/// Classification under the plain threshold model at t_EER.
MenagerieReport last_templates(const DistributionSummary& d, const ScoreMatrix& m,
                               const MenagerieParams& params);

/// `step,lower,upper,induced_far,induced_frr,n_wolves,n_goats,n_lambs`
void save_trace_csv(const NarrowingTrace& trace, const std::filesystem::path& path);

} // namespace iriszoo
