// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "iriszoo/safety_band.hpp"

#include "iriszoo/errors.hpp"

namespace iriszoo {

BandDecision decide(double score, const SafetyBand& band) {
    if (score < band.lower) {
        return BandDecision::imposter;
    }
    if (score > band.upper) {
        return BandDecision::genuine;
    }
    return BandDecision::undecidable;
}

namespace {

// Shared walk for both decision models. accept_at_upper distinguishes the
// 2-valent threshold rule (score == t is accepted, hence a false accept
// for imposters) from the closed band (score == upper is undecidable).
ErrorCounts count_errors(const ScoreMatrix& m, double lower, double upper,
                         bool accept_at_upper) {
    ErrorCounts ec;
    ec.false_accepts.assign(static_cast<size_t>(m.n_templates), 0);
    ec.false_rejects.assign(static_cast<size_t>(m.n_templates), 0);
    for (const Comparison& c : m.comparisons) {
        const double s = c.similarity();
        if (c.label == Label::genuine) {
            ++ec.n_genuine;
            if (s < lower) {
                ++ec.false_rejects[static_cast<size_t>(c.i)];
                ++ec.false_rejects[static_cast<size_t>(c.j)];
                ++ec.fr_comparisons;
            }
        } else {
            ++ec.n_imposter;
            if (s > upper || (accept_at_upper && s == upper)) {
                ++ec.false_accepts[static_cast<size_t>(c.i)];
                ++ec.false_accepts[static_cast<size_t>(c.j)];
                ++ec.fa_comparisons;
                ec.fa_pairs.push_back({c.i, c.j, s});
            }
        }
    }
    return ec;
}

} // namespace

ErrorCounts band_errors(const ScoreMatrix& m, const SafetyBand& band) {
    if (!(band.lower <= band.upper)) {
        throw PreconditionError("safety band has lower > upper");
    }
    return count_errors(m, band.lower, band.upper, false);
}

ErrorCounts threshold_errors(const ScoreMatrix& m, double t) {
    return count_errors(m, t, t, true);
}

} // namespace iriszoo
