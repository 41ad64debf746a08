// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "iriszoo/narrowing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "iriszoo/detail/format.hpp"
#include "iriszoo/errors.hpp"

namespace iriszoo {

namespace {

// Error fractions under the band rule (strict on both sides).
double frr_below(const std::vector<double>& genuine, double lower) {
    const auto it = std::lower_bound(genuine.begin(), genuine.end(), lower);
    return static_cast<double>(it - genuine.begin()) / static_cast<double>(genuine.size());
}

double far_above(const std::vector<double>& imposter, double upper) {
    const auto it = std::upper_bound(imposter.begin(), imposter.end(), upper);
    return static_cast<double>(imposter.end() - it) / static_cast<double>(imposter.size());
}

NarrowingStep make_step(const SafetyBand& band, const MenagerieReport& report,
                        int n_genuine, int n_imposter) {
    NarrowingStep step;
    step.band = band;
    step.false_accepts.reserve(report.verdicts.size());
    step.false_rejects.reserve(report.verdicts.size());
    int fa_comparisons = 0;
    int fr_comparisons = 0;
    for (const TemplateVerdict& v : report.verdicts) {
        step.false_accepts.push_back(v.fa_count);
        step.false_rejects.push_back(v.fr_count);
        fa_comparisons += v.fa_count;
        fr_comparisons += v.fr_count;
        step.n_wolves += v.labels.wolf;
        step.n_goats += v.labels.goat;
        step.n_lambs += v.labels.lamb;
    }
    // Every erroneous comparison was charged to both endpoints.
    step.induced_far = n_imposter ? 0.5 * fa_comparisons / n_imposter : 0.0;
    step.induced_frr = n_genuine ? 0.5 * fr_comparisons / n_genuine : 0.0;
    return step;
}

} // namespace

NarrowingTrace narrow_balanced(const DistributionSummary& d, const ScoreMatrix& m,
                               const MenagerieParams& params) {
    if (!(d.min_genuine_score < d.max_imposter_score)) {
        throw PreconditionError("distributions do not overlap; nothing to narrow");
    }

    // The walk aims at t_EER. Should the EER point fall outside the maximal
    // band (possible on degenerate data), it is clamped so every band stays
    // an interval.
    const double target =
        std::clamp(d.t_eer, d.min_genuine_score, d.max_imposter_score);

    NarrowingTrace trace;
    SafetyBand band{d.min_genuine_score, d.max_imposter_score};
    const int n_genuine = static_cast<int>(d.genuine.size());
    const int n_imposter = static_cast<int>(d.imposter.size());
    auto record = [&](const SafetyBand& b) -> const NarrowingStep& {
        const MenagerieReport report = classify(m, OperatingPoint::at_band(b), params);
        trace.steps.push_back(make_step(b, report, n_genuine, n_imposter));
        return trace.steps.back();
    };
    record(band);

    while (true) {
        const bool can_raise = band.lower < target;
        const bool can_drop = band.upper > target;
        if (!can_raise && !can_drop) {
            trace.stop_reason = StopReason::reached_t_eer;
            break;
        }

        // Candidate bounds: the next distinct observed score on each side,
        // clamped at the target.
        double raised = target;
        if (can_raise) {
            const auto it = std::upper_bound(d.genuine.begin(), d.genuine.end(), band.lower);
            if (it != d.genuine.end()) {
                raised = std::min(*it, target);
            }
        }
        double dropped = target;
        if (can_drop) {
            const auto it = std::lower_bound(d.imposter.begin(), d.imposter.end(), band.upper);
            if (it != d.imposter.begin()) {
                dropped = std::max(*(it - 1), target);
            }
        }

        bool raise;
        if (!can_raise) {
            raise = false;
        } else if (!can_drop) {
            raise = true;
        } else {
            const double far_now = far_above(d.imposter, band.upper);
            const double frr_now = frr_below(d.genuine, band.lower);
            const double gap_raise = std::abs(frr_below(d.genuine, raised) - far_now);
            const double gap_drop = std::abs(frr_now - far_above(d.imposter, dropped));
            if (gap_raise != gap_drop) {
                raise = gap_raise < gap_drop;
            } else if (frr_now != far_now) {
                raise = frr_now < far_now;
            } else {
                raise = true;
            }
        }

        if (raise) {
            band.lower = raised;
        } else {
            band.upper = dropped;
        }
        const NarrowingStep& step = record(band);
        if (step.n_wolves > 0 && step.n_goats > 0) {
            trace.stop_reason = StopReason::populated;
            break;
        }
        if (band.lower == target && band.upper == target) {
            trace.stop_reason = StopReason::reached_t_eer;
            break;
        }
    }
    return trace;
}

MenagerieReport first_templates(const DistributionSummary& d, const ScoreMatrix& m,
                                const MenagerieParams& params, NarrowingTrace* trace_out) {
    if (!(d.min_genuine_score < d.max_imposter_score)) {
        // Disjoint distributions: the gap between MIS and mGS separates the
        // labels perfectly and the menagerie stays empty.
        if (trace_out) {
            *trace_out = {};
        }
        MenagerieReport report = classify(
            m, OperatingPoint::at_band({d.max_imposter_score, d.min_genuine_score}), params);
        report.provenance = Provenance::first;
        return report;
    }
    NarrowingTrace trace = narrow_balanced(d, m, params);
    MenagerieReport report =
        classify(m, OperatingPoint::at_band(trace.steps.back().band), params);
    report.provenance = Provenance::first;
    if (trace_out) {
        *trace_out = std::move(trace);
    }
    return report;
}

MenagerieReport last_templates(const DistributionSummary& d, const ScoreMatrix& m,
                               const MenagerieParams& params) {
    MenagerieReport report = classify(m, OperatingPoint::at_threshold(d.t_eer), params);
    report.provenance = Provenance::last;
    return report;
}

void save_trace_csv(const NarrowingTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << "step,lower,upper,induced_far,induced_frr,n_wolves,n_goats,n_lambs\n";
    for (size_t k = 0; k < trace.steps.size(); ++k) {
        const NarrowingStep& s = trace.steps[k];
        out << k << ',' << detail::format_double(s.band.lower) << ','
            << detail::format_double(s.band.upper) << ','
            << detail::format_double(s.induced_far) << ','
            << detail::format_double(s.induced_frr) << ',' << s.n_wolves << ',' << s.n_goats
            << ',' << s.n_lambs << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

} // namespace iriszoo
