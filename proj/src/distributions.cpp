// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "iriszoo/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "iriszoo/detail/format.hpp"
#include "iriszoo/errors.hpp"

namespace iriszoo {

namespace {

using detail::format_double;

double fraction_at_or_above(const std::vector<double>& sorted, double t) {
    if (sorted.empty()) {
        return 0.0;
    }
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

double fraction_below(const std::vector<double>& sorted, double t) {
    if (sorted.empty()) {
        return 0.0;
    }
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

} // namespace

DistributionSummary split_scores(const ScoreMatrix& m) {
    DistributionSummary d;
    for (const Comparison& c : m.comparisons) {
        (c.label == Label::genuine ? d.genuine : d.imposter).push_back(c.similarity());
    }
    if (d.genuine.empty() || d.imposter.empty()) {
        throw PreconditionError("need at least one genuine and one imposter comparison");
    }
    std::sort(d.genuine.begin(), d.genuine.end());
    std::sort(d.imposter.begin(), d.imposter.end());
    d.min_genuine_score = d.genuine.front();
    d.max_imposter_score = d.imposter.back();
    const EerPoint point = equal_error_rate(d);
    d.eer = point.eer;
    d.t_eer = point.threshold;
    return d;
}

double far_at(const DistributionSummary& d, double t) {
    return fraction_at_or_above(d.imposter, t);
}

double frr_at(const DistributionSummary& d, double t) {
    return fraction_below(d.genuine, t);
}

std::vector<double> candidate_thresholds(const DistributionSummary& d) {
    std::vector<double> candidates;
    candidates.reserve(d.genuine.size() + d.imposter.size() + 1);
    candidates.insert(candidates.end(), d.genuine.begin(), d.genuine.end());
    candidates.insert(candidates.end(), d.imposter.begin(), d.imposter.end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (!candidates.empty()) {
        // One supremum point above every score, where FAR settles at 0.
        candidates.push_back(
            std::nextafter(candidates.back(), std::numeric_limits<double>::infinity()));
    }
    return candidates;
}

EerPoint equal_error_rate(const DistributionSummary& d) {
    if (d.genuine.empty() || d.imposter.empty()) {
        throw PreconditionError("equal_error_rate needs both distributions populated");
    }
    EerPoint best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (double t : candidate_thresholds(d)) {
        const double far = far_at(d, t);
        const double frr = frr_at(d, t);
        const double gap = std::abs(far - frr);
        if (gap < best_gap) {
            best_gap = gap;
            best = {(far + frr) / 2.0, t};
        }
    }
    return best;
}

std::optional<SafetyBand> maximal_safety_band(const DistributionSummary& d) {
    if (d.min_genuine_score < d.max_imposter_score) {
        return SafetyBand{d.min_genuine_score, d.max_imposter_score};
    }
    return std::nullopt;
}

std::string analysis_to_json(const DistributionSummary& d) {
    nlohmann::ordered_json doc;
    doc["mGS"] = d.min_genuine_score;
    doc["MIS"] = d.max_imposter_score;
    doc["eer"] = d.eer;
    doc["t_eer"] = d.t_eer;
    if (const auto band = maximal_safety_band(d)) {
        doc["band"] = {{"lower", band->lower}, {"upper", band->upper}};
    } else {
        doc["band"] = nullptr;
    }
    doc["n_genuine"] = d.genuine.size();
    doc["n_imposter"] = d.imposter.size();
    return doc.dump(2) + "\n";
}

void save_analysis_json(const DistributionSummary& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << analysis_to_json(d);
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

void save_roc_csv(const DistributionSummary& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << "t,far,frr\n";
    for (double t : candidate_thresholds(d)) {
        out << format_double(t) << ',' << format_double(far_at(d, t)) << ','
            << format_double(frr_at(d, t)) << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

} // namespace iriszoo
