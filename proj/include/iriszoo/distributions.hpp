// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "iriszoo/safety_band.hpp"
#include "iriszoo/score_matrix.hpp"

namespace iriszoo {

/// Genuine and imposter score samples, each sorted ascending, together with
/// the landmarks of the two empirical distributions: the minimum genuine
/// score (mGS), the maximum imposter score (MIS), and the EER operating
/// point. Overlap exists iff mGS < MIS.
struct DistributionSummary {
    std::vector<double> genuine;
    std::vector<double> imposter;
    double min_genuine_score = 0.0;  // mGS
    double max_imposter_score = 0.0; // MIS
    double eer = 0.0;
    double t_eer = 0.0;
};

/// Partitions a score matrix by label and fills in all landmarks.
/// Requires at least one comparison of each label.
DistributionSummary split_scores(const ScoreMatrix& m);

/// Fraction of imposter scores >= t (accept rule: MS >= t passes).
double far_at(const DistributionSummary& d, double t);

/// Fraction of genuine scores < t.
double frr_at(const DistributionSummary& d, double t);

struct EerPoint {
    double eer = 0.0;
    double threshold = 0.0;
};

/// Empirical step functions rarely intersect exactly, so the EER point is
/// the candidate threshold minimizing |FAR - FRR|, ties resolved to the
/// smallest threshold, with (FAR + FRR)/2 reported as the rate. Candidates
/// are every distinct observed score plus one point just above the maximum,
/// which is where the step functions can change.
EerPoint equal_error_rate(const DistributionSummary& d);

/// All candidate thresholds used by equal_error_rate, ascending.
std::vector<double> candidate_thresholds(const DistributionSummary& d);

/// [mGS, MIS] when the distributions overlap; nullopt otherwise, in which
/// case no error is reachable inside any band and everything is a sheep.
std::optional<SafetyBand> maximal_safety_band(const DistributionSummary& d);

/// {"mGS":..,"MIS":..,"eer":..,"t_eer":..,"band":{..}|null,
///  "n_genuine":..,"n_imposter":..}
std::string analysis_to_json(const DistributionSummary& d);
void save_analysis_json(const DistributionSummary& d, const std::filesystem::path& path);

/// `t,far,frr` over the candidate thresholds.
void save_roc_csv(const DistributionSummary& d, const std::filesystem::path& path);

} // namespace iriszoo
