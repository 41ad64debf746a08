// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "iriszoo/dataset.hpp"
#include "iriszoo/safety_band.hpp"

namespace iriszoo {

/// Defuzzification knobs: how many qualifying errors turn a template into
/// a wolf or a goat. With wolf_distinct_partners, a wolf needs false
/// accepts against that many different classes rather than that many raw
/// comparisons.
struct MenagerieParams {
    int wolf_min_fa = 2;   // W
    int goat_min_fr = 2;   // G
    bool wolf_distinct_partners = true;

    friend bool operator==(const MenagerieParams&, const MenagerieParams&) = default;
};

/// Non-sheep labels a template (or user) carries. Sheep is not stored:
/// something is a sheep exactly when it carries no other label, so the
/// labels cannot get out of sync with each other.
struct LabelSet {
    bool goat = false;
    bool lamb = false;
    bool wolf = false;

    bool sheep() const { return !goat && !lamb && !wolf; }
    bool any() const { return goat || lamb || wolf; }
    bool subset_of(const LabelSet& o) const {
        return (!goat || o.goat) && (!lamb || o.lamb) && (!wolf || o.wolf);
    }

    friend bool operator==(const LabelSet&, const LabelSet&) = default;
};

struct TemplateVerdict {
    int template_id = 0;
    int fa_count = 0;
    int fr_count = 0;
    int wolf_role_count = 0;     // false-accept pairs this template won
    int lamb_role_count = 0;     // false-accept pairs it lost
    int distinct_wolf_partners = 0;  // distinct classes among its lamb victims
    int n_genuine_comparisons = 0;
    LabelSet labels;
    double goat_deg = 0.0;
    double wolf_deg = 0.0;
    double lamb_deg = 0.0;
    double sheep_deg = 0.0;
};

struct UserVerdict {
    int user_id = 0;
    LabelSet labels;
};

/// Either a plain threshold (2-valent accept rule) or a safety band
/// (3-valent rule with an undecidable middle).
struct OperatingPoint {
    enum class Kind { threshold, band };

    Kind kind = Kind::threshold;
    double threshold = 0.0;
    SafetyBand band;

    static OperatingPoint at_threshold(double t) {
        return {Kind::threshold, t, {}};
    }
    static OperatingPoint at_band(const SafetyBand& b) {
        return {Kind::band, 0.0, b};
    }
};

enum class Provenance { first, last };

struct MenagerieReport {
    OperatingPoint operating_point;
    MenagerieParams params;
    std::vector<TemplateVerdict> verdicts;      // one per template, by id
    std::vector<UserVerdict> user_verdicts;     // empty until lift_to_users
    Provenance provenance = Provenance::last;
    std::string calibration;                    // tag used by comparisons
};

/// Labels every template at one operating point.
///
/// Counts come from band_errors / threshold_errors. A template is a goat
/// once its false rejects reach goat_min_fr. Each false-accept pair yields
/// one wolf role and one lamb role: the wolf role goes to the endpoint with
/// more false accepts at the pair's own score level, meaning more imposter
/// comparisons scoring at least as high as the pair itself (tie: lower id).
/// That ranking depends only on the matrix, so a pair keeps the same roles
/// at every operating point and all role counts are monotone under nested
/// operating points. Wolves are templates whose wolf roles, or distinct
/// victim classes, reach wolf_min_fa; any template holding a lamb role is a
/// lamb, possibly besides being a wolf. Which endpoint of a pair counts as
/// the impersonator is a reporting convention, not a fact about the data;
/// the relation is symmetric to begin with.
///
/// Class structure is recovered from the genuine labels themselves, which
/// works because the matrix is exhaustive.
MenagerieReport classify(const ScoreMatrix& m, const OperatingPoint& op,
                         const MenagerieParams& params);

/// Fills in fuzzy membership degrees:
///   goat_deg  = fr / genuine comparisons of the template
///   wolf_deg  = wolf roles / max wolf roles over all templates
///   lamb_deg  = lamb roles / max lamb roles over all templates
///   sheep_deg = (1-goat_deg)(1-wolf_deg)(1-lamb_deg)
MenagerieReport membership_degrees(MenagerieReport report);

/// A user inherits every non-sheep label of its templates; it is a
/// sheep-user only when all of its templates are sheep.
MenagerieReport lift_to_users(MenagerieReport report, const Dataset& ds);
MenagerieReport lift_to_users(MenagerieReport report,
                              const std::vector<int>& user_of_template);

enum class ZooLabel : uint8_t { sheep, goat, lamb, wolf };
const char* to_string(ZooLabel label);

/// |A n B| / |A u B|; two empty sets count as identical (1.0).
double jaccard_index(const std::vector<int>& a_sorted, const std::vector<int>& b_sorted);

struct StabilityEntry {
    std::string calib_a;
    std::string calib_b;
    ZooLabel label = ZooLabel::wolf;
    bool user_level = false;
    double jaccard = 1.0;
};

/// How stable the wolf and goat sets are across calibrations, plus, per
/// template and label, in how many of the reports that label holds.
struct StabilityReport {
    std::vector<StabilityEntry> entries;
    std::array<std::vector<int>, 4> persistence;  // indexed by ZooLabel
    int n_reports = 0;

    double mean_jaccard(ZooLabel label, bool user_level) const;
};

/// Pairwise wolf- and goat-set Jaccard indices, template and user level.
/// All reports must cover the same template id space and have users lifted.
StabilityReport compare_calibrations(const std::vector<MenagerieReport>& reports);

/// {"operating_point":..,"params":..,"templates":[..],"users":[..],
///  "provenance":"first"|"last","calibration":..}
/// Saving a loaded report reproduces the file byte for byte.
std::string report_to_json(const MenagerieReport& report);
void save_report_json(const MenagerieReport& report, const std::filesystem::path& path);
MenagerieReport load_report_json(const std::filesystem::path& path);

/// `calib_a,calib_b,label,level,jaccard`
void save_stability_csv(const StabilityReport& report, const std::filesystem::path& path);

/// `template_id,label,count`
void save_persistence_csv(const StabilityReport& report, const std::filesystem::path& path);

} // namespace iriszoo
