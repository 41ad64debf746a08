// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "iriszoo/menagerie.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

#include <json.hpp>

#include "iriszoo/detail/format.hpp"
#include "iriszoo/errors.hpp"

namespace iriszoo {

namespace {

using ordered_json = nlohmann::ordered_json;

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] =
                parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
        }
    }
};

ErrorCounts errors_at(const ScoreMatrix& m, const OperatingPoint& op) {
    return op.kind == OperatingPoint::Kind::threshold ? threshold_errors(m, op.threshold)
                                                      : band_errors(m, op.band);
}

ordered_json labels_to_json(const LabelSet& labels) {
    ordered_json out = ordered_json::array();
    if (labels.sheep()) out.push_back("sheep");
    if (labels.goat) out.push_back("goat");
    if (labels.lamb) out.push_back("lamb");
    if (labels.wolf) out.push_back("wolf");
    return out;
}

LabelSet labels_from_json(const ordered_json& arr) {
    LabelSet labels;
    for (const auto& name : arr) {
        const std::string s = name.get<std::string>();
        if (s == "goat") {
            labels.goat = true;
        } else if (s == "lamb") {
            labels.lamb = true;
        } else if (s == "wolf") {
            labels.wolf = true;
        } else if (s != "sheep") {
            throw FormatError("unknown menagerie label: " + s);
        }
    }
    return labels;
}

std::vector<int> label_set_ids(const MenagerieReport& r, ZooLabel label, bool user_level) {
    std::vector<int> ids;
    auto has = [&](const LabelSet& ls) {
        switch (label) {
        case ZooLabel::sheep: return ls.sheep();
        case ZooLabel::goat: return ls.goat;
        case ZooLabel::lamb: return ls.lamb;
        case ZooLabel::wolf: return ls.wolf;
        }
        return false;
    };
    if (user_level) {
        for (const UserVerdict& v : r.user_verdicts) {
            if (has(v.labels)) ids.push_back(v.user_id);
        }
    } else {
        for (const TemplateVerdict& v : r.verdicts) {
            if (has(v.labels)) ids.push_back(v.template_id);
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

} // namespace

const char* to_string(ZooLabel label) {
    switch (label) {
    case ZooLabel::sheep: return "sheep";
    case ZooLabel::goat: return "goat";
    case ZooLabel::lamb: return "lamb";
    case ZooLabel::wolf: return "wolf";
    }
    return "?";
}

MenagerieReport classify(const ScoreMatrix& m, const OperatingPoint& op,
                         const MenagerieParams& params) {
    if (m.comparisons.empty()) {
        throw PreconditionError("cannot classify an empty score matrix");
    }
    if (params.wolf_min_fa < 1 || params.goat_min_fr < 1) {
        throw PreconditionError("menagerie qualification thresholds must be >= 1");
    }

    const size_t n = static_cast<size_t>(m.n_templates);
    const ErrorCounts ec = errors_at(m, op);

    // The matrix is exhaustive, so genuine edges recover the classes.
    UnionFind classes(m.n_templates);
    for (const Comparison& c : m.comparisons) {
        if (c.label == Label::genuine) {
            classes.unite(c.i, c.j);
        }
    }
    std::vector<int> class_of(n);
    std::vector<int> class_size(n, 0);
    for (size_t t = 0; t < n; ++t) {
        class_of[t] = classes.find(static_cast<int>(t));
        ++class_size[static_cast<size_t>(class_of[t])];
    }

    // One wolf role and one lamb role per false accept. The wolf role goes
    // to the endpoint with more false accepts at the pair's own score
    // level, i.e. more imposter comparisons scoring at least as high as
    // this pair does (tie: lower id). Ranking at the pair's level instead
    // of the operating point keeps a pair's roles identical at every
    // operating point, so role counts only grow as a band narrows or a
    // threshold loosens.
    std::vector<std::vector<double>> imposter_profile(n);
    for (const Comparison& c : m.comparisons) {
        if (c.label == Label::imposter) {
            const double s = c.similarity();
            imposter_profile[static_cast<size_t>(c.i)].push_back(s);
            imposter_profile[static_cast<size_t>(c.j)].push_back(s);
        }
    }
    for (auto& profile : imposter_profile) {
        std::sort(profile.begin(), profile.end());
    }
    auto fa_at_level = [&](int t, double s) {
        const auto& profile = imposter_profile[static_cast<size_t>(t)];
        return profile.end() - std::lower_bound(profile.begin(), profile.end(), s);
    };

    std::vector<int> wolf_roles(n, 0);
    std::vector<int> lamb_roles(n, 0);
    std::vector<std::vector<int>> victim_classes(n);
    for (const FalseAccept& fa : ec.fa_pairs) {
        const auto level_i = fa_at_level(fa.i, fa.score);
        const auto level_j = fa_at_level(fa.j, fa.score);
        const int wolf = level_i > level_j ? fa.i : level_j > level_i ? fa.j
                                                                      : std::min(fa.i, fa.j);
        const int lamb = wolf == fa.i ? fa.j : fa.i;
        ++wolf_roles[static_cast<size_t>(wolf)];
        ++lamb_roles[static_cast<size_t>(lamb)];
        victim_classes[static_cast<size_t>(wolf)].push_back(class_of[static_cast<size_t>(lamb)]);
    }

    MenagerieReport report;
    report.operating_point = op;
    report.params = params;
    report.verdicts.resize(n);
    for (size_t t = 0; t < n; ++t) {
        TemplateVerdict& v = report.verdicts[t];
        v.template_id = static_cast<int>(t);
        v.fa_count = ec.false_accepts[t];
        v.fr_count = ec.false_rejects[t];
        v.wolf_role_count = wolf_roles[t];
        v.lamb_role_count = lamb_roles[t];
        auto& victims = victim_classes[t];
        std::sort(victims.begin(), victims.end());
        victims.erase(std::unique(victims.begin(), victims.end()), victims.end());
        v.distinct_wolf_partners = static_cast<int>(victims.size());
        v.n_genuine_comparisons = class_size[static_cast<size_t>(class_of[t])] - 1;

        v.labels.goat = v.fr_count >= params.goat_min_fr;
        const int wolf_quota =
            params.wolf_distinct_partners ? v.distinct_wolf_partners : v.wolf_role_count;
        v.labels.wolf = wolf_quota >= params.wolf_min_fa;
        // A template can be wolf and lamb at once; the roles are symmetric
        // and only grow as the operating point loosens.
        v.labels.lamb = v.lamb_role_count >= 1;
    }
    return report;
}

MenagerieReport membership_degrees(MenagerieReport report) {
    int max_wolf_roles = 0;
    int max_lamb_roles = 0;
    for (const TemplateVerdict& v : report.verdicts) {
        max_wolf_roles = std::max(max_wolf_roles, v.wolf_role_count);
        max_lamb_roles = std::max(max_lamb_roles, v.lamb_role_count);
    }
    for (TemplateVerdict& v : report.verdicts) {
        v.goat_deg = v.n_genuine_comparisons > 0
                         ? static_cast<double>(v.fr_count) / v.n_genuine_comparisons
                         : 0.0;
        v.wolf_deg =
            max_wolf_roles > 0 ? static_cast<double>(v.wolf_role_count) / max_wolf_roles : 0.0;
        v.lamb_deg =
            max_lamb_roles > 0 ? static_cast<double>(v.lamb_role_count) / max_lamb_roles : 0.0;
        v.sheep_deg = (1.0 - v.goat_deg) * (1.0 - v.wolf_deg) * (1.0 - v.lamb_deg);
    }
    return report;
}

MenagerieReport lift_to_users(MenagerieReport report,
                              const std::vector<int>& user_of_template) {
    if (user_of_template.size() != report.verdicts.size()) {
        throw PreconditionError("user map does not cover the report's templates");
    }
    std::map<int, LabelSet> users;
    for (const TemplateVerdict& v : report.verdicts) {
        LabelSet& u = users[user_of_template[static_cast<size_t>(v.template_id)]];
        u.goat = u.goat || v.labels.goat;
        u.lamb = u.lamb || v.labels.lamb;
        u.wolf = u.wolf || v.labels.wolf;
    }
    report.user_verdicts.clear();
    for (const auto& [user_id, labels] : users) {
        report.user_verdicts.push_back({user_id, labels});
    }
    return report;
}

MenagerieReport lift_to_users(MenagerieReport report, const Dataset& ds) {
    if (ds.n_templates() != static_cast<int>(report.verdicts.size())) {
        throw PreconditionError("report and dataset disagree on template count");
    }
    std::vector<int> user_of_template(ds.records.size());
    for (const TemplateRecord& rec : ds.records) {
        user_of_template[static_cast<size_t>(rec.template_id)] = rec.user_id;
    }
    return lift_to_users(std::move(report), user_of_template);
}

double jaccard_index(const std::vector<int>& a_sorted, const std::vector<int>& b_sorted) {
    if (a_sorted.empty() && b_sorted.empty()) {
        return 1.0;
    }
    size_t common = 0;
    size_t ia = 0;
    size_t ib = 0;
    while (ia < a_sorted.size() && ib < b_sorted.size()) {
        if (a_sorted[ia] == b_sorted[ib]) {
            ++common;
            ++ia;
            ++ib;
        } else if (a_sorted[ia] < b_sorted[ib]) {
            ++ia;
        } else {
            ++ib;
        }
    }
    const size_t unions = a_sorted.size() + b_sorted.size() - common;
    return static_cast<double>(common) / static_cast<double>(unions);
}

double StabilityReport::mean_jaccard(ZooLabel label, bool user_level) const {
    double sum = 0.0;
    int count = 0;
    for (const StabilityEntry& e : entries) {
        if (e.label == label && e.user_level == user_level) {
            sum += e.jaccard;
            ++count;
        }
    }
    return count ? sum / count : 1.0;
}

StabilityReport compare_calibrations(const std::vector<MenagerieReport>& reports) {
    if (reports.size() < 2) {
        throw PreconditionError("comparison needs at least two reports");
    }
    const size_t n = reports.front().verdicts.size();
    for (const MenagerieReport& r : reports) {
        if (r.verdicts.size() != n) {
            throw PreconditionError("reports cover misaligned template id spaces");
        }
        if (r.user_verdicts.empty()) {
            throw PreconditionError("reports must have user verdicts lifted before comparison");
        }
    }

    auto tag = [&](size_t k) {
        return reports[k].calibration.empty() ? "report" + std::to_string(k)
                                              : reports[k].calibration;
    };

    StabilityReport out;
    out.n_reports = static_cast<int>(reports.size());
    for (size_t a = 0; a < reports.size(); ++a) {
        for (size_t b = a + 1; b < reports.size(); ++b) {
            for (ZooLabel label : {ZooLabel::wolf, ZooLabel::goat}) {
                for (bool user_level : {false, true}) {
                    out.entries.push_back(
                        {tag(a), tag(b), label, user_level,
                         jaccard_index(label_set_ids(reports[a], label, user_level),
                                       label_set_ids(reports[b], label, user_level))});
                }
            }
        }
    }

    for (size_t l = 0; l < out.persistence.size(); ++l) {
        out.persistence[l].assign(n, 0);
    }
    for (const MenagerieReport& r : reports) {
        for (const TemplateVerdict& v : r.verdicts) {
            const size_t t = static_cast<size_t>(v.template_id);
            if (v.labels.sheep()) ++out.persistence[static_cast<size_t>(ZooLabel::sheep)][t];
            if (v.labels.goat) ++out.persistence[static_cast<size_t>(ZooLabel::goat)][t];
            if (v.labels.lamb) ++out.persistence[static_cast<size_t>(ZooLabel::lamb)][t];
            if (v.labels.wolf) ++out.persistence[static_cast<size_t>(ZooLabel::wolf)][t];
        }
    }
    return out;
}

std::string report_to_json(const MenagerieReport& report) {
    ordered_json doc;
    if (report.operating_point.kind == OperatingPoint::Kind::threshold) {
        doc["operating_point"] = {{"threshold", report.operating_point.threshold}};
    } else {
        doc["operating_point"] = {{"band",
                                   {{"lower", report.operating_point.band.lower},
                                    {"upper", report.operating_point.band.upper}}}};
    }
    doc["params"] = {{"wolf_min_fa", report.params.wolf_min_fa},
                     {"goat_min_fr", report.params.goat_min_fr},
                     {"wolf_distinct_partners", report.params.wolf_distinct_partners}};
    ordered_json templates = ordered_json::array();
    for (const TemplateVerdict& v : report.verdicts) {
        templates.push_back({{"id", v.template_id},
                             {"fa", v.fa_count},
                             {"fr", v.fr_count},
                             {"labels", labels_to_json(v.labels)},
                             {"degrees",
                              {{"sheep", v.sheep_deg},
                               {"goat", v.goat_deg},
                               {"lamb", v.lamb_deg},
                               {"wolf", v.wolf_deg}}}});
    }
    doc["templates"] = std::move(templates);
    ordered_json users = ordered_json::array();
    for (const UserVerdict& v : report.user_verdicts) {
        users.push_back({{"user_id", v.user_id}, {"labels", labels_to_json(v.labels)}});
    }
    doc["users"] = std::move(users);
    doc["provenance"] = report.provenance == Provenance::first ? "first" : "last";
    doc["calibration"] = report.calibration;
    return doc.dump(2) + "\n";
}

void save_report_json(const MenagerieReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << report_to_json(report);
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

MenagerieReport load_report_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad report JSON: ") + e.what());
    }

    MenagerieReport report;
    try {
        const auto& op = doc.at("operating_point");
        if (op.contains("threshold")) {
            report.operating_point = OperatingPoint::at_threshold(op.at("threshold").get<double>());
        } else {
            const auto& band = op.at("band");
            report.operating_point = OperatingPoint::at_band(
                {band.at("lower").get<double>(), band.at("upper").get<double>()});
        }
        const auto& params = doc.at("params");
        report.params.wolf_min_fa = params.at("wolf_min_fa").get<int>();
        report.params.goat_min_fr = params.at("goat_min_fr").get<int>();
        report.params.wolf_distinct_partners = params.at("wolf_distinct_partners").get<bool>();
        for (const auto& t : doc.at("templates")) {
            TemplateVerdict v;
            v.template_id = t.at("id").get<int>();
            v.fa_count = t.at("fa").get<int>();
            v.fr_count = t.at("fr").get<int>();
            v.labels = labels_from_json(t.at("labels"));
            const auto& degrees = t.at("degrees");
            v.sheep_deg = degrees.at("sheep").get<double>();
            v.goat_deg = degrees.at("goat").get<double>();
            v.lamb_deg = degrees.at("lamb").get<double>();
            v.wolf_deg = degrees.at("wolf").get<double>();
            report.verdicts.push_back(v);
        }
        for (const auto& u : doc.at("users")) {
            report.user_verdicts.push_back(
                {u.at("user_id").get<int>(), labels_from_json(u.at("labels"))});
        }
        const std::string provenance = doc.at("provenance").get<std::string>();
        if (provenance != "first" && provenance != "last") {
            throw FormatError("provenance must be first or last");
        }
        report.provenance = provenance == "first" ? Provenance::first : Provenance::last;
        report.calibration = doc.at("calibration").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad report JSON: ") + e.what());
    }
    return report;
}

void save_stability_csv(const StabilityReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << "calib_a,calib_b,label,level,jaccard\n";
    for (const StabilityEntry& e : report.entries) {
        out << e.calib_a << ',' << e.calib_b << ',' << to_string(e.label) << ','
            << (e.user_level ? "user" : "template") << ',' << detail::format_double(e.jaccard)
            << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

void save_persistence_csv(const StabilityReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << "template_id,label,count\n";
    const size_t n = report.persistence.front().size();
    for (size_t t = 0; t < n; ++t) {
        for (ZooLabel label :
             {ZooLabel::sheep, ZooLabel::goat, ZooLabel::lamb, ZooLabel::wolf}) {
            out << t << ',' << to_string(label) << ','
                << report.persistence[static_cast<size_t>(label)][t] << '\n';
        }
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

} // namespace iriszoo
