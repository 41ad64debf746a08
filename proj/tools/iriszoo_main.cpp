// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
//
// iriszoo: generate synthetic iris-code datasets, run exhaustive Hamming
// matching, analyze the score distributions, detect the menagerie, and
// compare detections across calibrations.
//
// Exit codes: 0 ok, 2 usage, 3 I/O failure, 4 malformed input file,
// 5 precondition violation (e.g. no overlap in first mode).

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "iriszoo/dataset.hpp"
#include "iriszoo/distributions.hpp"
#include "iriszoo/errors.hpp"
#include "iriszoo/menagerie.hpp"
#include "iriszoo/narrowing.hpp"
#include "iriszoo/score_matrix.hpp"

namespace {

using namespace iriszoo;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitFormat = 4;
constexpr int kExitPrecondition = 5;

void print_summary(const nlohmann::ordered_json& doc, const std::string& format) {
    if (format == "csv") {
        std::string header;
        std::string row;
        for (const auto& [key, value] : doc.items()) {
            header += header.empty() ? key : "," + key;
            const std::string v = value.is_string() ? value.get<std::string>() : value.dump();
            row += row.empty() ? v : "," + v;
        }
        std::cout << header << '\n' << row << '\n';
    } else {
        std::cout << doc.dump(2) << '\n';
    }
}

struct GenOptions {
    CalibrationSpec spec;
    std::optional<int> goat_class;
    double goat_strength = 3.0;
    std::vector<int> wolf_pair;
    double wolf_strength = 0.9;
    std::string output;
    std::string format = "json";
};

void run_gen(const GenOptions& opt) {
    CalibrationSpec spec = opt.spec;
    if (opt.goat_class) {
        spec.anomalies.push_back({AnomalyKind::goat_class, {*opt.goat_class}, opt.goat_strength});
    }
    if (!opt.wolf_pair.empty()) {
        spec.anomalies.push_back({AnomalyKind::wolf_lamb_pair, opt.wolf_pair, opt.wolf_strength});
    }

    Dataset ds;
    try {
        ds = generate_dataset(spec);
    } catch (const PreconditionError& e) {
        // Everything the generator can reject came straight from flags.
        throw CLI::ValidationError("gen", e.what());
    }
    save_dataset(ds, opt.output);
    print_summary({{"templates", ds.n_templates()},
                   {"rows", spec.rows},
                   {"cols", spec.cols},
                   {"classes", spec.n_classes},
                   {"seed", spec.seed},
                   {"output", opt.output}},
                  opt.format);
}

struct MatchOptions {
    std::string input;
    std::string output;
    int workers = 1;
    std::string format = "json";
};

void run_match(const MatchOptions& opt) {
    const Dataset ds = load_dataset(opt.input);
    const ScoreMatrix m = compute_score_matrix(ds, opt.workers);
    save_scores_csv(m, opt.output);
    print_summary({{"templates", m.n_templates},
                   {"comparisons", m.comparisons.size()},
                   {"workers", opt.workers},
                   {"output", opt.output}},
                  opt.format);
}

struct AnalyzeOptions {
    std::string input;
    std::string output;
    std::string roc;
    std::string format = "json";
};

void run_analyze(const AnalyzeOptions& opt) {
    const ScoreMatrix m = load_scores_csv(opt.input);
    const DistributionSummary d = split_scores(m);
    save_analysis_json(d, opt.output);
    if (!opt.roc.empty()) {
        save_roc_csv(d, opt.roc);
    }
    print_summary({{"mGS", d.min_genuine_score},
                   {"MIS", d.max_imposter_score},
                   {"eer", d.eer},
                   {"t_eer", d.t_eer},
                   {"n_genuine", d.genuine.size()},
                   {"n_imposter", d.imposter.size()},
                   {"output", opt.output}},
                  opt.format);
}

struct MenagerieOptions {
    std::string dataset;
    std::string scores;
    std::string mode = "both";
    std::string output_prefix;
    std::string calibration;
    MenagerieParams params;
    int workers = 1;
    std::string format = "json";
};

int count_label(const MenagerieReport& r, ZooLabel label) {
    int n = 0;
    for (const TemplateVerdict& v : r.verdicts) {
        switch (label) {
        case ZooLabel::sheep: n += v.labels.sheep(); break;
        case ZooLabel::goat: n += v.labels.goat; break;
        case ZooLabel::lamb: n += v.labels.lamb; break;
        case ZooLabel::wolf: n += v.labels.wolf; break;
        }
    }
    return n;
}

void run_menagerie(const MenagerieOptions& opt) {
    const Dataset ds = load_dataset(opt.dataset);
    const ScoreMatrix m = opt.scores.empty() ? compute_score_matrix(ds, opt.workers)
                                             : load_scores_csv(opt.scores);
    if (m.n_templates != ds.n_templates() || m.n_bits != ds.spec.rows * ds.spec.cols) {
        throw FormatError("score file does not match the dataset's shape");
    }
    const DistributionSummary d = split_scores(m);
    const std::string calibration = opt.calibration.empty() ? ds.spec.label() : opt.calibration;

    const bool want_first = opt.mode == "first" || opt.mode == "both";
    const bool want_last = opt.mode == "last" || opt.mode == "both";
    if (want_first && !(d.min_genuine_score < d.max_imposter_score)) {
        throw PreconditionError(
            "score distributions do not overlap; the narrowing walk is undefined (use --mode last)");
    }

    nlohmann::ordered_json summary{{"calibration", calibration},
                                   {"mode", opt.mode},
                                   {"eer", d.eer},
                                   {"t_eer", d.t_eer}};
    auto finish = [&](MenagerieReport report, const std::string& suffix) {
        report = lift_to_users(membership_degrees(std::move(report)), ds);
        report.calibration = calibration;
        const std::string path = opt.output_prefix + suffix;
        save_report_json(report, path);
        const char* tag = report.provenance == Provenance::first ? "first" : "last";
        summary[std::string(tag) + "_wolves"] = count_label(report, ZooLabel::wolf);
        summary[std::string(tag) + "_goats"] = count_label(report, ZooLabel::goat);
        summary[std::string(tag) + "_lambs"] = count_label(report, ZooLabel::lamb);
        summary[std::string(tag) + "_report"] = path;
    };

    if (want_first) {
        NarrowingTrace trace;
        finish(first_templates(d, m, opt.params, &trace), "_first.json");
        const std::string trace_path = opt.output_prefix + "_trace.csv";
        save_trace_csv(trace, trace_path);
        summary["trace"] = trace_path;
    }
    if (want_last) {
        finish(last_templates(d, m, opt.params), "_last.json");
    }
    print_summary(summary, opt.format);
}

struct CompareOptions {
    std::vector<std::string> reports;
    std::string output;
    std::string persistence;
    std::string format = "json";
};

void run_compare(const CompareOptions& opt) {
    std::vector<MenagerieReport> reports;
    reports.reserve(opt.reports.size());
    for (const std::string& path : opt.reports) {
        reports.push_back(load_report_json(path));
    }
    const StabilityReport stability = compare_calibrations(reports);
    save_stability_csv(stability, opt.output);
    if (!opt.persistence.empty()) {
        save_persistence_csv(stability, opt.persistence);
    }
    print_summary({{"reports", reports.size()},
                   {"wolf_template_jaccard", stability.mean_jaccard(ZooLabel::wolf, false)},
                   {"wolf_user_jaccard", stability.mean_jaccard(ZooLabel::wolf, true)},
                   {"goat_template_jaccard", stability.mean_jaccard(ZooLabel::goat, false)},
                   {"goat_user_jaccard", stability.mean_jaccard(ZooLabel::goat, true)},
                   {"output", opt.output}},
                  opt.format);
}

void add_format_flag(CLI::App* cmd, std::string& format) {
    cmd->add_option("--format", format, "Summary format for stdout (json or csv)")
        ->check(CLI::IsMember({"json", "csv"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"biometric menagerie analysis over synthetic iris codes"};
    app.require_subcommand(1);

    GenOptions gen;
    CLI::App* cmd_gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    cmd_gen->add_option("--classes", gen.spec.n_classes, "Number of classes (eyes)")
        ->required()
        ->check(CLI::Range(2, 1000000));
    cmd_gen->add_option("--samples", gen.spec.samples_per_class, "Templates per class")
        ->required()
        ->check(CLI::Range(2, 1000000));
    cmd_gen->add_option("--rows", gen.spec.rows, "Radial resolution")->check(CLI::PositiveNumber);
    cmd_gen->add_option("--cols", gen.spec.cols, "Angular resolution")->check(CLI::PositiveNumber);
    cmd_gen->add_option("--p", gen.spec.genuine_flip_rate, "Per-bit flip rate within a class")
        ->check(CLI::Range(0.0, 0.499999999));
    cmd_gen->add_option("--block", gen.spec.correlation_block,
                        "Correlated block length in bits; must divide rows*cols")
        ->check(CLI::PositiveNumber);
    cmd_gen->add_option("--seed", gen.spec.seed, "Generator seed");
    cmd_gen->add_option("--goat-class", gen.goat_class, "Plant a goat class (class id)");
    cmd_gen->add_option("--goat-strength", gen.goat_strength,
                        "Flip-rate multiplier for the goat class");
    cmd_gen->add_option("--wolf-pair", gen.wolf_pair, "Plant a wolf/lamb class pair (two class ids)")
        ->expected(2);
    cmd_gen->add_option("--wolf-strength", gen.wolf_strength,
                        "Fraction of prototype blocks shared by the pair");
    cmd_gen->add_option("-o,--output", gen.output, "Dataset file to write")->required();
    add_format_flag(cmd_gen, gen.format);
    cmd_gen->callback([&] { run_gen(gen); });

    MatchOptions match;
    CLI::App* cmd_match = app.add_subcommand("match", "All-to-all Hamming matching");
    cmd_match->add_option("-i,--input", match.input, "Dataset file")->required();
    cmd_match->add_option("-o,--output", match.output, "Score CSV to write")->required();
    cmd_match->add_option("--workers", match.workers, "Worker threads")
        ->check(CLI::Range(1, 4096));
    add_format_flag(cmd_match, match.format);
    cmd_match->callback([&] { run_match(match); });

    AnalyzeOptions analyze;
    CLI::App* cmd_analyze = app.add_subcommand("analyze", "FAR/FRR/EER and safety-band analysis");
    cmd_analyze->add_option("-i,--input", analyze.input, "Score CSV")->required();
    cmd_analyze->add_option("-o,--output", analyze.output, "Analysis JSON to write")->required();
    cmd_analyze->add_option("--roc", analyze.roc, "Also write a t,far,frr CSV here");
    add_format_flag(cmd_analyze, analyze.format);
    cmd_analyze->callback([&] { run_analyze(analyze); });

    MenagerieOptions menagerie;
    CLI::App* cmd_menagerie =
        app.add_subcommand("menagerie", "Detect first/last wolves, goats and lambs");
    cmd_menagerie->add_option("--dataset", menagerie.dataset, "Dataset file")->required();
    cmd_menagerie->add_option("--scores", menagerie.scores,
                              "Score CSV (computed in process when omitted)");
    cmd_menagerie->add_option("--mode", menagerie.mode, "first, last or both")
        ->check(CLI::IsMember({"first", "last", "both"}));
    cmd_menagerie->add_option("-o,--output", menagerie.output_prefix,
                              "Prefix for the report and trace files")
        ->required();
    cmd_menagerie->add_option("--calibration", menagerie.calibration,
                              "Calibration tag stored in the reports");
    cmd_menagerie->add_option("--wolf-min-fa", menagerie.params.wolf_min_fa,
                              "False accepts needed to qualify as a wolf")
        ->check(CLI::PositiveNumber);
    cmd_menagerie->add_option("--goat-min-fr", menagerie.params.goat_min_fr,
                              "False rejects needed to qualify as a goat")
        ->check(CLI::PositiveNumber);
    cmd_menagerie->add_flag("--wolf-distinct-partners,!--no-wolf-distinct-partners",
                            menagerie.params.wolf_distinct_partners,
                            "Count distinct victim classes instead of raw false accepts");
    cmd_menagerie->add_option("--workers", menagerie.workers, "Worker threads for matching")
        ->check(CLI::Range(1, 4096));
    add_format_flag(cmd_menagerie, menagerie.format);
    cmd_menagerie->callback([&] { run_menagerie(menagerie); });

    CompareOptions compare;
    CLI::App* cmd_compare =
        app.add_subcommand("compare", "Cross-calibration stability of menagerie reports");
    cmd_compare->add_option("reports", compare.reports, "Menagerie report JSON files")
        ->required()
        ->expected(2, 1000);
    cmd_compare->add_option("-o,--output", compare.output, "Stability CSV to write")->required();
    cmd_compare->add_option("--persistence", compare.persistence,
                            "Also write per-template label persistence here");
    add_format_flag(cmd_compare, compare.format);
    cmd_compare->callback([&] { run_compare(compare); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFormat;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
