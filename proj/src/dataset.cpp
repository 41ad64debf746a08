// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "iriszoo/dataset.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "iriszoo/errors.hpp"
#include "iriszoo/rng.hpp"

namespace iriszoo {

namespace {

using ordered_json = nlohmann::ordered_json;

void validate(const CalibrationSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1) {
        throw PreconditionError("rows and cols must be positive");
    }
    const long long bits = static_cast<long long>(spec.rows) * spec.cols;
    if (bits % 8 != 0) {
        throw PreconditionError("rows*cols must be a multiple of 8");
    }
    if (spec.n_classes < 2) {
        throw PreconditionError("need at least 2 classes");
    }
    if (spec.samples_per_class < 2) {
        throw PreconditionError("need at least 2 samples per class");
    }
    if (!(spec.genuine_flip_rate >= 0.0) || spec.genuine_flip_rate >= 0.5) {
        throw PreconditionError("genuine flip rate must lie in [0, 0.5)");
    }
    if (spec.correlation_block < 1 || bits % spec.correlation_block != 0) {
        throw PreconditionError("correlation block must divide rows*cols");
    }
    for (const AnomalySpec& a : spec.anomalies) {
        if (a.strength <= 0.0) {
            throw PreconditionError("anomaly strength must be positive");
        }
        switch (a.kind) {
        case AnomalyKind::goat_class:
            if (a.targets.size() != 1) {
                throw PreconditionError("goat_class anomaly takes exactly one target class");
            }
            if (spec.genuine_flip_rate * a.strength >= 0.5) {
                throw PreconditionError("goat_class anomaly pushes the flip rate to 0.5 or above");
            }
            break;
        case AnomalyKind::wolf_lamb_pair:
            if (a.targets.size() != 2 || a.targets[0] == a.targets[1]) {
                throw PreconditionError("wolf_lamb_pair anomaly takes two distinct target classes");
            }
            if (a.strength > 1.0) {
                throw PreconditionError("wolf_lamb_pair strength must lie in (0, 1]");
            }
            break;
        }
        for (int t : a.targets) {
            if (t < 0 || t >= spec.n_classes) {
                throw PreconditionError("anomaly target class does not exist");
            }
        }
    }
}

const char* kind_name(AnomalyKind kind) {
    return kind == AnomalyKind::goat_class ? "goat_class" : "wolf_lamb_pair";
}

AnomalyKind kind_from_name(const std::string& name) {
    if (name == "goat_class") return AnomalyKind::goat_class;
    if (name == "wolf_lamb_pair") return AnomalyKind::wolf_lamb_pair;
    throw FormatError("unknown anomaly kind: " + name);
}

ordered_json spec_to_json(const CalibrationSpec& spec) {
    ordered_json anomalies = ordered_json::array();
    for (const AnomalySpec& a : spec.anomalies) {
        anomalies.push_back({{"kind", kind_name(a.kind)},
                             {"targets", a.targets},
                             {"strength", a.strength}});
    }
    return ordered_json{{"rows", spec.rows},
                        {"cols", spec.cols},
                        {"n_classes", spec.n_classes},
                        {"samples_per_class", spec.samples_per_class},
                        {"p", spec.genuine_flip_rate},
                        {"L", spec.correlation_block},
                        {"seed", spec.seed},
                        {"anomalies", anomalies}};
}

CalibrationSpec spec_from_json(const ordered_json& j) {
    CalibrationSpec spec;
    spec.rows = j.at("rows").get<int>();
    spec.cols = j.at("cols").get<int>();
    spec.n_classes = j.at("n_classes").get<int>();
    spec.samples_per_class = j.at("samples_per_class").get<int>();
    spec.genuine_flip_rate = j.at("p").get<double>();
    spec.correlation_block = j.at("L").get<int>();
    spec.seed = j.at("seed").get<uint64_t>();
    for (const auto& a : j.at("anomalies")) {
        AnomalySpec anomaly;
        anomaly.kind = kind_from_name(a.at("kind").get<std::string>());
        anomaly.targets = a.at("targets").get<std::vector<int>>();
        anomaly.strength = a.at("strength").get<double>();
        spec.anomalies.push_back(std::move(anomaly));
    }
    return spec;
}

} // namespace

std::string CalibrationSpec::label() const {
    std::ostringstream out;
    out << rows << 'x' << cols << "-p" << genuine_flip_rate << "-L" << correlation_block
        << "-s" << seed;
    return out.str();
}

Dataset generate_dataset(const CalibrationSpec& spec) {
    validate(spec);

    const int n_bits = spec.rows * spec.cols;
    const int block = spec.correlation_block;
    const int n_blocks = n_bits / block;
    SplitMix64 rng(spec.seed);

    // Prototypes: one fair coin per block, replicated over the block.
    std::vector<IrisCode> prototypes;
    prototypes.reserve(static_cast<size_t>(spec.n_classes));
    for (int c = 0; c < spec.n_classes; ++c) {
        IrisCode proto(spec.rows, spec.cols);
        for (int b = 0; b < n_blocks; ++b) {
            if (rng.next_bool()) {
                for (int k = b * block; k < (b + 1) * block; ++k) {
                    proto.set_bit(k, true);
                }
            }
        }
        prototypes.push_back(std::move(proto));
    }

    // Anomalies act before sampling: wolf_lamb_pair entangles two
    // prototypes by copying a leading fraction of blocks, goat_class
    // scales the class flip rate.
    std::vector<double> flip_rate(static_cast<size_t>(spec.n_classes),
                                  spec.genuine_flip_rate);
    for (const AnomalySpec& a : spec.anomalies) {
        if (a.kind == AnomalyKind::wolf_lamb_pair) {
            const IrisCode& src = prototypes[static_cast<size_t>(a.targets[0])];
            IrisCode& dst = prototypes[static_cast<size_t>(a.targets[1])];
            const int shared = static_cast<int>(std::llround(a.strength * n_blocks));
            for (int k = 0; k < shared * block && k < n_bits; ++k) {
                dst.set_bit(k, src.bit(k));
            }
        } else {
            flip_rate[static_cast<size_t>(a.targets[0])] *= a.strength;
        }
    }

    Dataset ds;
    ds.spec = spec;
    ds.records.reserve(static_cast<size_t>(spec.n_classes) * spec.samples_per_class);
    int template_id = 0;
    for (int c = 0; c < spec.n_classes; ++c) {
        const double p = flip_rate[static_cast<size_t>(c)];
        for (int s = 0; s < spec.samples_per_class; ++s) {
            IrisCode code = prototypes[static_cast<size_t>(c)];
            for (int k = 0; k < n_bits; ++k) {
                if (rng.bernoulli(p)) {
                    code.flip_bit(k);
                }
            }
            ds.records.push_back({template_id++, c, c / 2, std::move(code)});
        }
    }
    return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    // Records are grouped by class in template_id order; emit classes in
    // the order they first appear.
    ordered_json classes = ordered_json::array();
    for (size_t start = 0; start < ds.records.size();) {
        const int class_id = ds.records[start].class_id;
        ordered_json templates = ordered_json::array();
        size_t end = start;
        while (end < ds.records.size() && ds.records[end].class_id == class_id) {
            templates.push_back(ds.records[end].code.to_hex());
            ++end;
        }
        classes.push_back({{"class_id", class_id},
                           {"user_id", ds.records[start].user_id},
                           {"templates", templates}});
        start = end;
    }
    ordered_json doc{{"version", 1},
                     {"rows", ds.spec.rows},
                     {"cols", ds.spec.cols},
                     {"spec", spec_to_json(ds.spec)},
                     {"classes", classes}};

    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad dataset JSON: ") + e.what());
    }

    Dataset ds;
    try {
        if (doc.at("version").get<int>() != 1) {
            throw FormatError("unsupported dataset version");
        }
        ds.spec = spec_from_json(doc.at("spec"));
        if (doc.at("rows").get<int>() != ds.spec.rows ||
            doc.at("cols").get<int>() != ds.spec.cols) {
            throw FormatError("dataset dimensions disagree with the spec block");
        }
        const auto& classes = doc.at("classes");
        if (static_cast<int>(classes.size()) != ds.spec.n_classes) {
            throw FormatError("class count disagrees with the spec block");
        }

        std::set<int> seen_classes;
        std::unordered_map<int, std::set<int>> classes_of_user;
        int template_id = 0;
        for (const auto& cls : classes) {
            const int class_id = cls.at("class_id").get<int>();
            const int user_id = cls.at("user_id").get<int>();
            if (!seen_classes.insert(class_id).second) {
                throw FormatError("duplicate class_id in dataset");
            }
            classes_of_user[user_id].insert(class_id);
            if (classes_of_user[user_id].size() > 2) {
                throw FormatError("a user may own at most two classes");
            }
            const auto& templates = cls.at("templates");
            if (static_cast<int>(templates.size()) != ds.spec.samples_per_class) {
                throw FormatError("template count disagrees with samples_per_class");
            }
            for (const auto& hex : templates) {
                IrisCode code = IrisCode::from_hex(ds.spec.rows, ds.spec.cols,
                                                   hex.get<std::string>());
                ds.records.push_back({template_id++, class_id, user_id, std::move(code)});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad dataset JSON: ") + e.what());
    }
    return ds;
}

} // namespace iriszoo
