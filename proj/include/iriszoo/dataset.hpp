// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "iriszoo/iris_code.hpp"

namespace iriszoo {

enum class AnomalyKind { goat_class, wolf_lamb_pair };

/// Deliberately degraded or entangled classes, planted so that tests can
/// assert the detectors actually find them.
///
/// goat_class: one target class; strength multiplies its sample flip rate,
/// so strength 3 means the class re-samples three times as noisily as the
/// rest (the effective rate must stay below 0.5).
///
/// wolf_lamb_pair: two target classes; strength in (0, 1] is the fraction
/// of prototype blocks of the first class copied into the second before
/// sampling, which drags their cross-class scores up into the imposter tail.
struct AnomalySpec {
    AnomalyKind kind = AnomalyKind::goat_class;
    std::vector<int> targets;
    double strength = 1.0;

    friend bool operator==(const AnomalySpec&, const AnomalySpec&) = default;
};

/// Everything that determines a synthetic dataset. Equal specs generate
/// byte-identical datasets.
struct CalibrationSpec {
    int rows = 16;
    int cols = 256;
    int n_classes = 2;           // one class per physical eye
    int samples_per_class = 2;
    double genuine_flip_rate = 0.1;  // p, per-bit noise within a class, [0, 0.5)
    int correlation_block = 1;       // L, bits per correlated block, divides rows*cols
    uint64_t seed = 1;
    std::vector<AnomalySpec> anomalies;

    /// Short human tag, e.g. "16x256-p0.1-L1-s1". Used to label reports.
    std::string label() const;

    friend bool operator==(const CalibrationSpec&, const CalibrationSpec&) = default;
};

struct TemplateRecord {
    int template_id = 0;  // contiguous from 0
    int class_id = 0;     // one physical eye
    int user_id = 0;      // eyes 2u and 2u+1 belong to user u
    IrisCode code;

    friend bool operator==(const TemplateRecord&, const TemplateRecord&) = default;
};

struct Dataset {
    CalibrationSpec spec;
    std::vector<TemplateRecord> records;

    int n_templates() const { return static_cast<int>(records.size()); }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Draws one prototype per class as independent fair-coin blocks of
/// correlation_block consecutive bits, then each sample as the prototype
/// with every bit independently flipped at the class flip rate. Anomalies
/// adjust prototypes (wolf_lamb_pair) and per-class rates (goat_class)
/// before sampling. The whole draw is a single SplitMix64 stream, so the
/// result is a pure function of the spec.
Dataset generate_dataset(const CalibrationSpec& spec);

/// JSON on disk:
///   {"version":1,"rows":R,"cols":C,"spec":{...},
///    "classes":[{"class_id":n,"user_id":m,"templates":["<hex>",...]},...]}
/// Hex payloads are lowercase, rows*cols/4 characters each. Saving a loaded
/// dataset reproduces the file byte for byte.
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

} // namespace iriszoo
