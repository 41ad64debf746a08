// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "iriszoo/score_matrix.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

#include "iriszoo/errors.hpp"

namespace iriszoo {

namespace {

// Flat slot of pair (i, j), i < j, in lexicographic order.
size_t pair_index(size_t i, size_t j, size_t n) {
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

void fill_rows(const Dataset& ds, ScoreMatrix& m, int row_begin, int row_end) {
    const size_t n = ds.records.size();
    for (int i = row_begin; i < row_end; ++i) {
        const TemplateRecord& a = ds.records[static_cast<size_t>(i)];
        size_t slot = pair_index(static_cast<size_t>(i), static_cast<size_t>(i) + 1, n);
        for (size_t j = static_cast<size_t>(i) + 1; j < n; ++j, ++slot) {
            const TemplateRecord& b = ds.records[j];
            m.comparisons[slot] = {
                i,
                static_cast<int>(j),
                hamming_distance(a.code, b.code),
                m.n_bits,
                a.class_id == b.class_id ? Label::genuine : Label::imposter,
            };
        }
    }
}

int parse_int(std::string_view field, const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw FormatError(std::string("bad integer in score CSV: ") + what);
    }
    return value;
}

} // namespace

ScoreMatrix compute_score_matrix(const Dataset& ds, int workers) {
    if (ds.records.empty()) {
        throw PreconditionError("dataset has no templates");
    }
    const int rows = ds.records.front().code.rows();
    const int cols = ds.records.front().code.cols();
    for (const TemplateRecord& rec : ds.records) {
        if (rec.code.rows() != rows || rec.code.cols() != cols) {
            throw PreconditionError("dataset mixes template dimensions");
        }
    }

    const size_t n = ds.records.size();
    ScoreMatrix m;
    m.n_templates = static_cast<int>(n);
    m.n_bits = rows * cols;
    m.comparisons.resize(n * (n - 1) / 2);

    workers = std::clamp(workers, 1, static_cast<int>(n));
    if (workers == 1 || n < 2) {
        fill_rows(ds, m, 0, static_cast<int>(n));
        return m;
    }

    // Split the triangle into contiguous row ranges with roughly equal
    // pair counts. Slots are disjoint, so no synchronization is needed and
    // the merged result is independent of the split.
    const size_t total = m.comparisons.size();
    std::vector<int> cuts{0};
    size_t covered = 0;
    for (int w = 1; w < workers; ++w) {
        const size_t want = total * static_cast<size_t>(w) / static_cast<size_t>(workers);
        int i = cuts.back();
        while (covered < want && i < static_cast<int>(n)) {
            covered += n - 1 - static_cast<size_t>(i);
            ++i;
        }
        cuts.push_back(i);
    }
    cuts.push_back(static_cast<int>(n));

    std::vector<std::thread> pool;
    for (size_t w = 0; w + 1 < cuts.size(); ++w) {
        if (cuts[w] < cuts[w + 1]) {
            pool.emplace_back(fill_rows, std::cref(ds), std::ref(m), cuts[w], cuts[w + 1]);
        }
    }
    for (std::thread& t : pool) {
        t.join();
    }
    return m;
}

std::string scores_to_csv(const ScoreMatrix& m) {
    std::string out = "i,j,hd_count,n_bits,label\n";
    out.reserve(out.size() + m.comparisons.size() * 24);
    char buf[32];
    for (const Comparison& c : m.comparisons) {
        auto append_int = [&](int v, char sep) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            (void)ec;
            out.append(buf, ptr);
            out.push_back(sep);
        };
        append_int(c.i, ',');
        append_int(c.j, ',');
        append_int(c.hd_count, ',');
        append_int(c.n_bits, ',');
        out += c.label == Label::genuine ? "genuine\n" : "imposter\n";
    }
    return out;
}

void save_scores_csv(const ScoreMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    const std::string csv = scores_to_csv(m);
    out.write(csv.data(), static_cast<std::streamsize>(csv.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

ScoreMatrix load_scores_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != "i,j,hd_count,n_bits,label") {
        throw FormatError("score CSV is missing the expected header");
    }

    ScoreMatrix m;
    int max_id = -1;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::string_view view = line;
        std::array<std::string_view, 5> fields;
        for (size_t f = 0; f < fields.size(); ++f) {
            const size_t comma = view.find(',');
            if ((comma == std::string_view::npos) != (f == fields.size() - 1)) {
                throw FormatError("score CSV row has the wrong number of fields");
            }
            fields[f] = view.substr(0, comma);
            view = comma == std::string_view::npos ? std::string_view{} : view.substr(comma + 1);
        }
        Comparison c;
        c.i = parse_int(fields[0], "i");
        c.j = parse_int(fields[1], "j");
        c.hd_count = parse_int(fields[2], "hd_count");
        c.n_bits = parse_int(fields[3], "n_bits");
        if (fields[4] == "genuine") {
            c.label = Label::genuine;
        } else if (fields[4] == "imposter") {
            c.label = Label::imposter;
        } else {
            throw FormatError("score CSV label must be genuine or imposter");
        }
        if (c.i < 0 || c.j <= c.i || c.hd_count < 0 || c.n_bits <= 0 || c.hd_count > c.n_bits) {
            throw FormatError("score CSV row violates comparison invariants");
        }
        if (m.n_bits == 0) {
            m.n_bits = c.n_bits;
        } else if (c.n_bits != m.n_bits) {
            throw FormatError("score CSV mixes bit counts");
        }
        if (!m.comparisons.empty()) {
            const Comparison& prev = m.comparisons.back();
            if (std::pair(prev.i, prev.j) >= std::pair(c.i, c.j)) {
                throw FormatError("score CSV rows are not in canonical (i,j) order");
            }
        }
        max_id = std::max(max_id, c.j);
        m.comparisons.push_back(c);
    }
    if (m.comparisons.empty()) {
        throw FormatError("score CSV holds no comparisons");
    }
    m.n_templates = max_id + 1;
    const size_t expect = static_cast<size_t>(m.n_templates) *
                          (static_cast<size_t>(m.n_templates) - 1) / 2;
    if (m.comparisons.size() != expect) {
        throw FormatError("score CSV is not a complete all-to-all matrix");
    }
    return m;
}

} // namespace iriszoo
