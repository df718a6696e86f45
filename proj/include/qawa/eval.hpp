#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qawa/morpho.hpp"

namespace qawa {

struct EditAlignment {
    uint64_t hits = 0;
    uint64_t subs = 0;
    uint64_t dels = 0;
    uint64_t ins = 0;
    std::vector<char> ops;  // 'M', 'S', 'D', 'I' in reference order

    uint64_t errors() const { return subs + dels + ins; }
};

// Minimal unit-cost alignment; backtrace prefers match, then substitution,
// deletion, insertion, so the op sequence is reproducible.
EditAlignment align(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

double wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

// wer over morphological subwords of both sides.
double ter(const std::vector<std::string>& ref, const std::vector<std::string>& hyp,
           const SuffixTable& table);

// id -> text records, one JSON object per line.
std::map<std::string, std::string> load_hypotheses(const std::string& path);

struct ConditionInput {
    std::string name;
    std::string hours;
    std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> pairs;
    double ppl = 0.0;
    bool has_ppl = false;
};

struct ConditionRow {
    std::string name;
    std::string hours;
    double wer = 0.0;
    double ter = 0.0;
    bool has_ter = false;
    double ppl = 0.0;
    bool has_ppl = false;
    double delta_points = 0.0;    // WER percentage points vs the first row
    double delta_relative = 0.0;  // fraction of the first row's WER
};

struct ConditionReport {
    std::vector<ConditionRow> rows;
    std::string render() const;      // aligned text table
    std::string to_records() const;  // one JSON object per line
};

// Micro-averaged corpus WER (and TER when a suffix table is given) per
// condition; deltas are against the first condition.
ConditionReport report(const std::vector<ConditionInput>& conditions,
                       const SuffixTable* table);

}  // namespace qawa
