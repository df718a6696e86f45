#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qawa/config.hpp"

namespace qawa {

// Stage drivers behind the command-line subcommands. Each one reads its
// inputs from the config (dotted keys, see README) and writes its outputs
// under <out>/<stage>/.

struct PreprocessSummary {
    size_t input = 0;
    size_t kept = 0;      // utterances surviving all gates
    size_t segments = 0;  // records written (>= kept)
    size_t dropped_decode = 0;
    size_t dropped_empty = 0;
    size_t dropped_unvoiced = 0;
    std::string manifest_path;
};

struct AugmentSummary {
    size_t sources = 0;
    size_t generated = 0;
    size_t skipped = 0;
    size_t synth_failures = 0;
    double slot_precision = 0.0;
    double slot_recall = 0.0;
    double slot_f1 = 0.0;
    std::string text_path;
    std::string manifest_path;
    std::string delex_path;
    std::string inventory_path;
};

struct ConditionSummary {
    std::string condition;
    size_t records = 0;
    double hours = 0.0;
    std::string manifest_path;
    std::string arpa_path;
};

struct LmSummary {
    size_t sentences = 0;
    size_t vocab = 0;
    std::string arpa_path;
    double eval_ppl = 0.0;
    bool has_eval_ppl = false;
    uint64_t eval_oov = 0;
};

struct EvalSummary {
    size_t rows = 0;
    std::string table;  // rendered text, also written to report.txt
    std::string report_txt_path;
    std::string report_jsonl_path;
};

struct PipelineSummary {
    PreprocessSummary preprocess;
    AugmentSummary augment;
    ConditionSummary condition;
    EvalSummary eval;
};

// Decode, downmix, resample, normalize transcripts, gate on voiced ratio,
// segment long recordings. Requires corpus.manifest.
PreprocessSummary run_preprocess(const Config& cfg);

// Delexicalize, paraphrase, relexicalize, synthesize audio. Consumes the
// preprocess manifest unless augment.manifest overrides it.
AugmentSummary run_augment(const Config& cfg);

// Assemble one training condition (original, distorted, more_data,
// synthetic) and fit its language model.
ConditionSummary run_condition(const Config& cfg, const std::string& condition);

// Standalone language-model fit over a manifest or a plain text file.
LmSummary run_lm(const Config& cfg);

// Score hypothesis files per condition against the test references.
EvalSummary run_eval(const Config& cfg);

// Rendered corpus statistics table for corpus.manifest.
std::string run_stats(const Config& cfg);

// preprocess -> augment -> condition(synthetic) -> eval.
PipelineSummary run_pipeline(const Config& cfg);

}  // namespace qawa
