#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qawa {

enum class Dialect { Chanka, Collao, Unknown };
enum class Gender { F, M, Unknown };

std::string to_string(Dialect d);
std::string to_string(Gender g);
Dialect parse_dialect(const std::string& s);
Gender parse_gender(const std::string& s);

// One transcribed audio segment, the pipeline's unit of work.
struct Utterance {
    std::string id;
    std::string audio_ref;
    std::string transcript;
    std::string speaker_id;
    Dialect dialect = Dialect::Unknown;
    Gender gender = Gender::Unknown;
    double duration_s = 0.0;
    // Unknown manifest fields, preserved verbatim on round-trip
    // (key, raw JSON value) in file order.
    std::vector<std::pair<std::string, std::string>> extra;
};

enum class Split { Train, Dev, Test, Unsplit };

struct Manifest {
    std::vector<Utterance> utterances;
    Split split = Split::Unsplit;

    size_t size() const { return utterances.size(); }
    double total_hours() const;
};

// Manifest file: UTF-8, one flat JSON object per line with fields
// id, audio, text, speaker, dialect, gender, duration_s.
Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

// Resolve an utterance's audio path relative to the manifest's directory.
std::string resolve_audio_path(const std::string& manifest_path,
                               const std::string& audio_ref);

// Data-driven text normalization: case folding, apostrophe
// canonicalization and punctuation stripping, then ordered literal
// replacements, then whitespace collapse.
struct NormalizationRules {
    std::vector<std::pair<std::string, std::string>> replacements;
    bool lowercase = true;
    std::vector<uint32_t> strip_punct;  // codepoints removed outright
    uint32_t canonical_apostrophe = '\'';

    static NormalizationRules defaults();
};

// Rules file: `pattern<TAB>replacement` lines, `#` comments, and directive
// lines `lowercase=`, `apostrophe=`, `strip_punct=`.
NormalizationRules load_rules(const std::string& path);

std::string normalize_text(const std::string& raw,
                           const NormalizationRules& rules);

struct SplitFractions {
    double train = 0.8;
    double dev = 0.1;
    double test = 0.1;
};

struct CorpusSplit {
    Manifest train;
    Manifest dev;
    Manifest test;
};

// Utterance-level split: dev and test sizes are the rounded fractions,
// train absorbs the remainder. Deterministic for a fixed seed; each output
// keeps the input's relative order.
CorpusSplit split_corpus(const Manifest& m, const SplitFractions& f,
                         uint64_t seed);

// Speaker-disjoint variant: whole speakers are assigned greedily to the
// split with the largest remaining utterance quota.
CorpusSplit split_corpus_by_speaker(const Manifest& m,
                                    const SplitFractions& f, uint64_t seed);

struct StatsCell {
    size_t speakers = 0;
    double hours = 0.0;
};

// (dialect x gender) table of speaker counts and hours, plus totals.
struct CorpusStats {
    // indexed [dialect][gender] with enum order Chanka, Collao, Unknown / F, M, Unknown
    std::array<std::array<StatsCell, 3>, 3> cells{};
    StatsCell total;
};

CorpusStats corpus_stats(const Manifest& m);
std::string render_stats(const CorpusStats& s);

}  // namespace qawa
