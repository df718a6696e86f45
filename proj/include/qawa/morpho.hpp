#pragma once

#include <string>
#include <vector>

namespace qawa {

// Suffix inventory for greedy right-to-left stripping. Entries may carry a
// dialect tag (informational only; stripping uses all entries).
struct SuffixTable {
    struct Entry {
        std::string surface;
        std::string dialect;
    };
    std::vector<Entry> entries;
    size_t min_stem_len = 3;  // codepoints

    void add(const std::string& surface, const std::string& dialect = "");
    bool has(const std::string& surface) const;
};

SuffixTable load_suffix_table(const std::string& path);

struct Analysis {
    std::string token;
    std::string lemma;
    std::vector<std::string> suffixes;  // innermost first, so lemma + suffixes rejoins token
};

// Whitespace tokenization that keeps word-internal apostrophes. With
// drop_punct, punctuation runs vanish; otherwise they come out as their own
// tokens.
std::vector<std::string> tokenize(const std::string& text, bool drop_punct = true);

// Greedy longest-suffix stripping while the remaining stem keeps at least
// min_stem_len codepoints.
Analysis analyze(const std::string& token, const SuffixTable& table);

// Each token becomes its lemma followed by its suffixes as separate tokens.
std::vector<std::string> segment_to_subwords(const std::vector<std::string>& tokens,
                                             const SuffixTable& table);

}  // namespace qawa
