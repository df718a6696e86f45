#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qawa/morpho.hpp"
#include "qawa/rng.hpp"

namespace qawa {

// Lemma-keyed frame labels with a bilingual pivot fallback. Labels form a
// closed set declared in the lexicon file header.
struct FrameLexicon {
    std::vector<std::string> labels;
    std::map<std::string, std::string> native;        // lemma or surface -> label
    std::map<std::string, std::string> pivot_dict;    // lemma -> pivot lemma
    std::map<std::string, std::string> pivot_frames;  // pivot lemma -> label

    bool has_label(const std::string& label) const;
};

FrameLexicon load_frame_lexicon(const std::string& path);
void load_pivot(FrameLexicon& lex, const std::string& dict_path, const std::string& frames_path);

enum class TagSource { None, NativeLemma, NativeSurface, PivotLemma, PivotSurface };
const char* to_string(TagSource s);

struct TaggedToken {
    std::string token;
    std::string label;  // empty when untagged
    TagSource source = TagSource::None;
};

// Lookup chain per token: native[lemma], native[surface], pivot via lemma,
// pivot via surface. The source field records which step fired.
std::vector<TaggedToken> tag_frames(const std::vector<std::string>& tokens,
                                    const std::vector<Analysis>& analyses,
                                    const FrameLexicon& lex);

std::vector<std::string> select_frequent_frames(
    const std::vector<std::vector<TaggedToken>>& corpus, size_t top_k);

// Maximal runs of one selected label become B-label, I-label...; everything
// else is O.
std::vector<std::string> bio_encode(const std::vector<TaggedToken>& tagged,
                                    const std::vector<std::string>& selected);

bool bio_valid(const std::vector<std::string>& tags);

std::string placeholder(const std::string& label);
std::optional<std::string> placeholder_label(const std::string& token);

struct DelexSentence {
    std::vector<std::string> original_tokens;
    std::vector<std::string> tags;
    std::vector<std::string> delex_tokens;
};

// Multisets of span surfaces per label, the pool relexicalization draws from.
struct SlotInventory {
    std::map<std::string, std::vector<std::string>> surfaces;

    void add(const std::string& label, const std::string& surface);
    void finalize();  // sort each multiset so draws are order-independent
    size_t total() const;
};

// Collapses each tagged span to one <label> token and records the span
// surface in the inventory (when one is given).
DelexSentence delexicalize(const std::vector<std::string>& tokens,
                           const std::vector<std::string>& tags,
                           SlotInventory* inv = nullptr);

// Each placeholder is replaced by a seeded uniform draw from its label's
// multiset; multi-word surfaces expand to multiple tokens.
std::vector<std::string> relexicalize(const std::vector<std::string>& delex_tokens,
                                      const SlotInventory& inv, Rng& rng);

// Positional refill: placeholders consume the given span surfaces in order.
std::vector<std::string> refill(const std::vector<std::string>& delex_tokens,
                                const std::vector<std::string>& spans);

void write_delex_corpus(const std::vector<DelexSentence>& corpus, const std::string& path);
std::vector<DelexSentence> read_delex_corpus(const std::string& path);
void write_inventory(const SlotInventory& inv, const std::string& path);

}  // namespace qawa
