#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qawa {

inline constexpr const char* kBos = "<s>";
inline constexpr const char* kEos = "</s>";
inline constexpr const char* kUnk = "<unk>";

struct LmConfig {
    int order = 4;
    double pruning_k = 0.04;
    uint64_t seed = 0;
};

// Raw window counts over boundary-padded sentences, one table per order, plus
// left-context type counts (how many distinct tokens precede each n-gram).
// Keys are space-joined token sequences.
struct NGramCounts {
    int order = 0;
    std::vector<std::map<std::string, uint64_t>> raw;   // raw[k-1]: k-gram -> count
    std::vector<std::map<std::string, uint64_t>> cont;  // cont[k-1]: k-gram -> N1+(. g)
    uint64_t sentences = 0;
};

// Replace single occurrences of a seeded fraction of hapax word types with
// the unk symbol. Texts are whitespace-tokenized sentences.
std::vector<std::string> apply_singleton_pruning(const std::vector<std::string>& texts,
                                                 const LmConfig& cfg);

NGramCounts count_ngrams(const std::vector<std::string>& texts, int order);

// Backoff n-gram model in log10. Entries at orders below the top carry the
// backoff weight applied when the entry is used as a context prefix.
struct KNModel {
    struct Entry {
        double logp = 0.0;
        double logbow = 0.0;
    };
    int order = 0;
    std::vector<std::string> vocab;  // sorted; includes <s>, </s>, <unk>
    std::vector<std::map<std::string, Entry>> tables;

    // Conditional probability with backoff; context longer than order-1 is
    // truncated from the left. Tokens must already be vocab-mapped.
    double prob(const std::vector<std::string>& context, const std::string& word) const;
    bool in_vocab(const std::string& word) const;
};

KNModel estimate_modified_kn(const NGramCounts& counts, const LmConfig& cfg);

struct PerplexityResult {
    double perplexity = 0.0;
    uint64_t tokens = 0;  // scored events, sentence ends included
    uint64_t oov = 0;     // tokens scored as unk
    double log10_sum = 0.0;
};

PerplexityResult perplexity(const KNModel& model, const std::vector<std::string>& texts);

void export_arpa(const KNModel& model, const std::string& path);
KNModel import_arpa(const std::string& path);

}  // namespace qawa
