#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "qawa/delex.hpp"
#include "qawa/subprocess.hpp"

namespace qawa {

// Candidate generator over delexicalized token lists. stream identifies the
// source sentence so concurrent callers stay deterministic.
struct ParaphraseEngine {
    virtual ~ParaphraseEngine() = default;
    virtual std::vector<std::vector<std::string>> generate(
        const std::vector<std::string>& delex, size_t n, uint64_t stream) = 0;
};

struct PerturbWeights {
    double swap = 1.0;
    double drop = 1.0;
    double dup = 1.0;
};

// Built-in engine: 1-3 random edits per candidate drawn from adjacent swaps
// and drop/duplicate of non-placeholder tokens. Placeholders are never
// dropped or duplicated, so the slot multiset survives every edit.
class PerturbEngine : public ParaphraseEngine {
public:
    explicit PerturbEngine(uint64_t seed, PerturbWeights weights = {});
    std::vector<std::vector<std::string>> generate(const std::vector<std::string>& delex,
                                                   size_t n, uint64_t stream) override;

private:
    uint64_t seed_;
    PerturbWeights weights_;
};

// Adapter for a child process speaking the GEN/CAND/END line protocol.
class ExternalParaphraseEngine : public ParaphraseEngine {
public:
    explicit ExternalParaphraseEngine(const std::vector<std::string>& argv,
                                      int timeout_ms = 30000);
    std::vector<std::vector<std::string>> generate(const std::vector<std::string>& delex,
                                                   size_t n, uint64_t stream) override;

private:
    std::unique_ptr<LineProcess> proc_;
    int timeout_ms_;
    std::mutex mu_;
};

struct AugmentConfig {
    size_t candidates_per_sentence = 10;
    size_t keep_per_sentence = 1;
    uint64_t seed = 0;
    int jobs = 1;
};

// Engine output with the contract enforced: distinct candidates, none equal
// to the source, source tokens and placeholders only, source placeholders
// preserved.
std::vector<std::vector<std::string>> generate_candidates(
    const std::vector<std::string>& delex, ParaphraseEngine& engine, size_t n,
    uint64_t stream);

// Jaccard over token multisets; 1 for equal multisets, 0 for disjoint ones.
double similarity(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Ascending similarity to the source; ties by token order then generation
// index. Returns the first keep entries.
std::vector<std::vector<std::string>> rank_and_select(
    const std::vector<std::string>& delex,
    const std::vector<std::vector<std::string>>& candidates, size_t keep);

struct F1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Placeholder-label multiset agreement between a generated candidate and its
// source.
F1 slot_f1(const std::vector<std::string>& gen_delex,
           const std::vector<std::string>& src_delex);

struct AugmentResult {
    std::vector<std::vector<std::string>> sentences;  // surface token lists
    std::vector<std::vector<std::string>> delex;      // kept candidates, aligned
    std::vector<size_t> source_index;                 // aligned with sentences
    std::vector<size_t> skipped;                      // sources with no usable candidate
    F1 slots;                                         // micro-averaged
};

AugmentResult augment_corpus(const std::vector<DelexSentence>& corpus,
                             const SlotInventory& inv, const AugmentConfig& cfg,
                             ParaphraseEngine& engine);

}  // namespace qawa
