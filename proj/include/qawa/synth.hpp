#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "qawa/audio.hpp"
#include "qawa/corpus.hpp"
#include "qawa/subprocess.hpp"

namespace qawa {

inline constexpr const char* kSilSymbol = "<sil>";

// Sorted distinct non-whitespace codepoints of the corpus plus the silence
// symbol.
struct GraphemeVocab {
    std::vector<std::string> symbols;
    size_t size() const { return symbols.size(); }
};

GraphemeVocab build_grapheme_vocab(const std::vector<std::string>& texts);

struct TtsEngine {
    virtual ~TtsEngine() = default;
    virtual AudioBuffer synthesize(const std::string& text) = 0;
};

// Deterministic stand-in synthesizer: each grapheme becomes an 80 ms tone at
// a vocabulary-indexed frequency (200-3600 Hz, equal log steps) with 5 ms
// raised-cosine fades inside the slot, so output duration is exactly
// 0.080 s per grapheme. Spaces and the silence symbol yield silent slots.
class ToneSynth : public TtsEngine {
public:
    static constexpr double kSlotSeconds = 0.080;
    static constexpr double kFadeSeconds = 0.005;
    static constexpr double kAmplitude = 0.3;
    static constexpr double kFreqLo = 200.0;
    static constexpr double kFreqHi = 3600.0;

    explicit ToneSynth(const GraphemeVocab& vocab);
    AudioBuffer synthesize(const std::string& text) override;

    // 0 for silence-mapped or unknown symbols
    double frequency_of(uint32_t codepoint) const;
    uint64_t unmapped_count() const { return unmapped_; }

private:
    std::map<uint32_t, double> freq_;
    uint64_t unmapped_ = 0;
};

// Adapter for a child process speaking the SYNTH/WAV/ERR line protocol. The
// produced file must already be mono 16 kHz.
class ExternalTts : public TtsEngine {
public:
    explicit ExternalTts(const std::vector<std::string>& argv, int timeout_ms = 30000);
    AudioBuffer synthesize(const std::string& text) override;

private:
    std::unique_ptr<LineProcess> proc_;
    int timeout_ms_;
    std::mutex mu_;
};

struct SynthesisResult {
    Manifest manifest;
    std::vector<std::pair<size_t, std::string>> failures;  // sentence index, message
};

// One WAV and one manifest record per sentence, ids syn-<index>; engine
// failures are recorded and the run continues.
SynthesisResult synthesize_corpus(const std::vector<std::string>& sentences,
                                  TtsEngine& engine, const std::string& out_dir,
                                  int jobs = 1);

}  // namespace qawa
