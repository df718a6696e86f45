#include "qawa/synth.hpp"

#include <cmath>
#include <filesystem>
#include <set>

#include "qawa/error.hpp"
#include "qawa/log.hpp"
#include "qawa/parallel.hpp"
#include "qawa/utf8.hpp"

namespace qawa {

GraphemeVocab build_grapheme_vocab(const std::vector<std::string>& texts) {
    std::set<uint32_t> cps;
    for (const auto& t : texts)
        for (uint32_t cp : utf8::decode(t))
            if (!utf8::is_space(cp)) cps.insert(cp);
    GraphemeVocab v;
    for (uint32_t cp : cps) {
        std::string s;
        utf8::append(s, cp);
        v.symbols.push_back(std::move(s));
    }
    v.symbols.emplace_back(kSilSymbol);
    return v;
}

ToneSynth::ToneSynth(const GraphemeVocab& vocab) {
    if (vocab.symbols.empty()) throw ValidationError("empty grapheme vocabulary");
    const size_t n = vocab.symbols.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& sym = vocab.symbols[i];
        if (sym == kSilSymbol) continue;
        const auto cps = utf8::decode(sym);
        if (cps.size() != 1) continue;
        const double frac = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        freq_[cps[0]] = kFreqLo * std::pow(kFreqHi / kFreqLo, frac);
    }
}

double ToneSynth::frequency_of(uint32_t codepoint) const {
    const auto it = freq_.find(codepoint);
    return it == freq_.end() ? 0.0 : it->second;
}

AudioBuffer ToneSynth::synthesize(const std::string& text) {
    const auto cps = utf8::decode(text);
    const auto slot = static_cast<size_t>(std::llround(kSlotSeconds * kCanonicalRate));
    const auto fade = static_cast<size_t>(std::llround(kFadeSeconds * kCanonicalRate));

    AudioBuffer b;
    b.sample_rate = kCanonicalRate;
    b.channels = 1;
    b.samples.assign(cps.size() * slot, 0.0f);

    for (size_t g = 0; g < cps.size(); ++g) {
        const uint32_t cp = cps[g];
        if (utf8::is_space(cp)) continue;
        const auto it = freq_.find(cp);
        if (it == freq_.end()) {
            ++unmapped_;
            log::debug("no tone mapping for codepoint U+", std::hex, cp, std::dec,
                       "; emitting silence");
            continue;
        }
        const double f = it->second;
        const double w = 2.0 * M_PI * f / kCanonicalRate;
        for (size_t s = 0; s < slot; ++s) {
            double env = 1.0;
            if (s < fade)
                env = 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(s) /
                                            static_cast<double>(fade)));
            else if (s >= slot - fade)
                env = 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(slot - s) /
                                            static_cast<double>(fade)));
            b.samples[g * slot + s] = static_cast<float>(
                kAmplitude * env * std::sin(w * static_cast<double>(s)));
        }
    }
    return b;
}

ExternalTts::ExternalTts(const std::vector<std::string>& argv, int timeout_ms)
    : proc_(std::make_unique<LineProcess>(argv)), timeout_ms_(timeout_ms) {}

AudioBuffer ExternalTts::synthesize(const std::string& text) {
    std::lock_guard<std::mutex> lock(mu_);
    proc_->write_line("SYNTH\t" + text);
    const std::string line = proc_->read_line(timeout_ms_);
    if (line.rfind("ERR ", 0) == 0) throw EngineError("tts engine: " + line.substr(4));
    if (line.rfind("WAV ", 0) != 0)
        throw EngineError("tts engine sent unexpected line: " + line);
    AudioBuffer b = decode_wav(line.substr(4));
    if (b.channels != 1 || b.sample_rate != kCanonicalRate)
        throw EngineError("tts engine produced " + std::to_string(b.channels) + "ch/" +
                          std::to_string(b.sample_rate) + " Hz audio; mono 16 kHz required");
    return b;
}

SynthesisResult synthesize_corpus(const std::vector<std::string>& sentences,
                                  TtsEngine& engine, const std::string& out_dir,
                                  int jobs) {
    std::filesystem::create_directories(out_dir);
    struct Slot {
        AudioBuffer buffer;
        std::string error;
        bool ok = false;
    };
    std::vector<Slot> slots(sentences.size());
    parallel_for(sentences.size(), jobs, [&](size_t i) {
        if (sentences[i].empty()) {
            slots[i].error = "empty sentence";
            return;
        }
        try {
            slots[i].buffer = engine.synthesize(sentences[i]);
            if (slots[i].buffer.frames() == 0) {
                slots[i].error = "engine produced no audio";
                return;
            }
            slots[i].ok = true;
        } catch (const Error& e) {
            slots[i].error = e.what();
        }
    });

    SynthesisResult r;
    r.manifest.split = Split::Unsplit;
    for (size_t i = 0; i < sentences.size(); ++i) {
        if (!slots[i].ok) {
            r.failures.emplace_back(i, slots[i].error);
            log::warn("synthesis of sentence ", i, " failed: ", slots[i].error);
            continue;
        }
        const std::string id = "syn-" + std::to_string(i);
        const std::string wav = id + ".wav";
        encode_wav(slots[i].buffer, out_dir + "/" + wav);
        Utterance u;
        u.id = id;
        u.audio_ref = wav;
        u.transcript = sentences[i];
        u.speaker_id = "synth";
        u.dialect = Dialect::Unknown;
        u.gender = Gender::Unknown;
        u.duration_s = slots[i].buffer.duration_s();
        r.manifest.utterances.push_back(std::move(u));
    }
    return r;
}

}  // namespace qawa
