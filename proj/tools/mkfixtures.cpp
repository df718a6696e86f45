// Generates the test fixtures: toy corpus audio + manifest, a VAD fixture,
// per-condition hypothesis files and a ready-to-use config.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qawa/audio.hpp"
#include "qawa/corpus.hpp"
#include "qawa/error.hpp"
#include "qawa/morpho.hpp"
#include "qawa/rng.hpp"
#include "qawa/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace qawa;

namespace {

struct Row {
    std::string id, speaker, dialect, gender, text;
};

std::vector<Row> load_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::vector<Row> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> parts;
        size_t start = 0;
        for (size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == '\t') {
                parts.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (parts.size() != 5)
            throw DataError("fixture_sentences: expected 5 columns, got " +
                            std::to_string(parts.size()));
        rows.push_back({parts[0], parts[1], parts[2], parts[3], parts[4]});
    }
    return rows;
}

// Tile a sentence with half-second gaps to exactly target_s seconds.
AudioBuffer tile_to(const AudioBuffer& unit, double target_s) {
    const size_t gap = static_cast<size_t>(0.5 * kCanonicalRate);
    const size_t target = static_cast<size_t>(target_s * kCanonicalRate);
    AudioBuffer out;
    out.sample_rate = kCanonicalRate;
    out.channels = 1;
    out.samples.reserve(target);
    while (out.samples.size() < target) {
        for (double s : unit.samples) {
            if (out.samples.size() >= target) break;
            out.samples.push_back(s);
        }
        for (size_t i = 0; i < gap && out.samples.size() < target; ++i)
            out.samples.push_back(0.0);
    }
    return out;
}

std::string join(const std::vector<std::string>& toks) {
    std::string s;
    for (size_t i = 0; i < toks.size(); ++i) {
        if (i) s += ' ';
        s += toks[i];
    }
    return s;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: mkfixtures DATA_DIR OUT_DIR\n";
        return 1;
    }
    try {
        const fs::path data = fs::absolute(argv[1]);
        const fs::path out = fs::absolute(argv[2]);
        const auto rules = load_rules((data / "normalize.rules").string());
        const auto rows = load_rows((data / "fixture_sentences.tsv").string());

        std::vector<std::string> normalized;
        normalized.reserve(rows.size());
        for (const auto& r : rows) normalized.push_back(normalize_text(r.text, rules));
        ToneSynth synth(build_grapheme_vocab(normalized));

        fs::create_directories(out / "toy" / "wav");
        Manifest toy;
        for (size_t i = 0; i < rows.size(); ++i) {
            AudioBuffer b = synth.synthesize(normalized[i]);
            if (rows[i].id == "lurin-long") b = tile_to(b, 75.0);
            encode_wav(b, (out / "toy" / "wav" / (rows[i].id + ".wav")).string());
            Utterance u;
            u.id = rows[i].id;
            u.audio_ref = "wav/" + rows[i].id + ".wav";
            u.transcript = rows[i].text;
            u.speaker_id = rows[i].speaker;
            u.dialect = parse_dialect(rows[i].dialect);
            u.gender = parse_gender(rows[i].gender);
            u.duration_s = b.duration_s();
            toy.utterances.push_back(std::move(u));
        }
        save_manifest(toy, (out / "toy" / "manifest.jsonl").string());

        fs::create_directories(out / "vad" / "wav");
        Manifest vad;
        {
            AudioBuffer ok = synth.synthesize("kunan tuta");
            encode_wav(ok, (out / "vad" / "wav" / "vad-ok.wav").string());
            AudioBuffer sil;
            sil.sample_rate = kCanonicalRate;
            sil.channels = 1;
            sil.samples.assign(3 * kCanonicalRate, 0.0);
            encode_wav(sil, (out / "vad" / "wav" / "vad-sil.wav").string());
            Utterance a;
            a.id = "vad-ok";
            a.audio_ref = "wav/vad-ok.wav";
            a.transcript = "kunan tuta";
            a.duration_s = ok.duration_s();
            Utterance b;
            b.id = "vad-sil";
            b.audio_ref = "wav/vad-sil.wav";
            b.transcript = "chin tuta";
            b.duration_s = sil.duration_s();
            vad.utterances.push_back(std::move(a));
            vad.utterances.push_back(std::move(b));
        }
        save_manifest(vad, (out / "vad" / "manifest.jsonl").string());

        fs::create_directories(out / "hyp");
        const std::vector<std::pair<std::string, double>> conditions = {
            {"original", 0.28},
            {"distorted", 0.20},
            {"more_data", 0.23},
            {"synthetic", 0.14},
        };
        for (size_t ci = 0; ci < conditions.size(); ++ci) {
            const auto& [name, rate] = conditions[ci];
            std::ofstream hf(out / "hyp" / (name + ".jsonl"), std::ios::binary);
            for (size_t i = 0; i < rows.size(); ++i) {
                const auto tokens = tokenize(normalized[i]);
                Rng rng = Rng::derive(7700 + ci, i);
                std::vector<std::string> hyp;
                for (const auto& tok : tokens) {
                    if (rng.unit() < rate) {
                        switch (rng.below(3)) {
                            case 0:
                                hyp.push_back(tokens[rng.below(tokens.size())]);
                                break;
                            case 1:
                                break;
                            case 2:
                                hyp.push_back(tok);
                                hyp.push_back(tok);
                                break;
                        }
                    } else {
                        hyp.push_back(tok);
                    }
                }
                if (hyp.empty()) hyp.push_back(tokens.front());
                json j;
                j["id"] = rows[i].id;
                j["text"] = join(hyp);
                hf << j.dump() << "\n";
            }
        }

        const double base_hours = toy.total_hours();
        std::ofstream cf(out / "toy.conf", std::ios::binary);
        cf << "seed=42\n";
        cf << "corpus.manifest=" << (out / "toy" / "manifest.jsonl").string() << "\n";
        cf << "corpus.rules=" << (data / "normalize.rules").string() << "\n";
        cf << "morpho.suffixes=" << (data / "suffixes.tsv").string() << "\n";
        cf << "delex.lexicon=" << (data / "frame_lexicon.tsv").string() << "\n";
        cf << "delex.pivot_dict=" << (data / "pivot_dict.tsv").string() << "\n";
        cf << "delex.pivot_frames=" << (data / "pivot_frames.tsv").string() << "\n";
        cf << "delex.top_k=3\n";
        cf << "augment.candidates=10\n";
        cf << "augment.keep=1\n";
        cf << "lm.order=4\n";
        cf << "lm.pruning_k=0.04\n";
        cf << "eval.test_manifest=" << (out / "toy" / "manifest.jsonl").string() << "\n";
        for (const auto& [name, rate] : conditions) {
            cf << "eval.hyp." << name << "=" << (out / "hyp" / (name + ".jsonl")).string()
               << "\n";
            cf << "eval.hours." << name << "="
               << fmt2(name == "original" ? base_hours : 2 * base_hours) << "\n";
        }
        std::cout << "fixtures written to " << out.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "mkfixtures: " << e.what() << "\n";
        return 1;
    }
}
