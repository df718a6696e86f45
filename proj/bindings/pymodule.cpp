#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qawa/augment.hpp"
#include "qawa/corpus.hpp"
#include "qawa/delex.hpp"
#include "qawa/error.hpp"
#include "qawa/eval.hpp"
#include "qawa/lm.hpp"
#include "qawa/morpho.hpp"
#include "qawa/synth.hpp"

namespace py = pybind11;
using namespace qawa;

namespace {

NormalizationRules rules_or_default(const std::optional<std::string>& path) {
    return path ? load_rules(*path) : NormalizationRules::defaults();
}

FrameLexicon lexicon_from(const std::string& lexicon,
                          const std::optional<std::string>& pivot_dict,
                          const std::optional<std::string>& pivot_frames) {
    FrameLexicon lex = load_frame_lexicon(lexicon);
    if (pivot_dict.has_value() != pivot_frames.has_value())
        throw ValidationError("pivot_dict and pivot_frames must be given together");
    if (pivot_dict) load_pivot(lex, *pivot_dict, *pivot_frames);
    return lex;
}

std::pair<std::vector<DelexSentence>, SlotInventory> build_delex(
    const std::vector<std::string>& sentences, const SuffixTable& table,
    const FrameLexicon& lex, size_t top_k) {
    std::vector<std::vector<std::string>> tokens(sentences.size());
    std::vector<std::vector<TaggedToken>> tagged(sentences.size());
    for (size_t i = 0; i < sentences.size(); ++i) {
        tokens[i] = tokenize(sentences[i]);
        std::vector<Analysis> analyses;
        analyses.reserve(tokens[i].size());
        for (const auto& t : tokens[i]) analyses.push_back(analyze(t, table));
        tagged[i] = tag_frames(tokens[i], analyses, lex);
    }
    const auto selected = select_frequent_frames(tagged, top_k);
    SlotInventory inv;
    std::vector<DelexSentence> out(sentences.size());
    for (size_t i = 0; i < sentences.size(); ++i) {
        auto tags = bio_encode(tagged[i], selected);
        out[i] = delexicalize(tokens[i], tags, &inv);
    }
    inv.finalize();
    return {std::move(out), std::move(inv)};
}

std::string join_tokens(const std::vector<std::string>& toks) {
    std::string s;
    for (size_t i = 0; i < toks.size(); ++i) {
        if (i) s += ' ';
        s += toks[i];
    }
    return s;
}

}  // namespace

PYBIND11_MODULE(_qawa, m) {
    m.doc() = "speech data augmentation toolkit core";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
    py::register_exception<EngineError>(m, "EngineError", PyExc_RuntimeError);

    m.def(
        "normalize_text",
        [](const std::string& text, const std::optional<std::string>& rules) {
            return normalize_text(text, rules_or_default(rules));
        },
        py::arg("text"), py::arg("rules") = py::none());

    m.def("tokenize", &tokenize, py::arg("text"), py::arg("drop_punct") = true);

    m.def("wer", &wer, py::arg("ref"), py::arg("hyp"));
    m.def("similarity", &similarity, py::arg("a"), py::arg("b"));

    py::class_<SuffixTable>(m, "SuffixTable")
        .def(py::init([](const std::string& path) { return load_suffix_table(path); }),
             py::arg("path"))
        .def_property_readonly("size",
                               [](const SuffixTable& t) { return t.entries.size(); })
        .def(
            "analyze",
            [](const SuffixTable& t, const std::string& token) {
                Analysis a = analyze(token, t);
                return py::make_tuple(a.lemma, a.suffixes);
            },
            py::arg("token"))
        .def(
            "segment",
            [](const SuffixTable& t, const std::vector<std::string>& tokens) {
                return segment_to_subwords(tokens, t);
            },
            py::arg("tokens"))
        .def(
            "ter",
            [](const SuffixTable& t, const std::vector<std::string>& ref,
               const std::vector<std::string>& hyp) { return ter(ref, hyp, t); },
            py::arg("ref"), py::arg("hyp"));

    py::class_<KNModel>(m, "LanguageModel")
        .def_static(
            "train",
            [](const std::vector<std::string>& sentences, int order, double pruning_k,
               uint64_t seed) {
                LmConfig cfg;
                cfg.order = order;
                cfg.pruning_k = pruning_k;
                cfg.seed = seed;
                auto pruned = apply_singleton_pruning(sentences, cfg);
                return estimate_modified_kn(count_ngrams(pruned, cfg.order), cfg);
            },
            py::arg("sentences"), py::arg("order") = 4, py::arg("pruning_k") = 0.04,
            py::arg("seed") = 0)
        .def_static("load", &import_arpa, py::arg("path"))
        .def("save", [](const KNModel& mdl, const std::string& path) { export_arpa(mdl, path); },
             py::arg("path"))
        .def_readonly("order", &KNModel::order)
        .def_readonly("vocab", &KNModel::vocab)
        .def("prob", &KNModel::prob, py::arg("context"), py::arg("word"))
        .def(
            "perplexity",
            [](const KNModel& mdl, const std::vector<std::string>& texts) {
                auto r = perplexity(mdl, texts);
                py::dict d;
                d["perplexity"] = r.perplexity;
                d["tokens"] = r.tokens;
                d["oov"] = r.oov;
                return d;
            },
            py::arg("sentences"));

    m.def(
        "delexicalize",
        [](const std::vector<std::string>& sentences, const std::string& suffixes,
           const std::string& lexicon, const std::optional<std::string>& pivot_dict,
           const std::optional<std::string>& pivot_frames, size_t top_k) {
            const SuffixTable table = load_suffix_table(suffixes);
            const FrameLexicon lex = lexicon_from(lexicon, pivot_dict, pivot_frames);
            auto [delexed, inv] = build_delex(sentences, table, lex, top_k);
            py::list records;
            for (const auto& d : delexed) {
                py::dict r;
                r["tokens"] = d.original_tokens;
                r["tags"] = d.tags;
                r["delex"] = d.delex_tokens;
                records.append(std::move(r));
            }
            return py::make_tuple(records, inv.surfaces);
        },
        py::arg("sentences"), py::arg("suffixes"), py::arg("lexicon"),
        py::arg("pivot_dict") = py::none(), py::arg("pivot_frames") = py::none(),
        py::arg("top_k") = 3);

    m.def(
        "augment_sentences",
        [](const std::vector<std::string>& sentences, const std::string& suffixes,
           const std::string& lexicon, const std::optional<std::string>& pivot_dict,
           const std::optional<std::string>& pivot_frames, size_t top_k,
           size_t candidates, size_t keep, uint64_t seed, int jobs) {
            const SuffixTable table = load_suffix_table(suffixes);
            const FrameLexicon lex = lexicon_from(lexicon, pivot_dict, pivot_frames);
            auto [delexed, inv] = build_delex(sentences, table, lex, top_k);
            AugmentConfig cfg;
            cfg.candidates_per_sentence = candidates;
            cfg.keep_per_sentence = keep;
            cfg.seed = seed;
            cfg.jobs = jobs;
            PerturbEngine engine(seed);
            const AugmentResult res = augment_corpus(delexed, inv, cfg, engine);
            std::vector<std::string> out;
            out.reserve(res.sentences.size());
            for (const auto& s : res.sentences) out.push_back(join_tokens(s));
            return out;
        },
        py::arg("sentences"), py::arg("suffixes"), py::arg("lexicon"),
        py::arg("pivot_dict") = py::none(), py::arg("pivot_frames") = py::none(),
        py::arg("top_k") = 3, py::arg("candidates") = 10, py::arg("keep") = 1,
        py::arg("seed") = 0, py::arg("jobs") = 1);

    m.def(
        "synthesize_tone",
        [](const std::string& text, const std::vector<std::string>& vocab_texts) {
            ToneSynth synth(build_grapheme_vocab(vocab_texts));
            AudioBuffer b = synth.synthesize(text);
            return py::make_tuple(b.samples, b.sample_rate);
        },
        py::arg("text"), py::arg("vocab_texts"));
}
