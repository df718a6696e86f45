#include "qawa/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qawa/audio.hpp"
#include "qawa/augment.hpp"
#include "qawa/corpus.hpp"
#include "qawa/delex.hpp"
#include "qawa/error.hpp"
#include "qawa/eval.hpp"
#include "qawa/lm.hpp"
#include "qawa/log.hpp"
#include "qawa/morpho.hpp"
#include "qawa/parallel.hpp"
#include "qawa/rng.hpp"
#include "qawa/synth.hpp"

namespace qawa {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string join_path(const std::string& a, const std::string& b) {
    return (fs::path(a) / b).string();
}

// Purely lexical relative path from new_dir to resolved, so reruns under a
// different output root still produce byte-identical manifests.
std::string relative_ref(const std::string& resolved, const std::string& new_dir) {
    auto target = fs::absolute(fs::path(resolved)).lexically_normal();
    auto base = fs::absolute(fs::path(new_dir)).lexically_normal();
    auto rel = target.lexically_relative(base);
    return rel.empty() ? target.string() : rel.generic_string();
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, ',')) {
        size_t b = part.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        size_t e = part.find_last_not_of(" \t");
        out.push_back(part.substr(b, e - b + 1));
    }
    return out;
}

std::vector<std::string> split_command(const std::string& s) {
    std::vector<std::string> argv;
    std::istringstream in(s);
    std::string w;
    while (in >> w) argv.push_back(w);
    if (argv.empty()) throw ValidationError("empty engine command");
    return argv;
}

std::vector<std::string> read_text_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open text file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

NormalizationRules rules_from(const Config& cfg) {
    if (cfg.has("corpus.rules")) return load_rules(cfg.require("corpus.rules"));
    return NormalizationRules::defaults();
}

SegmentationPolicy policy_from(const Config& cfg) {
    SegmentationPolicy p;
    p.max_segment_s = cfg.get_double("corpus.max_segment_s", p.max_segment_s);
    p.boundary_search_window_s =
        cfg.get_double("corpus.search_window_s", p.boundary_search_window_s);
    p.silence_rms_threshold = cfg.get_double("corpus.silence_rms", p.silence_rms_threshold);
    p.frame_s = cfg.get_double("corpus.frame_s", p.frame_s);
    return p;
}

LmConfig lm_config_from(const Config& cfg) {
    LmConfig c;
    c.order = static_cast<int>(cfg.get_int("lm.order", c.order));
    c.pruning_k = cfg.get_double("lm.pruning_k", c.pruning_k);
    c.seed = cfg.seed();
    return c;
}

std::vector<std::string> transcripts_of(const Manifest& m) {
    std::vector<std::string> t;
    t.reserve(m.size());
    for (const auto& u : m.utterances) t.push_back(u.transcript);
    return t;
}

KNModel fit_lm(const std::vector<std::string>& texts, const LmConfig& lmc) {
    auto pruned = apply_singleton_pruning(texts, lmc);
    auto counts = count_ngrams(pruned, lmc.order);
    return estimate_modified_kn(counts, lmc);
}

std::string default_preprocessed(const Config& cfg) {
    return join_path(join_path(cfg.out_dir(), "preprocess"), "manifest.jsonl");
}

std::string default_synth_manifest(const Config& cfg) {
    return join_path(join_path(cfg.out_dir(), "augment"), "synthetic_manifest.jsonl");
}

}  // namespace

PreprocessSummary run_preprocess(const Config& cfg) {
    const std::string manifest_path = cfg.require("corpus.manifest");
    const Manifest m = load_manifest(manifest_path);
    const NormalizationRules rules = rules_from(cfg);
    const SegmentationPolicy policy = policy_from(cfg);
    const double voiced_floor = cfg.get_double("corpus.voiced_floor", 0.05);
    const bool dump_features = cfg.get_bool("corpus.features", false);
    const std::string out = join_path(cfg.out_dir(), "preprocess");
    fs::create_directories(join_path(out, "wav"));
    if (dump_features) fs::create_directories(join_path(out, "feat"));

    enum class Status { Ok, DecodeError, EmptyText, Unvoiced };
    struct Item {
        Status status = Status::Ok;
        std::string reason;
        std::string text;
        std::vector<std::string> seg_ids;
        std::vector<double> seg_durations;
    };
    std::vector<Item> items(m.size());
    const FeatureConfig feat_cfg;

    parallel_for(m.size(), cfg.jobs(), [&](size_t i) {
        const Utterance& u = m.utterances[i];
        Item& it = items[i];
        it.text = normalize_text(u.transcript, rules);
        if (it.text.empty()) {
            it.status = Status::EmptyText;
            it.reason = "empty transcript after normalization";
            return;
        }
        AudioBuffer b;
        try {
            b = decode_wav(resolve_audio_path(manifest_path, u.audio_ref));
        } catch (const std::exception& e) {
            it.status = Status::DecodeError;
            it.reason = e.what();
            return;
        }
        b = resample(to_mono(b), kCanonicalRate);
        const double vr = voiced_ratio(b, policy);
        if (vr < voiced_floor) {
            it.status = Status::Unvoiced;
            std::ostringstream os;
            os << "voiced ratio " << vr << " below floor " << voiced_floor;
            it.reason = os.str();
            return;
        }
        auto segs = segment(b, policy);
        const size_t min_frames =
            static_cast<size_t>(feat_cfg.window_s * kCanonicalRate);
        for (size_t k = 0; k < segs.size(); ++k) {
            std::string seg_id =
                segs.size() == 1 ? u.id : u.id + "-" + std::to_string(k + 1);
            encode_wav(segs[k], join_path(join_path(out, "wav"), seg_id + ".wav"));
            if (dump_features) {
                if (segs[k].samples.size() >= min_frames) {
                    write_feature_dump(
                        mfcc(segs[k], feat_cfg),
                        join_path(join_path(out, "feat"), seg_id + ".qawf"));
                } else {
                    log::debug("skipping features for short segment ", seg_id);
                }
            }
            it.seg_ids.push_back(std::move(seg_id));
            it.seg_durations.push_back(segs[k].duration_s());
        }
    });

    PreprocessSummary sum;
    sum.input = m.size();
    Manifest outm;
    std::ofstream drops(join_path(out, "dropped.jsonl"), std::ios::binary);
    if (!drops) throw ValidationError("cannot write drop log under " + out);
    for (size_t i = 0; i < items.size(); ++i) {
        const Utterance& u = m.utterances[i];
        const Item& it = items[i];
        if (it.status != Status::Ok) {
            json j;
            j["id"] = u.id;
            j["reason"] = it.reason;
            drops << j.dump() << "\n";
            if (it.status == Status::DecodeError) ++sum.dropped_decode;
            if (it.status == Status::EmptyText) ++sum.dropped_empty;
            if (it.status == Status::Unvoiced) ++sum.dropped_unvoiced;
            log::info("dropped ", u.id, ": ", it.reason);
            continue;
        }
        ++sum.kept;
        for (size_t k = 0; k < it.seg_ids.size(); ++k) {
            Utterance r = u;
            r.id = it.seg_ids[k];
            r.audio_ref = "wav/" + it.seg_ids[k] + ".wav";
            r.transcript = it.text;
            r.duration_s = it.seg_durations[k];
            if (it.seg_ids.size() > 1) {
                r.extra.emplace_back(
                    "segment", json(std::to_string(k + 1) + "/" +
                                    std::to_string(it.seg_ids.size()))
                                   .dump());
            }
            outm.utterances.push_back(std::move(r));
            ++sum.segments;
        }
    }
    sum.manifest_path = join_path(out, "manifest.jsonl");
    save_manifest(outm, sum.manifest_path);
    if (10 * sum.dropped_decode > sum.input)
        throw DataError(std::to_string(sum.dropped_decode) + " of " +
                        std::to_string(sum.input) +
                        " utterances failed to decode (over the 10% limit)");
    return sum;
}

AugmentSummary run_augment(const Config& cfg) {
    const std::string base_path = cfg.get("augment.manifest", default_preprocessed(cfg));
    const Manifest m = load_manifest(base_path);
    const SuffixTable table = load_suffix_table(cfg.require("morpho.suffixes"));
    FrameLexicon lex = load_frame_lexicon(cfg.require("delex.lexicon"));
    const bool has_dict = cfg.has("delex.pivot_dict");
    const bool has_frames = cfg.has("delex.pivot_frames");
    if (has_dict != has_frames)
        throw ValidationError(
            "delex.pivot_dict and delex.pivot_frames must be set together");
    if (has_dict)
        load_pivot(lex, cfg.require("delex.pivot_dict"), cfg.require("delex.pivot_frames"));
    const size_t top_k = static_cast<size_t>(cfg.get_int("delex.top_k", 3));
    const std::string out = join_path(cfg.out_dir(), "augment");
    fs::create_directories(out);

    std::vector<std::string> texts = transcripts_of(m);
    std::vector<std::vector<std::string>> tokens(texts.size());
    std::vector<std::vector<TaggedToken>> tagged(texts.size());
    for (size_t i = 0; i < texts.size(); ++i) {
        tokens[i] = tokenize(texts[i]);
        std::vector<Analysis> analyses;
        analyses.reserve(tokens[i].size());
        for (const auto& t : tokens[i]) analyses.push_back(analyze(t, table));
        tagged[i] = tag_frames(tokens[i], analyses, lex);
    }
    const auto selected = select_frequent_frames(tagged, top_k);

    SlotInventory inv;
    std::vector<DelexSentence> delexed(texts.size());
    for (size_t i = 0; i < texts.size(); ++i) {
        auto tags = bio_encode(tagged[i], selected);
        delexed[i] = delexicalize(tokens[i], tags, &inv);
    }
    inv.finalize();

    AugmentSummary sum;
    sum.sources = texts.size();
    sum.delex_path = join_path(out, "delex.jsonl");
    sum.inventory_path = join_path(out, "inventory.tsv");
    write_delex_corpus(delexed, sum.delex_path);
    write_inventory(inv, sum.inventory_path);

    std::unique_ptr<ParaphraseEngine> engine;
    const std::string engine_name = cfg.get("augment.engine", "perturb");
    if (engine_name == "perturb") {
        engine = std::make_unique<PerturbEngine>(cfg.seed());
    } else if (engine_name == "external") {
        engine = std::make_unique<ExternalParaphraseEngine>(
            split_command(cfg.require("augment.engine_cmd")),
            static_cast<int>(cfg.get_int("augment.timeout_ms", 30000)));
    } else {
        throw ValidationError("unknown paraphrase engine: " + engine_name);
    }

    AugmentConfig acfg;
    acfg.candidates_per_sentence =
        static_cast<size_t>(cfg.get_int("augment.candidates", 10));
    acfg.keep_per_sentence = static_cast<size_t>(cfg.get_int("augment.keep", 1));
    acfg.seed = cfg.seed();
    acfg.jobs = cfg.jobs();
    const AugmentResult res = augment_corpus(delexed, inv, acfg, *engine);
    sum.generated = res.sentences.size();
    sum.skipped = res.skipped.size();
    sum.slot_precision = res.slots.precision;
    sum.slot_recall = res.slots.recall;
    sum.slot_f1 = res.slots.f1;

    std::vector<std::string> synthetic;
    synthetic.reserve(res.sentences.size());
    for (const auto& s : res.sentences) {
        std::string line;
        for (size_t j = 0; j < s.size(); ++j) {
            if (j) line += ' ';
            line += s[j];
        }
        synthetic.push_back(std::move(line));
    }
    sum.text_path = join_path(out, "synthetic.txt");
    {
        std::ofstream tf(sum.text_path, std::ios::binary);
        if (!tf) throw ValidationError("cannot write " + sum.text_path);
        for (const auto& s : synthetic) tf << s << "\n";
    }

    std::unique_ptr<TtsEngine> tts;
    const std::string synth_name = cfg.get("synth.engine", "tone");
    if (synth_name == "tone") {
        tts = std::make_unique<ToneSynth>(build_grapheme_vocab(texts));
    } else if (synth_name == "external") {
        tts = std::make_unique<ExternalTts>(
            split_command(cfg.require("synth.engine_cmd")),
            static_cast<int>(cfg.get_int("synth.timeout_ms", 30000)));
    } else {
        throw ValidationError("unknown synthesis engine: " + synth_name);
    }
    const std::string wav_dir = join_path(out, "wav");
    SynthesisResult sres = synthesize_corpus(synthetic, *tts, wav_dir, cfg.jobs());
    for (auto& u : sres.manifest.utterances) u.audio_ref = "wav/" + u.audio_ref;
    sum.synth_failures = sres.failures.size();
    sum.manifest_path = join_path(out, "synthetic_manifest.jsonl");
    save_manifest(sres.manifest, sum.manifest_path);

    json summary;
    summary["sources"] = sum.sources;
    summary["generated"] = sum.generated;
    summary["skipped"] = res.skipped;
    summary["slot_precision"] = sum.slot_precision;
    summary["slot_recall"] = sum.slot_recall;
    summary["slot_f1"] = sum.slot_f1;
    json fails = json::array();
    for (const auto& [idx, msg] : sres.failures) {
        json f;
        f["index"] = idx;
        f["error"] = msg;
        fails.push_back(std::move(f));
    }
    summary["synth_failures"] = std::move(fails);
    std::ofstream sf(join_path(out, "summary.json"), std::ios::binary);
    sf << summary.dump(2) << "\n";
    return sum;
}

ConditionSummary run_condition(const Config& cfg, const std::string& condition) {
    if (condition != "original" && condition != "distorted" &&
        condition != "more_data" && condition != "synthetic")
        throw ValidationError("unknown condition: " + condition +
                              " (expected original, distorted, more_data or synthetic)");
    const std::string base_path = cfg.get("condition.manifest", default_preprocessed(cfg));
    const Manifest base = load_manifest(base_path);
    const std::string out = join_path(cfg.out_dir(), "condition-" + condition);
    fs::create_directories(out);

    Manifest outm;
    for (const auto& u : base.utterances) {
        Utterance r = u;
        if (!r.audio_ref.empty())
            r.audio_ref = relative_ref(resolve_audio_path(base_path, u.audio_ref), out);
        outm.utterances.push_back(std::move(r));
    }

    if (condition == "distorted") {
        SpeedRange range;
        range.lo = cfg.get_double("condition.speed_lo", range.lo);
        range.hi = cfg.get_double("condition.speed_hi", range.hi);
        fs::create_directories(join_path(out, "wav"));
        std::vector<Utterance> extra(base.size());
        parallel_for(base.size(), cfg.jobs(), [&](size_t i) {
            const Utterance& u = base.utterances[i];
            Rng rng = Rng::derive(cfg.seed(), 100000 + i);
            const double coeff = rng.range(range.lo, range.hi);
            AudioBuffer b = decode_wav(resolve_audio_path(base_path, u.audio_ref));
            b = resample(to_mono(b), kCanonicalRate);
            AudioBuffer p = speed_perturb(b, coeff, range);
            Utterance r = u;
            r.id = u.id + "-sp";
            r.audio_ref = "wav/" + r.id + ".wav";
            r.duration_s = p.duration_s();
            r.extra.emplace_back("speed_coeff", json(coeff).dump());
            encode_wav(p, join_path(out, r.audio_ref));
            extra[i] = std::move(r);
        });
        for (auto& r : extra) outm.utterances.push_back(std::move(r));
    } else if (condition == "more_data") {
        for (const auto& u : base.utterances) {
            Utterance r = u;
            r.id = u.id + "-dup";
            if (!r.audio_ref.empty())
                r.audio_ref = relative_ref(resolve_audio_path(base_path, u.audio_ref), out);
            r.extra.emplace_back("duplicate_of", json(u.id).dump());
            outm.utterances.push_back(std::move(r));
        }
    } else if (condition == "synthetic") {
        const std::string syn_path =
            cfg.get("condition.synthetic_manifest", default_synth_manifest(cfg));
        if (!fs::exists(syn_path))
            throw ValidationError("synthetic condition needs augment outputs; missing " +
                                  syn_path);
        const Manifest syn = load_manifest(syn_path);
        for (const auto& u : syn.utterances) {
            Utterance r = u;
            if (!r.audio_ref.empty())
                r.audio_ref = relative_ref(resolve_audio_path(syn_path, u.audio_ref), out);
            outm.utterances.push_back(std::move(r));
        }
    }

    ConditionSummary sum;
    sum.condition = condition;
    sum.records = outm.size();
    sum.hours = outm.total_hours();
    sum.manifest_path = join_path(out, "manifest.jsonl");
    save_manifest(outm, sum.manifest_path);

    const KNModel model = fit_lm(transcripts_of(outm), lm_config_from(cfg));
    sum.arpa_path = join_path(out, "lm.arpa");
    export_arpa(model, sum.arpa_path);
    return sum;
}

LmSummary run_lm(const Config& cfg) {
    std::vector<std::string> texts;
    if (cfg.has("lm.text")) {
        texts = read_text_lines(cfg.require("lm.text"));
    } else {
        const std::string path = cfg.get("lm.manifest", default_preprocessed(cfg));
        texts = transcripts_of(load_manifest(path));
    }
    LmSummary sum;
    sum.sentences = texts.size();
    const KNModel model = fit_lm(texts, lm_config_from(cfg));
    sum.vocab = model.vocab.size();
    const std::string out = join_path(cfg.out_dir(), "lm");
    fs::create_directories(out);
    sum.arpa_path = join_path(out, "lm.arpa");
    export_arpa(model, sum.arpa_path);
    if (cfg.has("lm.eval_text")) {
        const auto eval_texts = read_text_lines(cfg.require("lm.eval_text"));
        const auto ppl = perplexity(model, eval_texts);
        sum.eval_ppl = ppl.perplexity;
        sum.has_eval_ppl = true;
        sum.eval_oov = ppl.oov;
    }
    return sum;
}

EvalSummary run_eval(const Config& cfg) {
    const std::string test_path = cfg.get("eval.test_manifest", default_preprocessed(cfg));
    const Manifest test = load_manifest(test_path);
    const NormalizationRules rules = rules_from(cfg);
    const auto conditions = split_list(
        cfg.get("eval.conditions", "original,distorted,more_data,synthetic"));

    std::unique_ptr<SuffixTable> table;
    if (cfg.has("morpho.suffixes"))
        table = std::make_unique<SuffixTable>(load_suffix_table(cfg.require("morpho.suffixes")));

    std::vector<std::string> refs_text = transcripts_of(test);
    for (auto& t : refs_text) t = normalize_text(t, rules);
    std::vector<ConditionInput> inputs;
    for (const auto& c : conditions) {
        const std::string hyp_key = "eval.hyp." + c;
        if (!cfg.has(hyp_key)) {
            log::warn("no hypothesis file configured for condition ", c, ", row omitted");
            continue;
        }
        const std::string hyp_path = cfg.require(hyp_key);
        if (!fs::exists(hyp_path)) {
            log::warn("hypothesis file missing for condition ", c, " (", hyp_path,
                      "), row omitted");
            continue;
        }
        const auto hyps = load_hypotheses(hyp_path);
        std::vector<std::string> missing;
        ConditionInput in;
        in.name = c;
        in.hours = cfg.get("eval.hours." + c, "-");
        for (size_t i = 0; i < test.size(); ++i) {
            const auto& u = test.utterances[i];
            auto it = hyps.find(u.id);
            if (it == hyps.end()) {
                missing.push_back(u.id);
                continue;
            }
            in.pairs.emplace_back(tokenize(refs_text[i]),
                                  tokenize(normalize_text(it->second, rules)));
        }
        if (!missing.empty()) {
            std::string list;
            for (size_t i = 0; i < missing.size() && i < 10; ++i) {
                if (i) list += ", ";
                list += missing[i];
            }
            if (missing.size() > 10) list += ", ...";
            throw DataError("condition " + c + ": no hypothesis for " +
                            std::to_string(missing.size()) + " test ids (" + list + ")");
        }
        std::string lm_path = cfg.get(
            "eval.lm." + c,
            join_path(join_path(cfg.out_dir(), "condition-" + c), "lm.arpa"));
        if (fs::exists(lm_path)) {
            const KNModel model = import_arpa(lm_path);
            in.ppl = perplexity(model, refs_text).perplexity;
            in.has_ppl = true;
        } else if (cfg.has("eval.lm." + c)) {
            throw ValidationError("cannot open language model: " + lm_path);
        }
        inputs.push_back(std::move(in));
    }

    const ConditionReport rep = report(inputs, table.get());
    const std::string out = join_path(cfg.out_dir(), "eval");
    fs::create_directories(out);
    EvalSummary sum;
    sum.rows = rep.rows.size();
    sum.table = rep.render();
    sum.report_txt_path = join_path(out, "report.txt");
    sum.report_jsonl_path = join_path(out, "report.jsonl");
    {
        std::ofstream tf(sum.report_txt_path, std::ios::binary);
        if (!tf) throw ValidationError("cannot write " + sum.report_txt_path);
        tf << sum.table;
    }
    {
        std::ofstream jf(sum.report_jsonl_path, std::ios::binary);
        if (!jf) throw ValidationError("cannot write " + sum.report_jsonl_path);
        jf << rep.to_records();
    }
    return sum;
}

std::string run_stats(const Config& cfg) {
    const Manifest m = load_manifest(cfg.require("corpus.manifest"));
    return render_stats(corpus_stats(m));
}

PipelineSummary run_pipeline(const Config& cfg) {
    PipelineSummary sum;
    sum.preprocess = run_preprocess(cfg);
    sum.augment = run_augment(cfg);
    sum.condition = run_condition(cfg, cfg.get("condition.name", "synthetic"));
    sum.eval = run_eval(cfg);
    return sum;
}

}  // namespace qawa
