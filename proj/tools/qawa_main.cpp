#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qawa/config.hpp"
#include "qawa/error.hpp"
#include "qawa/log.hpp"
#include "qawa/pipeline.hpp"

namespace {

void print_preprocess(const qawa::PreprocessSummary& s) {
    std::cout << "preprocess: kept " << s.kept << "/" << s.input << " utterances, wrote "
              << s.segments << " records -> " << s.manifest_path << "\n";
    if (s.dropped_decode + s.dropped_empty + s.dropped_unvoiced > 0)
        std::cout << "  dropped: " << s.dropped_decode << " decode errors, "
                  << s.dropped_empty << " empty transcripts, " << s.dropped_unvoiced
                  << " unvoiced\n";
}

void print_augment(const qawa::AugmentSummary& s) {
    std::cout << "augment: " << s.generated << " synthetic sentences from " << s.sources
              << " sources (" << s.skipped << " skipped) -> " << s.text_path << "\n";
    std::cout << "  slot precision " << s.slot_precision << ", recall " << s.slot_recall
              << ", f1 " << s.slot_f1 << "\n";
    std::cout << "  audio manifest -> " << s.manifest_path;
    if (s.synth_failures > 0) std::cout << " (" << s.synth_failures << " synthesis failures)";
    std::cout << "\n";
}

void print_condition(const qawa::ConditionSummary& s) {
    std::cout << "condition " << s.condition << ": " << s.records << " records, "
              << s.hours << " hours -> " << s.manifest_path << "\n";
    std::cout << "  language model -> " << s.arpa_path << "\n";
}

void print_lm(const qawa::LmSummary& s) {
    std::cout << "lm: " << s.sentences << " sentences, vocab " << s.vocab << " -> "
              << s.arpa_path << "\n";
    if (s.has_eval_ppl)
        std::cout << "  eval perplexity " << s.eval_ppl << " (" << s.eval_oov
                  << " oov tokens)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"data augmentation toolkit for low-resource agglutinative-language ASR"};
    app.require_subcommand(1);
    app.allow_extras();
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    int64_t seed = 0;
    int jobs = 1;
    auto* config_opt =
        app.add_option("--config", config_path, "key=value configuration file");
    auto* seed_opt = app.add_option("--seed", seed, "global random seed");
    auto* jobs_opt = app.add_option("--jobs", jobs, "worker thread limit");
    auto* out_opt = app.add_option("--out", out_dir, "output directory");

    auto* cmd_preprocess =
        app.add_subcommand("preprocess", "decode, normalize, gate and segment the corpus");
    auto* cmd_augment =
        app.add_subcommand("augment", "delexicalize, paraphrase and synthesize audio");
    auto* cmd_condition =
        app.add_subcommand("condition", "assemble a training condition and its LM");
    std::string condition_name;
    cmd_condition
        ->add_option("name", condition_name,
                     "original, distorted, more_data or synthetic")
        ->required();
    auto* cmd_lm = app.add_subcommand("lm", "fit a language model and export ARPA");
    auto* cmd_eval = app.add_subcommand("eval", "score hypothesis files per condition");
    auto* cmd_pipeline =
        app.add_subcommand("pipeline", "preprocess, augment, condition and eval in one run");
    auto* cmd_stats = app.add_subcommand("stats", "corpus statistics by dialect and gender");
    for (auto* sub : {cmd_preprocess, cmd_augment, cmd_condition, cmd_lm, cmd_eval,
                      cmd_pipeline, cmd_stats}) {
        sub->allow_extras();
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        qawa::Config cfg;
        if (*config_opt) cfg = qawa::Config::load(config_path);
        if (*seed_opt) cfg.set("seed", std::to_string(seed));
        if (*jobs_opt) cfg.set("jobs", std::to_string(jobs));
        if (*out_opt) cfg.set("out", out_dir);
        for (const auto& extra : app.remaining(true)) {
            auto eq = extra.find('=');
            if (eq == std::string::npos || eq == 0)
                throw qawa::ValidationError("unrecognized argument: " + extra +
                                            " (expected key=value)");
            cfg.set(extra.substr(0, eq), extra.substr(eq + 1));
        }

        if (app.got_subcommand(cmd_preprocess)) {
            print_preprocess(qawa::run_preprocess(cfg));
        } else if (app.got_subcommand(cmd_augment)) {
            print_augment(qawa::run_augment(cfg));
        } else if (app.got_subcommand(cmd_condition)) {
            print_condition(qawa::run_condition(cfg, condition_name));
        } else if (app.got_subcommand(cmd_lm)) {
            print_lm(qawa::run_lm(cfg));
        } else if (app.got_subcommand(cmd_eval)) {
            auto s = qawa::run_eval(cfg);
            std::cout << s.table;
            std::cout << "report -> " << s.report_txt_path << "\n";
        } else if (app.got_subcommand(cmd_pipeline)) {
            auto s = qawa::run_pipeline(cfg);
            print_preprocess(s.preprocess);
            print_augment(s.augment);
            print_condition(s.condition);
            std::cout << s.eval.table;
            std::cout << "report -> " << s.eval.report_txt_path << "\n";
        } else if (app.got_subcommand(cmd_stats)) {
            std::cout << qawa::run_stats(cfg);
        }
        return 0;
    } catch (const qawa::ValidationError& e) {
        qawa::log::error(e.what());
        return 1;
    } catch (const qawa::DataError& e) {
        qawa::log::error(e.what());
        return 2;
    } catch (const qawa::EngineError& e) {
        qawa::log::error(e.what());
        return 3;
    } catch (const std::exception& e) {
        qawa::log::error(e.what());
        return 1;
    }
}
