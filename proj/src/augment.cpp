#include "qawa/augment.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "qawa/error.hpp"
#include "qawa/log.hpp"
#include "qawa/parallel.hpp"

namespace qawa {

namespace {

std::map<std::string, uint64_t> multiset_of(const std::vector<std::string>& toks) {
    std::map<std::string, uint64_t> m;
    for (const auto& t : toks) ++m[t];
    return m;
}

uint64_t multiset_intersection(const std::map<std::string, uint64_t>& a,
                               const std::map<std::string, uint64_t>& b) {
    uint64_t n = 0;
    for (const auto& [tok, ca] : a) {
        const auto it = b.find(tok);
        if (it != b.end()) n += std::min(ca, it->second);
    }
    return n;
}

std::vector<std::string> placeholder_labels(const std::vector<std::string>& toks) {
    std::vector<std::string> out;
    for (const auto& t : toks)
        if (auto l = placeholder_label(t)) out.push_back(*l);
    return out;
}

}  // namespace

PerturbEngine::PerturbEngine(uint64_t seed, PerturbWeights weights)
    : seed_(seed), weights_(weights) {
    if (weights_.swap < 0 || weights_.drop < 0 || weights_.dup < 0 ||
        weights_.swap + weights_.drop + weights_.dup <= 0)
        throw ValidationError("perturb weights must be nonnegative with a positive sum");
}

std::vector<std::vector<std::string>> PerturbEngine::generate(
    const std::vector<std::string>& delex, size_t n, uint64_t stream) {
    std::vector<std::vector<std::string>> out;
    if (n == 0 || delex.empty()) return out;
    Rng rng = Rng::derive(seed_, stream);
    std::set<std::vector<std::string>> seen;
    const size_t attempts = std::max<size_t>(8, 4 * n);

    for (size_t a = 0; a < attempts && out.size() < n; ++a) {
        std::vector<std::string> cand = delex;
        const size_t edits = 1 + rng.below(3);
        for (size_t e = 0; e < edits; ++e) {
            std::vector<size_t> plain;
            for (size_t i = 0; i < cand.size(); ++i)
                if (!placeholder_label(cand[i])) plain.push_back(i);

            const double w_swap = cand.size() >= 2 ? weights_.swap : 0.0;
            const double w_drop = !plain.empty() && cand.size() >= 2 ? weights_.drop : 0.0;
            const double w_dup = !plain.empty() ? weights_.dup : 0.0;
            const double total = w_swap + w_drop + w_dup;
            if (total <= 0) break;

            const double r = rng.unit() * total;
            if (r < w_swap) {
                const size_t i = rng.below(cand.size() - 1);
                std::swap(cand[i], cand[i + 1]);
            } else if (r < w_swap + w_drop) {
                cand.erase(cand.begin() +
                           static_cast<long>(plain[rng.below(plain.size())]));
            } else {
                const size_t i = plain[rng.below(plain.size())];
                cand.insert(cand.begin() + static_cast<long>(i) + 1, cand[i]);
            }
        }
        if (cand == delex) continue;
        if (seen.insert(cand).second) out.push_back(std::move(cand));
    }
    return out;
}

ExternalParaphraseEngine::ExternalParaphraseEngine(const std::vector<std::string>& argv,
                                                   int timeout_ms)
    : proc_(std::make_unique<LineProcess>(argv)), timeout_ms_(timeout_ms) {}

std::vector<std::vector<std::string>> ExternalParaphraseEngine::generate(
    const std::vector<std::string>& delex, size_t n, uint64_t stream) {
    (void)stream;
    std::lock_guard<std::mutex> lock(mu_);
    std::string req = "GEN " + std::to_string(n);
    req.push_back(' ');
    for (size_t i = 0; i < delex.size(); ++i) {
        if (i > 0) req.push_back('\t');
        req += delex[i];
    }
    proc_->write_line(req);

    std::vector<std::vector<std::string>> out;
    for (;;) {
        const std::string line = proc_->read_line(timeout_ms_);
        if (line == "END") break;
        if (line.rfind("CAND ", 0) != 0)
            throw EngineError("paraphrase engine sent unexpected line: " + line);
        std::vector<std::string> cand;
        std::istringstream ls(line.substr(5));
        std::string tok;
        while (std::getline(ls, tok, '\t'))
            if (!tok.empty()) cand.push_back(tok);
        out.push_back(std::move(cand));
    }
    return out;
}

std::vector<std::vector<std::string>> generate_candidates(
    const std::vector<std::string>& delex, ParaphraseEngine& engine, size_t n,
    uint64_t stream) {
    if (delex.empty()) throw ValidationError("generate_candidates: empty source");
    if (n == 0) return {};
    auto raw = engine.generate(delex, n, stream);

    const auto src_tokens = multiset_of(delex);
    std::set<std::string> src_placeholders;
    for (const auto& t : delex)
        if (placeholder_label(t)) src_placeholders.insert(t);

    std::vector<std::vector<std::string>> out;
    std::set<std::vector<std::string>> seen;
    for (auto& cand : raw) {
        if (out.size() >= n) break;
        if (cand.empty() || cand == delex) continue;
        bool ok = true;
        bool has_src_placeholder = src_placeholders.empty();
        for (const auto& tok : cand) {
            if (!src_tokens.count(tok) && !placeholder_label(tok)) {
                ok = false;
                break;
            }
            if (src_placeholders.count(tok)) has_src_placeholder = true;
        }
        if (!ok || !has_src_placeholder) {
            log::debug("dropping candidate violating the engine contract");
            continue;
        }
        if (seen.insert(cand).second) out.push_back(std::move(cand));
    }
    return out;
}

double similarity(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    const auto ma = multiset_of(a);
    const auto mb = multiset_of(b);
    const uint64_t inter = multiset_intersection(ma, mb);
    const uint64_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::vector<std::string>> rank_and_select(
    const std::vector<std::string>& delex,
    const std::vector<std::vector<std::string>>& candidates, size_t keep) {
    if (keep > candidates.size())
        throw ValidationError("rank_and_select: keep exceeds candidate count");
    struct Scored {
        double sim;
        size_t index;
    };
    std::vector<Scored> scored;
    scored.reserve(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i)
        scored.push_back({similarity(delex, candidates[i]), i});
    std::sort(scored.begin(), scored.end(), [&](const Scored& x, const Scored& y) {
        if (x.sim != y.sim) return x.sim < y.sim;
        if (candidates[x.index] != candidates[y.index])
            return candidates[x.index] < candidates[y.index];
        return x.index < y.index;
    });
    std::vector<std::vector<std::string>> out;
    out.reserve(keep);
    for (size_t i = 0; i < keep; ++i) out.push_back(candidates[scored[i].index]);
    return out;
}

F1 slot_f1(const std::vector<std::string>& gen_delex,
           const std::vector<std::string>& src_delex) {
    const auto gen = multiset_of(placeholder_labels(gen_delex));
    const auto src = multiset_of(placeholder_labels(src_delex));
    uint64_t n_gen = 0, n_src = 0;
    for (const auto& [l, c] : gen) {
        (void)l;
        n_gen += c;
    }
    for (const auto& [l, c] : src) {
        (void)l;
        n_src += c;
    }
    if (n_gen == 0 && n_src == 0) return {1.0, 1.0, 1.0};
    const uint64_t inter = multiset_intersection(gen, src);
    F1 r;
    r.precision = n_gen == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(n_gen);
    r.recall = n_src == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(n_src);
    r.f1 = r.precision + r.recall == 0.0
               ? 0.0
               : 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

AugmentResult augment_corpus(const std::vector<DelexSentence>& corpus,
                             const SlotInventory& inv, const AugmentConfig& cfg,
                             ParaphraseEngine& engine) {
    if (cfg.keep_per_sentence > cfg.candidates_per_sentence)
        throw ValidationError("keep_per_sentence exceeds candidates_per_sentence");

    for (size_t i = 0; i < corpus.size(); ++i) {
        for (const auto& tok : corpus[i].delex_tokens) {
            const auto label = placeholder_label(tok);
            if (!label) continue;
            const auto it = inv.surfaces.find(*label);
            if (it == inv.surfaces.end() || it->second.empty())
                throw ValidationError("inventory has no surfaces for label '" + *label +
                                      "' needed by sentence " + std::to_string(i));
        }
    }

    std::vector<std::vector<std::vector<std::string>>> kept(corpus.size());
    parallel_for(corpus.size(), cfg.jobs, [&](size_t i) {
        const auto& d = corpus[i].delex_tokens;
        if (d.empty()) return;
        auto cands = generate_candidates(d, engine, cfg.candidates_per_sentence, i);
        if (cands.empty()) return;
        kept[i] = rank_and_select(d, cands,
                                  std::min(cfg.keep_per_sentence, cands.size()));
    });

    AugmentResult r;
    uint64_t inter_sum = 0, gen_sum = 0, src_sum = 0;
    for (size_t i = 0; i < corpus.size(); ++i) {
        if (kept[i].empty()) {
            r.skipped.push_back(i);
            continue;
        }
        const auto src = multiset_of(placeholder_labels(corpus[i].delex_tokens));
        for (size_t j = 0; j < kept[i].size(); ++j) {
            Rng rng = Rng::derive(cfg.seed, (i + 1) * 65536 + j);
            r.sentences.push_back(relexicalize(kept[i][j], inv, rng));
            r.delex.push_back(kept[i][j]);
            r.source_index.push_back(i);
            const auto gen = multiset_of(placeholder_labels(kept[i][j]));
            inter_sum += multiset_intersection(gen, src);
            for (const auto& [l, c] : gen) {
                (void)l;
                gen_sum += c;
            }
            for (const auto& [l, c] : src) {
                (void)l;
                src_sum += c;
            }
        }
    }
    if (gen_sum == 0 && src_sum == 0) {
        r.slots = {1.0, 1.0, 1.0};
    } else {
        r.slots.precision =
            gen_sum == 0 ? 0.0 : static_cast<double>(inter_sum) / static_cast<double>(gen_sum);
        r.slots.recall =
            src_sum == 0 ? 0.0 : static_cast<double>(inter_sum) / static_cast<double>(src_sum);
        r.slots.f1 = r.slots.precision + r.slots.recall == 0.0
                         ? 0.0
                         : 2.0 * r.slots.precision * r.slots.recall /
                               (r.slots.precision + r.slots.recall);
    }
    if (!r.skipped.empty())
        log::info(r.skipped.size(), " sentences yielded no candidates and were skipped");
    return r;
}

}  // namespace qawa
