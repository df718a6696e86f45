#include "qawa/lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qawa/error.hpp"
#include "qawa/log.hpp"
#include "qawa/rng.hpp"

namespace qawa {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string join(const std::vector<std::string>& toks, size_t lo, size_t hi) {
    std::string s;
    for (size_t i = lo; i < hi; ++i) {
        if (i > lo) s.push_back(' ');
        s += toks[i];
    }
    return s;
}

bool starts_with_bos(const std::string& key) {
    return key == kBos || key.rfind(std::string(kBos) + ' ', 0) == 0;
}

bool ends_with_bos(const std::string& key) {
    if (key == kBos) return true;
    const std::string tail = std::string(" ") + kBos;
    return key.size() > tail.size() &&
           key.compare(key.size() - tail.size(), tail.size(), tail) == 0;
}

// Context and final word of a space-joined k-gram.
std::pair<std::string, std::string> split_last(const std::string& key) {
    const auto pos = key.rfind(' ');
    if (pos == std::string::npos) return {"", key};
    return {key.substr(0, pos), key.substr(pos + 1)};
}

struct Discounts {
    bool fallback = false;
    double d1 = 0.75, d2 = 0.75, d3 = 0.75;

    double of(uint64_t count) const {
        if (fallback) return 0.75;
        return count == 1 ? d1 : count == 2 ? d2 : d3;
    }
};

Discounts fit_discounts(int order_k, const std::map<std::string, uint64_t>& events) {
    uint64_t n[5] = {0, 0, 0, 0, 0};
    for (const auto& [key, c] : events) {
        (void)key;
        if (c >= 1 && c <= 4) ++n[c];
    }
    Discounts d;
    if (n[1] == 0 || n[2] == 0 || n[3] == 0 || n[4] == 0) {
        d.fallback = true;
    } else {
        const double y = static_cast<double>(n[1]) / (static_cast<double>(n[1]) + 2.0 * n[2]);
        d.d1 = 1.0 - 2.0 * y * static_cast<double>(n[2]) / static_cast<double>(n[1]);
        d.d2 = 2.0 - 3.0 * y * static_cast<double>(n[3]) / static_cast<double>(n[2]);
        d.d3 = 3.0 - 4.0 * y * static_cast<double>(n[4]) / static_cast<double>(n[3]);
        if (!(std::isfinite(d.d1) && std::isfinite(d.d2) && std::isfinite(d.d3)) ||
            d.d1 <= 0.0 || d.d2 <= 0.0 || d.d3 <= 0.0)
            d.fallback = true;
    }
    if (d.fallback)
        log::info("order-", order_k,
                  " count-of-counts degenerate; using a flat 0.75 discount");
    return d;
}

}  // namespace

std::vector<std::string> apply_singleton_pruning(const std::vector<std::string>& texts,
                                                 const LmConfig& cfg) {
    if (cfg.pruning_k < 0.0 || cfg.pruning_k > 1.0)
        throw ValidationError("pruning fraction must be in [0, 1]");
    std::map<std::string, uint64_t> freq;
    for (const auto& t : texts)
        for (const auto& tok : split_ws(t)) ++freq[tok];

    std::vector<std::string> hapax;
    for (const auto& [tok, c] : freq)
        if (c == 1) hapax.push_back(tok);

    const auto n_sel = static_cast<size_t>(
        std::floor(cfg.pruning_k * static_cast<double>(hapax.size())));
    Rng rng = Rng::derive(cfg.seed, 3);
    rng.shuffle(hapax);
    const std::set<std::string> selected(hapax.begin(),
                                         hapax.begin() + static_cast<long>(n_sel));

    std::vector<std::string> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        auto toks = split_ws(t);
        for (auto& tok : toks)
            if (selected.count(tok)) tok = kUnk;
        out.push_back(join(toks, 0, toks.size()));
    }
    return out;
}

NGramCounts count_ngrams(const std::vector<std::string>& texts, int order) {
    if (order < 1 || order > 6) throw ValidationError("order must be in 1..6");
    NGramCounts c;
    c.order = order;
    c.raw.resize(static_cast<size_t>(order));
    c.cont.resize(static_cast<size_t>(order));
    for (const auto& t : texts) {
        auto toks = split_ws(t);
        if (toks.empty()) continue;
        std::vector<std::string> padded;
        padded.reserve(toks.size() + static_cast<size_t>(order));
        for (int i = 0; i + 1 < order; ++i) padded.emplace_back(kBos);
        padded.insert(padded.end(), toks.begin(), toks.end());
        padded.emplace_back(kEos);
        for (int k = 1; k <= order; ++k) {
            for (size_t i = 0; i + static_cast<size_t>(k) <= padded.size(); ++i)
                ++c.raw[static_cast<size_t>(k) - 1][join(padded, i, i + static_cast<size_t>(k))];
        }
        ++c.sentences;
    }
    // how many distinct tokens precede each k-gram, from (k+1)-gram types
    for (int k = 1; k < order; ++k) {
        for (const auto& [key, cnt] : c.raw[static_cast<size_t>(k)]) {
            (void)cnt;
            const auto pos = key.find(' ');
            ++c.cont[static_cast<size_t>(k) - 1][key.substr(pos + 1)];
        }
    }
    return c;
}

KNModel estimate_modified_kn(const NGramCounts& counts, const LmConfig& cfg) {
    (void)cfg;
    const int order = counts.order;
    if (order < 1 || counts.raw.empty() || counts.raw[0].empty())
        throw ValidationError("cannot estimate a model from an empty vocabulary");

    KNModel m;
    m.order = order;
    m.tables.resize(static_cast<size_t>(order));

    std::set<std::string> vocab_set;
    for (const auto& [w, c] : counts.raw[0]) {
        (void)c;
        vocab_set.insert(w);
    }
    vocab_set.insert(kEos);
    vocab_set.insert(kUnk);
    if (order >= 2) vocab_set.insert(kBos);
    m.vocab.assign(vocab_set.begin(), vocab_set.end());
    const auto v_events =
        static_cast<double>(vocab_set.size() - (vocab_set.count(kBos) ? 1 : 0));

    // linear-domain probabilities per order, kept alongside the model so
    // higher orders interpolate against exact values
    std::vector<std::map<std::string, double>> probs(static_cast<size_t>(order));

    for (int k = 1; k <= order; ++k) {
        const auto& raw_k = counts.raw[static_cast<size_t>(k) - 1];

        // adjusted event counts: actual at the top order and after <s>,
        // left-context type counts elsewhere; nothing predicts <s>
        std::map<std::string, uint64_t> events;
        for (const auto& [key, c] : raw_k) {
            if (ends_with_bos(key)) continue;
            if (k == order || starts_with_bos(key)) {
                events[key] = c;
            } else {
                const auto it = counts.cont[static_cast<size_t>(k) - 1].find(key);
                events[key] = it == counts.cont[static_cast<size_t>(k) - 1].end() ? 0 : it->second;
            }
        }
        for (auto it = events.begin(); it != events.end();) {
            if (it->second == 0)
                it = events.erase(it);
            else
                ++it;
        }

        const Discounts disc = fit_discounts(k, events);

        struct Ctx {
            double den = 0.0;
            uint64_t n1 = 0, n2 = 0, n3p = 0;
        };
        std::map<std::string, Ctx> ctxs;
        for (const auto& [key, e] : events) {
            auto [h, w] = split_last(key);
            (void)w;
            auto& cx = ctxs[h];
            cx.den += static_cast<double>(e);
            if (e == 1)
                ++cx.n1;
            else if (e == 2)
                ++cx.n2;
            else
                ++cx.n3p;
        }

        std::map<std::string, double> gamma;
        for (const auto& [h, cx] : ctxs) {
            const double mass = disc.fallback
                                    ? 0.75 * static_cast<double>(cx.n1 + cx.n2 + cx.n3p)
                                    : disc.d1 * static_cast<double>(cx.n1) +
                                          disc.d2 * static_cast<double>(cx.n2) +
                                          disc.d3 * static_cast<double>(cx.n3p);
            gamma[h] = mass / cx.den;
        }

        auto lower_prob = [&](const std::string& key) {
            if (k == 1) return 1.0 / v_events;
            const auto [h, w] = split_last(key);
            (void)h;
            const std::string suffix =
                k == 2 ? w : key.substr(key.find(' ') + 1);
            const auto it = probs[static_cast<size_t>(k) - 2].find(suffix);
            if (it == probs[static_cast<size_t>(k) - 2].end())
                throw Error("internal: missing lower-order entry for " + key);
            return it->second;
        };

        for (const auto& [key, e] : events) {
            const auto h = split_last(key).first;
            const auto& cx = ctxs[h];
            const double p = (static_cast<double>(e) - disc.of(e)) / cx.den +
                             gamma[h] * lower_prob(key);
            probs[static_cast<size_t>(k) - 1][key] = p;
            m.tables[static_cast<size_t>(k) - 1][key] = {std::log10(p), 0.0};
        }

        if (k == 1) {
            // unigram floor entries for symbols with no adjusted count
            const double g = ctxs.count("") ? gamma[""] : 1.0;
            for (const auto& w : m.vocab) {
                if (w == kBos) continue;
                if (probs[0].count(w)) continue;
                const double p = g / v_events;
                probs[0][w] = p;
                m.tables[0][w] = {std::log10(p), 0.0};
            }
            if (order >= 2) m.tables[0][kBos] = {-99.0, 0.0};
        }

        // backoff weights live on the context entry one order down
        if (k >= 2) {
            for (const auto& [h, g] : gamma) {
                auto& tbl = m.tables[static_cast<size_t>(k) - 2];
                auto it = tbl.find(h);
                if (it == tbl.end()) {
                    if (!ends_with_bos(h))
                        throw Error("internal: context " + h + " missing from order " +
                                    std::to_string(k - 1));
                    it = tbl.emplace(h, KNModel::Entry{-99.0, 0.0}).first;
                }
                it->second.logbow = std::log10(g);
            }
        }
    }
    return m;
}

bool KNModel::in_vocab(const std::string& word) const {
    return std::binary_search(vocab.begin(), vocab.end(), word);
}

double KNModel::prob(const std::vector<std::string>& context, const std::string& word) const {
    size_t lo = 0;
    if (context.size() > static_cast<size_t>(order) - 1)
        lo = context.size() - (static_cast<size_t>(order) - 1);
    double bow_acc = 1.0;
    for (;;) {
        const size_t k = context.size() - lo + 1;
        std::string key = join(context, lo, context.size());
        if (!key.empty()) key.push_back(' ');
        key += word;
        const auto& tbl = tables[k - 1];
        const auto it = tbl.find(key);
        if (it != tbl.end()) return bow_acc * std::pow(10.0, it->second.logp);
        if (k == 1) {
            const auto uit = tables[0].find(kUnk);
            return uit == tables[0].end() ? 1e-99
                                          : bow_acc * std::pow(10.0, uit->second.logp);
        }
        const std::string ctx_key = join(context, lo, context.size());
        const auto cit = tables[k - 2].find(ctx_key);
        if (cit != tables[k - 2].end())
            bow_acc *= std::pow(10.0, cit->second.logbow);
        ++lo;
    }
}

PerplexityResult perplexity(const KNModel& model, const std::vector<std::string>& texts) {
    PerplexityResult r;
    for (const auto& t : texts) {
        auto toks = split_ws(t);
        if (toks.empty()) continue;
        std::vector<std::string> hist;
        for (int i = 0; i + 1 < model.order; ++i) hist.emplace_back(kBos);
        toks.emplace_back(kEos);
        for (auto& tok : toks) {
            if (!model.in_vocab(tok)) {
                tok = kUnk;
                ++r.oov;
            }
            r.log10_sum += std::log10(model.prob(hist, tok));
            ++r.tokens;
            hist.push_back(tok);
        }
    }
    if (r.tokens == 0) throw ValidationError("perplexity: empty text");
    r.perplexity = std::pow(10.0, -r.log10_sum / static_cast<double>(r.tokens));
    return r;
}

namespace {

std::string fmt7(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.7g", v);
    return buf;
}

}  // namespace

void export_arpa(const KNModel& model, const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << "\\data\\\n";
    for (int k = 1; k <= model.order; ++k)
        out << "ngram " << k << "=" << model.tables[static_cast<size_t>(k) - 1].size()
            << "\n";
    for (int k = 1; k <= model.order; ++k) {
        out << "\n\\" << k << "-grams:\n";
        for (const auto& [key, e] : model.tables[static_cast<size_t>(k) - 1]) {
            out << fmt7(e.logp) << '\t' << key;
            if (k < model.order) out << '\t' << fmt7(e.logbow);
            out << '\n';
        }
    }
    out << "\n\\end\\\n";
}

KNModel import_arpa(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    auto fail = [&](size_t i, const std::string& why) -> void {
        throw DataError(path + ":" + std::to_string(i + 1) + ": " + why);
    };

    size_t i = 0;
    while (i < lines.size() && lines[i].empty()) ++i;
    if (i >= lines.size() || lines[i] != "\\data\\") fail(i < lines.size() ? i : 0, "expected \\data\\");
    ++i;

    std::vector<size_t> declared;
    while (i < lines.size() && lines[i].rfind("ngram ", 0) == 0) {
        const auto eq = lines[i].find('=');
        if (eq == std::string::npos) fail(i, "malformed ngram count");
        int k = 0;
        size_t n = 0;
        try {
            k = std::stoi(lines[i].substr(6, eq - 6));
            n = std::stoul(lines[i].substr(eq + 1));
        } catch (const std::exception&) {
            fail(i, "malformed ngram count");
        }
        if (k != static_cast<int>(declared.size()) + 1) fail(i, "ngram orders out of sequence");
        declared.push_back(n);
        ++i;
    }
    if (declared.empty()) fail(i, "no ngram counts declared");

    KNModel m;
    m.order = static_cast<int>(declared.size());
    m.tables.resize(declared.size());

    for (int k = 1; k <= m.order; ++k) {
        while (i < lines.size() && lines[i].empty()) ++i;
        const std::string header = "\\" + std::to_string(k) + "-grams:";
        if (i >= lines.size() || lines[i] != header) fail(i < lines.size() ? i : 0, "expected " + header);
        ++i;
        auto& tbl = m.tables[static_cast<size_t>(k) - 1];
        while (i < lines.size() && !lines[i].empty() && lines[i][0] != '\\') {
            std::istringstream ls(lines[i]);
            std::vector<std::string> f;
            std::string tok;
            while (ls >> tok) f.push_back(tok);
            if (f.size() != static_cast<size_t>(k) + 1 && f.size() != static_cast<size_t>(k) + 2)
                fail(i, "expected log10 prob, " + std::to_string(k) + " tokens, optional backoff");
            KNModel::Entry e;
            try {
                e.logp = std::stod(f[0]);
                if (f.size() == static_cast<size_t>(k) + 2) e.logbow = std::stod(f.back());
            } catch (const std::exception&) {
                fail(i, "bad numeric field");
            }
            std::string key = f[1];
            for (size_t j = 2; j <= static_cast<size_t>(k); ++j) key += " " + f[j];
            if (tbl.count(key)) fail(i, "duplicate entry " + key);
            tbl[key] = e;
            ++i;
        }
        if (tbl.size() != declared[static_cast<size_t>(k) - 1])
            fail(i == 0 ? 0 : i - 1, "order " + std::to_string(k) + " has " +
                                         std::to_string(tbl.size()) + " entries, header declares " +
                                         std::to_string(declared[static_cast<size_t>(k) - 1]));
    }
    while (i < lines.size() && lines[i].empty()) ++i;
    if (i >= lines.size() || lines[i] != "\\end\\") fail(i < lines.size() ? i : lines.size() - 1, "expected \\end\\");

    std::set<std::string> vocab_set;
    for (const auto& [key, e] : m.tables[0]) {
        (void)e;
        vocab_set.insert(key);
    }
    m.vocab.assign(vocab_set.begin(), vocab_set.end());
    return m;
}

}  // namespace qawa
