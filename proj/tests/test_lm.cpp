#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "qawa/error.hpp"
#include "qawa/lm.hpp"
#include "qawa/rng.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace qawa;
using testutil::KnOracle;
using testutil::TmpDir;
using testutil::contains;
using testutil::error_message;

namespace {

size_t count_unk(const std::vector<std::string>& texts) {
    size_t n = 0;
    for (const auto& t : texts) {
        size_t pos = 0;
        while ((pos = t.find("<unk>", pos)) != std::string::npos) {
            ++n;
            pos += 5;
        }
    }
    return n;
}

KNModel fit(const std::vector<std::string>& texts, int order, double k = 0.0,
            uint64_t seed = 0) {
    LmConfig cfg;
    cfg.order = order;
    cfg.pruning_k = k;
    cfg.seed = seed;
    const auto pruned = apply_singleton_pruning(texts, cfg);
    return estimate_modified_kn(count_ngrams(pruned, order), cfg);
}

// Compares the table-driven model against the independent estimator on
// every observed context and every vocabulary word.
void check_against_oracle(const std::vector<std::string>& texts, int order) {
    const KNModel model = fit(texts, order);
    const KnOracle oracle(texts, order);
    for (const auto& ctx : oracle.contexts()) {
        double sum = 0.0;
        for (const auto& w : oracle.vocab()) {
            if (w == kBos) continue;
            const double got = model.prob(ctx, w);
            const double want = oracle.cond(ctx, w);
            if (std::abs(got - want) > 1e-9 * std::max(1.0, std::abs(want))) {
                CAPTURE(order);
                CAPTURE(w);
                FAIL_CHECK("probability mismatch: got ", got, " want ", want);
            }
            sum += got;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

}  // namespace

TEST_CASE("singleton pruning leaves text alone at zero strength") {
    LmConfig cfg;
    cfg.pruning_k = 0.0;
    const std::vector<std::string> texts = {"qayna punchay", "kunan tuta"};
    CHECK(apply_singleton_pruning(texts, cfg) == texts);
}

TEST_CASE("singleton pruning at full strength replaces every hapax") {
    LmConfig cfg;
    cfg.pruning_k = 1.0;
    const auto out = apply_singleton_pruning({"a b a", "c d"}, cfg);
    CHECK(out == std::vector<std::string>{"a <unk> a", "<unk> <unk>"});
}

TEST_CASE("singleton pruning replaces the rounded-down fraction deterministically") {
    std::vector<std::string> texts;
    for (int s = 0; s < 10; ++s) {
        std::string line;
        for (int w = 0; w < 10; ++w) {
            if (w) line += ' ';
            line += "w" + std::to_string(s * 10 + w);
        }
        texts.push_back(line);
    }
    LmConfig cfg;
    cfg.pruning_k = 0.04;
    cfg.seed = 9;
    const auto out = apply_singleton_pruning(texts, cfg);
    CHECK(count_unk(out) == 4);
    CHECK(apply_singleton_pruning(texts, cfg) == out);

    cfg.seed = 10;
    const auto other = apply_singleton_pruning(texts, cfg);
    CHECK(count_unk(other) == 4);
    CHECK(other != out);
}

TEST_CASE("singleton pruning replacement count is floor of k times hapax types") {
    Rng rng(606);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::string> texts;
        std::map<std::string, int> freq;
        const size_t n_sent = 1 + rng.below(8);
        for (size_t s = 0; s < n_sent; ++s) {
            std::string line;
            const size_t len = 1 + rng.below(9);
            for (size_t w = 0; w < len; ++w) {
                const std::string tok = "t" + std::to_string(rng.below(30));
                if (w) line += ' ';
                line += tok;
                ++freq[tok];
            }
            texts.push_back(line);
        }
        size_t hapax = 0;
        for (const auto& [tok, c] : freq)
            if (c == 1) ++hapax;
        LmConfig cfg;
        cfg.pruning_k = 0.3;
        cfg.seed = trial;
        const auto out = apply_singleton_pruning(texts, cfg);
        CHECK(count_unk(out) == static_cast<size_t>(0.3 * static_cast<double>(hapax)));
    }
}

TEST_CASE("singleton pruning validates its strength") {
    LmConfig cfg;
    cfg.pruning_k = -0.1;
    CHECK_THROWS_AS(apply_singleton_pruning({"a"}, cfg), ValidationError);
    cfg.pruning_k = 1.5;
    CHECK_THROWS_AS(apply_singleton_pruning({"a"}, cfg), ValidationError);
}

TEST_CASE("ngram counting pads sentence boundaries") {
    const NGramCounts c = count_ngrams({"a b"}, 2);
    CHECK(c.sentences == 1);
    CHECK(c.raw[0].at("<s>") == 1);
    CHECK(c.raw[0].at("a") == 1);
    CHECK(c.raw[0].at("b") == 1);
    CHECK(c.raw[0].at("</s>") == 1);
    CHECK(c.raw[1].at("<s> a") == 1);
    CHECK(c.raw[1].at("a b") == 1);
    CHECK(c.raw[1].at("b </s>") == 1);
    CHECK(c.raw[1].size() == 3);
}

TEST_CASE("ngram counting sees repeated windows") {
    const NGramCounts c = count_ngrams({"a a a"}, 2);
    CHECK(c.raw[1].at("a a") == 2);
    CHECK(c.raw[0].at("a") == 3);
}

TEST_CASE("ngram continuation counts are distinct-predecessor counts") {
    const NGramCounts c = count_ngrams({"a b", "c b"}, 2);
    CHECK(c.cont[0].at("b") == 2);
    CHECK(c.cont[0].at("</s>") == 1);  // only b precedes </s>
}

TEST_CASE("ngram counting of nothing") {
    const NGramCounts c = count_ngrams({}, 3);
    CHECK(c.sentences == 0);
    for (const auto& t : c.raw) CHECK(t.empty());
    LmConfig cfg;
    cfg.order = 3;
    CHECK_THROWS_AS(estimate_modified_kn(c, cfg), ValidationError);
}

TEST_CASE("bigram model on a tiny corpus matches hand-worked values") {
    const KNModel m = fit({"a a a"}, 2);

    // Unigram level: continuation counts a:2, </s>:1; flat 0.75 discount;
    // gamma("") = 0.5; three event-bearing words.
    CHECK(m.prob({}, "a") == doctest::Approx(7.0 / 12.0).epsilon(1e-12));
    CHECK(m.prob({}, "</s>") == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m.prob({}, "<unk>") == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

    // Bigram level.
    CHECK(m.prob({"<s>"}, "a") == doctest::Approx(0.25 + 0.75 * 7.0 / 12.0).epsilon(1e-12));
    CHECK(m.prob({"a"}, "a") ==
          doctest::Approx((2.0 - 0.75) / 3.0 + 0.5 * 7.0 / 12.0).epsilon(1e-12));
    CHECK(m.prob({"a"}, "</s>") ==
          doctest::Approx(0.25 / 3.0 + 0.5 * 0.25).epsilon(1e-12));

    // Unseen bigram backs off through the context weight.
    CHECK(m.prob({"a"}, "<unk>") == doctest::Approx(0.5 / 6.0).epsilon(1e-12));

    // Each conditional distribution sums to one over the closed vocabulary.
    for (const std::vector<std::string> ctx :
         {std::vector<std::string>{}, {"<s>"}, {"a"}, {"</s>"}, {"never", "seen"}}) {
        const double sum = m.prob(ctx, "a") + m.prob(ctx, "</s>") + m.prob(ctx, "<unk>");
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("model agrees with the independent estimator") {
    check_against_oracle({"a a a"}, 2);
    check_against_oracle({"a b a c", "a b", "c c b a"}, 3);
    check_against_oracle({"qayna punchay qusqu risaq", "kunan tuta risaq",
                          "qayna tuta qusqu", "punchay risaq"},
                         4);
    // Heavier counts so all three discount tiers are exercised.
    std::vector<std::string> bulk;
    Rng rng(321);
    const char* words[] = {"a", "b", "c", "d", "e"};
    for (int s = 0; s < 40; ++s) {
        std::string line;
        const size_t len = 1 + rng.below(7);
        for (size_t w = 0; w < len; ++w) {
            if (w) line += ' ';
            line += words[rng.below(5)];
        }
        bulk.push_back(line);
    }
    check_against_oracle(bulk, 3);

    // Doubling the corpus rescales the counts; probabilities must still
    // match an estimator run on the doubled text.
    std::vector<std::string> doubled = bulk;
    doubled.insert(doubled.end(), bulk.begin(), bulk.end());
    check_against_oracle(doubled, 3);
}

TEST_CASE("unseen contexts still yield positive mass") {
    const KNModel m = fit({"qayna punchay qusqu", "kunan tuta"}, 3);
    CHECK(m.prob({"tuta", "qusqu"}, "kunan") > 0.0);
    CHECK(m.prob({"qusqu", "qusqu"}, "<unk>") > 0.0);
    // Context longer than order-1 is truncated from the left.
    CHECK(m.prob({"x", "qayna", "punchay"}, "qusqu") ==
          doctest::Approx(m.prob({"qayna", "punchay"}, "qusqu")));
}

TEST_CASE("perplexity of a hand-built uniform model is the type count") {
    KNModel m;
    m.order = 1;
    m.tables.resize(1);
    const std::vector<std::string> words = {"</s>", "<unk>", "a", "b", "c",
                                            "d",    "e",     "f", "g"};
    for (const auto& w : words) {
        m.vocab.push_back(w);
        m.tables[0][w] = {std::log10(1.0 / 9.0), 0.0};
    }
    const PerplexityResult r = perplexity(m, {"a b c d e f g", "g f e"});
    CHECK(r.tokens == 12);
    CHECK(r.oov == 0);
    CHECK(r.perplexity == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("perplexity matches the closed form on the training sentence") {
    const KNModel m = fit({"a a a"}, 1);
    const PerplexityResult r = perplexity(m, {"a a a"});
    CHECK(r.tokens == 4);
    const double expect = std::pow(0.6875 * 0.6875 * 0.6875 * 0.1875, -0.25);
    CHECK(r.perplexity == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("perplexity maps out-of-vocabulary words to unk") {
    const KNModel m = fit({"a b"}, 2);
    const PerplexityResult r = perplexity(m, {"a z"});
    CHECK(r.tokens == 3);
    CHECK(r.oov == 1);
    CHECK(r.perplexity > 1.0);
}

TEST_CASE("perplexity of nothing is an error") {
    const KNModel m = fit({"a b"}, 2);
    CHECK_THROWS_AS(perplexity(m, {}), ValidationError);
    CHECK_THROWS_AS(perplexity(m, {"", "  "}), ValidationError);
}

TEST_CASE("adding held-out text to training lowers its perplexity") {
    const std::vector<std::string> base = {"qayna punchay qusqu risaq",
                                           "kunan tuta risaq", "qusqu tuta"};
    const std::vector<std::string> held = {"paqarin qusqu risaq", "qayna tuta"};
    const KNModel before = fit(base, 3);
    std::vector<std::string> grown = base;
    grown.insert(grown.end(), held.begin(), held.end());
    const KNModel after = fit(grown, 3);
    CHECK(perplexity(after, held).perplexity < perplexity(before, held).perplexity);
}

TEST_CASE("arpa export and import preserve the model") {
    TmpDir tmp;
    const std::vector<std::string> texts = {"qayna punchay qusqu risaq",
                                            "kunan tuta risaq", "qayna tuta qusqu",
                                            "punchay risaq", "qusqu qusqu tuta"};
    const KNModel m = fit(texts, 3);
    export_arpa(m, tmp.file("m.arpa"));
    const KNModel r = import_arpa(tmp.file("m.arpa"));

    REQUIRE(r.order == m.order);
    REQUIRE(r.tables.size() == m.tables.size());
    for (size_t k = 0; k < m.tables.size(); ++k) {
        REQUIRE(r.tables[k].size() == m.tables[k].size());
        for (const auto& [key, e] : m.tables[k]) {
            const auto it = r.tables[k].find(key);
            REQUIRE(it != r.tables[k].end());
            CHECK(std::abs(it->second.logp - e.logp) < 1e-4);
            CHECK(std::abs(it->second.logbow - e.logbow) < 1e-4);
        }
    }

    const auto p1 = perplexity(m, texts);
    const auto p2 = perplexity(r, texts);
    CHECK(std::abs(p1.perplexity - p2.perplexity) / p1.perplexity < 1e-3);

    // A second export of the re-imported model is byte-stable.
    export_arpa(r, tmp.file("m2.arpa"));
    const KNModel r2 = import_arpa(tmp.file("m2.arpa"));
    export_arpa(r2, tmp.file("m3.arpa"));
    CHECK(testutil::read_file(tmp.file("m2.arpa")) ==
          testutil::read_file(tmp.file("m3.arpa")));
}

TEST_CASE("arpa import verifies declared counts") {
    TmpDir tmp;
    testutil::write_file(tmp.file("bad.arpa"),
                         "\\data\\\n"
                         "ngram 1=3\n"
                         "\n"
                         "\\1-grams:\n"
                         "-0.5\t</s>\n"
                         "-0.5\t<unk>\n"
                         "\n"
                         "\\end\\\n");
    const auto msg =
        error_message<DataError>([&] { import_arpa(tmp.file("bad.arpa")); });
    CHECK(contains(msg, "declares"));
}

TEST_CASE("arpa import rejects files without a data header") {
    TmpDir tmp;
    testutil::write_file(tmp.file("junk.arpa"), "this is not an arpa file\n");
    CHECK_THROWS_AS(import_arpa(tmp.file("junk.arpa")), DataError);
    CHECK_THROWS_AS(import_arpa("/nonexistent/m.arpa"), DataError);
}

TEST_CASE("arpa import reads a minimal handwritten file") {
    TmpDir tmp;
    testutil::write_file(tmp.file("mini.arpa"),
                         "\\data\\\n"
                         "ngram 1=3\n"
                         "ngram 2=1\n"
                         "\n"
                         "\\1-grams:\n"
                         "-0.4771213\ta\t-0.1760913\n"
                         "-0.4771213\t</s>\t0\n"
                         "-0.4771213\t<unk>\t0\n"
                         "\n"
                         "\\2-grams:\n"
                         "-0.3010300\ta </s>\n"
                         "\n"
                         "\\end\\\n");
    const KNModel m = import_arpa(tmp.file("mini.arpa"));
    CHECK(m.order == 2);
    CHECK(m.tables[0].at("a").logp == doctest::Approx(-0.4771213));
    CHECK(m.tables[0].at("a").logbow == doctest::Approx(-0.1760913));
    CHECK(m.tables[1].at("a </s>").logp == doctest::Approx(-0.3010300));
    CHECK(m.prob({"a"}, "</s>") == doctest::Approx(std::pow(10.0, -0.3010300)));
}

TEST_CASE("exported bigram model matches the frozen reference file") {
    TmpDir tmp;
    const KNModel m = fit({"a a a"}, 2);
    export_arpa(m, tmp.file("aaa.arpa"));
    const std::string got = testutil::read_file(tmp.file("aaa.arpa"));
    const std::string want = testutil::read_file(testutil::golden_dir() + "/aaa.arpa");
    CHECK(got == want);
}
