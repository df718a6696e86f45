#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "qawa/corpus.hpp"
#include "qawa/error.hpp"
#include "support/helpers.hpp"

using namespace qawa;
using testutil::TmpDir;
using testutil::contains;
using testutil::error_message;
using testutil::read_file;
using testutil::write_file;

namespace {

std::string record(const std::string& id, const std::string& text,
                   const std::string& speaker = "s1", double dur = 1.0,
                   const std::string& dialect = "chanka",
                   const std::string& gender = "f") {
    return "{\"id\":\"" + id + "\",\"audio\":\"" + id + ".wav\",\"text\":\"" + text +
           "\",\"speaker\":\"" + speaker + "\",\"dialect\":\"" + dialect +
           "\",\"gender\":\"" + gender +
           "\",\"duration_s\":" + std::to_string(dur) + "}";
}

Manifest synthetic_manifest(size_t n) {
    Manifest m;
    for (size_t i = 0; i < n; ++i) {
        Utterance u;
        u.id = "u" + std::to_string(i);
        u.audio_ref = u.id + ".wav";
        u.transcript = "tok" + std::to_string(i);
        u.speaker_id = "spk" + std::to_string(i % 7);
        u.duration_s = 2.0;
        m.utterances.push_back(u);
    }
    return m;
}

std::vector<std::string> ids_of(const Manifest& m) {
    std::vector<std::string> out;
    for (const auto& u : m.utterances) out.push_back(u.id);
    return out;
}

}  // namespace

TEST_CASE("manifest loads records in file order") {
    TmpDir tmp;
    write_file(tmp.file("m.jsonl"), record("u1", "qayna punchay") + "\n" +
                                        record("u2", "kunan tuta") + "\n" +
                                        record("u3", "paqarin") + "\n");
    Manifest m = load_manifest(tmp.file("m.jsonl"));
    REQUIRE(m.size() == 3);
    CHECK(m.utterances[0].id == "u1");
    CHECK(m.utterances[1].id == "u2");
    CHECK(m.utterances[2].id == "u3");
    CHECK(m.utterances[0].transcript == "qayna punchay");
    CHECK(m.utterances[0].audio_ref == "u1.wav");
    CHECK(m.utterances[0].dialect == Dialect::Chanka);
    CHECK(m.utterances[0].gender == Gender::F);
    CHECK(m.utterances[0].duration_s == doctest::Approx(1.0));
}

TEST_CASE("manifest duplicate id names both lines") {
    TmpDir tmp;
    write_file(tmp.file("m.jsonl"), record("u1", "a") + "\n" + record("u2", "b") + "\n" +
                                        record("u3", "c") + "\n" + record("u1", "d") +
                                        "\n");
    const auto msg =
        error_message<DataError>([&] { load_manifest(tmp.file("m.jsonl")); });
    CHECK(contains(msg, "u1"));
    CHECK(contains(msg, "lines 1 and 4"));
}

TEST_CASE("manifest empty file gives an empty corpus") {
    TmpDir tmp;
    write_file(tmp.file("m.jsonl"), "");
    CHECK(load_manifest(tmp.file("m.jsonl")).size() == 0);
}

TEST_CASE("manifest malformed json names the line") {
    TmpDir tmp;
    write_file(tmp.file("m.jsonl"), record("u1", "a") + "\n{oops\n");
    const auto msg =
        error_message<DataError>([&] { load_manifest(tmp.file("m.jsonl")); });
    CHECK(contains(msg, "line 2"));
}

TEST_CASE("manifest rejects negative duration") {
    TmpDir tmp;
    write_file(tmp.file("m.jsonl"), record("u1", "a", "s1", -0.5) + "\n");
    CHECK_THROWS_AS(load_manifest(tmp.file("m.jsonl")), DataError);
}

TEST_CASE("manifest missing file is a validation error") {
    CHECK_THROWS_AS(load_manifest("/nonexistent/m.jsonl"), ValidationError);
}

TEST_CASE("manifest round trip preserves unknown fields") {
    TmpDir tmp;
    write_file(tmp.file("m.jsonl"),
               "{\"id\":\"u1\",\"audio\":\"u1.wav\",\"text\":\"kan\",\"speaker\":\"s1\","
               "\"dialect\":\"collao\",\"gender\":\"m\",\"duration_s\":2.5,"
               "\"note\":\"field trip\",\"take\":3}\n");
    Manifest m = load_manifest(tmp.file("m.jsonl"));
    REQUIRE(m.size() == 1);
    REQUIRE(m.utterances[0].extra.size() == 2);
    CHECK(m.utterances[0].extra[0].first == "note");

    save_manifest(m, tmp.file("out.jsonl"));
    Manifest m2 = load_manifest(tmp.file("out.jsonl"));
    REQUIRE(m2.size() == 1);
    CHECK(m2.utterances[0].id == "u1");
    CHECK(m2.utterances[0].duration_s == doctest::Approx(2.5));
    CHECK(m2.utterances[0].extra == m.utterances[0].extra);

    // A second save is byte-identical.
    save_manifest(m2, tmp.file("out2.jsonl"));
    CHECK(read_file(tmp.file("out.jsonl")) == read_file(tmp.file("out2.jsonl")));
}

TEST_CASE("audio paths resolve relative to the manifest") {
    CHECK(resolve_audio_path("/data/corpus/m.jsonl", "wav/u1.wav") ==
          "/data/corpus/wav/u1.wav");
    CHECK(resolve_audio_path("/data/corpus/m.jsonl", "/abs/u1.wav") == "/abs/u1.wav");
    CHECK(resolve_audio_path("m.jsonl", "u1.wav") == "u1.wav");
}

TEST_CASE("normalize lowercases and canonicalizes apostrophes") {
    NormalizationRules r = NormalizationRules::defaults();
    CHECK(normalize_text("Qichwa Siminchik KAN", r) == "qichwa siminchik kan");
    CHECK(normalize_text("p’unchay", r) == "p'unchay");
    CHECK(normalize_text("pʼunchay", r) == "p'unchay");
    CHECK(normalize_text("", r) == "");
}

TEST_CASE("normalize strips punctuation and collapses whitespace") {
    NormalizationRules r = NormalizationRules::defaults();
    CHECK(normalize_text("¿Kunan?", r) == "kunan");
    CHECK(normalize_text("  qayna   p'unchay  ", r) == "qayna p'unchay");
    CHECK(normalize_text("wasi,\twasi.", r) == "wasi wasi");
    CHECK(normalize_text("¡Allinmi!", r) == "allinmi");
}

TEST_CASE("normalize applies replacement table after folding") {
    NormalizationRules r = NormalizationRules::defaults();
    r.replacements.emplace_back("hucha", "ucha");
    CHECK(normalize_text("HUCHA", r) == "ucha");
}

TEST_CASE("normalize is idempotent under the shipped rules") {
    NormalizationRules r = load_rules(testutil::data_dir() + "/normalize.rules");
    const std::string samples[] = {
        "Qayna p'unchay Qusqupim wawqiykunata watukurqani.",
        "¿Kunan tuta mikhunki?", "  PAQARIN   tutamanta  ",
        "lunes p’unchaypi", "«kay» wasi…"};
    for (const auto& s : samples) {
        const std::string once = normalize_text(s, r);
        CHECK(normalize_text(once, r) == once);
    }
}

TEST_CASE("rules file parses directives and replacement lines") {
    TmpDir tmp;
    write_file(tmp.file("r.rules"),
               "# comment\n"
               "lowercase=true\n"
               "apostrophe='\n"
               "strip_punct=.,?\n"
               "foo\tbar\n");
    NormalizationRules r = load_rules(tmp.file("r.rules"));
    CHECK(r.lowercase);
    CHECK(r.canonical_apostrophe == '\'');
    CHECK(r.strip_punct.size() == 3);
    REQUIRE(r.replacements.size() == 1);
    CHECK(r.replacements[0].first == "foo");
    CHECK(normalize_text("FOO?", r) == "bar");
}

TEST_CASE("rules file rejects junk") {
    TmpDir tmp;
    write_file(tmp.file("r.rules"), "lowercase=true\nnotadirective\n");
    CHECK_THROWS_AS(load_rules(tmp.file("r.rules")), DataError);
    CHECK_THROWS_AS(load_rules("/nonexistent/r.rules"), ValidationError);
}

TEST_CASE("shipped rules load") {
    NormalizationRules r = load_rules(testutil::data_dir() + "/normalize.rules");
    CHECK(r.lowercase);
    CHECK(r.canonical_apostrophe == '\'');
    CHECK(!r.strip_punct.empty());
}

TEST_CASE("split sizes follow the rounded fractions") {
    {
        CorpusSplit s = split_corpus(synthetic_manifest(10), {0.8, 0.1, 0.1}, 7);
        CHECK(s.train.size() == 8);
        CHECK(s.dev.size() == 1);
        CHECK(s.test.size() == 1);
    }
    {
        // dev = round(124*0.104) = 13, test = round(124*0.096) = 12,
        // train takes the remainder.
        CorpusSplit s = split_corpus(synthetic_manifest(124), {0.8, 0.104, 0.096}, 7);
        CHECK(s.train.size() == 99);
        CHECK(s.dev.size() == 13);
        CHECK(s.test.size() == 12);
    }
    {
        CorpusSplit s = split_corpus(synthetic_manifest(5), {1.0, 0.0, 0.0}, 7);
        CHECK(s.train.size() == 5);
        CHECK(s.dev.size() == 0);
        CHECK(s.test.size() == 0);
    }
}

TEST_CASE("split rejects bad fractions") {
    CHECK_THROWS_AS(split_corpus(synthetic_manifest(4), {0.5, 0.2, 0.2}, 1),
                    ValidationError);
    CHECK_THROWS_AS(split_corpus(synthetic_manifest(4), {0.9, 0.2, -0.1}, 1),
                    ValidationError);
}

TEST_CASE("split is a deterministic partition preserving input order") {
    for (size_t n : {0u, 1u, 5u, 37u, 240u}) {
        Manifest m = synthetic_manifest(n);
        CorpusSplit s1 = split_corpus(m, {0.8, 0.1, 0.1}, 99);
        CorpusSplit s2 = split_corpus(m, {0.8, 0.1, 0.1}, 99);
        CHECK(ids_of(s1.train) == ids_of(s2.train));
        CHECK(ids_of(s1.dev) == ids_of(s2.dev));
        CHECK(ids_of(s1.test) == ids_of(s2.test));

        std::vector<std::string> all = ids_of(s1.train);
        const auto dev = ids_of(s1.dev), test = ids_of(s1.test);
        all.insert(all.end(), dev.begin(), dev.end());
        all.insert(all.end(), test.begin(), test.end());
        CHECK(all.size() == n);
        std::set<std::string> uniq(all.begin(), all.end());
        CHECK(uniq.size() == n);

        // Relative input order survives inside each output.
        for (const auto* part : {&s1.train, &s1.dev, &s1.test}) {
            std::vector<std::string> got = ids_of(*part);
            std::vector<std::string> sorted = got;
            std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
                return std::stoi(a.substr(1)) < std::stoi(b.substr(1));
            });
            CHECK(got == sorted);
        }
    }
}

TEST_CASE("split output differs across seeds") {
    Manifest m = synthetic_manifest(60);
    CorpusSplit a = split_corpus(m, {0.8, 0.1, 0.1}, 1);
    CorpusSplit b = split_corpus(m, {0.8, 0.1, 0.1}, 2);
    CHECK(ids_of(a.dev) != ids_of(b.dev));
}

TEST_CASE("speaker split keeps speakers disjoint") {
    Manifest m = synthetic_manifest(100);
    CorpusSplit s = split_corpus_by_speaker(m, {0.8, 0.1, 0.1}, 5);
    auto speakers = [](const Manifest& part) {
        std::set<std::string> out;
        for (const auto& u : part.utterances) out.insert(u.speaker_id);
        return out;
    };
    const auto tr = speakers(s.train), dv = speakers(s.dev), te = speakers(s.test);
    for (const auto& sp : dv) CHECK(tr.count(sp) == 0);
    for (const auto& sp : te) CHECK(tr.count(sp) == 0);
    for (const auto& sp : te) CHECK(dv.count(sp) == 0);
    CHECK(s.train.size() + s.dev.size() + s.test.size() == 100);
    CHECK(s.train.size() > s.dev.size());
}

TEST_CASE("corpus stats aggregate speakers and hours per cell") {
    Manifest m;
    auto add = [&](const std::string& spk, Dialect d, Gender g, double dur) {
        Utterance u;
        u.id = "u" + std::to_string(m.size());
        u.speaker_id = spk;
        u.dialect = d;
        u.gender = g;
        u.duration_s = dur;
        m.utterances.push_back(u);
    };
    add("a", Dialect::Chanka, Gender::F, 3600.0);
    add("a", Dialect::Chanka, Gender::F, 1800.0);
    add("b", Dialect::Chanka, Gender::F, 600.0);
    add("c", Dialect::Collao, Gender::M, 7200.0);

    CorpusStats s = corpus_stats(m);
    CHECK(s.cells[0][0].speakers == 2);
    CHECK(s.cells[0][0].hours == doctest::Approx((3600.0 + 1800.0 + 600.0) / 3600.0));
    CHECK(s.cells[1][1].speakers == 1);
    CHECK(s.cells[1][1].hours == doctest::Approx(2.0));
    CHECK(s.cells[2][2].speakers == 0);
    CHECK(s.total.speakers == 3);
    CHECK(s.total.hours == doctest::Approx(13200.0 / 3600.0));
    CHECK(m.total_hours() == doctest::Approx(13200.0 / 3600.0));

    const std::string table = render_stats(s);
    CHECK(contains(table, "chanka"));
    CHECK(contains(table, "collao"));
    CHECK(contains(table, "total"));
    CHECK(contains(table, "1.67"));  // chanka/f hours
    CHECK(contains(table, "2.00"));
    CHECK(contains(table, "3.67"));
}

TEST_CASE("corpus stats of an empty manifest are zero") {
    CorpusStats s = corpus_stats(Manifest{});
    CHECK(s.total.speakers == 0);
    CHECK(s.total.hours == doctest::Approx(0.0));
    CHECK(contains(render_stats(s), "total"));
}

TEST_CASE("dialect and gender parse round trip") {
    CHECK(parse_dialect("chanka") == Dialect::Chanka);
    CHECK(parse_dialect("collao") == Dialect::Collao);
    CHECK(parse_dialect("somethingelse") == Dialect::Unknown);
    CHECK(to_string(Dialect::Chanka) == "chanka");
    CHECK(parse_gender("f") == Gender::F);
    CHECK(parse_gender("m") == Gender::M);
    CHECK(parse_gender("") == Gender::Unknown);
    CHECK(to_string(Gender::M) == "m");
}
