#include "qawa/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qawa/error.hpp"
#include "qawa/rng.hpp"
#include "qawa/utf8.hpp"

namespace qawa {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string to_string(Dialect d) {
    switch (d) {
        case Dialect::Chanka: return "chanka";
        case Dialect::Collao: return "collao";
        default: return "unknown";
    }
}

std::string to_string(Gender g) {
    switch (g) {
        case Gender::F: return "f";
        case Gender::M: return "m";
        default: return "unknown";
    }
}

Dialect parse_dialect(const std::string& s) {
    std::string t;
    for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "chanka" || t == "chanca") return Dialect::Chanka;
    if (t == "collao") return Dialect::Collao;
    return Dialect::Unknown;
}

Gender parse_gender(const std::string& s) {
    std::string t;
    for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "f" || t == "female") return Gender::F;
    if (t == "m" || t == "male") return Gender::M;
    return Gender::Unknown;
}

double Manifest::total_hours() const {
    double s = 0.0;
    for (const auto& u : utterances) s += u.duration_s;
    return s / 3600.0;
}

namespace {

const char* kKnownFields[] = {"id",      "audio",   "text",      "speaker",
                              "dialect", "gender",  "duration_s"};

bool is_known_field(const std::string& key) {
    for (const char* f : kKnownFields)
        if (key == f) return true;
    return false;
}

Utterance parse_record(const json& j, size_t lineno) {
    auto fail = [lineno](const std::string& what) -> DataError {
        return DataError("manifest line " + std::to_string(lineno) + ": " + what);
    };
    if (!j.is_object()) throw fail("record is not an object");
    Utterance u;
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
        throw fail("missing or empty 'id'");
    if (!j.contains("text") || !j["text"].is_string())
        throw fail("missing 'text'");
    u.id = j["id"].get<std::string>();
    u.transcript = j["text"].get<std::string>();
    if (j.contains("audio")) {
        if (!j["audio"].is_string()) throw fail("'audio' must be a string");
        u.audio_ref = j["audio"].get<std::string>();
    }
    if (j.contains("speaker")) {
        if (!j["speaker"].is_string()) throw fail("'speaker' must be a string");
        u.speaker_id = j["speaker"].get<std::string>();
    }
    if (j.contains("dialect")) {
        if (!j["dialect"].is_string()) throw fail("'dialect' must be a string");
        u.dialect = parse_dialect(j["dialect"].get<std::string>());
    }
    if (j.contains("gender")) {
        if (!j["gender"].is_string()) throw fail("'gender' must be a string");
        u.gender = parse_gender(j["gender"].get<std::string>());
    }
    if (j.contains("duration_s")) {
        if (!j["duration_s"].is_number()) throw fail("'duration_s' must be a number");
        u.duration_s = j["duration_s"].get<double>();
        if (u.duration_s < 0) throw fail("'duration_s' is negative");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!is_known_field(it.key())) u.extra.emplace_back(it.key(), it.value().dump());
    }
    return u;
}

}  // namespace

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open manifest: " + path);
    Manifest m;
    std::map<std::string, size_t> seen;  // id -> first line
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError("manifest line " + std::to_string(lineno) + ": invalid JSON");
        Utterance u = parse_record(j, lineno);
        auto [it, inserted] = seen.emplace(u.id, lineno);
        if (!inserted)
            throw DataError("duplicate utterance id '" + u.id + "' at lines " +
                            std::to_string(it->second) + " and " + std::to_string(lineno));
        m.utterances.push_back(std::move(u));
    }
    return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write manifest: " + path);
    for (const auto& u : m.utterances) {
        json j;
        j["id"] = u.id;
        j["audio"] = u.audio_ref;
        j["text"] = u.transcript;
        j["speaker"] = u.speaker_id;
        j["dialect"] = to_string(u.dialect);
        j["gender"] = to_string(u.gender);
        j["duration_s"] = u.duration_s;
        for (const auto& [k, v] : u.extra) j[k] = json::parse(v);
        out << j.dump() << "\n";
    }
}

std::string resolve_audio_path(const std::string& manifest_path,
                               const std::string& audio_ref) {
    fs::path ref(audio_ref);
    if (ref.is_absolute()) return audio_ref;
    return (fs::path(manifest_path).parent_path() / ref).string();
}

NormalizationRules NormalizationRules::defaults() {
    NormalizationRules r;
    r.lowercase = true;
    r.canonical_apostrophe = '\'';
    for (uint32_t cp : {'.', ',', ';', ':', '!', '?', '"', '(', ')', '[', ']'})
        r.strip_punct.push_back(cp);
    for (uint32_t cp : {0xa1u, 0xbfu, 0xabu, 0xbbu, 0x201cu, 0x201du, 0x2026u})
        r.strip_punct.push_back(cp);
    return r;
}

NormalizationRules load_rules(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open rules file: " + path);
    NormalizationRules r;
    r.strip_punct.clear();
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab != std::string::npos) {
            std::string pat = line.substr(0, tab);
            if (pat.empty())
                throw DataError("rules line " + std::to_string(lineno) + ": empty pattern");
            r.replacements.emplace_back(pat, line.substr(tab + 1));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError("rules line " + std::to_string(lineno) +
                            ": expected 'pattern<TAB>replacement' or 'key=value'");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        if (key == "lowercase") {
            r.lowercase = (val == "true" || val == "1" || val == "yes");
        } else if (key == "apostrophe") {
            auto cps = utf8::decode(val);
            if (cps.size() != 1)
                throw DataError("rules line " + std::to_string(lineno) +
                                ": apostrophe must be a single character");
            r.canonical_apostrophe = cps[0];
        } else if (key == "strip_punct") {
            for (uint32_t cp : utf8::decode(val)) r.strip_punct.push_back(cp);
        } else {
            throw DataError("rules line " + std::to_string(lineno) + ": unknown directive '" +
                            key + "'");
        }
    }
    return r;
}

namespace {

void replace_all(std::string& s, const std::string& pat, const std::string& rep) {
    size_t pos = 0;
    while ((pos = s.find(pat, pos)) != std::string::npos) {
        s.replace(pos, pat.size(), rep);
        pos += rep.size();
    }
}

}  // namespace

std::string normalize_text(const std::string& raw, const NormalizationRules& rules) {
    // Case folding and apostrophe canonicalization first so the replacement
    // table only ever sees canonical lowercase text.
    auto cps = utf8::decode(raw);
    std::vector<uint32_t> filtered;
    filtered.reserve(cps.size());
    for (uint32_t cp : cps) {
        if (rules.lowercase) cp = utf8::to_lower(cp);
        if (utf8::is_apostrophe(cp)) cp = rules.canonical_apostrophe;
        if (std::find(rules.strip_punct.begin(), rules.strip_punct.end(), cp) !=
            rules.strip_punct.end())
            continue;
        filtered.push_back(cp);
    }
    std::string s = utf8::encode(filtered);
    for (const auto& [pat, rep] : rules.replacements) replace_all(s, pat, rep);

    // Collapse interior whitespace, trim the ends.
    auto out_cps = utf8::decode(s);
    std::vector<uint32_t> collapsed;
    bool pending_space = false;
    for (uint32_t cp : out_cps) {
        if (utf8::is_space(cp)) {
            pending_space = !collapsed.empty();
            continue;
        }
        if (pending_space) collapsed.push_back(' ');
        pending_space = false;
        collapsed.push_back(cp);
    }
    return utf8::encode(collapsed);
}

namespace {

void check_fractions(const SplitFractions& f) {
    if (f.train < 0 || f.dev < 0 || f.test < 0)
        throw ValidationError("split fractions must be nonnegative");
    if (std::abs(f.train + f.dev + f.test - 1.0) > 1e-9)
        throw ValidationError("split fractions must sum to 1");
}

Manifest take(const Manifest& m, std::vector<size_t> idx, Split tag) {
    std::sort(idx.begin(), idx.end());
    Manifest out;
    out.split = tag;
    out.utterances.reserve(idx.size());
    for (size_t i : idx) out.utterances.push_back(m.utterances[i]);
    return out;
}

}  // namespace

CorpusSplit split_corpus(const Manifest& m, const SplitFractions& f, uint64_t seed) {
    check_fractions(f);
    const size_t n = m.size();
    // Dev and test get the rounded fractions; train absorbs the remainder.
    size_t n_dev = static_cast<size_t>(std::llround(f.dev * static_cast<double>(n)));
    size_t n_test = static_cast<size_t>(std::llround(f.test * static_cast<double>(n)));
    if (n_dev + n_test > n) n_test = n - std::min(n_dev, n);

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng = Rng::derive(seed, 1);
    rng.shuffle(order);

    std::vector<size_t> dev(order.begin(), order.begin() + n_dev);
    std::vector<size_t> test(order.begin() + n_dev, order.begin() + n_dev + n_test);
    std::vector<size_t> train(order.begin() + n_dev + n_test, order.end());
    return {take(m, train, Split::Train), take(m, dev, Split::Dev),
            take(m, test, Split::Test)};
}

CorpusSplit split_corpus_by_speaker(const Manifest& m, const SplitFractions& f,
                                    uint64_t seed) {
    check_fractions(f);
    const size_t n = m.size();
    size_t n_dev = static_cast<size_t>(std::llround(f.dev * static_cast<double>(n)));
    size_t n_test = static_cast<size_t>(std::llround(f.test * static_cast<double>(n)));
    if (n_dev + n_test > n) n_test = n - std::min(n_dev, n);
    const size_t n_train = n - n_dev - n_test;

    std::vector<std::string> speakers;
    std::map<std::string, std::vector<size_t>> by_speaker;
    for (size_t i = 0; i < n; ++i) {
        const auto& sp = m.utterances[i].speaker_id;
        auto [it, inserted] = by_speaker.try_emplace(sp);
        if (inserted) speakers.push_back(sp);
        it->second.push_back(i);
    }
    Rng rng = Rng::derive(seed, 2);
    rng.shuffle(speakers);

    const double targets[3] = {static_cast<double>(n_train), static_cast<double>(n_dev),
                               static_cast<double>(n_test)};
    double assigned[3] = {0, 0, 0};
    std::vector<size_t> buckets[3];
    for (const auto& sp : speakers) {
        int best = 0;
        double best_deficit = targets[0] - assigned[0];
        for (int b = 1; b < 3; ++b) {
            double deficit = targets[b] - assigned[b];
            if (deficit > best_deficit) {
                best = b;
                best_deficit = deficit;
            }
        }
        for (size_t i : by_speaker[sp]) buckets[best].push_back(i);
        assigned[best] += static_cast<double>(by_speaker[sp].size());
    }
    return {take(m, buckets[0], Split::Train), take(m, buckets[1], Split::Dev),
            take(m, buckets[2], Split::Test)};
}

CorpusStats corpus_stats(const Manifest& m) {
    CorpusStats s;
    std::set<std::string> cell_speakers[3][3];
    for (const auto& u : m.utterances) {
        int d = static_cast<int>(u.dialect);
        int g = static_cast<int>(u.gender);
        cell_speakers[d][g].insert(u.speaker_id);
        s.cells[d][g].hours += u.duration_s / 3600.0;
    }
    for (int d = 0; d < 3; ++d) {
        for (int g = 0; g < 3; ++g) {
            s.cells[d][g].speakers = cell_speakers[d][g].size();
            // Totals are the sum over cells; a speaker spanning cells counts
            // once per cell.
            s.total.speakers += s.cells[d][g].speakers;
            s.total.hours += s.cells[d][g].hours;
        }
    }
    return s;
}

std::string render_stats(const CorpusStats& s) {
    static const char* dialects[] = {"chanka", "collao", "unknown"};
    static const char* genders[] = {"f", "m", "unknown"};
    std::ostringstream os;
    os << "dialect   gender    speakers  hours\n";
    char buf[96];
    for (int d = 0; d < 3; ++d) {
        for (int g = 0; g < 3; ++g) {
            const auto& c = s.cells[d][g];
            if (c.speakers == 0 && c.hours == 0.0) continue;
            std::snprintf(buf, sizeof(buf), "%-9s %-9s %8zu  %.2f\n", dialects[d],
                          genders[g], c.speakers, c.hours);
            os << buf;
        }
    }
    std::snprintf(buf, sizeof(buf), "%-9s %-9s %8zu  %.2f\n", "total", "", s.total.speakers,
                  s.total.hours);
    os << buf;
    return os.str();
}

}  // namespace qawa
