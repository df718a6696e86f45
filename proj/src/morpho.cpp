#include "qawa/morpho.hpp"

#include <algorithm>
#include <fstream>

#include "qawa/error.hpp"
#include "qawa/utf8.hpp"

namespace qawa {

void SuffixTable::add(const std::string& surface, const std::string& dialect) {
    if (surface.empty()) throw ValidationError("suffix table: empty surface form");
    if (has(surface)) throw ValidationError("suffix table: duplicate suffix '" + surface + "'");
    entries.push_back({surface, dialect});
}

bool SuffixTable::has(const std::string& surface) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const Entry& e) { return e.surface == surface; });
}

SuffixTable load_suffix_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open suffix table: " + path);
    SuffixTable t;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("min_stem_len=", 0) == 0) {
            try {
                t.min_stem_len = std::stoul(line.substr(13));
            } catch (const std::exception&) {
                throw DataError(path + ":" + std::to_string(lineno) +
                                ": bad min_stem_len value");
            }
            continue;
        }
        const auto tab = line.find('\t');
        const std::string surface = tab == std::string::npos ? line : line.substr(0, tab);
        const std::string dialect = tab == std::string::npos ? "" : line.substr(tab + 1);
        try {
            t.add(surface, dialect);
        } catch (const ValidationError& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return t;
}

std::vector<std::string> tokenize(const std::string& text, bool drop_punct) {
    const auto cps = utf8::decode(text);
    std::vector<std::string> out;
    std::vector<uint32_t> word;
    std::vector<uint32_t> punct;
    auto flush_word = [&] {
        if (!word.empty()) {
            out.push_back(utf8::encode(word));
            word.clear();
        }
    };
    auto flush_punct = [&] {
        if (!punct.empty()) {
            if (!drop_punct) out.push_back(utf8::encode(punct));
            punct.clear();
        }
    };
    for (size_t i = 0; i < cps.size(); ++i) {
        const uint32_t cp = cps[i];
        if (utf8::is_space(cp)) {
            flush_word();
            flush_punct();
        } else if (utf8::is_word_char(cp)) {
            flush_punct();
            word.push_back(cp);
        } else if (utf8::is_apostrophe(cp) && !word.empty() && i + 1 < cps.size() &&
                   utf8::is_word_char(cps[i + 1])) {
            // word-internal apostrophe: p'unchay stays one token
            flush_punct();
            word.push_back(cp);
        } else {
            flush_word();
            punct.push_back(cp);
        }
    }
    flush_word();
    flush_punct();
    return out;
}

Analysis analyze(const std::string& token, const SuffixTable& table) {
    if (token.empty()) throw ValidationError("analyze: empty token");
    Analysis a;
    a.token = token;
    auto stem = utf8::decode(token);
    std::vector<std::vector<uint32_t>> stripped;  // outermost first

    std::vector<std::vector<uint32_t>> suffixes;
    suffixes.reserve(table.entries.size());
    for (const auto& e : table.entries) suffixes.push_back(utf8::decode(e.surface));
    std::sort(suffixes.begin(), suffixes.end(), [](const auto& x, const auto& y) {
        return x.size() != y.size() ? x.size() > y.size() : x < y;
    });

    for (;;) {
        const std::vector<uint32_t>* best = nullptr;
        for (const auto& s : suffixes) {
            if (s.size() >= stem.size()) continue;
            if (stem.size() - s.size() < table.min_stem_len) continue;
            if (std::equal(s.begin(), s.end(), stem.end() - static_cast<long>(s.size()))) {
                best = &s;
                break;
            }
        }
        if (!best) break;
        stripped.emplace_back(stem.end() - static_cast<long>(best->size()), stem.end());
        stem.resize(stem.size() - best->size());
    }

    a.lemma = utf8::encode(stem);
    for (auto it = stripped.rbegin(); it != stripped.rend(); ++it)
        a.suffixes.push_back(utf8::encode(*it));
    return a;
}

std::vector<std::string> segment_to_subwords(const std::vector<std::string>& tokens,
                                             const SuffixTable& table) {
    std::vector<std::string> out;
    for (const auto& tok : tokens) {
        if (tok.empty()) continue;
        Analysis a = analyze(tok, table);
        out.push_back(std::move(a.lemma));
        for (auto& s : a.suffixes) out.push_back(std::move(s));
    }
    return out;
}

}  // namespace qawa
