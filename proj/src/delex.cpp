#include "qawa/delex.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qawa/error.hpp"

namespace qawa {

namespace {

using ordered_json = nlohmann::ordered_json;

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

// lemma<TAB>label lines with # comments
void load_tsv_map(const std::string& path, std::map<std::string, std::string>& out,
                  const std::vector<std::string>* labels) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw DataError(path + ":" + std::to_string(lineno) + ": expected key<TAB>value");
        const std::string key = line.substr(0, tab);
        const std::string val = line.substr(tab + 1);
        if (labels && std::find(labels->begin(), labels->end(), val) == labels->end())
            throw DataError(path + ":" + std::to_string(lineno) + ": label '" + val +
                            "' not in the declared set");
        out[key] = val;
    }
}

}  // namespace

bool FrameLexicon::has_label(const std::string& label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
}

FrameLexicon load_frame_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open frame lexicon: " + path);
    FrameLexicon lex;
    std::string line;
    size_t lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (!saw_header) {
            if (line.empty() || line[0] == '#') continue;
            if (line.rfind("labels:", 0) != 0)
                throw DataError(path + ":" + std::to_string(lineno) +
                                ": first entry must be a 'labels:' header");
            std::istringstream ls(line.substr(7));
            std::string label;
            while (std::getline(ls, label, ',')) {
                while (!label.empty() && label.front() == ' ') label.erase(label.begin());
                while (!label.empty() && label.back() == ' ') label.pop_back();
                if (label.empty()) continue;
                if (lex.has_label(label))
                    throw DataError(path + ":" + std::to_string(lineno) +
                                    ": duplicate label '" + label + "'");
                lex.labels.push_back(label);
            }
            if (lex.labels.empty())
                throw DataError(path + ":" + std::to_string(lineno) + ": empty label set");
            saw_header = true;
            continue;
        }
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw DataError(path + ":" + std::to_string(lineno) + ": expected lemma<TAB>label");
        const std::string key = line.substr(0, tab);
        const std::string val = line.substr(tab + 1);
        if (!lex.has_label(val))
            throw DataError(path + ":" + std::to_string(lineno) + ": label '" + val +
                            "' not in the declared set");
        lex.native[key] = val;
    }
    if (!saw_header) throw DataError(path + ": missing 'labels:' header");
    return lex;
}

void load_pivot(FrameLexicon& lex, const std::string& dict_path,
                const std::string& frames_path) {
    load_tsv_map(dict_path, lex.pivot_dict, nullptr);
    load_tsv_map(frames_path, lex.pivot_frames, &lex.labels);
}

const char* to_string(TagSource s) {
    switch (s) {
        case TagSource::NativeLemma: return "native-lemma";
        case TagSource::NativeSurface: return "native-surface";
        case TagSource::PivotLemma: return "pivot-lemma";
        case TagSource::PivotSurface: return "pivot-surface";
        default: return "none";
    }
}

std::vector<TaggedToken> tag_frames(const std::vector<std::string>& tokens,
                                    const std::vector<Analysis>& analyses,
                                    const FrameLexicon& lex) {
    if (tokens.size() != analyses.size())
        throw ValidationError("tag_frames: analyses not aligned with tokens");
    std::vector<TaggedToken> out;
    out.reserve(tokens.size());
    auto pivot_label = [&](const std::string& key) -> const std::string* {
        const auto dit = lex.pivot_dict.find(key);
        if (dit == lex.pivot_dict.end()) return nullptr;
        const auto fit = lex.pivot_frames.find(dit->second);
        return fit == lex.pivot_frames.end() ? nullptr : &fit->second;
    };
    for (size_t i = 0; i < tokens.size(); ++i) {
        const std::string& lemma = analyses[i].lemma;
        TaggedToken t{tokens[i], "", TagSource::None};
        if (auto it = lex.native.find(lemma); it != lex.native.end()) {
            t.label = it->second;
            t.source = TagSource::NativeLemma;
        } else if (auto st = lex.native.find(tokens[i]);
                   tokens[i] != lemma && st != lex.native.end()) {
            t.label = st->second;
            t.source = TagSource::NativeSurface;
        } else if (const auto* pl = pivot_label(lemma)) {
            t.label = *pl;
            t.source = TagSource::PivotLemma;
        } else if (const auto* ps = tokens[i] != lemma ? pivot_label(tokens[i]) : nullptr) {
            t.label = *ps;
            t.source = TagSource::PivotSurface;
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<std::string> select_frequent_frames(
    const std::vector<std::vector<TaggedToken>>& corpus, size_t top_k) {
    if (top_k < 1) throw ValidationError("top_k must be at least 1");
    std::map<std::string, uint64_t> freq;
    for (const auto& sent : corpus)
        for (const auto& t : sent)
            if (!t.label.empty()) ++freq[t.label];
    std::vector<std::pair<std::string, uint64_t>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<std::string> out;
    for (size_t i = 0; i < ranked.size() && i < top_k; ++i) out.push_back(ranked[i].first);
    return out;
}

std::vector<std::string> bio_encode(const std::vector<TaggedToken>& tagged,
                                    const std::vector<std::string>& selected) {
    std::vector<std::string> tags;
    tags.reserve(tagged.size());
    std::string prev;
    for (const auto& t : tagged) {
        const bool keep = !t.label.empty() &&
                          std::find(selected.begin(), selected.end(), t.label) != selected.end();
        if (!keep) {
            tags.emplace_back("O");
            prev.clear();
        } else if (t.label == prev) {
            tags.push_back("I-" + t.label);
        } else {
            tags.push_back("B-" + t.label);
            prev = t.label;
        }
    }
    return tags;
}

bool bio_valid(const std::vector<std::string>& tags) {
    std::string prev;
    for (const auto& tag : tags) {
        if (tag == "O") {
            prev.clear();
            continue;
        }
        if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-') return false;
        const std::string label = tag.substr(2);
        if (tag[0] == 'I' && label != prev) return false;
        prev = label;
    }
    return true;
}

std::string placeholder(const std::string& label) { return "<" + label + ">"; }

std::optional<std::string> placeholder_label(const std::string& token) {
    if (token.size() < 3 || token.front() != '<' || token.back() != '>') return std::nullopt;
    return token.substr(1, token.size() - 2);
}

void SlotInventory::add(const std::string& label, const std::string& surface) {
    surfaces[label].push_back(surface);
}

void SlotInventory::finalize() {
    for (auto& [label, list] : surfaces) {
        (void)label;
        std::sort(list.begin(), list.end());
    }
}

size_t SlotInventory::total() const {
    size_t n = 0;
    for (const auto& [label, list] : surfaces) {
        (void)label;
        n += list.size();
    }
    return n;
}

DelexSentence delexicalize(const std::vector<std::string>& tokens,
                           const std::vector<std::string>& tags, SlotInventory* inv) {
    if (tokens.size() != tags.size())
        throw ValidationError("delexicalize: tags not aligned with tokens");
    if (!bio_valid(tags)) throw ValidationError("delexicalize: invalid tag sequence");
    DelexSentence d;
    d.original_tokens = tokens;
    d.tags = tags;
    size_t i = 0;
    while (i < tokens.size()) {
        if (tags[i] == "O") {
            d.delex_tokens.push_back(tokens[i]);
            ++i;
            continue;
        }
        const std::string label = tags[i].substr(2);
        std::string surface = tokens[i];
        size_t j = i + 1;
        while (j < tokens.size() && tags[j] == "I-" + label) {
            surface += " " + tokens[j];
            ++j;
        }
        d.delex_tokens.push_back(placeholder(label));
        if (inv) inv->add(label, surface);
        i = j;
    }
    return d;
}

std::vector<std::string> relexicalize(const std::vector<std::string>& delex_tokens,
                                      const SlotInventory& inv, Rng& rng) {
    std::vector<std::string> out;
    for (const auto& tok : delex_tokens) {
        const auto label = placeholder_label(tok);
        if (!label) {
            out.push_back(tok);
            continue;
        }
        const auto it = inv.surfaces.find(*label);
        if (it == inv.surfaces.end() || it->second.empty())
            throw ValidationError("relexicalize: no surfaces for label '" + *label + "'");
        const std::string& surface = it->second[rng.below(it->second.size())];
        std::istringstream ss(surface);
        std::string word;
        while (ss >> word) out.push_back(word);
    }
    return out;
}

std::vector<std::string> refill(const std::vector<std::string>& delex_tokens,
                                const std::vector<std::string>& spans) {
    std::vector<std::string> out;
    size_t next = 0;
    for (const auto& tok : delex_tokens) {
        if (!placeholder_label(tok)) {
            out.push_back(tok);
            continue;
        }
        if (next >= spans.size())
            throw ValidationError("refill: more placeholders than spans");
        std::istringstream ss(spans[next++]);
        std::string word;
        while (ss >> word) out.push_back(word);
    }
    if (next != spans.size()) throw ValidationError("refill: unused spans");
    return out;
}

void write_delex_corpus(const std::vector<DelexSentence>& corpus, const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    for (const auto& d : corpus) {
        ordered_json rec;
        rec["tokens"] = d.original_tokens;
        rec["tags"] = d.tags;
        rec["delex"] = d.delex_tokens;
        out << rec.dump() << "\n";
    }
}

std::vector<DelexSentence> read_delex_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::vector<DelexSentence> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        ordered_json rec;
        try {
            rec = ordered_json::parse(line);
        } catch (const std::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!rec.contains("tokens") || !rec.contains("tags") || !rec.contains("delex"))
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": record needs tokens, tags, delex");
        DelexSentence d;
        d.original_tokens = rec["tokens"].get<std::vector<std::string>>();
        d.tags = rec["tags"].get<std::vector<std::string>>();
        d.delex_tokens = rec["delex"].get<std::vector<std::string>>();
        out.push_back(std::move(d));
    }
    return out;
}

void write_inventory(const SlotInventory& inv, const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    for (const auto& [label, list] : inv.surfaces)
        for (const auto& surface : list) out << label << '\t' << surface << '\n';
}

}  // namespace qawa
