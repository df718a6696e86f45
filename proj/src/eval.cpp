#include "qawa/eval.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qawa/error.hpp"

namespace qawa {

namespace {
using ordered_json = nlohmann::ordered_json;
}

EditAlignment align(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
    const size_t m = ref.size();
    const size_t n = hyp.size();
    // scratch reused across calls; scoring dominates batch evaluation
    thread_local std::vector<uint32_t> d;
    d.assign((m + 1) * (n + 1), 0);
    auto at = [&](size_t i, size_t j) -> uint32_t& { return d[i * (n + 1) + j]; };
    for (size_t i = 0; i <= m; ++i) at(i, 0) = static_cast<uint32_t>(i);
    for (size_t j = 0; j <= n; ++j) at(0, j) = static_cast<uint32_t>(j);
    for (size_t i = 1; i <= m; ++i) {
        for (size_t j = 1; j <= n; ++j) {
            const uint32_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
            const uint32_t up = at(i - 1, j) + 1;
            const uint32_t left = at(i, j - 1) + 1;
            at(i, j) = std::min({diag, up, left});
        }
    }

    EditAlignment a;
    size_t i = m, j = n;
    while (i > 0 || j > 0) {
        const uint32_t cost = at(i, j);
        if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && at(i - 1, j - 1) == cost) {
            a.ops.push_back('M');
            ++a.hits;
            --i;
            --j;
        } else if (i > 0 && j > 0 && at(i - 1, j - 1) + 1 == cost) {
            a.ops.push_back('S');
            ++a.subs;
            --i;
            --j;
        } else if (i > 0 && at(i - 1, j) + 1 == cost) {
            a.ops.push_back('D');
            ++a.dels;
            --i;
        } else {
            a.ops.push_back('I');
            ++a.ins;
            --j;
        }
    }
    std::reverse(a.ops.begin(), a.ops.end());
    return a;
}

double wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
    if (ref.empty()) throw ValidationError("wer: empty reference");
    const EditAlignment a = align(ref, hyp);
    return static_cast<double>(a.errors()) / static_cast<double>(ref.size());
}

double ter(const std::vector<std::string>& ref, const std::vector<std::string>& hyp,
           const SuffixTable& table) {
    const auto ref_sub = segment_to_subwords(ref, table);
    if (ref_sub.empty()) throw ValidationError("ter: empty reference after segmentation");
    return wer(ref_sub, segment_to_subwords(hyp, table));
}

std::map<std::string, std::string> load_hypotheses(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open hypothesis file: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ordered_json rec;
        try {
            rec = ordered_json::parse(line);
        } catch (const std::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!rec.contains("id") || !rec["id"].is_string() || !rec.contains("text") ||
            !rec["text"].is_string())
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": record needs string fields id and text");
        const std::string id = rec["id"].get<std::string>();
        if (out.count(id))
            throw DataError(path + ":" + std::to_string(lineno) + ": duplicate id '" + id + "'");
        out[id] = rec["text"].get<std::string>();
    }
    return out;
}

ConditionReport report(const std::vector<ConditionInput>& conditions,
                       const SuffixTable* table) {
    ConditionReport rep;
    for (const auto& cond : conditions) {
        uint64_t err = 0, ref_toks = 0, terr = 0, tref = 0;
        for (const auto& [ref, hyp] : cond.pairs) {
            if (ref.empty()) continue;
            err += align(ref, hyp).errors();
            ref_toks += ref.size();
            if (table) {
                const auto rs = segment_to_subwords(ref, *table);
                terr += align(rs, segment_to_subwords(hyp, *table)).errors();
                tref += rs.size();
            }
        }
        if (ref_toks == 0)
            throw ValidationError("condition '" + cond.name + "' has no reference tokens");
        ConditionRow row;
        row.name = cond.name;
        row.hours = cond.hours;
        row.wer = static_cast<double>(err) / static_cast<double>(ref_toks);
        if (table && tref > 0) {
            row.ter = static_cast<double>(terr) / static_cast<double>(tref);
            row.has_ter = true;
        }
        row.ppl = cond.ppl;
        row.has_ppl = cond.has_ppl;
        rep.rows.push_back(row);
    }
    if (!rep.rows.empty()) {
        const double base = rep.rows.front().wer;
        for (auto& row : rep.rows) {
            row.delta_points = (row.wer - base) * 100.0;
            row.delta_relative = base > 0.0 ? (row.wer - base) / base : 0.0;
        }
    }
    return rep;
}

namespace {

std::string fmt(const char* spec, double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace

std::string ConditionReport::render() const {
    std::vector<std::array<std::string, 7>> cells;
    cells.push_back({"Condition", "Hours", "WER (%)", "TER (%)", "PPL", "dWER (pts)",
                     "dWER (rel %)"});
    for (const auto& r : rows) {
        cells.push_back({r.name, r.hours.empty() ? "-" : r.hours, fmt("%.1f", r.wer * 100.0),
                         r.has_ter ? fmt("%.1f", r.ter * 100.0) : "-",
                         r.has_ppl ? fmt("%.2f", r.ppl) : "-", fmt("%+.1f", r.delta_points),
                         fmt("%+.1f", r.delta_relative * 100.0)});
    }
    std::array<size_t, 7> width{};
    for (const auto& row : cells)
        for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    std::ostringstream out;
    for (size_t r = 0; r < cells.size(); ++r) {
        for (size_t c = 0; c < cells[r].size(); ++c) {
            out << cells[r][c] << std::string(width[c] - cells[r][c].size(), ' ');
            if (c + 1 < cells[r].size()) out << "  ";
        }
        out << '\n';
        if (r == 0) {
            size_t total = 0;
            for (size_t c = 0; c < width.size(); ++c) total += width[c];
            out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
        }
    }
    return out.str();
}

std::string ConditionReport::to_records() const {
    std::ostringstream out;
    for (const auto& r : rows) {
        ordered_json rec;
        rec["condition"] = r.name;
        rec["hours"] = r.hours;
        rec["wer"] = r.wer;
        if (r.has_ter) rec["ter"] = r.ter;
        if (r.has_ppl) rec["ppl"] = r.ppl;
        rec["delta_wer_points"] = r.delta_points;
        rec["delta_wer_relative"] = r.delta_relative;
        out << rec.dump() << '\n';
    }
    return out.str();
}

}  // namespace qawa
