#include "featnoise/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_set>

#include <json.hpp>

namespace featnoise {

namespace {

using nlohmann::json;

[[noreturn]] void line_error(const std::string& path, std::size_t line_no, const std::string& what) {
    throw ValidationError(path + ":" + std::to_string(line_no) + ": " + what);
}

bool mask_bit(const json& v) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number_integer()) {
        const auto i = v.get<std::int64_t>();
        if (i == 0 || i == 1) return i == 1;
    }
    throw ValidationError("rationale_mask entries must be 0 or 1");
}

double median(std::vector<std::size_t> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return static_cast<double>(values[n / 2]);
    return (static_cast<double>(values[n / 2 - 1]) + static_cast<double>(values[n / 2])) / 2.0;
}

}  // namespace

Corpus load_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    Corpus corpus;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            line_error(path, line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!obj.is_object()) line_error(path, line_no, "expected a JSON object");
        for (const char* field : {"id", "label", "tokens", "rationale_mask"}) {
            if (!obj.contains(field)) line_error(path, line_no, std::string("missing field ") + field);
        }

        if (!obj["tokens"].is_array() || !obj["rationale_mask"].is_array()) {
            line_error(path, line_no, "tokens and rationale_mask must be arrays");
        }

        Document doc;
        try {
            doc.id = obj["id"].get<std::string>();
            doc.label = obj["label"].get<std::string>();
            for (const auto& t : obj["tokens"]) {
                doc.tokens.push_back(t.get<std::string>());
            }
            for (const auto& m : obj["rationale_mask"]) {
                doc.rationale_mask.push_back(mask_bit(m));
            }
        } catch (const json::exception& e) {
            line_error(path, line_no, std::string("bad field type: ") + e.what());
        } catch (const ValidationError& e) {
            line_error(path, line_no, e.what());
        }

        if (doc.rationale_mask.size() != doc.tokens.size()) {
            line_error(path, line_no,
                       "rationale_mask length " + std::to_string(doc.rationale_mask.size()) +
                           " does not match token count " + std::to_string(doc.tokens.size()));
        }
        for (const auto& t : doc.tokens) {
            if (t.empty()) line_error(path, line_no, "tokens must be nonempty strings");
        }
        if (!seen_ids.insert(doc.id).second) {
            line_error(path, line_no, "duplicate document id '" + doc.id + "'");
        }
        if (std::find(corpus.labels.begin(), corpus.labels.end(), doc.label) == corpus.labels.end()) {
            corpus.labels.push_back(doc.label);
            if (corpus.labels.size() > 2) {
                line_error(path, line_no, "more than two distinct labels (third: '" + doc.label + "')");
            }
        }
        corpus.docs.push_back(std::move(doc));
    }
    if (corpus.docs.empty()) {
        throw ValidationError(path + ": empty corpus");
    }
    return corpus;
}

void write_jsonl(const Corpus& c, std::ostream& out) {
    for (const Document& d : c.docs) {
        json obj;
        obj["id"] = d.id;
        obj["label"] = d.label;
        obj["tokens"] = d.tokens;
        std::vector<int> mask(d.rationale_mask.size());
        for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = d.rationale_mask[i] ? 1 : 0;
        obj["rationale_mask"] = mask;
        out << obj.dump() << '\n';
    }
}

void save_jsonl(const Corpus& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    write_jsonl(c, out);
    if (!out) {
        throw IoError("write failed for " + path);
    }
}

Vocabulary build_vocabulary(const Corpus& c, std::optional<std::size_t> max_size) {
    if (c.docs.empty()) {
        throw ValidationError("cannot build a vocabulary from an empty corpus");
    }
    if (max_size && *max_size == 0) {
        throw ValidationError("vocabulary cap must be positive");
    }
    // std::map keeps tokens sorted, which settles ties lexicographically.
    std::map<std::string, std::size_t> df;
    for (const Document& d : c.docs) {
        std::unordered_set<std::string_view> seen;
        for (const std::string& t : d.tokens) {
            if (seen.insert(t).second) ++df[t];
        }
    }
    std::vector<const std::pair<const std::string, std::size_t>*> ranked;
    ranked.reserve(df.size());
    for (const auto& kv : df) ranked.push_back(&kv);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto* a, const auto* b) { return a->second > b->second; });
    if (max_size && ranked.size() > *max_size) {
        ranked.resize(*max_size);
    }
    Vocabulary v;
    v.tokens.reserve(ranked.size());
    v.doc_freqs.reserve(ranked.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        v.entries.emplace(ranked[i]->first, Vocabulary::Entry{i, ranked[i]->second});
        v.tokens.push_back(ranked[i]->first);
        v.doc_freqs.push_back(ranked[i]->second);
    }
    return v;
}

double equal_mass_fraction(const Corpus& c) {
    if (c.docs.empty()) {
        throw ValidationError("empty corpus");
    }
    std::vector<std::size_t> rationale_counts, other_counts;
    rationale_counts.reserve(c.docs.size());
    other_counts.reserve(c.docs.size());
    for (const Document& d : c.docs) {
        std::size_t r = 0;
        for (bool b : d.rationale_mask) r += b ? 1 : 0;
        rationale_counts.push_back(r);
        other_counts.push_back(d.tokens.size() - r);
    }
    const double med_other = median(std::move(other_counts));
    if (med_other <= 0.0) {
        throw ValidationError("median non-rationale length is zero; fraction undefined");
    }
    const double f = median(std::move(rationale_counts)) / med_other;
    return f > 1.0 ? 1.0 : f;
}

Corpus enforce_balanced_split(const Corpus& c, std::uint64_t seed) {
    if (c.labels.size() != 2) {
        throw ValidationError("balanced split requires exactly two labels");
    }
    std::vector<std::size_t> by_label[2];
    for (std::size_t i = 0; i < c.docs.size(); ++i) {
        by_label[c.docs[i].label == c.labels[1] ? 1 : 0].push_back(i);
    }
    const std::size_t keep = std::min(by_label[0].size(), by_label[1].size());
    if (keep == 0) {
        throw ValidationError("one label has no documents");
    }

    std::vector<bool> selected(c.docs.size(), false);
    for (std::size_t side = 0; side < 2; ++side) {
        // Seeded partial Fisher-Yates; the minority side keeps everything.
        auto& indices = by_label[side];
        Rng rng(mix64(seed, side));
        for (std::size_t i = 0; i < keep; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.bounded(indices.size() - i));
            std::swap(indices[i], indices[j]);
            selected[indices[i]] = true;
        }
    }

    Corpus out;
    out.labels = c.labels;
    for (std::size_t i = 0; i < c.docs.size(); ++i) {
        if (selected[i]) out.docs.push_back(c.docs[i]);
    }
    return out;
}

}  // namespace featnoise
