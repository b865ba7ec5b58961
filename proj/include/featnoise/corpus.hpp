#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "featnoise/common.hpp"

namespace featnoise {

// One tokenized, labeled text. rationale_mask[i] is true when token i lies
// inside a human-marked rationale span.
struct Document {
    std::string id;
    std::string label;
    std::vector<std::string> tokens;
    std::vector<bool> rationale_mask;
};

struct Corpus {
    std::vector<Document> docs;
    // Distinct labels in first-seen order; at most two.
    std::vector<std::string> labels;

    std::size_t size() const { return docs.size(); }
};

// Token inventory with dense indices. Ranked by document frequency
// descending, ties broken lexicographically ascending, so the assignment is
// reproducible across runs.
struct Vocabulary {
    struct Entry {
        std::size_t index;
        std::size_t doc_freq;
    };
    std::unordered_map<std::string, Entry> entries;
    std::vector<std::string> tokens;     // index -> token
    std::vector<std::size_t> doc_freqs;  // index -> document frequency

    std::size_t size() const { return tokens.size(); }
    std::optional<std::size_t> index_of(const std::string& token) const {
        auto it = entries.find(token);
        if (it == entries.end()) return std::nullopt;
        return it->second.index;
    }
};

// Reads one JSON object per line:
//   {"id": str, "label": str, "tokens": [str], "rationale_mask": [0|1]}
// Blank lines are skipped. Errors cite the offending line number. Rejects
// empty corpora, duplicate ids, mask/token length mismatches and more than
// two distinct labels.
Corpus load_jsonl(const std::string& path);

// Inverse of load_jsonl, emitting the same schema.
void save_jsonl(const Corpus& c, const std::string& path);
void write_jsonl(const Corpus& c, std::ostream& out);

// Document-frequency ranked vocabulary, optionally truncated to the
// max_size most frequent tokens.
Vocabulary build_vocabulary(const Corpus& c, std::optional<std::size_t> max_size = std::nullopt);

// median(rationale tokens per doc) / median(non-rationale tokens per doc),
// clamped to 1. This is the non-rationale fraction whose corrupted token
// mass matches noising all rationales.
double equal_mass_fraction(const Corpus& c);

// Downsamples the majority label uniformly at random (seeded) until both
// labels have equal counts; document order is preserved.
Corpus enforce_balanced_split(const Corpus& c, std::uint64_t seed);

}  // namespace featnoise
