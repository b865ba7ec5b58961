#pragma once

#include <cstdint>
#include <vector>

#include "featnoise/corpus.hpp"

namespace featnoise {

// Token-replacement corruption: a chosen fraction of rationale (or
// non-rationale) tokens is replaced with random vocabulary tokens. Labels,
// masks, ids and document lengths never change.

enum class NoiseTarget { kRationale, kNonRationale };

struct NoiseSpec {
    NoiseTarget target = NoiseTarget::kRationale;
    double fraction = 0.0;  // in [0, 1]
    std::uint64_t seed = 0;
};

void validate(const NoiseSpec& spec);

// round(fraction * count), halves rounding up. Fixed here so that the
// replacement count is monotone in the fraction and exact at 0% and 100%.
std::size_t replacement_count(double fraction, std::size_t count);

// Indices of the tokens to replace: a uniformly random subset of the
// target-class positions, of size replacement_count(fraction, |targets|),
// drawn from a stream seeded by mix64(spec.seed, fnv1a64(doc.id)). Sorted
// ascending. Deterministic per (document, spec) and independent of the
// document's position in its corpus.
std::vector<std::size_t> plan_replacements(const Document& d, const NoiseSpec& spec);

// Replaces each planned index with an independent uniform draw from the
// vocabulary; a draw may coincide with the original token.
Document inject(const Document& d, const NoiseSpec& spec, const Vocabulary& v);

// inject applied per document; order preserved. Per-document seeding makes
// the result independent of evaluation order.
Corpus corrupt_corpus(const Corpus& c, const NoiseSpec& spec, const Vocabulary& v);

}  // namespace featnoise
