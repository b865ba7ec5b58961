#include "featnoise/noiser.hpp"

#include <algorithm>
#include <cmath>

namespace featnoise {

void validate(const NoiseSpec& spec) {
    if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0)) {
        throw ValidationError("noise fraction must lie in [0, 1]");
    }
}

std::size_t replacement_count(double fraction, std::size_t count) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(count) + 0.5));
}

namespace {

std::vector<std::size_t> target_positions(const Document& d, NoiseTarget target) {
    const bool want = target == NoiseTarget::kRationale;
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < d.rationale_mask.size(); ++i) {
        if (d.rationale_mask[i] == want) positions.push_back(i);
    }
    return positions;
}

Rng doc_stream(const Document& d, const NoiseSpec& spec) {
    return Rng(mix64(spec.seed, fnv1a64(d.id)));
}

// Partial Fisher-Yates over the target positions; consumes exactly k draws.
std::vector<std::size_t> pick(std::vector<std::size_t> positions, std::size_t k, Rng& rng) {
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.bounded(positions.size() - i));
        std::swap(positions[i], positions[j]);
    }
    positions.resize(k);
    std::sort(positions.begin(), positions.end());
    return positions;
}

}  // namespace

std::vector<std::size_t> plan_replacements(const Document& d, const NoiseSpec& spec) {
    validate(spec);
    std::vector<std::size_t> positions = target_positions(d, spec.target);
    const std::size_t k = replacement_count(spec.fraction, positions.size());
    Rng rng = doc_stream(d, spec);
    return pick(std::move(positions), k, rng);
}

Document inject(const Document& d, const NoiseSpec& spec, const Vocabulary& v) {
    validate(spec);
    if (v.size() == 0) {
        throw ValidationError("replacement vocabulary is empty");
    }
    std::vector<std::size_t> positions = target_positions(d, spec.target);
    const std::size_t k = replacement_count(spec.fraction, positions.size());
    // One stream drives both the plan and the replacement draws, so the
    // whole corruption of a document is a function of (id, spec, vocab).
    Rng rng = doc_stream(d, spec);
    const std::vector<std::size_t> chosen = pick(std::move(positions), k, rng);

    Document out = d;
    for (std::size_t idx : chosen) {
        out.tokens[idx] = v.tokens[static_cast<std::size_t>(rng.bounded(v.size()))];
    }
    return out;
}

Corpus corrupt_corpus(const Corpus& c, const NoiseSpec& spec, const Vocabulary& v) {
    Corpus out;
    out.labels = c.labels;
    out.docs.reserve(c.docs.size());
    for (const Document& d : c.docs) {
        out.docs.push_back(inject(d, spec, v));
    }
    return out;
}

}  // namespace featnoise
