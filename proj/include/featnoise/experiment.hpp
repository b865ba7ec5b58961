#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "featnoise/corpus.hpp"
#include "featnoise/noiser.hpp"
#include "featnoise/scm.hpp"
#include "featnoise/textmodel.hpp"

namespace featnoise {

// Orchestration: noise sweeps over corpora, SCM parameter sweeps, the
// synthetic planted-spurious corpus generator, and the CSV result format.

enum class TargetChoice { kRationale, kNonRationale, kBoth };
enum class ModelKind { kLinearSvm, kNaiveBayes };

struct ExperimentConfig {
    std::string train_path;
    // domain name -> path; the first entry is the in-sample test set.
    std::vector<std::pair<std::string, std::string>> eval_paths;
    TargetChoice target = TargetChoice::kBoth;
    std::vector<double> fractions = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::size_t repetitions = 5;
    ModelKind model = ModelKind::kLinearSvm;
    std::optional<std::size_t> vocab_cap;
    std::uint64_t base_seed = 0;
};

void validate(const ExperimentConfig& cfg);

struct ResultRow {
    std::string model;
    std::string domain;
    std::string target;
    double fraction = 0.0;
    // Absent for the per-(domain, target, fraction) mean over repetitions.
    std::optional<std::size_t> repetition;
    double accuracy = 0.0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
};

struct NamedCorpus {
    std::string domain;
    Corpus corpus;
};

// The full protocol: for every (target, fraction, repetition) cell, corrupt
// the training corpus with a seed derived as
// mix64(base_seed, target, fraction_index, repetition), rebuild vocabulary
// and TF-IDF on the corrupted corpus, train, and evaluate on every
// (uncorrupted) evaluation corpus. Replacement tokens are sampled from the
// clean training vocabulary. Fraction-0 cells share one seed path across
// targets, so they all reproduce the uncorrupted baseline. Cells are
// independent; output never depends on completion order.
ResultTable run_noise_sweep(const Corpus& train, const std::vector<NamedCorpus>& evals,
                            const ExperimentConfig& cfg);

// File-loading wrapper over the in-memory sweep.
ResultTable run_noise_sweep(const ExperimentConfig& cfg);

// Thin wrapper over scm_engine: sweep + CSV on the given stream.
void run_scm_sweep(SweepSetting setting, const SweepParams& params,
                   const std::vector<double>& eps_grid, const std::optional<McOptions>& mc,
                   std::ostream& out);

// Synthetic corpus with a planted spurious correlate. Each document draws a
// uniform label and carries three kinds of tokens:
//   - causal: agree with the label with probability causal_strength in
//     every split; these positions are the rationale mask;
//   - spurious: agree with probability confound_strength in train and
//     id_test but only 0.5 in ood_test;
//   - filler: label-independent draws from a filler vocabulary.
struct PlantedCorpusSpec {
    std::size_t n_train = 2000;
    std::size_t n_id_test = 1000;
    std::size_t n_ood_test = 1000;
    std::size_t n_causal_tokens = 6;    // causal slots per document
    std::size_t n_spurious_tokens = 6;  // spurious slots per document
    std::size_t n_filler_tokens = 200;  // filler vocabulary size
    double causal_strength = 0.9;    // in (0.5, 1]
    double confound_strength = 0.9;  // in (0.5, 1]
    std::size_t doc_length = 30;
    std::uint64_t seed = 0;
};

void validate(const PlantedCorpusSpec& spec);

struct PlantedCorpus {
    Corpus train;
    Corpus id_test;
    Corpus ood_test;
};

PlantedCorpus generate_planted_corpus(const PlantedCorpusSpec& spec);

// CSV schema: model,domain,target,fraction,repetition,accuracy with
// accuracy at 4 decimals and repetition either an integer or "mean".
void emit_csv(const ResultTable& t, std::ostream& out);
void emit_csv(const ResultTable& t, const std::string& path);
ResultTable read_result_csv(std::istream& in);

const char* to_string(ModelKind m);
const char* to_string(NoiseTarget t);

}  // namespace featnoise
