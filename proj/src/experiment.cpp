#include "featnoise/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace featnoise {

void validate(const ExperimentConfig& cfg) {
    if (cfg.fractions.empty()) {
        throw ValidationError("fraction grid must be nonempty");
    }
    for (std::size_t i = 0; i < cfg.fractions.size(); ++i) {
        const double f = cfg.fractions[i];
        if (!(f >= 0.0 && f <= 1.0)) {
            throw ValidationError("fractions must lie in [0, 1]");
        }
        if (i > 0 && !(f > cfg.fractions[i - 1])) {
            throw ValidationError("fractions must be sorted ascending and unique");
        }
    }
    if (cfg.repetitions < 1) {
        throw ValidationError("repetitions must be >= 1");
    }
    if (cfg.vocab_cap && *cfg.vocab_cap == 0) {
        throw ValidationError("vocab_cap must be positive");
    }
}

const char* to_string(ModelKind m) {
    return m == ModelKind::kLinearSvm ? "svm" : "nb";
}

const char* to_string(NoiseTarget t) {
    return t == NoiseTarget::kRationale ? "rationale" : "non_rationale";
}

namespace {

// Seed salt per target; fraction-0 cells use the baseline salt regardless
// of target, because corruption is a no-op there and every target must
// anchor to the same uncorrupted run.
std::uint64_t target_salt(NoiseTarget t, double fraction) {
    if (fraction == 0.0) return 0;
    return t == NoiseTarget::kRationale ? 1 : 2;
}

double train_and_score(const Corpus& train, const Corpus& eval_set, ModelKind kind,
                       const std::optional<std::size_t>& vocab_cap, std::uint64_t model_seed) {
    const Vocabulary vocab = build_vocabulary(train, vocab_cap);
    const TfidfModel tfidf = fit_tfidf(train, vocab);
    if (kind == ModelKind::kLinearSvm) {
        const LabelMap labels = LabelMap::from_labels(train.labels);
        std::vector<SparseVector> features;
        std::vector<double> signs;
        features.reserve(train.size());
        signs.reserve(train.size());
        for (const Document& d : train.docs) {
            features.push_back(transform(tfidf, d));
            signs.push_back(labels.sign_of(d.label));
        }
        LinearHyper hyper;
        hyper.seed = model_seed;
        const LinearModel model = train_linear(features, signs, hyper);
        return evaluate(model, tfidf, labels, eval_set);
    }
    const NaiveBayesModel model = train_naive_bayes(train, vocab);
    return evaluate(model, eval_set);
}

}  // namespace

ResultTable run_noise_sweep(const Corpus& train, const std::vector<NamedCorpus>& evals,
                            const ExperimentConfig& cfg) {
    validate(cfg);
    if (train.docs.empty() || evals.empty()) {
        throw ValidationError("training corpus and evaluation sets must be nonempty");
    }
    bool any_mask = false;
    for (const Document& d : train.docs) {
        for (bool b : d.rationale_mask) any_mask |= b;
    }
    if (!any_mask) {
        throw ValidationError("training corpus carries no rationale annotations");
    }

    std::vector<NoiseTarget> targets;
    if (cfg.target == TargetChoice::kRationale || cfg.target == TargetChoice::kBoth) {
        targets.push_back(NoiseTarget::kRationale);
    }
    if (cfg.target == TargetChoice::kNonRationale || cfg.target == TargetChoice::kBoth) {
        targets.push_back(NoiseTarget::kNonRationale);
    }

    // Replacement tokens come from the clean training vocabulary; the model
    // vocabulary is refit per corrupted corpus below.
    const Vocabulary sampling_vocab = build_vocabulary(train);

    ResultTable table;
    for (NoiseTarget target : targets) {
        for (std::size_t fi = 0; fi < cfg.fractions.size(); ++fi) {
            const double fraction = cfg.fractions[fi];
            std::vector<std::vector<double>> accs(evals.size());
            for (std::size_t rep = 1; rep <= cfg.repetitions; ++rep) {
                const std::uint64_t cell_seed =
                    mix64(mix64(mix64(cfg.base_seed, target_salt(target, fraction)), fi), rep);
                NoiseSpec spec;
                spec.target = target;
                spec.fraction = fraction;
                spec.seed = cell_seed;
                const Corpus corrupted = corrupt_corpus(train, spec, sampling_vocab);
                const std::uint64_t model_seed = mix64(cell_seed, 0x6d6f64656cull);  // "model"
                for (std::size_t e = 0; e < evals.size(); ++e) {
                    const double acc = train_and_score(corrupted, evals[e].corpus, cfg.model,
                                                       cfg.vocab_cap, model_seed);
                    accs[e].push_back(acc);
                    table.rows.push_back({to_string(cfg.model), evals[e].domain, to_string(target),
                                          fraction, rep, acc});
                }
            }
            for (std::size_t e = 0; e < evals.size(); ++e) {
                double mean = 0.0;
                for (double a : accs[e]) mean += a;
                mean /= static_cast<double>(accs[e].size());
                table.rows.push_back({to_string(cfg.model), evals[e].domain, to_string(target),
                                      fraction, std::nullopt, mean});
            }
        }
    }
    return table;
}

ResultTable run_noise_sweep(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.train_path.empty() || cfg.eval_paths.empty()) {
        throw ValidationError("train_path and at least one eval path are required");
    }
    const Corpus train = load_jsonl(cfg.train_path);
    std::vector<NamedCorpus> evals;
    evals.reserve(cfg.eval_paths.size());
    for (const auto& [domain, path] : cfg.eval_paths) {
        evals.push_back({domain, load_jsonl(path)});
    }
    return run_noise_sweep(train, evals, cfg);
}

void run_scm_sweep(SweepSetting setting, const SweepParams& params,
                   const std::vector<double>& eps_grid, const std::optional<McOptions>& mc,
                   std::ostream& out) {
    write_sweep_csv(setting, sweep_noise(setting, params, eps_grid, mc), out);
}

void validate(const PlantedCorpusSpec& spec) {
    if (spec.n_train == 0 || spec.n_id_test == 0 || spec.n_ood_test == 0) {
        throw ValidationError("split sizes must be positive");
    }
    if (spec.n_causal_tokens == 0 || spec.n_spurious_tokens == 0 || spec.n_filler_tokens == 0) {
        throw ValidationError("token group sizes must be positive");
    }
    if (!(spec.causal_strength >= 0.5 && spec.causal_strength <= 1.0) ||
        !(spec.confound_strength >= 0.5 && spec.confound_strength <= 1.0)) {
        throw ValidationError("strengths must lie in [0.5, 1]");
    }
    if (spec.doc_length < spec.n_causal_tokens + spec.n_spurious_tokens) {
        throw ValidationError("doc_length must cover the causal and spurious slots");
    }
}

namespace {

Corpus planted_split(const PlantedCorpusSpec& spec, const std::string& split_name, std::size_t n,
                     bool spurious_informative, std::uint64_t split_seed) {
    Corpus c;
    c.labels = {"neg", "pos"};
    c.docs.reserve(n);
    const double spurious_p = spurious_informative ? spec.confound_strength : 0.5;
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(mix64(split_seed, i));
        const bool is_pos = rng.bounded(2) == 1;

        std::vector<std::pair<std::string, bool>> slots;  // token, is_rationale
        slots.reserve(spec.doc_length);
        for (std::size_t j = 0; j < spec.n_causal_tokens; ++j) {
            const bool agree = rng.uniform01() < spec.causal_strength;
            const bool signal_pos = agree == is_pos;
            slots.emplace_back("c" + std::to_string(j) + (signal_pos ? "_pos" : "_neg"), true);
        }
        for (std::size_t j = 0; j < spec.n_spurious_tokens; ++j) {
            const bool agree = rng.uniform01() < spurious_p;
            const bool signal_pos = agree == is_pos;
            slots.emplace_back("s" + std::to_string(j) + (signal_pos ? "_pos" : "_neg"), false);
        }
        const std::size_t fillers = spec.doc_length - spec.n_causal_tokens - spec.n_spurious_tokens;
        for (std::size_t j = 0; j < fillers; ++j) {
            slots.emplace_back("f" + std::to_string(rng.bounded(spec.n_filler_tokens)), false);
        }
        for (std::size_t j = 0; j + 1 < slots.size(); ++j) {
            const std::size_t k = j + static_cast<std::size_t>(rng.bounded(slots.size() - j));
            std::swap(slots[j], slots[k]);
        }

        Document d;
        d.id = split_name + "-" + std::to_string(i);
        d.label = is_pos ? "pos" : "neg";
        d.tokens.reserve(slots.size());
        d.rationale_mask.reserve(slots.size());
        for (auto& [token, is_rationale] : slots) {
            d.tokens.push_back(std::move(token));
            d.rationale_mask.push_back(is_rationale);
        }
        c.docs.push_back(std::move(d));
    }
    return c;
}

}  // namespace

PlantedCorpus generate_planted_corpus(const PlantedCorpusSpec& spec) {
    validate(spec);
    PlantedCorpus out;
    out.train = planted_split(spec, "train", spec.n_train, true, mix64(spec.seed, 1));
    out.id_test = planted_split(spec, "id_test", spec.n_id_test, true, mix64(spec.seed, 2));
    out.ood_test = planted_split(spec, "ood_test", spec.n_ood_test, false, mix64(spec.seed, 3));
    return out;
}

void emit_csv(const ResultTable& t, std::ostream& out) {
    out << "model,domain,target,fraction,repetition,accuracy\n";
    char acc[32];
    char frac[64];
    for (const ResultRow& r : t.rows) {
        std::snprintf(frac, sizeof(frac), "%g", r.fraction);
        std::snprintf(acc, sizeof(acc), "%.4f", r.accuracy);
        out << r.model << ',' << r.domain << ',' << r.target << ',' << frac << ',';
        if (r.repetition) {
            out << *r.repetition;
        } else {
            out << "mean";
        }
        out << ',' << acc << '\n';
    }
}

void emit_csv(const ResultTable& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    emit_csv(t, out);
    if (!out) {
        throw IoError("write failed for " + path);
    }
}

ResultTable read_result_csv(std::istream& in) {
    ResultTable t;
    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError("missing CSV header");
    }
    if (line != "model,domain,target,fraction,repetition,accuracy") {
        throw ValidationError("unexpected CSV header: " + line);
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 6) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected 6 fields");
        }
        ResultRow r;
        r.model = fields[0];
        r.domain = fields[1];
        r.target = fields[2];
        r.fraction = std::stod(fields[3]);
        if (fields[4] != "mean") {
            r.repetition = static_cast<std::size_t>(std::stoul(fields[4]));
        }
        r.accuracy = std::stod(fields[5]);
        t.rows.push_back(std::move(r));
    }
    return t;
}

}  // namespace featnoise
