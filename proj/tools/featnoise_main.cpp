// Command line front end: scm-sweep, noise-sweep, synth-gen, equal-mass.
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "featnoise/experiment.hpp"

namespace fn = featnoise;

namespace {

// Stream that is either stdout or an owned file.
class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw fn::IoError("cannot write " + path);
            }
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::vector<std::pair<std::string, std::string>> parse_eval_paths(
    const std::vector<std::string>& raw) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const std::string& item : raw) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
            throw fn::ValidationError("--eval_paths entries must look like name=path: " + item);
        }
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return out;
}

void add_scm_sweep(CLI::App& app) {
    auto* cmd = app.add_subcommand("scm-sweep",
                                   "Analytic (and optionally Monte Carlo) OLS estimates over a "
                                   "measurement-noise grid");
    auto setting = std::make_shared<std::string>();
    auto params = std::make_shared<fn::SweepParams>();
    auto eps = std::make_shared<std::vector<double>>();
    auto mc_n = std::make_shared<std::size_t>(0);
    auto mc_seed = std::make_shared<std::uint64_t>(0);
    auto out_path = std::make_shared<std::string>("-");

    cmd->add_option("--setting", *setting, "causal-x1, anticausal-x1 or anticausal-x2")
        ->required()
        ->check(CLI::IsMember({"causal-x1", "anticausal-x1", "anticausal-x2"}));
    cmd->add_option("--eps", *eps, "noise-variance grid, ascending")->required()->expected(-1);
    cmd->add_option("--a", params->causal.a, "coefficient a (both graphs)");
    cmd->add_option("--b", params->causal.b, "coefficient b (both graphs)");
    cmd->add_option("--c", params->causal.c, "coefficient c (both graphs)");
    cmd->add_option("--d", params->anticausal.d, "coefficient d (anticausal only)");
    cmd->add_option("--var-uz", params->causal.var_uz, "confounder noise variance");
    cmd->add_option("--var-uq", params->anticausal.var_uq, "q noise variance (anticausal)");
    cmd->add_option("--var-uy", params->causal.var_uy, "y noise variance");
    cmd->add_option("--var-ux1", params->causal.var_ux1, "x1 structural noise variance");
    cmd->add_option("--var-ux2", params->causal.var_ux2, "x2 structural noise variance");
    cmd->add_option("--mc-n", *mc_n, "Monte Carlo sample size per grid point (0 = analytic only)");
    cmd->add_option("--mc-seed", *mc_seed, "Monte Carlo base seed");
    cmd->add_option("-o,--out", *out_path, "output CSV path ('-' = stdout)");

    cmd->callback([=] {
        // The shared coefficient flags land in the causal struct; copy them over.
        params->anticausal.a = params->causal.a;
        params->anticausal.b = params->causal.b;
        params->anticausal.c = params->causal.c;
        params->anticausal.var_uz = params->causal.var_uz;
        params->anticausal.var_uy = params->causal.var_uy;
        params->anticausal.var_ux1 = params->causal.var_ux1;
        params->anticausal.var_ux2 = params->causal.var_ux2;
        fn::SweepSetting s = fn::SweepSetting::kCausalX1;
        if (*setting == "anticausal-x1") s = fn::SweepSetting::kAnticausalX1;
        if (*setting == "anticausal-x2") s = fn::SweepSetting::kAnticausalX2;
        std::optional<fn::McOptions> mc;
        if (*mc_n > 0) mc = fn::McOptions{*mc_n, *mc_seed};
        OutputTarget out(*out_path);
        fn::run_scm_sweep(s, *params, *eps, mc, out.stream());
    });
}

void add_noise_sweep(CLI::App& app) {
    auto* cmd = app.add_subcommand("noise-sweep",
                                   "Corrupt training rationales/non-rationales, retrain, and "
                                   "report accuracy per evaluation domain");
    auto cfg = std::make_shared<fn::ExperimentConfig>();
    auto eval_raw = std::make_shared<std::vector<std::string>>();
    auto target = std::make_shared<std::string>("both");
    auto model = std::make_shared<std::string>("svm");
    auto vocab_cap = std::make_shared<std::size_t>(0);
    auto out_path = std::make_shared<std::string>("-");
    auto dump_path = std::make_shared<std::string>();

    cmd->add_option("-t,--train_path", cfg->train_path, "training corpus (JSONL)")->required();
    cmd->add_option("-e,--eval_paths", *eval_raw,
                    "evaluation corpora as name=path; first is the in-sample test set")
        ->required()
        ->expected(-1);
    cmd->add_option("--target", *target, "rationale, non-rationale or both")
        ->check(CLI::IsMember({"rationale", "non-rationale", "both"}));
    cmd->add_option("--fractions", cfg->fractions, "noise fractions in [0,1], ascending")
        ->expected(-1);
    cmd->add_option("-r,--repetitions", cfg->repetitions, "noise/model repetitions per fraction");
    cmd->add_option("--model", *model, "svm or nb")->check(CLI::IsMember({"svm", "nb"}));
    cmd->add_option("--vocab_cap", *vocab_cap, "keep only the most frequent tokens (0 = uncapped)");
    cmd->add_option("--base_seed", cfg->base_seed, "base seed for corruption and training");
    cmd->add_option("-o,--out", *out_path, "output CSV path ('-' = stdout)");
    cmd->add_option("--dump-weights", *dump_path,
                    "also write the clean-baseline model's per-token weights to this file");
    cmd->set_config("--config", "", "read options from an INI/TOML file (flags override)");

    cmd->callback([=] {
        cfg->eval_paths = parse_eval_paths(*eval_raw);
        cfg->target = *target == "rationale"      ? fn::TargetChoice::kRationale
                      : *target == "non-rationale" ? fn::TargetChoice::kNonRationale
                                                    : fn::TargetChoice::kBoth;
        cfg->model = *model == "nb" ? fn::ModelKind::kNaiveBayes : fn::ModelKind::kLinearSvm;
        if (*vocab_cap > 0) cfg->vocab_cap = *vocab_cap;

        const fn::ResultTable table = fn::run_noise_sweep(*cfg);
        OutputTarget out(*out_path);
        fn::emit_csv(table, out.stream());

        if (!dump_path->empty()) {
            const fn::Corpus train = fn::load_jsonl(cfg->train_path);
            const fn::Vocabulary vocab = fn::build_vocabulary(train, cfg->vocab_cap);
            std::ofstream dump(*dump_path);
            if (!dump) {
                throw fn::IoError("cannot write " + *dump_path);
            }
            if (cfg->model == fn::ModelKind::kLinearSvm) {
                const fn::TfidfModel tfidf = fn::fit_tfidf(train, vocab);
                const fn::LabelMap labels = fn::LabelMap::from_labels(train.labels);
                std::vector<fn::SparseVector> features;
                std::vector<double> signs;
                for (const fn::Document& d : train.docs) {
                    features.push_back(fn::transform(tfidf, d));
                    signs.push_back(labels.sign_of(d.label));
                }
                fn::LinearHyper hyper;
                hyper.seed = cfg->base_seed;
                fn::dump_weights(fn::train_linear(features, signs, hyper), vocab, dump);
            } else {
                fn::dump_weights(fn::train_naive_bayes(train, vocab), dump);
            }
        }
    });
}

void add_synth_gen(CLI::App& app) {
    auto* cmd = app.add_subcommand("synth-gen",
                                   "Generate the planted-spurious synthetic corpus (train, "
                                   "id_test, ood_test JSONL files)");
    auto spec = std::make_shared<fn::PlantedCorpusSpec>();
    auto out_dir = std::make_shared<std::string>();

    cmd->add_option("--n-train", spec->n_train, "training documents");
    cmd->add_option("--n-id-test", spec->n_id_test, "in-domain test documents");
    cmd->add_option("--n-ood-test", spec->n_ood_test, "out-of-domain test documents");
    cmd->add_option("--n-causal-tokens", spec->n_causal_tokens, "causal slots per document");
    cmd->add_option("--n-spurious-tokens", spec->n_spurious_tokens, "spurious slots per document");
    cmd->add_option("--n-filler-tokens", spec->n_filler_tokens, "filler vocabulary size");
    cmd->add_option("--causal-strength", spec->causal_strength,
                    "P(causal token agrees with label), in [0.5, 1]");
    cmd->add_option("--confound-strength", spec->confound_strength,
                    "P(spurious token agrees with label) in train/id_test, in [0.5, 1]");
    cmd->add_option("--doc-length", spec->doc_length, "tokens per document");
    cmd->add_option("--seed", spec->seed, "generator seed");
    cmd->add_option("-o,--out-dir", *out_dir, "output directory")->required();

    cmd->callback([=] {
        std::error_code ec;
        std::filesystem::create_directories(*out_dir, ec);
        if (ec) {
            throw fn::IoError("cannot create " + *out_dir + ": " + ec.message());
        }
        const fn::PlantedCorpus corpus = fn::generate_planted_corpus(*spec);
        const auto dir = std::filesystem::path(*out_dir);
        fn::save_jsonl(corpus.train, (dir / "train.jsonl").string());
        fn::save_jsonl(corpus.id_test, (dir / "id_test.jsonl").string());
        fn::save_jsonl(corpus.ood_test, (dir / "ood_test.jsonl").string());
        std::cout << "wrote " << (dir / "train.jsonl").string() << " ("
                  << corpus.train.size() << " docs), id_test.jsonl (" << corpus.id_test.size()
                  << "), ood_test.jsonl (" << corpus.ood_test.size() << ")\n";
    });
}

void add_equal_mass(CLI::App& app) {
    auto* cmd = app.add_subcommand("equal-mass",
                                   "Non-rationale fraction whose token mass matches noising all "
                                   "rationales (median ratio)");
    auto path = std::make_shared<std::string>();
    cmd->add_option("-c,--corpus", *path, "corpus JSONL path")->required();
    cmd->callback([=] {
        const double f = fn::equal_mass_fraction(fn::load_jsonl(*path));
        std::cout << fn::format_decimal(f, 6) << "\n";
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rationale-noise and SCM measurement-noise toolkit"};
    app.require_subcommand(1);
    add_scm_sweep(app);
    add_noise_sweep(app);
    add_synth_gen(app);
    add_equal_mass(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const fn::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fn::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const fn::SingularError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
