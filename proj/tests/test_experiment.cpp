#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "featnoise/experiment.hpp"

using namespace featnoise;

TEST_CASE("ExperimentConfig validation") {
    ExperimentConfig cfg;
    CHECK_NOTHROW(validate(cfg));

    ExperimentConfig dup = cfg;
    dup.fractions = {0.0, 0.5, 0.5};
    CHECK_THROWS_AS(validate(dup), ValidationError);

    ExperimentConfig unsorted = cfg;
    unsorted.fractions = {0.5, 0.0};
    CHECK_THROWS_AS(validate(unsorted), ValidationError);

    ExperimentConfig out_of_range = cfg;
    out_of_range.fractions = {0.0, 1.5};
    CHECK_THROWS_AS(validate(out_of_range), ValidationError);

    ExperimentConfig no_reps = cfg;
    no_reps.repetitions = 0;
    CHECK_THROWS_AS(validate(no_reps), ValidationError);

    ExperimentConfig empty_grid = cfg;
    empty_grid.fractions = {};
    CHECK_THROWS_AS(validate(empty_grid), ValidationError);
}

TEST_CASE("PlantedCorpusSpec validation") {
    PlantedCorpusSpec spec;
    CHECK_NOTHROW(validate(spec));

    PlantedCorpusSpec weak = spec;
    weak.causal_strength = 0.4;
    CHECK_THROWS_AS(validate(weak), ValidationError);

    PlantedCorpusSpec too_short = spec;
    too_short.doc_length = spec.n_causal_tokens + spec.n_spurious_tokens - 1;
    CHECK_THROWS_AS(validate(too_short), ValidationError);
}

TEST_CASE("generate_planted_corpus: structure and determinism") {
    PlantedCorpusSpec spec;
    spec.n_train = 50;
    spec.n_id_test = 20;
    spec.n_ood_test = 20;
    spec.seed = 5;
    const PlantedCorpus a = generate_planted_corpus(spec);
    CHECK(a.train.size() == 50);
    CHECK(a.id_test.size() == 20);
    CHECK(a.ood_test.size() == 20);
    for (const Document& d : a.train.docs) {
        REQUIRE(d.tokens.size() == spec.doc_length);
        std::size_t rationale = 0;
        for (std::size_t i = 0; i < d.tokens.size(); ++i) {
            if (d.rationale_mask[i]) {
                ++rationale;
                CHECK(d.tokens[i][0] == 'c');  // rationale marks exactly causal slots
            } else {
                CHECK(d.tokens[i][0] != 'c');
            }
        }
        CHECK(rationale == spec.n_causal_tokens);
    }
    const PlantedCorpus b = generate_planted_corpus(spec);
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        CHECK(a.train.docs[i].tokens == b.train.docs[i].tokens);
        CHECK(a.train.docs[i].label == b.train.docs[i].label);
    }
}

namespace {

// Fraction of group tokens whose polarity suffix agrees with the label.
double agreement_rate(const Corpus& c, char group) {
    std::size_t agree = 0, total = 0;
    for (const Document& d : c.docs) {
        for (const std::string& t : d.tokens) {
            if (t[0] != group) continue;
            ++total;
            const bool signals_pos = t.find("_pos") != std::string::npos;
            if (signals_pos == (d.label == "pos")) ++agree;
        }
    }
    return static_cast<double>(agree) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("generate_planted_corpus: perfect strengths are perfectly predictive") {
    PlantedCorpusSpec spec;
    spec.n_train = 200;
    spec.n_id_test = 50;
    spec.n_ood_test = 50;
    spec.causal_strength = 1.0;
    spec.confound_strength = 1.0;
    spec.seed = 9;
    const PlantedCorpus p = generate_planted_corpus(spec);
    CHECK(agreement_rate(p.train, 'c') == 1.0);
    CHECK(agreement_rate(p.train, 's') == 1.0);
    CHECK(agreement_rate(p.ood_test, 'c') == 1.0);
    // OOD spurious agreement collapses to coin-flip level.
    CHECK(std::abs(agreement_rate(p.ood_test, 's') - 0.5) < 0.2);
}

TEST_CASE("generate_planted_corpus: confound 0.5 is uninformative everywhere") {
    PlantedCorpusSpec spec;
    spec.n_train = 2000;
    spec.n_id_test = 100;
    spec.n_ood_test = 100;
    spec.confound_strength = 0.5;
    spec.seed = 31;
    const PlantedCorpus p = generate_planted_corpus(spec);
    const double n_spurious =
        static_cast<double>(spec.n_train) * static_cast<double>(spec.n_spurious_tokens);
    const double se = std::sqrt(0.25 / n_spurious);
    CHECK(std::abs(agreement_rate(p.train, 's') - 0.5) <= 4.0 * se);
}

TEST_CASE("generate_planted_corpus: empirical rates match the spec probabilities") {
    PlantedCorpusSpec spec;
    spec.n_train = 10000;
    spec.n_id_test = 10;
    spec.n_ood_test = 10;
    spec.causal_strength = 0.85;
    spec.confound_strength = 0.7;
    spec.seed = 77;
    const PlantedCorpus p = generate_planted_corpus(spec);
    const double n_causal =
        static_cast<double>(spec.n_train) * static_cast<double>(spec.n_causal_tokens);
    const double se_c = std::sqrt(0.85 * 0.15 / n_causal);
    CHECK(std::abs(agreement_rate(p.train, 'c') - 0.85) <= 4.0 * se_c);
    const double n_spurious =
        static_cast<double>(spec.n_train) * static_cast<double>(spec.n_spurious_tokens);
    const double se_s = std::sqrt(0.7 * 0.3 / n_spurious);
    CHECK(std::abs(agreement_rate(p.train, 's') - 0.7) <= 4.0 * se_s);
}

namespace {

PlantedCorpus small_planted() {
    PlantedCorpusSpec spec;
    spec.n_train = 300;
    spec.n_id_test = 150;
    spec.n_ood_test = 150;
    spec.n_causal_tokens = 4;
    spec.n_spurious_tokens = 4;
    spec.n_filler_tokens = 60;
    spec.doc_length = 16;
    spec.causal_strength = 0.9;
    spec.confound_strength = 0.9;
    spec.seed = 20250808;
    return generate_planted_corpus(spec);
}

std::map<std::string, double> mean_accuracy_by_key(const ResultTable& t) {
    std::map<std::string, double> out;
    char buf[64];
    for (const ResultRow& r : t.rows) {
        if (r.repetition) continue;
        std::snprintf(buf, sizeof(buf), "%s|%s|%.2f", r.domain.c_str(), r.target.c_str(), r.fraction);
        out[buf] = r.accuracy;
    }
    return out;
}

}  // namespace

TEST_CASE("run_noise_sweep: row count, baseline grid, and determinism") {
    const PlantedCorpus p = small_planted();
    ExperimentConfig cfg;
    cfg.fractions = {0.0};
    cfg.repetitions = 1;
    cfg.target = TargetChoice::kBoth;
    cfg.base_seed = 3;
    const std::vector<NamedCorpus> evals = {{"insample", p.id_test}, {"ood", p.ood_test}};
    const ResultTable t = run_noise_sweep(p.train, evals, cfg);
    // 2 targets x 1 fraction x 1 repetition x 2 domains + mean rows
    CHECK(t.rows.size() == 2 * 1 * 1 * 2 + 2 * 1 * 2);

    std::ostringstream csv1, csv2;
    emit_csv(t, csv1);
    emit_csv(run_noise_sweep(p.train, evals, cfg), csv2);
    CHECK(csv1.str() == csv2.str());
}

TEST_CASE("run_noise_sweep: fraction-0 cells equal the baseline for every target") {
    const PlantedCorpus p = small_planted();
    ExperimentConfig cfg;
    cfg.fractions = {0.0, 1.0};
    cfg.repetitions = 2;
    cfg.target = TargetChoice::kBoth;
    cfg.base_seed = 11;
    const std::vector<NamedCorpus> evals = {{"insample", p.id_test}, {"ood", p.ood_test}};
    const auto means = mean_accuracy_by_key(run_noise_sweep(p.train, evals, cfg));

    ExperimentConfig baseline_cfg = cfg;
    baseline_cfg.target = TargetChoice::kRationale;
    baseline_cfg.fractions = {0.0};
    const auto baseline = mean_accuracy_by_key(run_noise_sweep(p.train, evals, baseline_cfg));

    for (const char* domain : {"insample", "ood"}) {
        const double base = baseline.at(std::string(domain) + "|rationale|0.00");
        CHECK(means.at(std::string(domain) + "|rationale|0.00") == base);
        CHECK(means.at(std::string(domain) + "|non_rationale|0.00") == base);
    }
}

TEST_CASE("run_noise_sweep: rationale noise hurts OOD more than in-sample") {
    const PlantedCorpus p = small_planted();
    ExperimentConfig cfg;
    cfg.fractions = {0.0, 1.0};
    cfg.repetitions = 2;
    cfg.target = TargetChoice::kBoth;
    cfg.base_seed = 21;
    const std::vector<NamedCorpus> evals = {{"insample", p.id_test}, {"ood", p.ood_test}};
    const auto means = mean_accuracy_by_key(run_noise_sweep(p.train, evals, cfg));

    const double id_drop = means.at("insample|rationale|0.00") - means.at("insample|rationale|1.00");
    const double ood_drop = means.at("ood|rationale|0.00") - means.at("ood|rationale|1.00");
    CHECK(ood_drop > id_drop);
    CHECK(means.at("ood|non_rationale|1.00") >= means.at("ood|rationale|1.00"));
}

TEST_CASE("run_noise_sweep: Naive Bayes path and vocabulary cap") {
    const PlantedCorpus p = small_planted();
    ExperimentConfig cfg;
    cfg.fractions = {0.0, 1.0};
    cfg.repetitions = 1;
    cfg.target = TargetChoice::kRationale;
    cfg.model = ModelKind::kNaiveBayes;
    cfg.vocab_cap = 32;
    cfg.base_seed = 5;
    const std::vector<NamedCorpus> evals = {{"insample", p.id_test}, {"ood", p.ood_test}};
    const ResultTable t = run_noise_sweep(p.train, evals, cfg);
    REQUIRE(t.rows.size() == 1 * 2 * 1 * 2 + 2 * 2);
    for (const ResultRow& r : t.rows) {
        CHECK(r.model == std::string("nb"));
        CHECK(r.accuracy >= 0.0);
        CHECK(r.accuracy <= 1.0);
    }
}

TEST_CASE("run_noise_sweep: rejects a corpus without rationale annotations") {
    Corpus train;
    train.labels = {"neg", "pos"};
    for (int i = 0; i < 4; ++i) {
        Document d;
        d.id = "d" + std::to_string(i);
        d.label = i % 2 ? "pos" : "neg";
        d.tokens = {"a", "b"};
        d.rationale_mask = {false, false};
        train.docs.push_back(d);
    }
    ExperimentConfig cfg;
    CHECK_THROWS_AS(run_noise_sweep(train, {{"insample", train}}, cfg), ValidationError);
}

TEST_CASE("emit_csv: empty table yields a header-only file") {
    std::ostringstream out;
    emit_csv(ResultTable{}, out);
    CHECK(out.str() == "model,domain,target,fraction,repetition,accuracy\n");
}

TEST_CASE("emit_csv: four-decimal accuracy and mean rows") {
    ResultTable t;
    t.rows.push_back({"svm", "insample", "rationale", 0.1, 1, 0.878});
    t.rows.push_back({"svm", "insample", "rationale", 0.1, std::nullopt, 0.87849999});
    std::ostringstream out;
    emit_csv(t, out);
    CHECK(out.str() ==
          "model,domain,target,fraction,repetition,accuracy\n"
          "svm,insample,rationale,0.1,1,0.8780\n"
          "svm,insample,rationale,0.1,mean,0.8785\n");
}

TEST_CASE("emit_csv / read_result_csv round trip") {
    ResultTable t;
    t.rows.push_back({"svm", "insample", "rationale", 0.0, 1, 0.9125});
    t.rows.push_back({"svm", "ood", "non_rationale", 0.25, 5, 0.5});
    t.rows.push_back({"nb", "ood", "rationale", 1.0, std::nullopt, 0.7325});
    std::ostringstream out;
    emit_csv(t, out);
    std::istringstream in(out.str());
    const ResultTable back = read_result_csv(in);
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(back.rows[i].model == t.rows[i].model);
        CHECK(back.rows[i].domain == t.rows[i].domain);
        CHECK(back.rows[i].target == t.rows[i].target);
        CHECK(back.rows[i].fraction == t.rows[i].fraction);
        CHECK(back.rows[i].repetition == t.rows[i].repetition);
        CHECK(back.rows[i].accuracy == doctest::Approx(t.rows[i].accuracy).epsilon(1e-9));
    }
}

TEST_CASE("run_scm_sweep: writes the sweep CSV") {
    SweepParams params;
    std::ostringstream out;
    run_scm_sweep(SweepSetting::kCausalX1, params, {0.0, 1.0}, std::nullopt, out);
    const std::string csv = out.str();
    CHECK(csv.find("setting,eps,") == 0);
    CHECK(csv.find("causal_x1,1.00000000000,0.600000000000,0.200000000000") != std::string::npos);
    CHECK_THROWS_AS(run_scm_sweep(SweepSetting::kCausalX1, params, {}, std::nullopt, out),
                    ValidationError);
}
