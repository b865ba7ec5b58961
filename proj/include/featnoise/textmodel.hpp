#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "featnoise/corpus.hpp"

namespace featnoise {

// Desk-scale standard methods: TF-IDF bag-of-words features, a hinge-loss
// linear classifier trained by seeded stochastic subgradient descent, and a
// multinomial Naive Bayes classifier.

// L2-normalized sparse feature vector; indices strictly increasing, values
// nonzero. A document with no in-vocabulary token maps to the zero vector.
struct SparseVector {
    std::vector<std::pair<std::size_t, double>> entries;

    double norm() const;
};

// idf(t) = ln((1 + N) / (1 + df(t))) + 1 over N documents. The +1 terms
// keep every weight at or above 1.
struct TfidfModel {
    Vocabulary vocab;
    std::vector<double> idf;
    std::size_t doc_count = 0;
};

// Maps the two corpus labels onto the {-1, +1} convention: the
// lexicographically larger label name is the positive class unless
// overridden.
struct LabelMap {
    std::string positive;
    std::string negative;

    static LabelMap from_labels(const std::vector<std::string>& labels);
    double sign_of(const std::string& label) const;
};

struct LinearHyper {
    double reg_strength = 1.0;  // C in the hinge objective
    std::size_t epochs = 30;
    std::uint64_t seed = 0;
};

struct LinearModel {
    std::vector<double> weights;  // one per vocabulary index
    double bias = 0.0;
    LinearHyper hyper;

    double decision(const SparseVector& x) const;
};

struct NaiveBayesModel {
    Vocabulary vocab;
    LabelMap label_map;
    double log_prior_pos = 0.0;
    double log_prior_neg = 0.0;
    std::vector<double> log_lik_pos;  // per vocabulary index, Laplace smoothed
    std::vector<double> log_lik_neg;
    double alpha = 1.0;

    // log P(pos | d) - log P(neg | d) up to the shared evidence term.
    double decision(const Document& d) const;
};

TfidfModel fit_tfidf(const Corpus& c, const Vocabulary& v);
SparseVector transform(const TfidfModel& m, const Document& d);

// Minimizes (1/C) * 0.5 ||w||^2 + sum_i hinge(1 - y_i (w.x_i + b)) by
// stochastic subgradient descent with step eta_t = 1/(lambda t),
// lambda = 1/(C n). The bias rides along as a regularized extra coordinate.
// Example order is reshuffled each epoch from the seed, so training is
// deterministic.
LinearModel train_linear(std::span<const SparseVector> features, std::span<const double> labels,
                         const LinearHyper& hyper);

// Multinomial Naive Bayes with Laplace smoothing; closed form, no
// randomness.
NaiveBayesModel train_naive_bayes(const Corpus& c, const Vocabulary& v, double alpha = 1.0);

// Fraction of documents whose predicted label matches. Decision values of
// exactly 0 predict the positive class.
double evaluate(const LinearModel& model, const TfidfModel& m, const LabelMap& labels, const Corpus& c);
double evaluate(const NaiveBayesModel& model, const Corpus& c);

// Flat inspection dump, one line per token: index, token, weight. For the
// linear model the weight is the learned coefficient; for Naive Bayes it is
// the class log-likelihood ratio.
void dump_weights(const LinearModel& model, const Vocabulary& v, std::ostream& out);
void dump_weights(const NaiveBayesModel& model, std::ostream& out);

}  // namespace featnoise
