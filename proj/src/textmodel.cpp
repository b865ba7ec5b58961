#include "featnoise/textmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace featnoise {

double SparseVector::norm() const {
    double s = 0.0;
    for (const auto& [idx, v] : entries) s += v * v;
    return std::sqrt(s);
}

LabelMap LabelMap::from_labels(const std::vector<std::string>& labels) {
    if (labels.size() != 2) {
        throw ValidationError("classification requires exactly two labels");
    }
    LabelMap m;
    if (labels[0] < labels[1]) {
        m.positive = labels[1];
        m.negative = labels[0];
    } else {
        m.positive = labels[0];
        m.negative = labels[1];
    }
    return m;
}

double LabelMap::sign_of(const std::string& label) const {
    if (label == positive) return 1.0;
    if (label == negative) return -1.0;
    throw ValidationError("label '" + label + "' not covered by the label map");
}

TfidfModel fit_tfidf(const Corpus& c, const Vocabulary& v) {
    if (c.docs.empty()) {
        throw ValidationError("cannot fit TF-IDF on an empty corpus");
    }
    TfidfModel m;
    m.vocab = v;
    m.doc_count = c.docs.size();
    // Document frequencies are recomputed over the fitting corpus; the
    // vocabulary may have been built elsewhere (or truncated).
    std::vector<std::size_t> df(v.size(), 0);
    std::vector<std::size_t> last_doc(v.size(), static_cast<std::size_t>(-1));
    for (std::size_t doc_idx = 0; doc_idx < c.docs.size(); ++doc_idx) {
        for (const std::string& t : c.docs[doc_idx].tokens) {
            if (auto idx = v.index_of(t)) {
                if (last_doc[*idx] != doc_idx) {
                    last_doc[*idx] = doc_idx;
                    ++df[*idx];
                }
            }
        }
    }
    const double n = static_cast<double>(m.doc_count);
    m.idf.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        m.idf[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[i]))) + 1.0;
    }
    return m;
}

SparseVector transform(const TfidfModel& m, const Document& d) {
    std::map<std::size_t, double> counts;
    for (const std::string& t : d.tokens) {
        if (auto idx = m.vocab.index_of(t)) {
            counts[*idx] += 1.0;
        }
    }
    SparseVector x;
    x.entries.reserve(counts.size());
    double norm2 = 0.0;
    for (const auto& [idx, count] : counts) {
        const double v = count * m.idf[idx];
        norm2 += v * v;
        x.entries.emplace_back(idx, v);
    }
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& [idx, v] : x.entries) v *= inv;
    }
    return x;
}

double LinearModel::decision(const SparseVector& x) const {
    double s = bias;
    for (const auto& [idx, v] : x.entries) {
        if (idx < weights.size()) s += weights[idx] * v;
    }
    return s;
}

LinearModel train_linear(std::span<const SparseVector> features, std::span<const double> labels,
                         const LinearHyper& hyper) {
    if (features.size() != labels.size() || features.empty()) {
        throw ValidationError("feature/label size mismatch");
    }
    if (!(hyper.reg_strength > 0.0) || hyper.epochs == 0) {
        throw ValidationError("reg_strength must be > 0 and epochs >= 1");
    }
    bool has_pos = false, has_neg = false;
    std::size_t dim = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (labels[i] == 1.0) has_pos = true;
        else if (labels[i] == -1.0) has_neg = true;
        else throw ValidationError("labels must be -1 or +1");
        if (!features[i].entries.empty()) {
            dim = std::max(dim, features[i].entries.back().first + 1);
        }
    }
    if (!has_pos || !has_neg) {
        throw ValidationError("training data contains a single class");
    }

    const std::size_t n = features.size();
    const double lambda = 1.0 / (hyper.reg_strength * static_cast<double>(n));

    // The regularization shrink is carried in a scalar so each step touches
    // only the nonzero coordinates of the current example.
    std::vector<double> stored(dim, 0.0);
    double scale = 1.0;
    double bias = 0.0;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(hyper.seed);

    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
            std::swap(order[i], order[j]);
        }
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double shrink = 1.0 - eta * lambda;  // = 1 - 1/t, zero at t = 1
            if (shrink == 0.0) {
                std::fill(stored.begin(), stored.end(), 0.0);
                scale = 1.0;
                bias = 0.0;
            } else {
                scale *= shrink;
                bias *= shrink;
            }
            const SparseVector& x = features[i];
            double margin = bias;
            for (const auto& [idx, v] : x.entries) margin += scale * stored[idx] * v;
            if (labels[i] * margin < 1.0) {
                const double step = eta * labels[i];
                for (const auto& [idx, v] : x.entries) stored[idx] += step * v / scale;
                bias += step;
            }
            if (scale < 1e-9) {
                for (double& w : stored) w *= scale;
                scale = 1.0;
            }
        }
    }

    LinearModel model;
    model.hyper = hyper;
    model.bias = bias;
    model.weights.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) model.weights[i] = scale * stored[i];
    return model;
}

NaiveBayesModel train_naive_bayes(const Corpus& c, const Vocabulary& v, double alpha) {
    if (!(alpha > 0.0)) {
        throw ValidationError("Laplace alpha must be > 0");
    }
    if (v.size() == 0) {
        throw ValidationError("empty vocabulary");
    }
    NaiveBayesModel m;
    m.vocab = v;
    m.alpha = alpha;
    m.label_map = LabelMap::from_labels(c.labels);

    std::vector<double> count_pos(v.size(), 0.0), count_neg(v.size(), 0.0);
    double total_pos = 0.0, total_neg = 0.0;
    std::size_t docs_pos = 0, docs_neg = 0;
    for (const Document& d : c.docs) {
        const bool is_pos = m.label_map.sign_of(d.label) > 0.0;
        (is_pos ? docs_pos : docs_neg) += 1;
        for (const std::string& t : d.tokens) {
            if (auto idx = v.index_of(t)) {
                if (is_pos) {
                    count_pos[*idx] += 1.0;
                    total_pos += 1.0;
                } else {
                    count_neg[*idx] += 1.0;
                    total_neg += 1.0;
                }
            }
        }
    }
    if (docs_pos == 0 || docs_neg == 0) {
        throw ValidationError("each class needs at least one document");
    }

    const double n_docs = static_cast<double>(c.docs.size());
    m.log_prior_pos = std::log(static_cast<double>(docs_pos) / n_docs);
    m.log_prior_neg = std::log(static_cast<double>(docs_neg) / n_docs);

    const double vsize = static_cast<double>(v.size());
    m.log_lik_pos.resize(v.size());
    m.log_lik_neg.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        m.log_lik_pos[i] = std::log((count_pos[i] + alpha) / (total_pos + alpha * vsize));
        m.log_lik_neg[i] = std::log((count_neg[i] + alpha) / (total_neg + alpha * vsize));
    }
    return m;
}

double NaiveBayesModel::decision(const Document& d) const {
    double score = log_prior_pos - log_prior_neg;
    for (const std::string& t : d.tokens) {
        if (auto idx = vocab.index_of(t)) {
            score += log_lik_pos[*idx] - log_lik_neg[*idx];
        }
    }
    return score;
}

namespace {

double accuracy_from_decisions(const Corpus& c, const LabelMap& labels,
                               const std::vector<double>& decisions) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < c.docs.size(); ++i) {
        const double predicted = decisions[i] >= 0.0 ? 1.0 : -1.0;
        if (predicted == labels.sign_of(c.docs[i].label)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(c.docs.size());
}

}  // namespace

double evaluate(const LinearModel& model, const TfidfModel& m, const LabelMap& labels, const Corpus& c) {
    if (c.docs.empty()) {
        throw ValidationError("cannot evaluate on an empty corpus");
    }
    std::vector<double> decisions;
    decisions.reserve(c.docs.size());
    for (const Document& d : c.docs) {
        decisions.push_back(model.decision(transform(m, d)));
    }
    return accuracy_from_decisions(c, labels, decisions);
}

double evaluate(const NaiveBayesModel& model, const Corpus& c) {
    if (c.docs.empty()) {
        throw ValidationError("cannot evaluate on an empty corpus");
    }
    std::vector<double> decisions;
    decisions.reserve(c.docs.size());
    for (const Document& d : c.docs) {
        decisions.push_back(model.decision(d));
    }
    return accuracy_from_decisions(c, model.label_map, decisions);
}

void dump_weights(const LinearModel& model, const Vocabulary& v, std::ostream& out) {
    for (std::size_t i = 0; i < v.size() && i < model.weights.size(); ++i) {
        out << i << '\t' << v.tokens[i] << '\t' << format_decimal(model.weights[i]) << '\n';
    }
}

void dump_weights(const NaiveBayesModel& model, std::ostream& out) {
    for (std::size_t i = 0; i < model.vocab.size(); ++i) {
        out << i << '\t' << model.vocab.tokens[i] << '\t'
            << format_decimal(model.log_lik_pos[i] - model.log_lik_neg[i]) << '\n';
    }
}

}  // namespace featnoise
