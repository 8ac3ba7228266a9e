#include "svmlab/eval.hpp"

#include "fmt/format.h"

#include <algorithm>

namespace svmlab {

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, int positive) {
    if (truth.size() != predicted.size()) {
        throw Error{ ErrorKind::LengthMismatch, fmt::format("{} labels against {} predictions", truth.size(), predicted.size()) };
    }
    if (truth.empty()) {
        throw Error{ ErrorKind::InvalidArgument, "confusion matrix of zero samples" };
    }
    if (positive != kPositive && positive != kNegative) {
        throw Error{ ErrorKind::InvalidArgument, fmt::format("positive label must be +1 or -1, got {}", positive) };
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool actual = truth[i] == positive;
        const bool guessed = predicted[i] == positive;
        if (actual) {
            ++(guessed ? cm.tp : cm.fn);
        } else {
            ++(guessed ? cm.fp : cm.tn);
        }
    }
    return cm;
}

Metrics metrics(const ConfusionMatrix &cm) {
    if (cm.total() == 0) {
        throw Error{ ErrorKind::EmptyMatrix, "confusion matrix is empty" };
    }
    Metrics m;
    m.support = cm.total();
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(m.support);
    if (cm.tp + cm.fn > 0) {
        m.sensitivity = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    }
    if (cm.tn + cm.fp > 0) {
        m.specificity = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
    }
    return m;
}

std::optional<double> balanced_accuracy(const Metrics &m) {
    if (!m.sensitivity || !m.specificity) {
        return std::nullopt;
    }
    return 0.5 * (*m.sensitivity + *m.specificity);
}

int minority_positive(const Dataset &ds) {
    return ds.count(kNegative) < ds.count(kPositive) ? kNegative : kPositive;
}

std::size_t CvResult::failed_folds() const {
    return static_cast<std::size_t>(std::count_if(folds.begin(), folds.end(), [](const FoldResult &f) { return f.error_kind.has_value(); }));
}

CvResult cross_validate(const Dataset &ds, const TrainConfig &cfg, const FoldPlan &folds, const CvOptions &opts) {
    if (folds.assignments.size() != ds.size()) {
        throw Error{ ErrorKind::LengthMismatch, fmt::format("fold plan covers {} samples, data set has {}", folds.assignments.size(), ds.size()) };
    }
    if (opts.gram && opts.gram->order() != ds.size()) {
        throw Error{ ErrorKind::LengthMismatch, "precomputed Gram matrix does not match the data set" };
    }
    validate(cfg);

    CvResult result;
    result.positive_label = opts.positive_label.value_or(minority_positive(ds));
    const bool reuse_gram = opts.gram != nullptr && !cfg.min_max_scale;

    for (std::size_t f = 0; f < folds.k; ++f) {
        FoldResult fr;
        fr.fold = f;
        const auto train_rows = folds.train_indices(f);
        const auto test_rows = folds.test_indices(f);
        try {
            if (test_rows.empty()) {
                throw Error{ ErrorKind::TooFewSamples, "empty test fold" };
            }
            std::vector<int> truth(test_rows.size());
            std::vector<int> predicted(test_rows.size());
            for (std::size_t t = 0; t < test_rows.size(); ++t) {
                truth[t] = ds.label(test_rows[t]);
            }
            if (reuse_gram) {
                const auto out = train_on_gram(ds, train_rows, gram_submatrix(*opts.gram, train_rows), cfg);
                fr.converged = out.model.converged;
                const auto &alpha = out.solution.alpha;
                for (std::size_t t = 0; t < test_rows.size(); ++t) {
                    const auto krow = opts.gram->k.row(test_rows[t]);
                    double v = out.model.bias;
                    for (std::size_t k = 0; k < train_rows.size(); ++k) {
                        if (alpha[k] > kSvThreshold) {
                            v += alpha[k] * ds.label(train_rows[k]) * krow[train_rows[k]];
                        }
                    }
                    predicted[t] = v >= 0.0 ? kPositive : kNegative;
                }
            } else {
                const auto model = train(ds.subset(train_rows), cfg);
                fr.converged = model.converged;
                for (std::size_t t = 0; t < test_rows.size(); ++t) {
                    predicted[t] = predict(model, ds.row(test_rows[t]));
                }
            }
            fr.confusion = confusion(truth, predicted, result.positive_label);
            fr.metrics = metrics(*fr.confusion);
            result.pooled += *fr.confusion;
            result.all_converged = result.all_converged && fr.converged;
        } catch (const Error &e) {
            fr.error_kind = e.kind();
            fr.error = fmt::format("fold {}: {}", f, e.what());
            result.partial = true;
        }
        result.folds.push_back(std::move(fr));
    }
    if (result.pooled.total() > 0) {
        result.metrics = metrics(result.pooled);
    }
    return result;
}

}  // namespace svmlab
