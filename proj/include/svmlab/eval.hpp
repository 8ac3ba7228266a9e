#pragma once

#include "svmlab/dataset.hpp"
#include "svmlab/errors.hpp"
#include "svmlab/kernel.hpp"
#include "svmlab/svm.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace svmlab {

struct ConfusionMatrix {
    std::size_t tp{ 0 };
    std::size_t fn{ 0 };
    std::size_t fp{ 0 };
    std::size_t tn{ 0 };

    [[nodiscard]] std::size_t total() const noexcept { return tp + fn + fp + tn; }
    ConfusionMatrix &operator+=(const ConfusionMatrix &o) noexcept {
        tp += o.tp;
        fn += o.fn;
        fp += o.fp;
        tn += o.tn;
        return *this;
    }
    friend bool operator==(const ConfusionMatrix &, const ConfusionMatrix &) = default;
};

/// Ratios with a zero denominator are absent.
struct Metrics {
    double accuracy{ 0.0 };
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::size_t support{ 0 };
};

[[nodiscard]] ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, int positive);
[[nodiscard]] Metrics metrics(const ConfusionMatrix &cm);
/// Mean of sensitivity and specificity; absent when either is.
[[nodiscard]] std::optional<double> balanced_accuracy(const Metrics &m);

/// +1 unless the -1 class is strictly smaller.
[[nodiscard]] int minority_positive(const Dataset &ds);

struct FoldResult {
    std::size_t fold{ 0 };
    std::optional<ConfusionMatrix> confusion;
    std::optional<Metrics> metrics;
    bool converged{ true };
    std::optional<ErrorKind> error_kind;
    std::string error;
};

struct CvResult {
    ConfusionMatrix pooled;
    /// Absent when every fold failed.
    std::optional<Metrics> metrics;
    std::vector<FoldResult> folds;
    int positive_label{ kPositive };
    /// Some fold failed and is missing from the pooled counts.
    bool partial{ false };
    bool all_converged{ true };

    [[nodiscard]] std::size_t failed_folds() const;
};

struct CvOptions {
    /// Class treated as positive for the metrics; defaults to the minority class.
    std::optional<int> positive_label;
    /// Gram matrix of the full data set under the configured kernel, if already available.
    const GramMatrix *gram{ nullptr };
};

[[nodiscard]] CvResult cross_validate(const Dataset &ds, const TrainConfig &cfg, const FoldPlan &folds, const CvOptions &opts = {});

}  // namespace svmlab
