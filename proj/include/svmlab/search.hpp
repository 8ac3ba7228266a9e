#pragma once

#include "svmlab/dataset.hpp"
#include "svmlab/eval.hpp"
#include "svmlab/svm.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace svmlab {

enum class SelectionMetric { Accuracy, BalancedAccuracy };

struct SearchOptions {
    /// Variant, solver and scaling for every candidate; kernel and C are set by the search.
    TrainConfig base{};
    SelectionMetric metric{ SelectionMetric::Accuracy };
    std::optional<int> positive_label;
    /// Scores within this distance of the best count as ties when collecting C-tilde values.
    double tie_tolerance{ 1e-9 };
    /// 0 means worker_count().
    std::size_t threads{ 0 };
};

struct CSweepSpec {
    std::vector<double> log10_c_values{ -7, -6, -5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5, 6, 7 };
};

struct Sigma2Range {
    enum class Source { DataDerived, Manual };
    double lo{ 0.0 };
    double hi{ 0.0 };
    Source source{ Source::Manual };
};

struct LineSearchSpec {
    std::vector<double> c_tilde_values;
    std::vector<double> sigma2_grid;
    double spacing_log10{ 1.0 };
    /// Second pass at refine_step_log10 around the incumbent, along its own line.
    bool refine{ false };
    double refine_step_log10{ 0.25 };
};

struct Candidate {
    double c{ 0.0 };
    /// Absent for the linear kernel.
    std::optional<double> sigma2;
    std::optional<double> c_tilde;
    CvResult cv;
    std::uint64_t fold_seed{ 0 };
    /// Set when the evaluation itself failed.
    std::string error;

    [[nodiscard]] std::optional<double> score(SelectionMetric metric) const;
};

struct TuneResult {
    std::string method;
    std::vector<Candidate> candidates;
    std::optional<std::size_t> best;
    std::size_t evaluations{ 0 };
    /// C values tied with the best score (linear sweep only), ascending.
    std::vector<double> c_tilde;
    /// Best C (or sigma2) sits on the edge of the searched range.
    bool best_on_boundary{ false };
};

[[nodiscard]] TuneResult linear_c_sweep(const Dataset &ds, const CSweepSpec &spec, const FoldPlan &folds,
                                        const SearchOptions &opts = {});

/// Throws AllCoincident when max_intra is 0.
[[nodiscard]] Sigma2Range sigma2_range_from_data(const DistanceRange &dr);

/// 10^(log10 lo + k step) for every k that stays within hi.
[[nodiscard]] std::vector<double> log_grid(double lo, double hi, double step_log10 = 1.0);

/// Powers of ten from 10^lo_exp to 10^hi_exp.
[[nodiscard]] std::vector<double> decade_grid(int lo_exp, int hi_exp);
[[nodiscard]] std::vector<double> default_c_grid();
[[nodiscard]] std::vector<double> default_sigma2_grid();

[[nodiscard]] LineSearchSpec make_line_search_spec(std::vector<double> c_tilde, const Sigma2Range &range,
                                                   double spacing_log10 = 1.0, std::size_t max_c_tilde = 4);

[[nodiscard]] TuneResult line_search(const Dataset &ds, const LineSearchSpec &spec, const FoldPlan &folds,
                                     const SearchOptions &opts = {});

[[nodiscard]] TuneResult grid_search(const Dataset &ds, const std::vector<double> &c_grid, const std::vector<double> &sigma2_grid,
                                     const FoldPlan &folds, const SearchOptions &opts = {});

/// Sweep, data-derived sigma2 range and line search in sequence.
struct ProposedSearchSpec {
    CSweepSpec sweep{};
    double spacing_log10{ 1.0 };
    std::size_t max_c_tilde{ 4 };
    bool refine{ false };
    std::optional<Sigma2Range> manual_range;
};

struct ProposedSearchResult {
    TuneResult sweep;
    Sigma2Range range;
    LineSearchSpec line_spec;
    TuneResult line;

    [[nodiscard]] std::size_t evaluations() const noexcept { return sweep.evaluations + line.evaluations; }
};

[[nodiscard]] ProposedSearchResult proposed_search(const Dataset &ds, const FoldPlan &folds, const ProposedSearchSpec &spec = {},
                                                   const SearchOptions &opts = {});

/// 2 N1 / N
[[nodiscard]] double c_lim(const ClassStats &stats);

struct EquivalenceReport {
    /// Fraction of held-out predictions on which the two RBF models agree.
    double agreement{ 0.0 };
    double agreement_linear_1{ 0.0 };
    double agreement_linear_2{ 0.0 };
    double c_tilde{ 0.0 };
    std::size_t n_test{ 0 };
};

/// Throws RegimeViolation unless c1/s1 == c2/s2 and both sigma2 >= 10 max_intra^2.
[[nodiscard]] EquivalenceReport c_tilde_equivalence_report(const Dataset &ds, double c1, double sigma2_1, double c2, double sigma2_2,
                                                           const FoldPlan &folds, const SearchOptions &opts = {});

/// Best by metric, then higher sensitivity, smaller C, smaller sigma2. Absent when no candidate has a score.
[[nodiscard]] std::optional<std::size_t> select_best(const std::vector<Candidate> &candidates, SelectionMetric metric);

/// Per-fold rows and one pooled row per candidate.
void write_report(const TuneResult &result, std::ostream &out);

}  // namespace svmlab
