#pragma once

#include "svmlab/dataset.hpp"
#include "svmlab/kernel.hpp"
#include "svmlab/qp.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace svmlab {

/// Penalty used when training without a soft margin.
inline constexpr double kHardMarginC = 1e9;
/// Multipliers at or below this are not kept as support vectors.
inline constexpr double kSvThreshold = 1e-8;

enum class Variant { L1, L2 };

[[nodiscard]] std::string to_string(Variant v);
[[nodiscard]] Variant parse_variant(const std::string &text);

struct TrainConfig {
    KernelSpec kernel{ LinearKernel{} };
    /// Penalty C; absent means hard margin.
    std::optional<double> c;
    Variant variant{ Variant::L1 };
    SolverConfig solver{};
    bool min_max_scale{ false };
    /// Above this many training rows the Hessian is computed lazily through a row cache.
    std::size_t cache_threshold{ 2000 };
    std::size_t cache_rows{ 256 };

    [[nodiscard]] double effective_c() const { return c.value_or(kHardMarginC); }
};

void validate(const TrainConfig &cfg);

struct SvDiagnostics {
    std::size_t n_free_sv{ 0 };
    std::size_t n_bounded_sv{ 0 };
    std::optional<double> margin_width;
    /// max(0, 1 - y_i f(x_i)) for every training sample.
    std::vector<double> slack;
    std::size_t train_errors{ 0 };
    std::size_t iterations{ 0 };
    double max_kkt_violation{ 0.0 };
    double dual_objective{ 0.0 };
};

struct SvmModel {
    std::size_t dim{ 0 };
    /// Row-major support vectors, in scaled space when a scaler is present.
    std::vector<double> sv_features;
    std::vector<int> sv_labels;
    std::vector<double> sv_alpha;
    double bias{ 0.0 };
    KernelSpec kernel{ LinearKernel{} };
    std::optional<std::vector<double>> weight;
    double train_c{ kHardMarginC };
    Variant variant{ Variant::L1 };
    std::optional<MinMaxScaler> scaler;
    bool converged{ true };
    SvDiagnostics diagnostics;

    [[nodiscard]] std::size_t n_sv() const noexcept { return sv_alpha.size(); }
    [[nodiscard]] std::span<const double> sv(std::size_t i) const { return { sv_features.data() + i * dim, dim }; }
};

/// Full training result, including the multipliers of every training row.
struct TrainOutput {
    SvmModel model;
    DualSolution solution;
};

[[nodiscard]] SvmModel train(const Dataset &ds, const TrainConfig &cfg);
[[nodiscard]] TrainOutput train_detailed(const Dataset &ds, const TrainConfig &cfg);

/// Trains on `rows` of `ds` reusing a Gram matrix whose order matches `rows`.
/// Not valid together with min-max scaling.
[[nodiscard]] TrainOutput train_on_gram(const Dataset &ds, std::span<const std::size_t> rows, const GramMatrix &gram,
                                        const TrainConfig &cfg);

[[nodiscard]] double decision_value(const SvmModel &m, std::span<const double> x);
/// Sign of the decision value; 0 maps to +1.
[[nodiscard]] int predict(const SvmModel &m, std::span<const double> x);
[[nodiscard]] std::vector<int> predict(const SvmModel &m, const Dataset &ds);

[[nodiscard]] double compute_bias(const DualSolution &solution, const DualProblem &problem);

/// 2/|w|. Throws NotLinear for non-linear kernels.
[[nodiscard]] double margin_width(const SvmModel &m);

/// max alpha of the hard-margin solution. Throws NotSeparable when it leaves training errors.
[[nodiscard]] double estimate_c_star(const Dataset &ds, const TrainConfig &cfg);

[[nodiscard]] double loo_sv_bound(const SvmModel &m, std::size_t n_train);

struct VcInputs {
    double n{ 0.0 };
    double vc_dim{ 0.0 };
    double eta{ 0.05 };
};

/// sqrt((h (ln(2N/h) + 1) - ln(eta/4)) / N)
[[nodiscard]] double vc_confidence(const VcInputs &v);

inline constexpr int kModelFormatVersion = 1;

void save_model(const SvmModel &m, const std::filesystem::path &path);
[[nodiscard]] SvmModel load_model(const std::filesystem::path &path);

[[nodiscard]] std::string model_to_json(const SvmModel &m);
[[nodiscard]] SvmModel model_from_json(const std::string &text);

}  // namespace svmlab
