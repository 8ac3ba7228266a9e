#pragma once

#include "svmlab/kernel.hpp"

#include <cstddef>
#include <functional>
#include <list>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace svmlab {

/// Cap applied to alpha when the dual has no upper bound (L2 variant).
inline constexpr double kUnboundedCap = 1e12;

enum class WorkingSet {
    /// j minimises -y G over the lower set
    MaximalViolatingPair,
    /// j maximises the guaranteed objective decrease (b^2 / a) for the chosen i
    SecondOrder,
};

struct SolverConfig {
    double kkt_tolerance{ 1e-3 };
    WorkingSet selection{ WorkingSet::SecondOrder };
    std::size_t max_passes{ 1'000'000 };
    bool record_objective{ false };
    /// Drop bound multipliers that cannot violate the optimality conditions from the scans.
    bool shrinking{ true };
};

/// min 1/2 a'Ha - f'a  s.t.  y'a = 0, 0 <= a_i <= upper_bound (no upper bound when absent).
struct DualProblem {
    HMatrix h;
    std::vector<int> labels;
    std::optional<double> upper_bound;
    std::vector<double> linear_coeff;

    DualProblem() = default;
    DualProblem(HMatrix h, std::vector<int> labels, std::optional<double> upper_bound);
};

struct DualSolution {
    std::vector<double> alpha;
    /// Multiplier of y'a = 0. Equals the bias b of the decision function.
    double equality_multiplier{ 0.0 };
    double objective{ 0.0 };
    std::size_t iterations{ 0 };
    double max_kkt_violation{ 0.0 };
    bool converged{ true };
    /// Ha - f at the returned alpha (empty for the oracle).
    std::vector<double> gradient;
    /// Objective after every accepted pair update, when requested.
    std::vector<double> objective_trace;
};

/// Row access to the Hessian. The two most recently returned rows stay valid.
class HessianRows {
  public:
    virtual ~HessianRows() = default;
    [[nodiscard]] virtual std::size_t order() const = 0;
    [[nodiscard]] virtual double diagonal(std::size_t i) const = 0;
    [[nodiscard]] virtual std::span<const double> row(std::size_t i) = 0;
};

class DenseHessian final : public HessianRows {
  public:
    explicit DenseHessian(const HMatrix &h) : h_{ h } {}
    [[nodiscard]] std::size_t order() const override { return h_.order(); }
    [[nodiscard]] double diagonal(std::size_t i) const override { return h_(i, i); }
    [[nodiscard]] std::span<const double> row(std::size_t i) override { return h_.h.row(i); }

  private:
    const HMatrix &h_;
};

/// Rows produced on demand and kept in a least-recently-used cache.
class CachedHessian final : public HessianRows {
  public:
    using RowFn = std::function<void(std::size_t, std::span<double>)>;

    CachedHessian(std::size_t n, std::vector<double> diagonal, RowFn fill, std::size_t capacity_rows);

    [[nodiscard]] std::size_t order() const override { return n_; }
    [[nodiscard]] double diagonal(std::size_t i) const override { return diag_[i]; }
    [[nodiscard]] std::span<const double> row(std::size_t i) override;

    [[nodiscard]] std::size_t hits() const noexcept { return hits_; }
    [[nodiscard]] std::size_t misses() const noexcept { return misses_; }

  private:
    struct Entry {
        std::vector<double> values;
        std::list<std::size_t>::iterator position;
    };

    std::size_t n_;
    std::vector<double> diag_;
    RowFn fill_;
    std::size_t capacity_;
    std::list<std::size_t> recency_;
    std::unordered_map<std::size_t, Entry> rows_;
    std::size_t hits_{ 0 };
    std::size_t misses_{ 0 };
};

[[nodiscard]] DualSolution solve_smo(HessianRows &h, std::span<const int> labels, std::optional<double> upper_bound,
                                     std::span<const double> linear_coeff, const SolverConfig &cfg);
[[nodiscard]] DualSolution solve_smo(const DualProblem &p, const SolverConfig &cfg = {});

/// Solves the bordered system [0 y'; y H][lambda; a] = [0; f] assuming every sample is a
/// support vector. Small problems only (n <= 50).
[[nodiscard]] DualSolution solve_kkt_oracle(const DualProblem &p);

/// Bias from a gradient G = Ha - f: mean of -y_i G_i over free multipliers, or the
/// midpoint of the interval allowed by bound multipliers when none is free.
[[nodiscard]] double bias_from_gradient(std::span<const double> alpha, std::span<const double> gradient,
                                        std::span<const int> labels, std::optional<double> upper_bound);

[[nodiscard]] double dual_objective(const DualProblem &p, std::span<const double> alpha);

/// Box multipliers mu_i = C - alpha_i; empty when the problem is unbounded.
[[nodiscard]] std::vector<double> box_multipliers(const DualProblem &p, std::span<const double> alpha);

/// min 1/2 x'Qx + c'x  s.t.  a'x = r
struct EqualityQp {
    DenseMatrix q;
    std::vector<double> c;
    std::vector<double> a;
    double r{ 0.0 };
};

struct EqualityQpSolution {
    std::vector<double> x;
    /// lambda in Qx + c = lambda a
    double multiplier{ 0.0 };
};

[[nodiscard]] EqualityQpSolution solve_equality_qp(const EqualityQp &qp);

/// Dense solve with partial pivoting; throws SingularSystem on a vanishing pivot.
[[nodiscard]] std::vector<double> lu_solve(DenseMatrix a, std::vector<double> b);

}  // namespace svmlab
