#pragma once

#include "svmlab/dataset.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace svmlab {

struct LinearKernel {};

/// exp(-|a-b|^2 / (2 sigma2)). Width is always given as sigma^2; gamma = 1/(2 sigma2).
struct RbfKernel {
    double sigma2{ 1.0 };
};

/// (<a,b> + offset)^degree
struct PolynomialKernel {
    int degree{ 2 };
    double offset{ 0.0 };
};

using KernelSpec = std::variant<LinearKernel, RbfKernel, PolynomialKernel>;

/// Throws InvalidArgument for sigma2 <= 0 or degree < 1.
void validate(const KernelSpec &spec);

[[nodiscard]] bool is_linear(const KernelSpec &spec) noexcept;
[[nodiscard]] std::string describe(const KernelSpec &spec);

[[nodiscard]] double kernel_eval(const KernelSpec &spec, std::span<const double> a, std::span<const double> b);

/// Dense row-major symmetric matrix.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_{ n }, data_(n * n, fill) {}

    [[nodiscard]] std::size_t order() const noexcept { return n_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    [[nodiscard]] double &operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const { return { data_.data() + i * n_, n_ }; }
    [[nodiscard]] std::span<double> row(std::size_t i) { return { data_.data() + i * n_, n_ }; }

  private:
    std::size_t n_{ 0 };
    std::vector<double> data_;
};

struct GramMatrix {
    DenseMatrix k;

    [[nodiscard]] std::size_t order() const noexcept { return k.order(); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return k(i, j); }
};

/// H_ij = y_i y_j K_ij, with `shift` (1/C for L2, else 0) added on the diagonal.
struct HMatrix {
    DenseMatrix h;
    double shift{ 0.0 };

    [[nodiscard]] std::size_t order() const noexcept { return h.order(); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return h(i, j); }
};

[[nodiscard]] GramMatrix gram_matrix(const KernelSpec &spec, const Dataset &ds);
/// Gram matrix over a subset of rows, in the given order.
[[nodiscard]] GramMatrix gram_matrix(const KernelSpec &spec, const Dataset &ds, std::span<const std::size_t> rows);
/// Principal submatrix of an existing Gram matrix.
[[nodiscard]] GramMatrix gram_submatrix(const GramMatrix &gram, std::span<const std::size_t> rows);

[[nodiscard]] HMatrix h_matrix(const GramMatrix &gram, std::span<const int> labels, double variant_shift);

}  // namespace svmlab
