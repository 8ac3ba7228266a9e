#include "svmlab/kernel.hpp"

#include "svmlab/errors.hpp"

#include "fmt/format.h"

#include <cmath>
#include <numeric>

namespace svmlab {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

// exponentiation by squaring
double ipow(double base, int exp) {
    double result = 1.0;
    while (exp > 0) {
        if (exp & 1) {
            result *= base;
        }
        base *= base;
        exp >>= 1;
    }
    return result;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void validate(const KernelSpec &spec) {
    std::visit(overloaded{
                   [](const LinearKernel &) {},
                   [](const RbfKernel &k) {
                       if (!(k.sigma2 > 0.0) || !std::isfinite(k.sigma2)) {
                           throw Error{ ErrorKind::InvalidArgument, fmt::format("sigma2 must be positive, got {}", k.sigma2) };
                       }
                   },
                   [](const PolynomialKernel &k) {
                       if (k.degree < 1) {
                           throw Error{ ErrorKind::InvalidArgument, fmt::format("degree must be >= 1, got {}", k.degree) };
                       }
                       if (!std::isfinite(k.offset)) {
                           throw Error{ ErrorKind::InvalidArgument, "polynomial offset must be finite" };
                       }
                   },
               },
               spec);
}

bool is_linear(const KernelSpec &spec) noexcept {
    return std::holds_alternative<LinearKernel>(spec);
}

std::string describe(const KernelSpec &spec) {
    return std::visit(overloaded{
                          [](const LinearKernel &) { return std::string{ "linear" }; },
                          [](const RbfKernel &k) { return fmt::format("rbf(sigma2={})", k.sigma2); },
                          [](const PolynomialKernel &k) { return fmt::format("poly(degree={}, offset={})", k.degree, k.offset); },
                      },
                      spec);
}

double kernel_eval(const KernelSpec &spec, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error{ ErrorKind::DimensionMismatch, fmt::format("kernel arguments have lengths {} and {}", a.size(), b.size()) };
    }
    return std::visit(overloaded{
                          [&](const LinearKernel &) { return dot(a, b); },
                          [&](const RbfKernel &k) { return std::exp(-squared_distance(a, b) / (2.0 * k.sigma2)); },
                          [&](const PolynomialKernel &k) { return ipow(dot(a, b) + k.offset, k.degree); },
                      },
                      spec);
}

GramMatrix gram_matrix(const KernelSpec &spec, const Dataset &ds) {
    std::vector<std::size_t> rows(ds.size());
    std::iota(rows.begin(), rows.end(), std::size_t{ 0 });
    return gram_matrix(spec, ds, rows);
}

GramMatrix gram_matrix(const KernelSpec &spec, const Dataset &ds, std::span<const std::size_t> rows) {
    validate(spec);
    const std::size_t n = rows.size();
    GramMatrix g{ DenseMatrix{ n } };
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = ds.row(rows[i]);
        for (std::size_t j = i; j < n; ++j) {
            const double v = kernel_eval(spec, xi, ds.row(rows[j]));
            g.k(i, j) = v;
            g.k(j, i) = v;
        }
    }
    return g;
}

GramMatrix gram_submatrix(const GramMatrix &gram, std::span<const std::size_t> rows) {
    const std::size_t n = rows.size();
    GramMatrix g{ DenseMatrix{ n } };
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = gram.k.row(rows[i]);
        auto dst = g.k.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            dst[j] = src[rows[j]];
        }
    }
    return g;
}

HMatrix h_matrix(const GramMatrix &gram, std::span<const int> labels, double variant_shift) {
    const std::size_t n = gram.order();
    if (labels.size() != n) {
        throw Error{ ErrorKind::LengthMismatch, fmt::format("{} labels for a Gram matrix of order {}", labels.size(), n) };
    }
    if (!(variant_shift >= 0.0)) {
        throw Error{ ErrorKind::InvalidArgument, "diagonal shift must be nonnegative" };
    }
    HMatrix h{ DenseMatrix{ n }, variant_shift };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            h.h(i, j) = static_cast<double>(labels[i] * labels[j]) * gram(i, j);
        }
        h.h(i, i) += variant_shift;
    }
    return h;
}

}  // namespace svmlab
