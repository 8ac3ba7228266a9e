#include "svmlab/synthetic.hpp"

#include "svmlab/errors.hpp"
#include "svmlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace svmlab {

Dataset gaussian_blobs(std::size_t n_pos, std::size_t n_neg, std::size_t dim, double separation, std::uint64_t seed) {
    if (dim == 0) {
        throw Error{ ErrorKind::InvalidArgument, "dimension must be positive" };
    }
    Rng rng{ seed };
    std::vector<double> values;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
        const int y = i < n_pos ? kPositive : kNegative;
        for (std::size_t j = 0; j < dim; ++j) {
            values.push_back(normal01(rng) + (j == 0 ? 0.5 * separation * y : 0.0));
        }
        labels.push_back(y);
    }
    return Dataset{ "blobs", dim, std::move(values), std::move(labels) };
}

Dataset separable_set(std::size_t n_pos, std::size_t n_neg, std::size_t dim, double gap, std::uint64_t seed) {
    if (dim == 0 || !(gap >= 0.0) || gap >= 0.5) {
        throw Error{ ErrorKind::InvalidArgument, "need dim > 0 and 0 <= gap < 0.5" };
    }
    Rng rng{ seed };
    std::vector<double> normal(dim);
    double norm = 0.0;
    while (norm < 1e-6) {
        norm = 0.0;
        for (double &v : normal) {
            v = normal01(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
    }
    for (double &v : normal) {
        v /= norm;
    }
    const double offset = 0.2 * (2.0 * uniform01(rng) - 1.0);

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t need_pos = n_pos;
    std::size_t need_neg = n_neg;
    std::vector<double> x(dim);
    while (need_pos + need_neg > 0) {
        double s = offset;
        for (std::size_t j = 0; j < dim; ++j) {
            x[j] = 2.0 * uniform01(rng) - 1.0;
            s += normal[j] * x[j];
        }
        if (std::abs(s) < gap) {
            continue;
        }
        const int y = s > 0 ? kPositive : kNegative;
        std::size_t &need = y == kPositive ? need_pos : need_neg;
        if (need == 0) {
            continue;
        }
        --need;
        values.insert(values.end(), x.begin(), x.end());
        labels.push_back(y);
    }
    return Dataset{ "separable", dim, std::move(values), std::move(labels) };
}

Dataset ring_in_disk(std::size_t n_majority, std::size_t n_minority, std::uint64_t seed) {
    Rng rng{ seed };
    std::vector<double> values;
    std::vector<int> labels;
    const auto draw = [&](double r_lo, double r_hi, int y) {
        // area-uniform radius
        const double u = uniform01(rng);
        const double r = std::sqrt(r_lo * r_lo + u * (r_hi * r_hi - r_lo * r_lo));
        const double theta = 2.0 * std::numbers::pi * uniform01(rng);
        values.push_back(r * std::cos(theta));
        values.push_back(r * std::sin(theta));
        labels.push_back(y);
    };
    for (std::size_t i = 0; i < n_majority; ++i) {
        draw(1.5, 2.5, kNegative);
    }
    for (std::size_t i = 0; i < n_minority; ++i) {
        draw(0.0, 1.0, kPositive);
    }
    return Dataset{ "ring", 2, std::move(values), std::move(labels) };
}

}  // namespace svmlab
