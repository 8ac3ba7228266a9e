#include "svmlab/qp.hpp"

#include "svmlab/errors.hpp"

#include "fmt/format.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace svmlab {

namespace {

constexpr double kCurvatureFloor = 1e-12;
constexpr double kPivotTolerance = 1e-12;
constexpr std::size_t kOracleMaxOrder = 50;

void check_problem(std::size_t n, std::span<const int> labels, std::span<const double> f, std::optional<double> upper_bound) {
    if (labels.size() != n || f.size() != n) {
        throw Error{ ErrorKind::LengthMismatch,
                     fmt::format("Hessian order {} with {} labels and {} linear coefficients", n, labels.size(), f.size()) };
    }
    if (upper_bound && !(*upper_bound > 0.0)) {
        throw Error{ ErrorKind::InvalidArgument, fmt::format("upper bound must be positive, got {}", *upper_bound) };
    }
    for (const int y : labels) {
        if (y != kPositive && y != kNegative) {
            throw Error{ ErrorKind::InvalidArgument, fmt::format("label must be +1 or -1, got {}", y) };
        }
    }
}

bool both_classes(std::span<const int> labels) {
    const bool pos = std::find(labels.begin(), labels.end(), kPositive) != labels.end();
    const bool neg = std::find(labels.begin(), labels.end(), kNegative) != labels.end();
    return pos && neg;
}

}  // namespace

DualProblem::DualProblem(HMatrix h_, std::vector<int> labels_, std::optional<double> upper_bound_) :
    h{ std::move(h_) },
    labels{ std::move(labels_) },
    upper_bound{ upper_bound_ },
    linear_coeff(h.order(), 1.0) {}

CachedHessian::CachedHessian(std::size_t n, std::vector<double> diagonal, RowFn fill, std::size_t capacity_rows) :
    n_{ n },
    diag_{ std::move(diagonal) },
    fill_{ std::move(fill) },
    capacity_{ std::max<std::size_t>(capacity_rows, 2) } {
    if (diag_.size() != n_) {
        throw Error{ ErrorKind::LengthMismatch, "diagonal length differs from order" };
    }
}

std::span<const double> CachedHessian::row(std::size_t i) {
    if (const auto it = rows_.find(i); it != rows_.end()) {
        ++hits_;
        recency_.splice(recency_.begin(), recency_, it->second.position);
        return it->second.values;
    }
    ++misses_;
    std::vector<double> values;
    if (rows_.size() >= capacity_) {
        const std::size_t victim = recency_.back();
        recency_.pop_back();
        auto node = rows_.extract(victim);
        values = std::move(node.mapped().values);
    }
    values.resize(n_);
    fill_(i, values);
    recency_.push_front(i);
    auto &entry = rows_[i];
    entry.values = std::move(values);
    entry.position = recency_.begin();
    return entry.values;
}

DualSolution solve_smo(HessianRows &h, std::span<const int> labels, std::optional<double> upper_bound,
                       std::span<const double> linear_coeff, const SolverConfig &cfg) {
    const std::size_t n = h.order();
    check_problem(n, labels, linear_coeff, upper_bound);
    if (!(cfg.kkt_tolerance > 0.0)) {
        throw Error{ ErrorKind::InvalidArgument, "KKT tolerance must be positive" };
    }
    if (n < 2 || !both_classes(labels)) {
        throw Error{ ErrorKind::DegenerateProblem, "the dual needs samples from both classes" };
    }

    const double c = upper_bound.value_or(kUnboundedCap);
    DualSolution sol;
    sol.alpha.assign(n, 0.0);
    sol.gradient.assign(linear_coeff.begin(), linear_coeff.end());
    for (double &g : sol.gradient) {
        g = -g;
    }
    auto &alpha = sol.alpha;
    auto &grad = sol.gradient;

    std::vector<double> y(labels.begin(), labels.end());
    std::vector<double> diag(n);
    for (std::size_t k = 0; k < n; ++k) {
        diag[k] = h.diagonal(k);
    }
    // set membership only changes for the two updated multipliers
    std::vector<double> up_mask(n);
    std::vector<double> low_mask(n);
    const auto refresh = [&](std::size_t t) {
        const bool up = y[t] > 0 ? alpha[t] < c : alpha[t] > 0.0;
        const bool low = y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < c;
        up_mask[t] = up ? 0.0 : -std::numeric_limits<double>::infinity();
        low_mask[t] = low ? 0.0 : std::numeric_limits<double>::infinity();
    };
    for (std::size_t k = 0; k < n; ++k) {
        refresh(k);
    }
    const auto in_low = [&](std::size_t t) { return low_mask[t] == 0.0; };

    // indices still optimised, ascending; gradients outside it go stale until rebuilt
    std::vector<std::size_t> active(n);
    std::iota(active.begin(), active.end(), std::size_t{ 0 });
    const std::size_t shrink_interval = std::min<std::size_t>(n, 1000);
    std::size_t until_shrink = shrink_interval;

    // maximal violations over the upper and lower sets; ties go to the lowest index
    std::size_t i = n;
    std::size_t j = n;
    double m = 0.0;
    double big_m = 0.0;
    const auto reset_scan = [&] {
        i = n;
        j = n;
        m = -std::numeric_limits<double>::infinity();
        big_m = std::numeric_limits<double>::infinity();
    };
    const auto visit = [&](std::size_t t) {
        const double v = -y[t] * grad[t];
        const double vu = v + up_mask[t];
        const double vl = v + low_mask[t];
        if (vu > m) {
            m = vu;
            i = t;
        }
        if (vl < big_m) {
            big_m = vl;
            j = t;
        }
    };
    const auto full_scan = [&] {
        reset_scan();
        for (const std::size_t t : active) {
            visit(t);
        }
    };
    const auto unshrink = [&] {
        if (active.size() == n) {
            return false;
        }
        std::vector<char> is_active(n, 0);
        for (const std::size_t t : active) {
            is_active[t] = 1;
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (!is_active[k]) {
                grad[k] = -linear_coeff[k];
            }
        }
        for (std::size_t s = 0; s < n; ++s) {
            if (alpha[s] > 0.0) {
                const auto hs = h.row(s);
                for (std::size_t k = 0; k < n; ++k) {
                    if (!is_active[k]) {
                        grad[k] += alpha[s] * hs[k];
                    }
                }
            }
        }
        active.resize(n);
        std::iota(active.begin(), active.end(), std::size_t{ 0 });
        full_scan();
        return true;
    };
    // a bound multiplier that belongs to only one set cannot join a violating pair
    const auto shrink = [&] {
        std::size_t kept = 0;
        for (const std::size_t t : active) {
            const double v = -y[t] * grad[t];
            const bool up = up_mask[t] == 0.0;
            const bool low = low_mask[t] == 0.0;
            const bool drop = (up && !low && v < big_m) || (low && !up && v > m);
            if (!drop) {
                active[kept++] = t;
            }
        }
        active.resize(kept);
    };
    full_scan();

    double objective = 0.0;
    double gap = 0.0;
    while (true) {
        gap = (i == n || j == n) ? 0.0 : m - big_m;
        if (gap <= cfg.kkt_tolerance || sol.iterations >= cfg.max_passes) {
            if (unshrink()) {
                until_shrink = shrink_interval;
                continue;
            }
            sol.converged = gap <= cfg.kkt_tolerance;
            break;
        }
        if (cfg.shrinking && --until_shrink == 0) {
            until_shrink = shrink_interval;
            shrink();
        }

        const auto hi = h.row(i);
        const double yi = y[i];
        if (cfg.selection == WorkingSet::SecondOrder) {
            double best = -std::numeric_limits<double>::infinity();
            const double hii = diag[i];
            for (const std::size_t t : active) {
                const double b = m + y[t] * grad[t];
                if (b <= 0.0 || !in_low(t)) {
                    continue;
                }
                const double a = std::max(hii + diag[t] - 2.0 * yi * y[t] * hi[t], kCurvatureFloor);
                const double gain = b * b / a;
                if (gain > best) {
                    best = gain;
                    j = t;
                }
            }
        }
        const double pair_gap = m + y[j] * grad[j];
        const double yj = y[j];
        const auto hj = h.row(j);
        const double a = std::max(diag[i] + diag[j] - 2.0 * yi * yj * hi[j], kCurvatureFloor);

        const double room_i = yi > 0 ? c - alpha[i] : alpha[i];
        const double room_j = yj > 0 ? alpha[j] : c - alpha[j];
        double t = pair_gap / a;
        bool clip_i = false;
        bool clip_j = false;
        if (t >= room_i) {
            t = room_i;
            clip_i = true;
        }
        if (t >= room_j) {
            t = room_j;
            clip_j = true;
            clip_i = t == room_i;
        }

        alpha[i] += yi * t;
        alpha[j] -= yj * t;
        if (clip_i) {
            alpha[i] = yi > 0 ? c : 0.0;
        }
        if (clip_j) {
            alpha[j] = yj > 0 ? 0.0 : c;
        }
        refresh(i);
        refresh(j);
        const double di = yi * t;
        const double dj = yj * t;
        reset_scan();
        for (const std::size_t k : active) {
            grad[k] += di * hi[k] - dj * hj[k];
            visit(k);
        }

        ++sol.iterations;
        objective += -t * pair_gap + 0.5 * a * t * t;
        if (cfg.record_objective) {
            sol.objective_trace.push_back(objective);
        }
    }
    sol.max_kkt_violation = std::max(gap, 0.0);

    sol.objective = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sol.objective += 0.5 * alpha[k] * (grad[k] - linear_coeff[k]);
    }

    sol.equality_multiplier = bias_from_gradient(alpha, grad, labels, upper_bound);
    return sol;
}

DualSolution solve_smo(const DualProblem &p, const SolverConfig &cfg) {
    DenseHessian rows{ p.h };
    return solve_smo(rows, p.labels, p.upper_bound, p.linear_coeff, cfg);
}

double bias_from_gradient(std::span<const double> alpha, std::span<const double> gradient, std::span<const int> labels,
                          std::optional<double> upper_bound) {
    const std::size_t n = alpha.size();
    if (gradient.size() != n || labels.size() != n) {
        throw Error{ ErrorKind::LengthMismatch, "alpha, gradient and labels differ in length" };
    }
    const double c = upper_bound.value_or(kUnboundedCap);
    double free_sum = 0.0;
    std::size_t n_free = 0;
    double lb = -std::numeric_limits<double>::infinity();
    double ub = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double v = -labels[k] * gradient[k];
        if (alpha[k] > 0.0 && alpha[k] < c) {
            free_sum += v;
            ++n_free;
        } else if ((labels[k] == kPositive) == (alpha[k] <= 0.0)) {
            lb = std::max(lb, v);
        } else {
            ub = std::min(ub, v);
        }
    }
    if (n_free > 0) {
        return free_sum / static_cast<double>(n_free);
    }
    if (std::isfinite(lb) && std::isfinite(ub)) {
        return 0.5 * (lb + ub);
    }
    return std::isfinite(lb) ? lb : ub;
}

std::vector<double> lu_solve(DenseMatrix a, std::vector<double> b) {
    const std::size_t n = a.order();
    if (b.size() != n) {
        throw Error{ ErrorKind::LengthMismatch, fmt::format("right-hand side of length {} for order {}", b.size(), n) };
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (const double v : a.row(i)) {
            scale = std::max(scale, std::abs(v));
        }
    }
    if (scale == 0.0) {
        throw Error{ ErrorKind::SingularSystem, "zero matrix" };
    }

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) {
                pivot = r;
            }
        }
        if (std::abs(a(pivot, col)) <= kPivotTolerance * scale) {
            throw Error{ ErrorKind::SingularSystem, fmt::format("vanishing pivot in column {}", col) };
        }
        if (pivot != col) {
            for (std::size_t k = 0; k < n; ++k) {
                std::swap(a(col, k), a(pivot, k));
            }
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a(r, col) / a(col, col);
            if (factor == 0.0) {
                continue;
            }
            for (std::size_t k = col; k < n; ++k) {
                a(r, k) -= factor * a(col, k);
            }
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double sum = b[r];
        for (std::size_t k = r + 1; k < n; ++k) {
            sum -= a(r, k) * x[k];
        }
        x[r] = sum / a(r, r);
    }
    return x;
}

DualSolution solve_kkt_oracle(const DualProblem &p) {
    const std::size_t n = p.h.order();
    check_problem(n, p.labels, p.linear_coeff, p.upper_bound);
    if (n == 0 || n > kOracleMaxOrder) {
        throw Error{ ErrorKind::InvalidArgument, fmt::format("oracle handles 1..{} samples, got {}", kOracleMaxOrder, n) };
    }

    DenseMatrix m{ n + 1 };
    std::vector<double> rhs(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        m(0, i + 1) = p.labels[i];
        m(i + 1, 0) = p.labels[i];
        for (std::size_t j = 0; j < n; ++j) {
            m(i + 1, j + 1) = p.h(i, j);
        }
        rhs[i + 1] = p.linear_coeff[i];
    }
    const auto x = lu_solve(std::move(m), std::move(rhs));

    DualSolution sol;
    sol.equality_multiplier = x[0];
    sol.alpha.assign(x.begin() + 1, x.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (sol.alpha[i] < -1e-9) {
            throw Error{ ErrorKind::AssumptionViolated, fmt::format("alpha[{}] = {} is negative; not every sample is a support vector", i, sol.alpha[i]) };
        }
        if (p.upper_bound && sol.alpha[i] > *p.upper_bound + 1e-9) {
            throw Error{ ErrorKind::AssumptionViolated, fmt::format("alpha[{}] = {} exceeds the bound {}", i, sol.alpha[i], *p.upper_bound) };
        }
    }
    sol.objective = dual_objective(p, sol.alpha);
    return sol;
}

double dual_objective(const DualProblem &p, std::span<const double> alpha) {
    const std::size_t n = p.h.order();
    if (alpha.size() != n || p.linear_coeff.size() != n) {
        throw Error{ ErrorKind::LengthMismatch, fmt::format("alpha of length {} for a problem of order {}", alpha.size(), n) };
    }
    double quad = 0.0;
    double lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] == 0.0) {
            continue;
        }
        const auto row = p.h.h.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            s += row[j] * alpha[j];
        }
        quad += alpha[i] * s;
        lin += p.linear_coeff[i] * alpha[i];
    }
    return 0.5 * quad - lin;
}

std::vector<double> box_multipliers(const DualProblem &p, std::span<const double> alpha) {
    if (alpha.size() != p.h.order()) {
        throw Error{ ErrorKind::LengthMismatch, "alpha length differs from problem order" };
    }
    if (!p.upper_bound) {
        return {};
    }
    std::vector<double> mu(alpha.size());
    std::transform(alpha.begin(), alpha.end(), mu.begin(), [&](double a) { return *p.upper_bound - a; });
    return mu;
}

EqualityQpSolution solve_equality_qp(const EqualityQp &qp) {
    const std::size_t n = qp.q.order();
    if (qp.c.size() != n || qp.a.size() != n) {
        throw Error{ ErrorKind::LengthMismatch, "Q, c and a disagree in size" };
    }
    DenseMatrix m{ n + 1 };
    std::vector<double> rhs(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = qp.q(i, j);
        }
        m(i, n) = -qp.a[i];
        m(n, i) = qp.a[i];
        rhs[i] = -qp.c[i];
    }
    rhs[n] = qp.r;
    auto x = lu_solve(std::move(m), std::move(rhs));
    EqualityQpSolution sol;
    sol.multiplier = x[n];
    x.pop_back();
    sol.x = std::move(x);
    return sol;
}

}  // namespace svmlab
