#include "svmlab/search.hpp"

#include "svmlab/errors.hpp"
#include "svmlab/parallel.hpp"

#include "fmt/format.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <utility>

namespace svmlab {

namespace {

struct Cell {
    double c;
    std::optional<double> sigma2;
    std::optional<double> c_tilde;
};

std::vector<Candidate> evaluate(const Dataset &ds, const std::vector<Cell> &cells, const FoldPlan &folds, const SearchOptions &opts,
                                const GramMatrix *shared_gram) {
    std::vector<Candidate> out(cells.size());
    parallel_for(
        cells.size(),
        [&](std::size_t idx) {
            const Cell &cell = cells[idx];
            Candidate &cand = out[idx];
            cand.c = cell.c;
            cand.sigma2 = cell.sigma2;
            cand.c_tilde = cell.c_tilde;
            cand.fold_seed = folds.seed;

            TrainConfig cfg = opts.base;
            cfg.c = cell.c;
            cfg.kernel = cell.sigma2 ? KernelSpec{ RbfKernel{ *cell.sigma2 } } : KernelSpec{ LinearKernel{} };
            CvOptions cv_opts;
            cv_opts.positive_label = opts.positive_label;
            try {
                GramMatrix own;
                if (!cfg.min_max_scale) {
                    if (shared_gram) {
                        cv_opts.gram = shared_gram;
                    } else {
                        own = gram_matrix(cfg.kernel, ds);
                        cv_opts.gram = &own;
                    }
                }
                cand.cv = cross_validate(ds, cfg, folds, cv_opts);
            } catch (const Error &e) {
                cand.error = e.what();
            }
        },
        opts.threads);
    return out;
}

double key(double v) {
    return std::round(std::log10(v) * 1e9);
}

void check_grid(const std::vector<double> &grid, const char *what) {
    if (grid.empty()) {
        throw Error{ ErrorKind::InvalidArgument, fmt::format("{} grid is empty", what) };
    }
    for (const double v : grid) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error{ ErrorKind::InvalidArgument, fmt::format("{} grid holds non-positive value {}", what, v) };
        }
    }
}

bool at_edge(double v, const std::vector<double> &grid) {
    const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
    return key(v) == key(*lo) || key(v) == key(*hi);
}

}  // namespace

std::optional<double> Candidate::score(SelectionMetric metric) const {
    if (!cv.metrics) {
        return std::nullopt;
    }
    if (metric == SelectionMetric::BalancedAccuracy) {
        return balanced_accuracy(*cv.metrics);
    }
    return cv.metrics->accuracy;
}

std::optional<std::size_t> select_best(const std::vector<Candidate> &candidates, SelectionMetric metric) {
    std::optional<std::size_t> best;
    const auto sens = [](const Candidate &c) { return c.cv.metrics->sensitivity.value_or(-1.0); };
    const auto s2 = [](const Candidate &c) { return c.sigma2.value_or(0.0); };
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto &cand = candidates[i];
        const auto sc = cand.score(metric);
        if (!sc) {
            continue;
        }
        if (!best) {
            best = i;
            continue;
        }
        const auto &inc = candidates[*best];
        const double bs = *inc.score(metric);
        bool better = false;
        if (*sc != bs) {
            better = *sc > bs;
        } else if (sens(cand) != sens(inc)) {
            better = sens(cand) > sens(inc);
        } else if (cand.c != inc.c) {
            better = cand.c < inc.c;
        } else {
            better = s2(cand) < s2(inc);
        }
        if (better) {
            best = i;
        }
    }
    return best;
}

TuneResult linear_c_sweep(const Dataset &ds, const CSweepSpec &spec, const FoldPlan &folds, const SearchOptions &opts) {
    if (spec.log10_c_values.empty()) {
        throw Error{ ErrorKind::InvalidArgument, "C sweep is empty" };
    }
    if (!std::is_sorted(spec.log10_c_values.begin(), spec.log10_c_values.end(), std::less_equal<>{}) ||
        std::adjacent_find(spec.log10_c_values.begin(), spec.log10_c_values.end()) != spec.log10_c_values.end()) {
        throw Error{ ErrorKind::InvalidArgument, "C sweep must be strictly increasing" };
    }
    std::vector<Cell> cells;
    for (const double e : spec.log10_c_values) {
        cells.push_back({ std::pow(10.0, e), std::nullopt, std::nullopt });
    }
    std::optional<GramMatrix> gram;
    if (!opts.base.min_max_scale) {
        gram = gram_matrix(LinearKernel{}, ds);
    }

    TuneResult r;
    r.method = "linear-sweep";
    r.candidates = evaluate(ds, cells, folds, opts, gram ? &*gram : nullptr);
    r.evaluations = r.candidates.size();
    r.best = select_best(r.candidates, opts.metric);
    if (r.best) {
        const double top = *r.candidates[*r.best].score(opts.metric);
        for (const auto &cand : r.candidates) {
            const auto sc = cand.score(opts.metric);
            if (sc && *sc >= top - opts.tie_tolerance) {
                r.c_tilde.push_back(cand.c);
            }
        }
        const auto &best = r.candidates[*r.best];
        r.best_on_boundary = key(best.c) == key(cells.front().c) || key(best.c) == key(cells.back().c);
    }
    return r;
}

Sigma2Range sigma2_range_from_data(const DistanceRange &dr) {
    if (!(dr.max_intra > 0.0)) {
        throw Error{ ErrorKind::AllCoincident, "all same-class samples coincide" };
    }
    constexpr double floor_value = 1e-3;
    constexpr double eps = 1e-9;
    Sigma2Range r;
    r.source = Sigma2Range::Source::DataDerived;
    r.lo = floor_value;
    if (dr.min_intra > 0.0) {
        r.lo = std::max(floor_value, std::pow(10.0, std::floor(std::log10(dr.min_intra * dr.min_intra) + eps)));
    }
    r.hi = std::pow(10.0, std::ceil(std::log10(dr.max_intra * dr.max_intra) - eps));
    if (r.hi < r.lo) {
        r.hi = r.lo * 10.0;
    } else if (r.hi == r.lo) {
        r.lo /= 10.0;
        r.hi *= 10.0;
    }
    return r;
}

std::vector<double> log_grid(double lo, double hi, double step_log10) {
    if (!(lo > 0.0) || !(hi >= lo) || !(step_log10 > 0.0)) {
        throw Error{ ErrorKind::InvalidArgument, fmt::format("bad log grid [{}, {}] step {}", lo, hi, step_log10) };
    }
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    std::vector<double> out;
    for (std::size_t k = 0;; ++k) {
        const double e = a + static_cast<double>(k) * step_log10;
        if (e > b + 1e-9) {
            break;
        }
        const double rounded = std::round(e);
        out.push_back(std::abs(e - rounded) < 1e-9 ? std::pow(10.0, rounded) : std::pow(10.0, e));
    }
    return out;
}

std::vector<double> decade_grid(int lo_exp, int hi_exp) {
    std::vector<double> out;
    for (int e = lo_exp; e <= hi_exp; ++e) {
        out.push_back(std::pow(10.0, e));
    }
    return out;
}

std::vector<double> default_c_grid() {
    return decade_grid(-7, 7);
}

std::vector<double> default_sigma2_grid() {
    return decade_grid(-8, 8);
}

LineSearchSpec make_line_search_spec(std::vector<double> c_tilde, const Sigma2Range &range, double spacing_log10,
                                     std::size_t max_c_tilde) {
    std::sort(c_tilde.begin(), c_tilde.end());
    if (max_c_tilde > 0 && c_tilde.size() > max_c_tilde) {
        c_tilde.resize(max_c_tilde);
    }
    LineSearchSpec spec;
    spec.c_tilde_values = std::move(c_tilde);
    spec.sigma2_grid = log_grid(range.lo, range.hi, spacing_log10);
    spec.spacing_log10 = spacing_log10;
    return spec;
}

TuneResult line_search(const Dataset &ds, const LineSearchSpec &spec, const FoldPlan &folds, const SearchOptions &opts) {
    check_grid(spec.c_tilde_values, "C-tilde");
    check_grid(spec.sigma2_grid, "sigma2");

    std::set<std::pair<double, double>> seen;
    std::vector<Cell> cells;
    const auto add = [&](double ct, double s2) {
        const double c = ct * s2;
        if (seen.insert({ key(c), key(s2) }).second) {
            cells.push_back({ c, s2, ct });
        }
    };
    for (const double ct : spec.c_tilde_values) {
        for (const double s2 : spec.sigma2_grid) {
            add(ct, s2);
        }
    }

    TuneResult r;
    r.method = "line";
    r.candidates = evaluate(ds, cells, folds, opts, nullptr);
    r.best = select_best(r.candidates, opts.metric);

    if (spec.refine && r.best) {
        const auto inc = r.candidates[*r.best];
        const std::size_t first_new = cells.size();
        const int steps = static_cast<int>(std::round(spec.spacing_log10 / spec.refine_step_log10));
        for (int k = -(steps - 1); k <= steps - 1; ++k) {
            if (k != 0) {
                add(*inc.c_tilde, *inc.sigma2 * std::pow(10.0, k * spec.refine_step_log10));
            }
        }
        const std::vector<Cell> extra(cells.begin() + static_cast<std::ptrdiff_t>(first_new), cells.end());
        auto more = evaluate(ds, extra, folds, opts, nullptr);
        r.candidates.insert(r.candidates.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
        r.best = select_best(r.candidates, opts.metric);
    }
    r.evaluations = r.candidates.size();
    if (r.best) {
        r.best_on_boundary = at_edge(*r.candidates[*r.best].sigma2, spec.sigma2_grid);
    }
    return r;
}

TuneResult grid_search(const Dataset &ds, const std::vector<double> &c_grid, const std::vector<double> &sigma2_grid,
                       const FoldPlan &folds, const SearchOptions &opts) {
    check_grid(c_grid, "C");
    check_grid(sigma2_grid, "sigma2");
    std::vector<Cell> cells;
    for (const double c : c_grid) {
        for (const double s2 : sigma2_grid) {
            cells.push_back({ c, s2, std::nullopt });
        }
    }
    TuneResult r;
    r.method = "grid";
    r.candidates = evaluate(ds, cells, folds, opts, nullptr);
    r.evaluations = r.candidates.size();
    r.best = select_best(r.candidates, opts.metric);
    if (r.best) {
        const auto &b = r.candidates[*r.best];
        r.best_on_boundary = at_edge(b.c, c_grid) || at_edge(*b.sigma2, sigma2_grid);
    }
    return r;
}

ProposedSearchResult proposed_search(const Dataset &ds, const FoldPlan &folds, const ProposedSearchSpec &spec, const SearchOptions &opts) {
    ProposedSearchResult r;
    r.sweep = linear_c_sweep(ds, spec.sweep, folds, opts);
    if (r.sweep.c_tilde.empty()) {
        throw Error{ ErrorKind::InvalidArgument, "the linear sweep produced no usable candidate" };
    }
    if (spec.manual_range) {
        r.range = *spec.manual_range;
    } else {
        if (opts.base.min_max_scale) {
            std::vector<std::size_t> all(ds.size());
            std::iota(all.begin(), all.end(), std::size_t{ 0 });
            r.range = sigma2_range_from_data(intra_class_distance_range(MinMaxScaler::fit(ds, all).transform(ds)));
        } else {
            r.range = sigma2_range_from_data(intra_class_distance_range(ds));
        }
    }
    r.line_spec = make_line_search_spec(r.sweep.c_tilde, r.range, spec.spacing_log10, spec.max_c_tilde);
    r.line_spec.refine = spec.refine;
    r.line = line_search(ds, r.line_spec, folds, opts);
    return r;
}

double c_lim(const ClassStats &stats) {
    if (stats.total() == 0) {
        throw Error{ ErrorKind::InvalidArgument, "empty class statistics" };
    }
    return 2.0 * static_cast<double>(stats.n_majority) / static_cast<double>(stats.total());
}

EquivalenceReport c_tilde_equivalence_report(const Dataset &ds, double c1, double sigma2_1, double c2, double sigma2_2,
                                             const FoldPlan &folds, const SearchOptions &opts) {
    if (!(c1 > 0.0 && c2 > 0.0 && sigma2_1 > 0.0 && sigma2_2 > 0.0)) {
        throw Error{ ErrorKind::InvalidArgument, "C and sigma2 must be positive" };
    }
    const double t1 = c1 / sigma2_1;
    const double t2 = c2 / sigma2_2;
    if (std::abs(t1 - t2) > 1e-9 * std::max(t1, t2)) {
        throw Error{ ErrorKind::RegimeViolation, fmt::format("C/sigma2 differs: {} vs {}", t1, t2) };
    }
    const double max2 = std::pow(intra_class_distance_range(ds).max_intra, 2);
    if (sigma2_1 < 10.0 * max2 || sigma2_2 < 10.0 * max2) {
        throw Error{ ErrorKind::RegimeViolation,
                     fmt::format("sigma2 values {} and {} must both be at least {} (10 x max_intra^2)", sigma2_1, sigma2_2, 10.0 * max2) };
    }
    if (folds.assignments.size() != ds.size()) {
        throw Error{ ErrorKind::LengthMismatch, "fold plan does not cover the data set" };
    }

    TrainConfig rbf1 = opts.base;
    rbf1.kernel = RbfKernel{ sigma2_1 };
    rbf1.c = c1;
    TrainConfig rbf2 = opts.base;
    rbf2.kernel = RbfKernel{ sigma2_2 };
    rbf2.c = c2;
    TrainConfig lin = opts.base;
    lin.kernel = LinearKernel{};
    lin.c = t1;

    EquivalenceReport rep;
    rep.c_tilde = t1;
    std::size_t same = 0;
    std::size_t same_l1 = 0;
    std::size_t same_l2 = 0;
    for (std::size_t f = 0; f < folds.k; ++f) {
        const auto tr = folds.train_indices(f);
        const auto te = folds.test_indices(f);
        const Dataset train_set = ds.subset(tr);
        const auto m1 = train(train_set, rbf1);
        const auto m2 = train(train_set, rbf2);
        const auto ml = train(train_set, lin);
        for (const std::size_t t : te) {
            const int p1 = predict(m1, ds.row(t));
            const int p2 = predict(m2, ds.row(t));
            const int pl = predict(ml, ds.row(t));
            same += p1 == p2;
            same_l1 += p1 == pl;
            same_l2 += p2 == pl;
            ++rep.n_test;
        }
    }
    if (rep.n_test == 0) {
        throw Error{ ErrorKind::TooFewSamples, "no held-out samples" };
    }
    const double n = static_cast<double>(rep.n_test);
    rep.agreement = static_cast<double>(same) / n;
    rep.agreement_linear_1 = static_cast<double>(same_l1) / n;
    rep.agreement_linear_2 = static_cast<double>(same_l2) / n;
    return rep;
}

void write_report(const TuneResult &result, std::ostream &out) {
    const auto opt = [](const std::optional<double> &v) { return v ? fmt::format("{}", *v) : std::string{}; };
    out << "c,sigma2,fold,tp,fn,fp,tn,accuracy,sensitivity,specificity\n";
    for (const auto &cand : result.candidates) {
        const std::string head = fmt::format("{},{}", cand.c, opt(cand.sigma2));
        for (const auto &f : cand.cv.folds) {
            if (f.confusion) {
                const auto &cm = *f.confusion;
                out << fmt::format("{},{},{},{},{},{},{},{},{}\n", head, f.fold, cm.tp, cm.fn, cm.fp, cm.tn, f.metrics->accuracy,
                                   opt(f.metrics->sensitivity), opt(f.metrics->specificity));
            } else {
                out << fmt::format("{},{},,,,,,,\n", head, f.fold);
            }
        }
        if (cand.cv.metrics) {
            const auto &cm = cand.cv.pooled;
            const auto &m = *cand.cv.metrics;
            out << fmt::format("{},pooled,{},{},{},{},{},{},{}\n", head, cm.tp, cm.fn, cm.fp, cm.tn, m.accuracy, opt(m.sensitivity),
                               opt(m.specificity));
        } else {
            out << fmt::format("{},pooled,,,,,,,\n", head);
        }
    }
}

}  // namespace svmlab
