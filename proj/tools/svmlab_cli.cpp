#include "svmlab/boundary.hpp"
#include "svmlab/dataset.hpp"
#include "svmlab/errors.hpp"
#include "svmlab/eval.hpp"
#include "svmlab/search.hpp"
#include "svmlab/svm.hpp"

#include "CLI11.hpp"
#include "fmt/format.h"
#include "fmt/ranges.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

using namespace svmlab;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitCompute = 3;

struct DataFlags {
    std::string path;
    std::string label_col{ "-1" };
    std::optional<std::string> positive;
};

struct ModelFlags {
    std::string kernel{ "linear" };
    std::string c{ "1" };
    double sigma2{ 1.0 };
    int degree{ 2 };
    double offset{ 0.0 };
    std::string variant{ "l1" };
    double tol{ 1e-3 };
    std::size_t max_passes{ 1'000'000 };
    bool scale{ false };
};

void add_data_flags(CLI::App *cmd, DataFlags &d) {
    cmd->add_option("--data", d.path, "CSV data set")->required();
    cmd->add_option("--label-col", d.label_col, "label column: index (negative counts from the end) or header name");
    cmd->add_option("--positive", d.positive, "raw label mapped to +1 (default: minority label)");
}

void add_model_flags(CLI::App *cmd, ModelFlags &m, bool with_c) {
    cmd->add_option("--kernel", m.kernel, "linear, rbf or poly")->check(CLI::IsMember({ "linear", "rbf", "poly" }));
    if (with_c) {
        cmd->add_option("--c", m.c, "penalty C, or 'hard' for a hard margin");
    }
    cmd->add_option("--sigma2", m.sigma2, "RBF width sigma^2");
    cmd->add_option("--degree", m.degree, "polynomial degree");
    cmd->add_option("--offset", m.offset, "polynomial offset");
    cmd->add_option("--variant", m.variant, "l1 or l2")->check(CLI::IsMember({ "l1", "l2" }));
    cmd->add_option("--tol", m.tol, "KKT tolerance");
    cmd->add_option("--max-passes", m.max_passes, "maximum pair updates");
    cmd->add_flag("--scale", m.scale, "min-max scale features (stored in the model)");
}

Dataset load(const DataFlags &d) {
    CsvOptions opts;
    try {
        std::size_t used = 0;
        const long idx = std::stol(d.label_col, &used);
        opts.label_column = used == d.label_col.size() ? LabelColumn{ idx } : LabelColumn{ d.label_col };
    } catch (const std::exception &) {
        opts.label_column = d.label_col;
    }
    opts.positive_label = d.positive;
    return load_csv(d.path, opts);
}

TrainConfig make_config(const ModelFlags &m) {
    TrainConfig cfg;
    if (m.kernel == "rbf") {
        cfg.kernel = RbfKernel{ m.sigma2 };
    } else if (m.kernel == "poly") {
        cfg.kernel = PolynomialKernel{ m.degree, m.offset };
    }
    if (m.c != "hard") {
        try {
            std::size_t used = 0;
            cfg.c = std::stod(m.c, &used);
            if (used != m.c.size()) {
                throw std::invalid_argument{ m.c };
            }
        } catch (const std::exception &) {
            throw Error{ ErrorKind::InvalidArgument, fmt::format("--c expects a number or 'hard', got '{}'", m.c) };
        }
    }
    cfg.variant = parse_variant(m.variant);
    cfg.solver.kkt_tolerance = m.tol;
    cfg.solver.max_passes = m.max_passes;
    cfg.min_max_scale = m.scale;
    validate(cfg);
    return cfg;
}

std::string fmt_opt(const std::optional<double> &v) {
    return v ? fmt::format("{:.4f}", *v) : std::string{ "n/a" };
}

void print_metrics(const std::string &tag, const ConfusionMatrix &cm, const Metrics &m) {
    fmt::print("{:<8} tp={} fn={} fp={} tn={} accuracy={:.4f} sensitivity={} specificity={}\n", tag, cm.tp, cm.fn, cm.fp, cm.tn,
               m.accuracy, fmt_opt(m.sensitivity), fmt_opt(m.specificity));
}

int cmd_info(const DataFlags &d) {
    const auto ds = load(d);
    const auto stats = class_stats(ds);
    fmt::print("name: {}\n", ds.name());
    fmt::print("samples: {}\nfeatures: {}\n", ds.size(), ds.dim());
    fmt::print("majority: label {:+d}, {} samples\n", stats.majority_label, stats.n_majority);
    fmt::print("minority: label {:+d}, {} samples\n", stats.minority_label(), stats.n_minority);
    fmt::print("imbalance ratio: {:.1f}\n", stats.imbalance_ratio);
    const auto dr = intra_class_distance_range(ds);
    fmt::print("distance class +1: min {:.4g} max {:.4g}\n", dr.per_class_min[0], dr.per_class_max[0]);
    fmt::print("distance class -1: min {:.4g} max {:.4g}\n", dr.per_class_min[1], dr.per_class_max[1]);
    fmt::print("distance overall: min nonzero {:.4g} max {:.4g}\n", dr.min_intra, dr.max_intra);
    const auto range = sigma2_range_from_data(dr);
    fmt::print("sigma2 range: [{}, {}]\n", range.lo, range.hi);
    fmt::print("C_lim: {:.4f}\n", c_lim(stats));
    return 0;
}

int cmd_train(const DataFlags &d, const ModelFlags &mf, const std::string &model_path, bool allow_partial) {
    const auto ds = load(d);
    const auto cfg = make_config(mf);
    const auto model = train(ds, cfg);
    const auto &diag = model.diagnostics;
    fmt::print("kernel: {}\n", describe(model.kernel));
    fmt::print("C: {} ({})\n", model.train_c, cfg.c ? "soft margin" : "hard margin");
    fmt::print("variant: {}\n", to_string(model.variant));
    fmt::print("support vectors: {} (free {}, bounded {})\n", model.n_sv(), diag.n_free_sv, diag.n_bounded_sv);
    fmt::print("bias: {}\n", model.bias);
    if (model.weight) {
        fmt::print("weight: [{}]\n", fmt::join(*model.weight, ", "));
        fmt::print("margin width: {}\n", margin_width(model));
    }
    fmt::print("training errors: {}\n", diag.train_errors);
    fmt::print("dual objective: {}\n", diag.dual_objective);
    fmt::print("iterations: {}\nmax KKT violation: {}\n", diag.iterations, diag.max_kkt_violation);
    fmt::print("converged: {}\n", model.converged ? "yes" : "no");
    if (!model_path.empty()) {
        save_model(model, model_path);
        fmt::print("model written to {}\n", model_path);
    }
    if (!model.converged && !allow_partial) {
        fmt::print(stderr, "error: solver did not converge within {} updates\n", cfg.solver.max_passes);
        return kExitCompute;
    }
    return 0;
}

int cmd_cv(const DataFlags &d, const ModelFlags &mf, std::size_t k, std::uint64_t seed, std::optional<int> metric_positive,
           bool allow_partial) {
    const auto ds = load(d);
    const auto cfg = make_config(mf);
    const auto folds = stratified_folds(ds, k, seed);
    CvOptions opts;
    opts.positive_label = metric_positive;
    const auto res = cross_validate(ds, cfg, folds, opts);
    fmt::print("kernel: {}  C: {}  folds: {}  seed: {}  positive class: {:+d}\n", describe(cfg.kernel), cfg.effective_c(), k, seed,
               res.positive_label);
    for (const auto &f : res.folds) {
        if (f.confusion) {
            print_metrics(fmt::format("fold {}", f.fold), *f.confusion, *f.metrics);
            if (!f.converged) {
                fmt::print("         (solver did not converge)\n");
            }
        } else {
            fmt::print("fold {}  failed: {}\n", f.fold, f.error);
        }
    }
    if (res.metrics) {
        print_metrics("pooled", res.pooled, *res.metrics);
    }
    if (res.partial) {
        fmt::print("result is partial: {} fold(s) failed\n", res.failed_folds());
    }
    if (!res.metrics) {
        fmt::print(stderr, "error: every fold failed\n");
        return kExitCompute;
    }
    if ((res.partial || !res.all_converged) && !allow_partial) {
        fmt::print(stderr, "error: fold failures or non-converged folds (use --allow-partial to accept)\n");
        return kExitCompute;
    }
    return 0;
}

struct TuneFlags {
    std::string method{ "line" };
    std::string report;
    std::string model;
    std::size_t k{ 5 };
    std::uint64_t seed{ 1 };
    std::string metric{ "accuracy" };
    bool refine{ false };
    double spacing{ 1.0 };
    std::size_t max_c_tilde{ 4 };
    bool deterministic{ false };
    std::optional<int> metric_positive;
};

void print_candidate(const char *tag, const Candidate &c) {
    const auto &m = *c.cv.metrics;
    fmt::print("{}: C={} sigma2={} accuracy={:.4f} sensitivity={} specificity={}\n", tag, c.c,
               c.sigma2 ? fmt::format("{}", *c.sigma2) : std::string{ "-" }, m.accuracy, fmt_opt(m.sensitivity),
               fmt_opt(m.specificity));
}

int cmd_tune(const DataFlags &d, const ModelFlags &mf, const TuneFlags &tf) {
    const auto start = std::chrono::steady_clock::now();
    const auto ds = load(d);
    const auto folds = stratified_folds(ds, tf.k, tf.seed);
    SearchOptions opts;
    opts.base = make_config(mf);
    opts.metric = tf.metric == "balanced" ? SelectionMetric::BalancedAccuracy : SelectionMetric::Accuracy;
    opts.positive_label = tf.metric_positive;

    const auto c_grid = default_c_grid();
    const auto s_grid = default_sigma2_grid();
    const std::size_t grid_cost = c_grid.size() * s_grid.size();

    TuneResult result;
    if (tf.method == "grid") {
        result = grid_search(ds, c_grid, s_grid, folds, opts);
        fmt::print("grid search: {} evaluations ({} C x {} sigma2)\n", result.evaluations, c_grid.size(), s_grid.size());
    } else {
        ProposedSearchSpec spec;
        spec.refine = tf.refine;
        spec.spacing_log10 = tf.spacing;
        spec.max_c_tilde = tf.max_c_tilde;
        const auto r = proposed_search(ds, folds, spec, opts);
        if (r.sweep.best) {
            print_candidate("linear sweep best", r.sweep.candidates[*r.sweep.best]);
        }
        fmt::print("C-tilde set: [{}]\n", fmt::join(r.sweep.c_tilde, ", "));
        fmt::print("C-tilde lines searched: [{}]\n", fmt::join(r.line_spec.c_tilde_values, ", "));
        fmt::print("sigma2 range: [{}, {}] ({} values)\n", r.range.lo, r.range.hi, r.line_spec.sigma2_grid.size());
        if (r.sweep.best_on_boundary) {
            fmt::print("note: linear sweep optimum lies on the edge of the C range\n");
        }
        fmt::print("line search: {} evaluations (+{} for the linear sweep)\n", r.line.evaluations, r.sweep.evaluations);
        fmt::print("grid search at the default resolution would need {} evaluations\n", grid_cost);
        result = r.line;
    }
    if (!result.best) {
        fmt::print(stderr, "error: no candidate could be evaluated\n");
        return kExitCompute;
    }
    const auto &best = result.candidates[*result.best];
    print_candidate("best", best);
    if (result.best_on_boundary) {
        fmt::print("note: the best candidate lies on the edge of the searched range\n");
    }

    if (!tf.report.empty()) {
        std::ofstream out{ tf.report };
        if (!out) {
            throw Error{ ErrorKind::IoError, fmt::format("cannot write '{}'", tf.report) };
        }
        write_report(result, out);
        fmt::print("report written to {}\n", tf.report);
    }
    if (!tf.model.empty()) {
        TrainConfig cfg = opts.base;
        cfg.c = best.c;
        cfg.kernel = best.sigma2 ? KernelSpec{ RbfKernel{ *best.sigma2 } } : KernelSpec{ LinearKernel{} };
        save_model(train(ds, cfg), tf.model);
        fmt::print("best model written to {}\n", tf.model);
    }
    if (!tf.deterministic) {
        fmt::print("elapsed: {:.2f} s\n", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return 0;
}

int cmd_boundary(const std::string &model_path, const DataFlags &d, std::size_t steps, const std::string &out_path) {
    const auto model = load_model(model_path);
    const auto ds = load(d);
    const auto grid = boundary_grid(model, ds, steps);
    if (out_path.empty()) {
        write_boundary(grid, std::cout);
        return 0;
    }
    std::ofstream out{ out_path };
    if (!out) {
        throw Error{ ErrorKind::IoError, fmt::format("cannot write '{}'", out_path) };
    }
    write_boundary(grid, out);
    fmt::print("{} x {} grid written to {}\n", steps, steps, out_path);
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{ "svmlab: support vector machine training, evaluation and tuning" };
    app.require_subcommand(1);

    DataFlags data;
    ModelFlags model;
    std::string model_path;
    bool allow_partial = false;
    std::size_t k = 5;
    std::uint64_t seed = 1;
    std::optional<int> metric_positive;
    TuneFlags tune;
    std::size_t steps = 101;
    std::string out_path;

    auto *info = app.add_subcommand("info", "data set statistics, distance ranges, sigma2 range and C_lim");
    add_data_flags(info, data);

    auto *train_cmd = app.add_subcommand("train", "train a model and write it as JSON");
    add_data_flags(train_cmd, data);
    add_model_flags(train_cmd, model, true);
    train_cmd->add_option("--model", model_path, "output model file");
    train_cmd->add_flag("--allow-partial", allow_partial, "exit 0 even if the solver did not converge");
    train_cmd->add_option("--seed", seed, "accepted for uniformity; training is deterministic");

    auto *cv = app.add_subcommand("cv", "stratified k-fold cross-validation");
    add_data_flags(cv, data);
    add_model_flags(cv, model, true);
    cv->add_option("--k", k, "fold count");
    cv->add_option("--seed", seed, "fold seed");
    cv->add_option("--metric-positive", metric_positive, "class (+1/-1) treated as positive for the metrics");
    cv->add_flag("--allow-partial", allow_partial, "accept failed or non-converged folds");
    cv->add_flag("--deterministic", tune.deterministic, "accepted for uniformity; cv output has no timing fields");

    auto *tune_cmd = app.add_subcommand("tune", "hyperparameter search (line or grid)");
    add_data_flags(tune_cmd, data);
    add_model_flags(tune_cmd, model, false);
    tune_cmd->add_option("--method", tune.method, "line or grid")->check(CLI::IsMember({ "line", "grid" }));
    tune_cmd->add_option("--report", tune.report, "CSV report path");
    tune_cmd->add_option("--model", tune.model, "write the best model here");
    tune_cmd->add_option("--k", tune.k, "fold count");
    tune_cmd->add_option("--seed", tune.seed, "fold seed");
    tune_cmd->add_option("--metric", tune.metric, "accuracy or balanced")->check(CLI::IsMember({ "accuracy", "balanced" }));
    tune_cmd->add_option("--metric-positive", tune.metric_positive, "class (+1/-1) treated as positive for the metrics");
    tune_cmd->add_option("--spacing", tune.spacing, "log10 step of the sigma2 grid");
    tune_cmd->add_option("--max-lines", tune.max_c_tilde, "maximum number of C-tilde lines");
    tune_cmd->add_flag("--refine", tune.refine, "refine around the incumbent at a 0.25 decade step");
    tune_cmd->add_flag("--deterministic", tune.deterministic, "omit timing output");

    auto *boundary = app.add_subcommand("boundary", "decision values on a lattice over a 2-D data set");
    boundary->add_option("--model", model_path, "model file")->required();
    add_data_flags(boundary, data);
    boundary->add_option("--steps", steps, "lattice points per axis");
    boundary->add_option("--out", out_path, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        if (*info) {
            return cmd_info(data);
        }
        if (*train_cmd) {
            return cmd_train(data, model, model_path, allow_partial);
        }
        if (*cv) {
            return cmd_cv(data, model, k, seed, metric_positive, allow_partial);
        }
        if (*tune_cmd) {
            return cmd_tune(data, model, tune);
        }
        if (*boundary) {
            return cmd_boundary(model_path, data, steps, out_path);
        }
    } catch (const Error &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return is_input_error(e.kind()) ? kExitInput : kExitCompute;
    } catch (const std::exception &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitCompute;
    }
    return 0;
}
