#include "svmlab/svm.hpp"

#include "svmlab/errors.hpp"

#include "fmt/format.h"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace svmlab {

namespace {

using nlohmann::json;

bool both_classes(const Dataset &ds, std::span<const std::size_t> rows) {
    bool pos = false;
    bool neg = false;
    for (const std::size_t r : rows) {
        (ds.label(r) == kPositive ? pos : neg) = true;
    }
    return pos && neg;
}

double shift_for(const TrainConfig &cfg) {
    return cfg.variant == Variant::L2 ? 1.0 / cfg.effective_c() : 0.0;
}

std::optional<double> bound_for(const TrainConfig &cfg) {
    if (cfg.variant == Variant::L2) {
        return std::nullopt;
    }
    return cfg.effective_c();
}

TrainOutput assemble(const Dataset &work, std::span<const std::size_t> rows, DualSolution sol, const TrainConfig &cfg) {
    const std::size_t n = rows.size();
    const double c = cfg.effective_c();
    const double shift = shift_for(cfg);

    SvmModel m;
    m.dim = work.dim();
    m.kernel = cfg.kernel;
    m.train_c = c;
    m.variant = cfg.variant;
    m.bias = sol.equality_multiplier;
    m.converged = sol.converged;

    auto &d = m.diagnostics;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = sol.alpha[k];
        if (a <= kSvThreshold) {
            continue;
        }
        const auto x = work.row(rows[k]);
        m.sv_features.insert(m.sv_features.end(), x.begin(), x.end());
        m.sv_labels.push_back(work.label(rows[k]));
        m.sv_alpha.push_back(a);
        if (cfg.variant == Variant::L1 && a >= c * (1.0 - 1e-12)) {
            ++d.n_bounded_sv;
        } else {
            ++d.n_free_sv;
        }
    }
    if (m.n_sv() == 0) {
        throw Error{ ErrorKind::NoSupportVectors, "training produced no support vectors" };
    }

    if (is_linear(cfg.kernel)) {
        std::vector<double> w(m.dim, 0.0);
        for (std::size_t s = 0; s < m.n_sv(); ++s) {
            const double coef = m.sv_alpha[s] * m.sv_labels[s];
            const auto x = m.sv(s);
            for (std::size_t j = 0; j < m.dim; ++j) {
                w[j] += coef * x[j];
            }
        }
        const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
        d.margin_width = norm > 0.0 ? 2.0 / norm : std::numeric_limits<double>::infinity();
        m.weight = std::move(w);
    }

    // y_i f(x_i) = (H a)_i - shift a_i + y_i b, and (H a)_i = G_i + 1
    d.slack.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const int y = work.label(rows[k]);
        const double yf = sol.gradient[k] + 1.0 - shift * sol.alpha[k] + y * m.bias;
        d.slack[k] = std::max(0.0, 1.0 - yf);
        const int predicted = y * yf >= 0.0 ? kPositive : kNegative;
        if (predicted != y) {
            ++d.train_errors;
        }
    }
    d.iterations = sol.iterations;
    d.max_kkt_violation = sol.max_kkt_violation;
    d.dual_objective = sol.objective;
    return { std::move(m), std::move(sol) };
}

std::vector<int> labels_of(const Dataset &ds, std::span<const std::size_t> rows) {
    std::vector<int> y(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        y[k] = ds.label(rows[k]);
    }
    return y;
}

TrainOutput train_rows(const Dataset &work, std::span<const std::size_t> rows, const TrainConfig &cfg) {
    if (rows.size() <= cfg.cache_threshold) {
        return train_on_gram(work, rows, gram_matrix(cfg.kernel, work, rows), cfg);
    }
    const std::size_t n = rows.size();
    const auto y = labels_of(work, rows);
    const double shift = shift_for(cfg);
    std::vector<double> diag(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto x = work.row(rows[k]);
        diag[k] = kernel_eval(cfg.kernel, x, x) + shift;
    }
    CachedHessian h{ n, diag,
                     [&](std::size_t i, std::span<double> out) {
                         const auto xi = work.row(rows[i]);
                         for (std::size_t j = 0; j < n; ++j) {
                             out[j] = y[i] * y[j] * kernel_eval(cfg.kernel, xi, work.row(rows[j]));
                         }
                         out[i] += shift;
                     },
                     cfg.cache_rows };
    const std::vector<double> f(n, 1.0);
    auto sol = solve_smo(h, y, bound_for(cfg), f, cfg.solver);
    return assemble(work, rows, std::move(sol), cfg);
}

json kernel_to_json(const KernelSpec &k) {
    if (const auto *r = std::get_if<RbfKernel>(&k)) {
        return { { "type", "rbf" }, { "sigma2", r->sigma2 } };
    }
    if (const auto *p = std::get_if<PolynomialKernel>(&k)) {
        return { { "type", "poly" }, { "degree", p->degree }, { "offset", p->offset } };
    }
    return { { "type", "linear" } };
}

KernelSpec kernel_from_json(const json &j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "linear") {
        return LinearKernel{};
    }
    if (type == "rbf") {
        return RbfKernel{ j.at("sigma2").get<double>() };
    }
    if (type == "poly") {
        return PolynomialKernel{ j.at("degree").get<int>(), j.at("offset").get<double>() };
    }
    throw Error{ ErrorKind::SchemaMismatch, fmt::format("unknown kernel type '{}'", type) };
}

}  // namespace

std::string to_string(Variant v) {
    return v == Variant::L1 ? "l1" : "l2";
}

Variant parse_variant(const std::string &text) {
    if (text == "l1" || text == "L1") {
        return Variant::L1;
    }
    if (text == "l2" || text == "L2") {
        return Variant::L2;
    }
    throw Error{ ErrorKind::InvalidArgument, fmt::format("unknown variant '{}'", text) };
}

void validate(const TrainConfig &cfg) {
    validate(cfg.kernel);
    if (cfg.c && (!(*cfg.c > 0.0) || !std::isfinite(*cfg.c))) {
        throw Error{ ErrorKind::InvalidArgument, fmt::format("C must be positive, got {}", *cfg.c) };
    }
    if (!(cfg.solver.kkt_tolerance > 0.0)) {
        throw Error{ ErrorKind::InvalidArgument, "KKT tolerance must be positive" };
    }
}

SvmModel train(const Dataset &ds, const TrainConfig &cfg) {
    return train_detailed(ds, cfg).model;
}

TrainOutput train_detailed(const Dataset &ds, const TrainConfig &cfg) {
    validate(cfg);
    if (!ds.has_both_classes()) {
        throw Error{ ErrorKind::SingleClass, "training needs both classes" };
    }
    std::vector<std::size_t> rows(ds.size());
    std::iota(rows.begin(), rows.end(), std::size_t{ 0 });
    if (!cfg.min_max_scale) {
        return train_rows(ds, rows, cfg);
    }
    const auto scaler = MinMaxScaler::fit(ds, rows);
    auto out = train_rows(scaler.transform(ds), rows, cfg);
    out.model.scaler = scaler;
    return out;
}

TrainOutput train_on_gram(const Dataset &ds, std::span<const std::size_t> rows, const GramMatrix &gram, const TrainConfig &cfg) {
    validate(cfg);
    if (gram.order() != rows.size()) {
        throw Error{ ErrorKind::LengthMismatch, fmt::format("Gram order {} for {} rows", gram.order(), rows.size()) };
    }
    if (!both_classes(ds, rows)) {
        throw Error{ ErrorKind::SingleClass, "training needs both classes" };
    }
    const auto y = labels_of(ds, rows);
    const DualProblem problem{ h_matrix(gram, y, shift_for(cfg)), y, bound_for(cfg) };
    auto sol = solve_smo(problem, cfg.solver);
    return assemble(ds, rows, std::move(sol), cfg);
}

double decision_value(const SvmModel &m, std::span<const double> x) {
    if (x.size() != m.dim) {
        throw Error{ ErrorKind::DimensionMismatch, fmt::format("model expects {} features, got {}", m.dim, x.size()) };
    }
    std::vector<double> scaled;
    if (m.scaler) {
        scaled = m.scaler->transform(x);
        x = scaled;
    }
    if (m.weight) {
        return std::inner_product(x.begin(), x.end(), m.weight->begin(), 0.0) + m.bias;
    }
    double sum = 0.0;
    for (std::size_t s = 0; s < m.n_sv(); ++s) {
        sum += m.sv_alpha[s] * m.sv_labels[s] * kernel_eval(m.kernel, m.sv(s), x);
    }
    return sum + m.bias;
}

int predict(const SvmModel &m, std::span<const double> x) {
    return decision_value(m, x) >= 0.0 ? kPositive : kNegative;
}

std::vector<int> predict(const SvmModel &m, const Dataset &ds) {
    std::vector<int> out(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out[i] = predict(m, ds.row(i));
    }
    return out;
}

double compute_bias(const DualSolution &solution, const DualProblem &problem) {
    const std::size_t n = problem.h.order();
    if (solution.alpha.size() != n) {
        throw Error{ ErrorKind::LengthMismatch, "solution and problem differ in order" };
    }
    if (std::none_of(solution.alpha.begin(), solution.alpha.end(), [](double a) { return a > kSvThreshold; })) {
        throw Error{ ErrorKind::NoSupportVectors, "no multiplier is positive" };
    }
    std::vector<double> grad = solution.gradient;
    if (grad.size() != n) {
        grad.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = problem.h.h.row(i);
            grad[i] = std::inner_product(row.begin(), row.end(), solution.alpha.begin(), 0.0) - problem.linear_coeff[i];
        }
    }
    return bias_from_gradient(solution.alpha, grad, problem.labels, problem.upper_bound);
}

double margin_width(const SvmModel &m) {
    if (!m.weight) {
        throw Error{ ErrorKind::NotLinear, fmt::format("margin width needs a linear kernel, model uses {}", describe(m.kernel)) };
    }
    const double norm = std::sqrt(std::inner_product(m.weight->begin(), m.weight->end(), m.weight->begin(), 0.0));
    return norm > 0.0 ? 2.0 / norm : std::numeric_limits<double>::infinity();
}

double estimate_c_star(const Dataset &ds, const TrainConfig &cfg) {
    TrainConfig hard = cfg;
    hard.c = kHardMarginC;
    hard.variant = Variant::L1;
    const auto m = train(ds, hard);
    if (m.diagnostics.train_errors > 0) {
        throw Error{ ErrorKind::NotSeparable, fmt::format("{} training errors remain at C = {}", m.diagnostics.train_errors, kHardMarginC) };
    }
    return *std::max_element(m.sv_alpha.begin(), m.sv_alpha.end());
}

double loo_sv_bound(const SvmModel &m, std::size_t n_train) {
    if (n_train == 0) {
        throw Error{ ErrorKind::InvalidArgument, "training set size must be positive" };
    }
    return static_cast<double>(m.n_sv()) / static_cast<double>(n_train);
}

double vc_confidence(const VcInputs &v) {
    if (!(v.n > 0.0) || !(v.vc_dim > 0.0)) {
        throw Error{ ErrorKind::InvalidArgument, "N and the VC dimension must be positive" };
    }
    if (!(v.eta > 0.0 && v.eta < 1.0)) {
        throw Error{ ErrorKind::InvalidArgument, fmt::format("eta must lie in (0, 1), got {}", v.eta) };
    }
    const double radicand = (v.vc_dim * (std::log(2.0 * v.n / v.vc_dim) + 1.0) - std::log(v.eta / 4.0)) / v.n;
    if (!(radicand > 0.0)) {
        throw Error{ ErrorKind::DomainError, fmt::format("VC confidence radicand is {}", radicand) };
    }
    return std::sqrt(radicand);
}

std::string model_to_json(const SvmModel &m) {
    json j;
    j["version"] = kModelFormatVersion;
    j["kernel"] = kernel_to_json(m.kernel);
    j["variant"] = to_string(m.variant);
    j["c"] = m.train_c;
    j["bias"] = m.bias;
    j["dim"] = m.dim;
    j["converged"] = m.converged;
    if (m.weight) {
        j["weight"] = *m.weight;
    }
    if (m.scaler) {
        j["scaler"] = { { "min", m.scaler->min }, { "max", m.scaler->max } };
    }
    json sv = json::array();
    for (std::size_t s = 0; s < m.n_sv(); ++s) {
        const auto x = m.sv(s);
        sv.push_back({ { "features", std::vector<double>(x.begin(), x.end()) }, { "label", m.sv_labels[s] }, { "alpha", m.sv_alpha[s] } });
    }
    j["sv"] = std::move(sv);
    const auto &d = m.diagnostics;
    json diag{ { "n_free_sv", d.n_free_sv },
               { "n_bounded_sv", d.n_bounded_sv },
               { "slack", d.slack },
               { "train_errors", d.train_errors },
               { "iterations", d.iterations },
               { "max_kkt_violation", d.max_kkt_violation },
               { "dual_objective", d.dual_objective } };
    if (d.margin_width && std::isfinite(*d.margin_width)) {
        diag["margin_width"] = *d.margin_width;
    }
    j["diagnostics"] = std::move(diag);
    return j.dump(2);
}

SvmModel model_from_json(const std::string &text) {
    try {
        const json j = json::parse(text);
        if (j.at("version").get<int>() != kModelFormatVersion) {
            throw Error{ ErrorKind::SchemaMismatch, fmt::format("unsupported model version {}", j.at("version").dump()) };
        }
        SvmModel m;
        m.kernel = kernel_from_json(j.at("kernel"));
        m.variant = parse_variant(j.at("variant").get<std::string>());
        m.train_c = j.at("c").get<double>();
        m.bias = j.at("bias").get<double>();
        m.dim = j.at("dim").get<std::size_t>();
        m.converged = j.value("converged", true);
        if (j.contains("weight")) {
            m.weight = j.at("weight").get<std::vector<double>>();
            if (m.weight->size() != m.dim) {
                throw Error{ ErrorKind::SchemaMismatch, "weight length differs from dim" };
            }
        }
        if (j.contains("scaler")) {
            MinMaxScaler s;
            s.min = j.at("scaler").at("min").get<std::vector<double>>();
            s.max = j.at("scaler").at("max").get<std::vector<double>>();
            if (s.min.size() != m.dim || s.max.size() != m.dim) {
                throw Error{ ErrorKind::SchemaMismatch, "scaler length differs from dim" };
            }
            m.scaler = std::move(s);
        }
        for (const auto &sv : j.at("sv")) {
            const auto x = sv.at("features").get<std::vector<double>>();
            if (x.size() != m.dim) {
                throw Error{ ErrorKind::SchemaMismatch, "support vector length differs from dim" };
            }
            m.sv_features.insert(m.sv_features.end(), x.begin(), x.end());
            m.sv_labels.push_back(sv.at("label").get<int>());
            m.sv_alpha.push_back(sv.at("alpha").get<double>());
        }
        const auto &d = j.at("diagnostics");
        auto &out = m.diagnostics;
        out.n_free_sv = d.at("n_free_sv").get<std::size_t>();
        out.n_bounded_sv = d.at("n_bounded_sv").get<std::size_t>();
        out.slack = d.at("slack").get<std::vector<double>>();
        out.train_errors = d.at("train_errors").get<std::size_t>();
        out.iterations = d.at("iterations").get<std::size_t>();
        out.max_kkt_violation = d.at("max_kkt_violation").get<double>();
        out.dual_objective = d.at("dual_objective").get<double>();
        if (d.contains("margin_width")) {
            out.margin_width = d.at("margin_width").get<double>();
        } else if (m.weight) {
            out.margin_width = std::numeric_limits<double>::infinity();
        }
        return m;
    } catch (const json::exception &e) {
        throw Error{ ErrorKind::SchemaMismatch, e.what() };
    }
}

void save_model(const SvmModel &m, const std::filesystem::path &path) {
    std::ofstream out{ path };
    if (!out) {
        throw Error{ ErrorKind::IoError, fmt::format("cannot write '{}'", path.string()) };
    }
    out << model_to_json(m) << '\n';
    if (!out) {
        throw Error{ ErrorKind::IoError, fmt::format("failed while writing '{}'", path.string()) };
    }
}

SvmModel load_model(const std::filesystem::path &path) {
    std::ifstream in{ path };
    if (!in) {
        throw Error{ ErrorKind::IoError, fmt::format("cannot open '{}'", path.string()) };
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace svmlab
