#include "svmlab/dataset.hpp"

#include "svmlab/errors.hpp"
#include "svmlab/rng.hpp"

#include "fmt/format.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

namespace svmlab {

namespace {

void check_label(int label) {
    if (label != kPositive && label != kNegative) {
        throw Error{ ErrorKind::InvalidArgument, fmt::format("label must be +1 or -1, got {}", label) };
    }
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string &line) {
    std::vector<std::string> fields;
    std::string_view rest{ line };
    while (true) {
        const auto comma = rest.find(',');
        fields.emplace_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(comma + 1);
    }
    return fields;
}

std::optional<double> parse_number(std::string_view field) {
    if (field.empty()) {
        return std::nullopt;
    }
    if (field.front() == '+') {
        field.remove_prefix(1);
    }
    double value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace

Dataset::Dataset(std::string name, std::vector<Sample> samples) :
    name_{ std::move(name) } {
    if (samples.size() < 2) {
        throw Error{ ErrorKind::TooFewSamples, "a data set needs at least 2 samples" };
    }
    dim_ = samples.front().features.size();
    if (dim_ == 0) {
        throw Error{ ErrorKind::InvalidArgument, "samples must have at least one feature" };
    }
    values_.reserve(samples.size() * dim_);
    labels_.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].features.size() != dim_) {
            throw Error{ ErrorKind::DimensionMismatch,
                         fmt::format("sample {} has {} features, expected {}", i, samples[i].features.size(), dim_) };
        }
        check_label(samples[i].label);
        values_.insert(values_.end(), samples[i].features.begin(), samples[i].features.end());
        labels_.push_back(samples[i].label);
    }
}

Dataset::Dataset(std::string name, std::size_t dim, std::vector<double> row_major, std::vector<int> labels) :
    name_{ std::move(name) },
    dim_{ dim },
    values_{ std::move(row_major) },
    labels_{ std::move(labels) } {
    if (dim_ == 0) {
        throw Error{ ErrorKind::InvalidArgument, "dimension must be positive" };
    }
    if (labels_.size() < 2) {
        throw Error{ ErrorKind::TooFewSamples, "a data set needs at least 2 samples" };
    }
    if (values_.size() != labels_.size() * dim_) {
        throw Error{ ErrorKind::DimensionMismatch,
                     fmt::format("{} values do not form {} rows of dimension {}", values_.size(), labels_.size(), dim_) };
    }
    std::for_each(labels_.begin(), labels_.end(), check_label);
}

std::size_t Dataset::count(int label) const noexcept {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<double> values;
    std::vector<int> labels;
    values.reserve(indices.size() * dim_);
    labels.reserve(indices.size());
    for (const std::size_t i : indices) {
        if (i >= size()) {
            throw Error{ ErrorKind::InvalidArgument, fmt::format("row index {} out of range", i) };
        }
        const auto r = row(i);
        values.insert(values.end(), r.begin(), r.end());
        labels.push_back(labels_[i]);
    }
    return Dataset{ name_, dim_, std::move(values), std::move(labels) };
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == fold) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != fold) {
            out.push_back(i);
        }
    }
    return out;
}

Dataset load_csv(const std::filesystem::path &path, const CsvOptions &options) {
    std::ifstream in{ path };
    if (!in) {
        throw Error{ ErrorKind::IoError, fmt::format("cannot open '{}'", path.string()) };
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        rows.push_back(split_fields(line));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) {
        throw Error{ ErrorKind::EmptyFile, fmt::format("'{}' contains no rows", path.string()) };
    }

    const std::size_t arity = rows.front().size();
    if (arity < 2) {
        throw Error{ ErrorKind::MalformedRow, "need at least one feature column and one label column" };
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != arity) {
            throw Error{ ErrorKind::MalformedRow, fmt::format("line {} has {} fields, expected {}", line_numbers[r], rows[r].size(), arity) };
        }
    }

    // header: selecting the label by name, or any non-numeric feature field in row one
    std::optional<std::vector<std::string>> header;
    std::size_t label_col = 0;
    const auto resolve_index = [&](long idx) -> std::size_t {
        const long n = static_cast<long>(arity);
        const long resolved = idx < 0 ? n + idx : idx;
        if (resolved < 0 || resolved >= n) {
            throw Error{ ErrorKind::InvalidArgument, fmt::format("label column {} out of range for {} columns", idx, arity) };
        }
        return static_cast<std::size_t>(resolved);
    };
    if (const auto *name = std::get_if<std::string>(&options.label_column)) {
        header = rows.front();
        const auto it = std::find(header->begin(), header->end(), *name);
        if (it == header->end()) {
            throw Error{ ErrorKind::InvalidArgument, fmt::format("no column named '{}' in header", *name) };
        }
        label_col = static_cast<std::size_t>(it - header->begin());
    } else {
        label_col = resolve_index(std::get<long>(options.label_column));
        for (std::size_t c = 0; c < arity; ++c) {
            if (c != label_col && !parse_number(rows.front()[c])) {
                header = rows.front();
                break;
            }
        }
    }

    const std::size_t first_data = header ? 1 : 0;
    if (rows.size() <= first_data) {
        throw Error{ ErrorKind::EmptyFile, fmt::format("'{}' contains a header but no data rows", path.string()) };
    }

    // distinct raw labels in order of first appearance
    std::vector<std::string> distinct;
    std::map<std::string, std::size_t> label_counts;
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        const std::string &raw = rows[r][label_col];
        if (label_counts[raw]++ == 0) {
            distinct.push_back(raw);
        }
    }
    if (distinct.size() != 2) {
        throw Error{ ErrorKind::LabelCardinality, fmt::format("label column has {} distinct values, expected 2", distinct.size()) };
    }

    std::string positive;
    if (options.positive_label) {
        positive = *options.positive_label;
        if (label_counts.count(positive) == 0) {
            throw Error{ ErrorKind::InvalidArgument, fmt::format("positive label '{}' does not occur in the label column", positive) };
        }
    } else {
        positive = label_counts[distinct[1]] < label_counts[distinct[0]] ? distinct[1] : distinct[0];
    }

    const std::size_t dim = arity - 1;
    std::vector<double> values;
    std::vector<int> labels;
    values.reserve((rows.size() - first_data) * dim);
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < arity; ++c) {
            if (c == label_col) {
                continue;
            }
            const auto v = parse_number(rows[r][c]);
            if (!v) {
                throw Error{ ErrorKind::MalformedRow,
                             fmt::format("line {} column {}: '{}' is not a number", line_numbers[r], c + 1, rows[r][c]) };
            }
            values.push_back(*v);
        }
        labels.push_back(rows[r][label_col] == positive ? kPositive : kNegative);
    }
    return Dataset{ path.stem().string(), dim, std::move(values), std::move(labels) };
}

void save_csv(const Dataset &ds, const std::filesystem::path &path) {
    std::ofstream out{ path };
    if (!out) {
        throw Error{ ErrorKind::IoError, fmt::format("cannot write '{}'", path.string()) };
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (const double v : ds.row(i)) {
            out << fmt::format("{:.17g},", v);
        }
        out << (ds.label(i) == kPositive ? "1" : "-1") << '\n';
    }
    if (!out) {
        throw Error{ ErrorKind::IoError, fmt::format("failed while writing '{}'", path.string()) };
    }
}

ClassStats class_stats(const Dataset &ds) {
    const std::size_t n_pos = ds.count(kPositive);
    const std::size_t n_neg = ds.count(kNegative);
    if (n_pos == 0 || n_neg == 0) {
        throw Error{ ErrorKind::SingleClass, "both classes must be present" };
    }
    ClassStats stats;
    stats.majority_label = n_pos >= n_neg ? kPositive : kNegative;
    stats.n_majority = std::max(n_pos, n_neg);
    stats.n_minority = std::min(n_pos, n_neg);
    stats.imbalance_ratio = static_cast<double>(stats.n_majority) / static_cast<double>(stats.n_minority);
    return stats;
}

DistanceRange intra_class_distance_range(const Dataset &ds) {
    DistanceRange range;
    const std::array<int, 2> classes{ kPositive, kNegative };
    double min_nonzero = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < 2; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.label(i) == classes[c]) {
                members.push_back(i);
            }
        }
        if (members.size() < 2) {
            throw Error{ ErrorKind::DegenerateClass, fmt::format("class {:+d} has {} sample(s); need 2", classes[c], members.size()) };
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                const double d = euclidean(ds.row(members[a]), ds.row(members[b]));
                lo = std::min(lo, d);
                hi = std::max(hi, d);
                if (d > 0.0) {
                    min_nonzero = std::min(min_nonzero, d);
                }
            }
        }
        range.per_class_min[c] = lo;
        range.per_class_max[c] = hi;
    }
    range.max_intra = std::max(range.per_class_max[0], range.per_class_max[1]);
    range.min_intra = std::isfinite(min_nonzero) ? min_nonzero : 0.0;
    return range;
}

FoldPlan stratified_folds(const Dataset &ds, std::size_t k, std::uint64_t seed) {
    if (k < 2) {
        throw Error{ ErrorKind::InvalidArgument, "fold count must be at least 2" };
    }
    if (k > ds.size()) {
        throw Error{ ErrorKind::TooFewSamples, fmt::format("{} folds requested for {} samples", k, ds.size()) };
    }
    if (!ds.has_both_classes()) {
        throw Error{ ErrorKind::SingleClass, "both classes must be present" };
    }

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(ds.size(), 0);

    Rng rng{ seed };
    std::size_t next_fold = 0;
    for (const int label : { kPositive, kNegative }) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.label(i) == label) {
                members.push_back(i);
            }
        }
        shuffle(members, rng);
        // round-robin offset carries over between classes
        for (const std::size_t i : members) {
            plan.assignments[i] = next_fold;
            next_fold = (next_fold + 1) % k;
        }
    }
    return plan;
}

MinMaxScaler MinMaxScaler::fit(const Dataset &ds, std::span<const std::size_t> rows) {
    if (rows.empty()) {
        throw Error{ ErrorKind::InvalidArgument, "cannot fit a scaler on zero rows" };
    }
    MinMaxScaler s;
    s.min.assign(ds.dim(), std::numeric_limits<double>::infinity());
    s.max.assign(ds.dim(), -std::numeric_limits<double>::infinity());
    for (const std::size_t i : rows) {
        const auto r = ds.row(i);
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            s.min[j] = std::min(s.min[j], r[j]);
            s.max[j] = std::max(s.max[j], r[j]);
        }
    }
    return s;
}

std::vector<double> MinMaxScaler::transform(std::span<const double> x) const {
    if (x.size() != min.size()) {
        throw Error{ ErrorKind::DimensionMismatch, fmt::format("scaler expects {} features, got {}", min.size(), x.size()) };
    }
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double span = max[j] - min[j];
        out[j] = span > 0.0 ? (x[j] - min[j]) / span : 0.0;
    }
    return out;
}

Dataset MinMaxScaler::transform(const Dataset &ds) const {
    std::vector<double> values;
    values.reserve(ds.size() * ds.dim());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto t = transform(ds.row(i));
        values.insert(values.end(), t.begin(), t.end());
    }
    return Dataset{ ds.name(), ds.dim(), std::move(values), std::vector<int>(ds.labels().begin(), ds.labels().end()) };
}

}  // namespace svmlab
