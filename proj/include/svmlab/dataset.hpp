#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace svmlab {

/// Class labels are exactly +1 or -1.
inline constexpr int kPositive = +1;
inline constexpr int kNegative = -1;

struct Sample {
    std::vector<double> features;
    int label{ kPositive };
};

/// Immutable binary-classification data set, stored row-major.
class Dataset {
  public:
    Dataset(std::string name, std::vector<Sample> samples);
    Dataset(std::string name, std::size_t dim, std::vector<double> row_major, std::vector<int> labels);

    [[nodiscard]] const std::string &name() const noexcept { return name_; }
    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return { values_.data() + i * dim_, dim_ };
    }
    [[nodiscard]] int label(std::size_t i) const { return labels_[i]; }
    [[nodiscard]] std::span<const int> labels() const noexcept { return labels_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    [[nodiscard]] std::size_t count(int label) const noexcept;
    [[nodiscard]] bool has_both_classes() const noexcept { return count(kPositive) > 0 && count(kNegative) > 0; }

    /// Copy of the selected rows, in the given order.
    [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const;

  private:
    std::string name_;
    std::size_t dim_{ 0 };
    std::vector<double> values_;
    std::vector<int> labels_;
};

struct ClassStats {
    std::size_t n_majority{ 0 };
    std::size_t n_minority{ 0 };
    int majority_label{ kPositive };
    double imbalance_ratio{ 1.0 };

    [[nodiscard]] int minority_label() const noexcept { return -majority_label; }
    [[nodiscard]] std::size_t total() const noexcept { return n_majority + n_minority; }
};

/// Intra-class pairwise Euclidean distances. Per-class arrays are indexed
/// {+1 class, -1 class} and hold the raw extremes (zeros included).
struct DistanceRange {
    double min_intra{ 0.0 };
    double max_intra{ 0.0 };
    std::array<double, 2> per_class_min{};
    std::array<double, 2> per_class_max{};
};

struct FoldPlan {
    std::size_t k{ 0 };
    std::vector<std::size_t> assignments;
    std::uint64_t seed{ 0 };

    [[nodiscard]] std::vector<std::size_t> test_indices(std::size_t fold) const;
    [[nodiscard]] std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Column holding the label: an index (negative counts from the end) or a header name.
using LabelColumn = std::variant<long, std::string>;

struct CsvOptions {
    LabelColumn label_column{ -1L };
    /// Raw label value mapped to +1. When absent the minority raw label becomes +1
    /// (first-seen label on a tie).
    std::optional<std::string> positive_label;
};

[[nodiscard]] Dataset load_csv(const std::filesystem::path &path, const CsvOptions &options = {});

/// Writes features at full round-trip precision with the label (+1/-1) as last column.
void save_csv(const Dataset &ds, const std::filesystem::path &path);

[[nodiscard]] ClassStats class_stats(const Dataset &ds);
[[nodiscard]] DistanceRange intra_class_distance_range(const Dataset &ds);
[[nodiscard]] FoldPlan stratified_folds(const Dataset &ds, std::size_t k, std::uint64_t seed);

/// Per-feature min-max scaling onto [0, 1]; constant features map to 0.
struct MinMaxScaler {
    std::vector<double> min;
    std::vector<double> max;

    [[nodiscard]] static MinMaxScaler fit(const Dataset &ds, std::span<const std::size_t> rows);
    [[nodiscard]] std::vector<double> transform(std::span<const double> x) const;
    [[nodiscard]] Dataset transform(const Dataset &ds) const;
};

}  // namespace svmlab
