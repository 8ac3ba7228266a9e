#pragma once

#include "svmlab/dataset.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    TempDir() {
        static std::atomic<int> counter{ 0 };
        path_ = std::filesystem::temp_directory_path() /
                ("svmlab_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    [[nodiscard]] const std::filesystem::path &path() const { return path_; }

    std::filesystem::path write(const std::string &name, const std::string &content) const {
        const auto p = path_ / name;
        std::ofstream{ p } << content;
        return p;
    }

  private:
    std::filesystem::path path_;
};

inline svmlab::Dataset pair_1d() {
    return svmlab::Dataset{ "pair", { { { 6.0 }, svmlab::kPositive }, { { 2.0 }, svmlab::kNegative } } };
}

inline svmlab::Dataset four_point() {
    return svmlab::Dataset{ "four",
                            { { { 1.0, 1.0 }, svmlab::kPositive },
                              { { -1.0, 1.0 }, svmlab::kNegative },
                              { { -1.0, -1.0 }, svmlab::kNegative },
                              { { 1.0, -1.0 }, svmlab::kPositive } } };
}

inline svmlab::Dataset poly_three() {
    return svmlab::Dataset{ "poly",
                            { { { 2.0 }, svmlab::kNegative }, { { 6.0 }, svmlab::kPositive }, { { 8.0 }, svmlab::kNegative } } };
}

inline svmlab::Dataset l2_three() {
    return svmlab::Dataset{ "l2",
                            { { { 0.0, 0.0 }, svmlab::kNegative },
                              { { 1.0, 0.0 }, svmlab::kPositive },
                              { { 0.0, 1.0 }, svmlab::kPositive } } };
}

inline std::filesystem::path data_dir() {
    return SVMLAB_DATA_DIR;
}

}  // namespace testing
