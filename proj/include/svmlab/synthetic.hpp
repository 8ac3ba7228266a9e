#pragma once

#include "svmlab/dataset.hpp"

#include <cstddef>
#include <cstdint>

namespace svmlab {

/// Two isotropic Gaussian clouds with means +-separation/2 along the first axis.
[[nodiscard]] Dataset gaussian_blobs(std::size_t n_pos, std::size_t n_neg, std::size_t dim, double separation, std::uint64_t seed);

/// Uniform points in [-1, 1]^dim labelled by a random hyperplane; points closer than `gap`
/// to the plane are redrawn, so the set is linearly separable with margin >= 2 gap.
[[nodiscard]] Dataset separable_set(std::size_t n_pos, std::size_t n_neg, std::size_t dim, double gap, std::uint64_t seed);

/// Minority (+1) uniform in the disk of radius 1, majority (-1) uniform in the ring 1.5 <= r <= 2.5.
[[nodiscard]] Dataset ring_in_disk(std::size_t n_majority, std::size_t n_minority, std::uint64_t seed);

}  // namespace svmlab
