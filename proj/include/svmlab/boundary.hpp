#pragma once

#include "svmlab/dataset.hpp"
#include "svmlab/svm.hpp"

#include <cstddef>
#include <ostream>
#include <vector>

namespace svmlab {

struct AxisRange {
    double lo{ 0.0 };
    double hi{ 0.0 };
    std::size_t steps{ 0 };

    [[nodiscard]] double at(std::size_t k) const { return steps < 2 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1); }
};

/// Decision values on a lattice; x varies fastest.
struct BoundaryGrid {
    AxisRange x;
    AxisRange y;
    std::vector<double> values;
    std::vector<int> predictions;
};

/// Lattice over the bounding box of `ds`, widened by 10% of its extent per side.
/// Throws NotTwoDimensional unless model and data are 2-D.
[[nodiscard]] BoundaryGrid boundary_grid(const SvmModel &m, const Dataset &ds, std::size_t steps);

/// CSV with columns x, y, decision_value, prediction.
void write_boundary(const BoundaryGrid &g, std::ostream &out);

}  // namespace svmlab
