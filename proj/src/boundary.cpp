#include "svmlab/boundary.hpp"

#include "svmlab/errors.hpp"

#include "fmt/format.h"

#include <algorithm>
#include <array>

namespace svmlab {

BoundaryGrid boundary_grid(const SvmModel &m, const Dataset &ds, std::size_t steps) {
    if (m.dim != 2 || ds.dim() != 2) {
        throw Error{ ErrorKind::NotTwoDimensional, fmt::format("boundary export needs 2-D model and data, got {} and {}", m.dim, ds.dim()) };
    }
    if (steps < 2) {
        throw Error{ ErrorKind::InvalidArgument, "need at least 2 steps per axis" };
    }
    std::array<double, 2> lo{ ds.row(0)[0], ds.row(0)[1] };
    std::array<double, 2> hi = lo;
    for (std::size_t i = 1; i < ds.size(); ++i) {
        for (std::size_t a = 0; a < 2; ++a) {
            lo[a] = std::min(lo[a], ds.row(i)[a]);
            hi[a] = std::max(hi[a], ds.row(i)[a]);
        }
    }
    std::array<AxisRange, 2> axes;
    for (std::size_t a = 0; a < 2; ++a) {
        double pad = 0.1 * (hi[a] - lo[a]);
        if (pad == 0.0) {
            pad = 1.0;
        }
        axes[a] = { lo[a] - pad, hi[a] + pad, steps };
    }

    BoundaryGrid g{ axes[0], axes[1], {}, {} };
    g.values.reserve(steps * steps);
    g.predictions.reserve(steps * steps);
    for (std::size_t r = 0; r < steps; ++r) {
        for (std::size_t c = 0; c < steps; ++c) {
            const std::array<double, 2> p{ g.x.at(c), g.y.at(r) };
            const double v = decision_value(m, p);
            g.values.push_back(v);
            g.predictions.push_back(v >= 0.0 ? kPositive : kNegative);
        }
    }
    return g;
}

void write_boundary(const BoundaryGrid &g, std::ostream &out) {
    out << "x,y,decision_value,prediction\n";
    for (std::size_t r = 0; r < g.y.steps; ++r) {
        for (std::size_t c = 0; c < g.x.steps; ++c) {
            const std::size_t k = r * g.x.steps + c;
            out << fmt::format("{},{},{},{}\n", g.x.at(c), g.y.at(r), g.values[k], g.predictions[k]);
        }
    }
}

}  // namespace svmlab
