#include "doctest.h"
#include "support.hpp"

#include "svmlab/synthetic.hpp"

#include <sys/wait.h>

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace svmlab;

namespace {

struct RunResult {
    int code{ -1 };
    std::string out;
};

RunResult run(const std::string &args, const testing::TempDir &dir) {
    const auto log = dir.path() / "stdout.txt";
    const std::string cmd = std::string{ SVMLAB_CLI } + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in{ log };
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in{ p };
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("info on small files and on an empty file") {
    testing::TempDir dir;
    const auto data = dir.write("d.csv", "0,0,a\n0,1,a\n3,0,b\n3,1,b\n");
    const auto r = run("info --data " + data.string(), dir);
    CHECK(r.code == 0);
    CHECK(r.out.find("imbalance ratio: 1.0") != std::string::npos);
    CHECK(r.out.find("C_lim: 1.0000") != std::string::npos);

    const auto empty = dir.write("e.csv", "");
    CHECK(run("info --data " + empty.string(), dir).code == 2);
    CHECK(run("info --data " + (dir.path() / "none.csv").string(), dir).code == 2);
    CHECK(run("info", dir).code == 2);
    CHECK(run("frobnicate", dir).code == 2);
}

TEST_CASE("train with each kernel and invalid flags") {
    testing::TempDir dir;
    const auto ds = gaussian_blobs(20, 15, 2, 2.0, 3);
    save_csv(ds, dir.path() / "blobs.csv");
    const std::string data = " --data " + (dir.path() / "blobs.csv").string();
    const std::string model = " --model " + (dir.path() / "m.json").string();

    auto r = run("train" + data + " --kernel linear --c 1" + model, dir);
    CHECK(r.code == 0);
    CHECK(r.out.find("margin width") != std::string::npos);
    CHECK(std::filesystem::exists(dir.path() / "m.json"));
    CHECK(run("train" + data + " --kernel rbf --sigma2 0.5 --c 10 --variant l2", dir).code == 0);
    CHECK(run("train" + data + " --kernel poly --degree 3 --offset 1 --c 5 --scale", dir).code == 0);

    CHECK(run("train" + data + " --kernel rbf --sigma2 -1", dir).code == 2);
    CHECK(run("train" + data + " --kernel cubic", dir).code == 2);
    CHECK(run("train" + data + " --c 0", dir).code == 2);

    r = run("train" + data + " --kernel rbf --sigma2 0.5 --c 10 --max-passes 1", dir);
    CHECK(r.code == 3);
    CHECK(run("train" + data + " --kernel rbf --sigma2 0.5 --c 10 --max-passes 1 --allow-partial", dir).code == 0);
}

TEST_CASE("cv exit codes") {
    testing::TempDir dir;
    save_csv(gaussian_blobs(20, 15, 2, 2.0, 3), dir.path() / "blobs.csv");
    const std::string data = " --data " + (dir.path() / "blobs.csv").string();
    const auto r = run("cv" + data + " --kernel rbf --sigma2 1 --c 1 --k 5 --seed 2", dir);
    CHECK(r.code == 0);
    CHECK(r.out.find("pooled") != std::string::npos);
    CHECK(run("cv" + data + " --kernel rbf --sigma2 1 --c 100 --max-passes 1", dir).code == 3);
    CHECK(run("cv" + data + " --k 1", dir).code == 2);

    const auto pair = dir.write("pair.csv", "6,1\n2,-1\n");
    CHECK(run("cv --data " + pair.string() + " --k 2", dir).code == 3);
    const auto all_failed = run("cv --data " + pair.string() + " --k 2 --allow-partial", dir);
    CHECK(all_failed.code == 3);
    CHECK(all_failed.out.find("fold 0  failed") != std::string::npos);
    CHECK(all_failed.out.find("fold 1  failed") != std::string::npos);
}

TEST_CASE("tune is reproducible and reports both evaluation counts") {
    testing::TempDir dir;
    save_csv(gaussian_blobs(20, 12, 2, 1.5, 8), dir.path() / "blobs.csv");
    const std::string base = "tune --data " + (dir.path() / "blobs.csv").string() + " --seed 5 --deterministic";
    const auto a = run(base + " --report " + (dir.path() / "a.csv").string(), dir);
    const auto b = run(base + " --report " + (dir.path() / "b.csv").string(), dir);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(slurp(dir.path() / "a.csv") == slurp(dir.path() / "b.csv"));
    CHECK(a.out.find("255 evaluations") != std::string::npos);
    CHECK(a.out.find("line search:") != std::string::npos);

    const auto g = run("tune --method grid --data " + (dir.path() / "blobs.csv").string() + " --deterministic", dir);
    CHECK(g.code == 0);
    CHECK(g.out.find("grid search: 255 evaluations") != std::string::npos);
}

TEST_CASE("boundary export") {
    testing::TempDir dir;
    const auto ds = separable_set(25, 25, 2, 0.1, 3);
    save_csv(ds, dir.path() / "sep.csv");
    const std::string data = " --data " + (dir.path() / "sep.csv").string();
    const std::string model = " --model " + (dir.path() / "lin.json").string();
    REQUIRE(run("train" + data + " --kernel linear --c 10" + model, dir).code == 0);
    const auto out = dir.path() / "grid.csv";
    const int steps = 41;
    REQUIRE(run("boundary" + data + model + " --steps " + std::to_string(steps) + " --out " + out.string(), dir).code == 0);

    std::ifstream in{ out };
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y,decision_value,prediction");
    std::vector<std::array<double, 3>> pts;
    while (std::getline(in, line)) {
        std::array<double, 3> v{};
        char comma;
        int pred;
        std::istringstream row{ line };
        row >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> pred;
        CHECK(pred == (v[2] >= 0.0 ? 1 : -1));
        pts.push_back(v);
    }
    REQUIRE(pts.size() == steps * steps);

    // zero crossings along x between neighbouring lattice points, by linear interpolation
    std::vector<std::array<double, 2>> zeros;
    for (int r = 0; r < steps; ++r) {
        for (int c = 0; c + 1 < steps; ++c) {
            const auto &p = pts[r * steps + c];
            const auto &q = pts[r * steps + c + 1];
            if ((p[2] < 0.0) != (q[2] < 0.0)) {
                const double t = p[2] / (p[2] - q[2]);
                zeros.push_back({ p[0] + t * (q[0] - p[0]), p[1] });
            }
        }
    }
    REQUIRE(zeros.size() >= 3);
    Eigen::MatrixXd a(zeros.size(), 3);
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        a.row(i) << zeros[i][0], zeros[i][1], 1.0;
    }
    // smallest right singular vector is the best-fitting line through the crossings
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
    const Eigen::Vector3d n = svd.matrixV().col(2);
    const double scale = n.head<2>().norm();
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        CHECK(std::abs(a.row(i).dot(n)) / scale <= 1e-6);
    }

    REQUIRE(run("train --data " + (dir.path() / "sep.csv").string() + " --kernel linear" + model, dir).code == 0);
    const auto one_d = dir.write("one.csv", "1,1\n2,1\n5,-1\n6,-1\n");
    const auto r = run("boundary --data " + one_d.string() + model + " --out " + out.string(), dir);
    CHECK(r.code == 2);
    CHECK(r.out.find("NotTwoDimensional") != std::string::npos);
}

}
