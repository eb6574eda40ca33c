#include "support.hpp"

#include "cbm/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace cbm;
using namespace cbm::test;

TEST_SUITE("simulate") {

TEST_CASE("absorbing start stays put and emits from row 0") {
    auto m = example_model();
    m.Q = Matrix::Identity(3, 3);
    m.P[0] = Matrix::Identity(2, 2);
    const auto set = simulate_trajectories(m, 200, 50, 3, true);
    long ones = 0, total = 0;
    for (const auto& t : set.trajectories) {
        for (int x : t.x1) CHECK(x == 0);
        for (int x : *t.x2) CHECK(x == 0);
        for (int z : t.z) {
            ones += z;
            ++total;
        }
    }
    CHECK(static_cast<double>(ones) / total == doctest::Approx(0.2).epsilon(0.1));
}

TEST_CASE("U1 leaves state 0 at rate Q(0,1)") {
    const auto set = simulate_trajectories(example_model(), 200, 50, 4, false);
    long at0 = 0, moves = 0;
    for (const auto& t : set.trajectories)
        for (int k = 1; k <= set.n; ++k)
            if (t.x1[k - 1] == 0) {
                ++at0;
                moves += t.x1[k] == 1;
            }
    REQUIRE(at0 >= 500);
    CHECK(std::abs(static_cast<double>(moves) / at0 - 0.2) < 0.02);
}

TEST_CASE("identity emission reveals the hidden state") {
    auto m = example_model();
    m.B = Matrix::Identity(2, 2);
    const auto set = simulate_trajectories(m, 20, 30, 5, true);
    for (const auto& t : set.trajectories)
        for (int k = 1; k <= set.n; ++k) CHECK(t.signal(k) == (*t.x2)[k]);
}

TEST_CASE("same seed, same paths; different seed, different paths") {
    const auto a = simulate_trajectories(example_model(), 30, 40, 99, true);
    const auto b = simulate_trajectories(example_model(), 30, 40, 99, true);
    const auto c = simulate_trajectories(example_model(), 30, 40, 100, true);
    CHECK(a.same_paths(b));
    CHECK_FALSE(a.same_paths(c));
    CHECK(a.trajectories.size() == 30);
    for (const auto& t : a.trajectories) {
        CHECK(t.x1.size() == 41);
        CHECK(t.z.size() == 40);
        CHECK(t.x1[0] == 0);
        CHECK((*t.x2)[0] == 0);
    }
}

TEST_CASE("conditional transition and emission frequencies") {
    // Ergodic kernels so every (j, i) cell is visited often.
    SystemModel m;
    m.L1 = 1;
    m.L2 = 1;
    m.M = 2;
    m.Q = mat({{0.5, 0.5}, {0.4, 0.6}});
    m.P = {mat({{0.7, 0.3}, {0.45, 0.55}}), mat({{0.35, 0.65}, {0.6, 0.4}})};
    m.B = mat({{0.6, 0.3, 0.1}, {0.15, 0.25, 0.6}});
    const auto set = simulate_trajectories(m, 2500, 200, 6, true);
    double cnt[2][2][2] = {}, emit[2][3] = {};
    for (const auto& t : set.trajectories)
        for (int k = 1; k <= set.n; ++k) {
            cnt[t.x1[k - 1]][(*t.x2)[k - 1]][(*t.x2)[k]] += 1;
            emit[(*t.x2)[k]][t.signal(k)] += 1;
        }
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
            const double row = cnt[j][i][0] + cnt[j][i][1];
            CHECK(row >= 1e5);
            for (int i2 = 0; i2 < 2; ++i2) CHECK(std::abs(cnt[j][i][i2] / row - m.P[j](i, i2)) < 0.01);
        }
    for (int i = 0; i < 2; ++i) {
        const double row = emit[i][0] + emit[i][1] + emit[i][2];
        for (int z = 0; z < 3; ++z) CHECK(std::abs(emit[i][z] / row - m.B(i, z)) < 0.01);
    }
}

TEST_CASE("invalid arguments") {
    CHECK_THROWS_AS(simulate_trajectories(example_model(), 0, 5, 1, false), ValidationError);
    CHECK_THROWS_AS(simulate_trajectories(example_model(), 5, 0, 1, false), ValidationError);
    auto bad = example_model();
    bad.Q(0, 0) = 0.3;
    CHECK_THROWS_AS(simulate_trajectories(bad, 5, 5, 1, false), ValidationError);
}

TEST_CASE("csv round trip") {
    const auto set = simulate_trajectories(example_model(), 2, 6, 8, true);
    const std::string text = format_trajectories(set);
    CHECK(text.rfind("# seed=8 T=2 n=6\ntraj,step,x1,z,x2\n", 0) == 0);
    const auto back = parse_trajectories(text);
    CHECK(back.same_paths(set));
    CHECK(back.seed == 8);

    const auto plain = simulate_trajectories(example_model(), 3, 4, 9, false);
    CHECK(parse_trajectories(format_trajectories(plain)).same_paths(plain));

    const auto path = std::filesystem::temp_directory_path() / "cbm_test_traj.csv";
    write_trajectories(set, path);
    CHECK(read_trajectories(path).same_paths(set));
    std::filesystem::remove(path);
}

TEST_CASE("csv errors") {
    const std::string head = "# seed=1 T=1 n=2\ntraj,step,x1,z\n";
    const TrajectoryBounds b{2, 1, 1};
    auto message = [&](const std::string& text) {
        try {
            parse_trajectories(text, b);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message(head + "0,0,0,\n0,1,0,2\n0,2,1,0\n").find("signal out of range") != std::string::npos);
    CHECK(message(head + "0,0,0,\n0,2,0,1\n").find("non-contiguous epochs") != std::string::npos);
    CHECK(message(head + "0,0,0,\n0,1,3,1\n0,2,1,0\n").find("out of range") != std::string::npos);
    CHECK(message(head + "0,0,1,\n0,1,1,1\n0,2,1,0\n").find("start in state 0") != std::string::npos);
    CHECK(message(head + "0,0,0,\n0,1,x,1\n0,2,1,0\n").find("malformed") != std::string::npos);
    CHECK(message("traj,step,x1,z\n0,0,0,\n0,1,0,1\n1,0,0,\n").find("different lengths") != std::string::npos);
    CHECK_THROWS_AS(read_trajectories("/nonexistent/traj.csv"), IoError);
}

}
