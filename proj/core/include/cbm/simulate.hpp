#pragma once

#include "cbm/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace cbm {

/// One observed path without maintenance: x1[0..n], z[1..n] (stored at z[0..n-1]).
struct Trajectory {
    std::vector<int> x1;
    std::vector<int> z;
    std::optional<std::vector<int>> x2; ///< hidden path, only when revealed

    int length() const { return static_cast<int>(z.size()); }
    int signal(int k) const { return z[k - 1]; } ///< signal at epoch k in 1..n

    bool operator==(const Trajectory&) const = default;
};

struct TrajectorySet {
    std::vector<Trajectory> trajectories;
    int T = 0;
    int n = 0;
    std::uint64_t seed = 0;

    bool has_hidden() const { return !trajectories.empty() && trajectories.front().x2.has_value(); }
    /// Equality ignores the seed.
    bool same_paths(const TrajectorySet& other) const {
        return T == other.T && n == other.n && trajectories == other.trajectories;
    }
};

/// T independent trajectories of length n.
///
/// At epoch k >= 1: X1_k ~ Q(X1_{k-1}, .), X2_k ~ P[X1_{k-1}](X2_{k-1}, .),
/// Z_k ~ B(X2_k, .). Both components start in state 0. Trajectory t uses the
/// random stream (seed, t), so the output is reproducible and independent of
/// how the work is split across threads.
TrajectorySet simulate_trajectories(const SystemModel& model, int T, int n, std::uint64_t seed,
                                    bool reveal_hidden);

/// CSV with header comment "# seed=<s> T=<T> n=<n>", header "traj,step,x1,z[,x2]"
/// and one row per (t, k), k = 0..n; the k = 0 row has an empty z.
void write_trajectories(const TrajectorySet& set, const std::filesystem::path& path);
std::string format_trajectories(const TrajectorySet& set);

/// Parses the CSV above. When bounds are given, states and signals outside
/// them are rejected ("signal out of range", ...).
struct TrajectoryBounds {
    int L1 = -1;
    int L2 = -1;
    int M = -1;
};
TrajectorySet read_trajectories(const std::filesystem::path& path, const TrajectoryBounds& bounds = {});
TrajectorySet parse_trajectories(const std::string& text, const TrajectoryBounds& bounds = {});

} // namespace cbm
