#include "cbm/simulate.hpp"
#include "cbm/model_io.hpp"
#include "cbm/parallel.hpp"
#include "cbm/rng.hpp"

#include <charconv>
#include <sstream>

namespace cbm {

TrajectorySet simulate_trajectories(const SystemModel& model, int T, int n, std::uint64_t seed,
                                    bool reveal_hidden) {
    require_valid(model);
    if (T < 1 || n < 1) throw ValidationError("simulation needs T >= 1 and n >= 1");

    TrajectorySet set;
    set.T = T;
    set.n = n;
    set.seed = seed;
    set.trajectories.resize(T);

    parallel_for(static_cast<std::size_t>(T), [&](std::size_t t) {
        RandomStream rng(seed, t);
        Trajectory tr;
        tr.x1.assign(n + 1, 0);
        tr.z.assign(n, 0);
        std::vector<int> x2(n + 1, 0);
        for (int k = 1; k <= n; ++k) {
            const int j = tr.x1[k - 1];
            tr.x1[k] = sample_categorical(model.Q.row(j), rng);
            x2[k] = sample_categorical(model.P[j].row(x2[k - 1]), rng);
            tr.z[k - 1] = sample_categorical(model.B.row(x2[k]), rng);
        }
        if (reveal_hidden) tr.x2 = std::move(x2);
        set.trajectories[t] = std::move(tr);
    });
    return set;
}

std::string format_trajectories(const TrajectorySet& set) {
    std::ostringstream os;
    const bool hidden = set.has_hidden();
    os << "# seed=" << set.seed << " T=" << set.T << " n=" << set.n << "\n";
    os << "traj,step,x1,z" << (hidden ? ",x2" : "") << "\n";
    for (std::size_t t = 0; t < set.trajectories.size(); ++t) {
        const auto& tr = set.trajectories[t];
        for (int k = 0; k <= tr.length(); ++k) {
            os << t << ',' << k << ',' << tr.x1[k] << ',';
            if (k > 0) os << tr.z[k - 1];
            if (hidden) os << ',' << (*tr.x2)[k];
            os << '\n';
        }
    }
    return os.str();
}

void write_trajectories(const TrajectorySet& set, const std::filesystem::path& path) {
    write_text_file(path, format_trajectories(set));
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

long parse_long(const std::string& s, int line_no, const char* field) {
    long v = 0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end)
        throw ValidationError("line " + std::to_string(line_no) + ": malformed " + field + " '" + s + "'");
    return v;
}

void check_range(long v, int hi, int line_no, const char* what) {
    if (v < 0 || (hi >= 0 && v > hi))
        throw ValidationError("line " + std::to_string(line_no) + ": " + what + " out of range");
}

} // namespace

TrajectorySet parse_trajectories(const std::string& text, const TrajectoryBounds& bounds) {
    TrajectorySet set;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    bool hidden = false;
    long declared_T = -1, declared_n = -1;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string kv;
            while (meta >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                const auto key = kv.substr(0, eq);
                const auto val = kv.substr(eq + 1);
                if (key == "seed") set.seed = static_cast<std::uint64_t>(std::stoull(val));
                else if (key == "T") declared_T = parse_long(val, line_no, "T");
                else if (key == "n") declared_n = parse_long(val, line_no, "n");
            }
            continue;
        }
        if (!header_seen) {
            if (line == "traj,step,x1,z") hidden = false;
            else if (line == "traj,step,x1,z,x2") hidden = true;
            else throw ValidationError("line " + std::to_string(line_no) + ": unexpected header '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != (hidden ? 5u : 4u))
            throw ValidationError("line " + std::to_string(line_no) + ": wrong number of fields");
        const long t = parse_long(cells[0], line_no, "traj");
        const long k = parse_long(cells[1], line_no, "step");
        const long x1 = parse_long(cells[2], line_no, "x1");
        check_range(x1, bounds.L1, line_no, "U1 state");

        if (t == static_cast<long>(set.trajectories.size())) {
            if (k != 0) throw ValidationError("line " + std::to_string(line_no) + ": non-contiguous epochs");
            set.trajectories.emplace_back();
            if (hidden) set.trajectories.back().x2.emplace();
        } else if (t != static_cast<long>(set.trajectories.size()) - 1) {
            throw ValidationError("line " + std::to_string(line_no) + ": trajectories out of order");
        }
        auto& tr = set.trajectories.back();
        if (k != static_cast<long>(tr.x1.size()))
            throw ValidationError("line " + std::to_string(line_no) + ": non-contiguous epochs");
        tr.x1.push_back(static_cast<int>(x1));
        if (k == 0) {
            if (!cells[3].empty())
                throw ValidationError("line " + std::to_string(line_no) + ": epoch 0 carries no signal");
        } else {
            const long z = parse_long(cells[3], line_no, "z");
            check_range(z, bounds.M, line_no, "signal");
            tr.z.push_back(static_cast<int>(z));
        }
        if (hidden) {
            const long x2 = parse_long(cells[4], line_no, "x2");
            check_range(x2, bounds.L2, line_no, "U2 state");
            tr.x2->push_back(static_cast<int>(x2));
        }
    }
    if (!header_seen) throw ValidationError("missing CSV header");
    if (set.trajectories.empty()) throw ValidationError("no trajectories");
    set.T = static_cast<int>(set.trajectories.size());
    set.n = set.trajectories.front().length();
    for (const auto& tr : set.trajectories)
        if (tr.length() != set.n) throw ValidationError("trajectories have different lengths");
    if (set.n < 1) throw ValidationError("trajectories need at least one epoch");
    for (const auto& tr : set.trajectories) {
        if (tr.x1[0] != 0 || (tr.x2 && (*tr.x2)[0] != 0))
            throw ValidationError("trajectories must start in state 0");
    }
    if (declared_T >= 0 && declared_T != set.T) throw ValidationError("header T does not match the data");
    if (declared_n >= 0 && declared_n != set.n) throw ValidationError("header n does not match the data");
    return set;
}

TrajectorySet read_trajectories(const std::filesystem::path& path, const TrajectoryBounds& bounds) {
    return parse_trajectories(read_text_file(path), bounds);
}

} // namespace cbm
