#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ccmdvsp {

using json = nlohmann::json;

// Thrown for any malformed input (parse errors, violated invariants).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Point {
    int x = 0;
    int y = 0;
    bool operator==(const Point&) const = default;
};

int manhattan(Point a, Point b);
int euclid_rounded(Point a, Point b);

// Trips and depots are addressed by 0-based index internally; `id` is the
// 1-based identifier used in files and reports.
struct Trip {
    int id = 0;
    int route = 0;  // 0-based route index
    Point start_loc;
    Point end_loc;
    int s = 0;
    int mean_d = 1;
    int e = 0;
};

struct Depot {
    int id = 0;
    Point loc;
    int capacity = 1;
};

struct Pair {
    int i = 0;
    int j = 0;
    auto operator<=>(const Pair&) const = default;
};

// Plain data used to build an Instance. Pair data is keyed by compat index.
struct InstanceData {
    std::vector<Trip> trips;
    std::vector<Depot> depots;
    std::vector<Pair> compat;
    std::vector<int> pair_cost;
    std::vector<int> pair_time;
    std::vector<int> pull_out_cost;  // [k * I + i]
    std::vector<int> pull_in_cost;   // [k * I + i]
    std::vector<int> pull_out_time;
    std::vector<int> pull_in_time;
    json meta = json::object();
};

class Instance {
public:
    Instance() = default;
    explicit Instance(InstanceData data);

    int num_trips() const { return static_cast<int>(d_.trips.size()); }
    int num_depots() const { return static_cast<int>(d_.depots.size()); }
    int num_routes() const { return static_cast<int>(routes_.size()); }
    int num_pairs() const { return static_cast<int>(d_.compat.size()); }
    // |A| = |C| + 2KI
    int num_arcs() const { return num_pairs() + 2 * num_depots() * num_trips(); }

    const Trip& trip(int i) const { return d_.trips[i]; }
    const std::vector<Trip>& trips() const { return d_.trips; }
    const Depot& depot(int k) const { return d_.depots[k]; }
    const std::vector<Depot>& depots() const { return d_.depots; }
    const std::vector<std::vector<int>>& routes() const { return routes_; }
    const std::vector<int>& route(int r) const { return routes_[r]; }

    const std::vector<Pair>& compat() const { return d_.compat; }
    const Pair& pair(int p) const { return d_.compat[p]; }
    // -1 when (i,j) is not in C.
    int pair_index(int i, int j) const { return pair_lookup_[static_cast<std::size_t>(i) * num_trips() + j]; }
    bool compatible(int i, int j) const { return pair_index(i, j) >= 0; }
    const std::vector<int>& successors(int i) const { return succ_[i]; }      // pair indices
    const std::vector<int>& predecessors(int j) const { return pred_[j]; }    // pair indices

    int pair_cost(int p) const { return d_.pair_cost[p]; }
    int pair_time(int p) const { return d_.pair_time[p]; }
    int pull_out_cost(int k, int i) const { return d_.pull_out_cost[k * num_trips() + i]; }
    int pull_in_cost(int k, int i) const { return d_.pull_in_cost[k * num_trips() + i]; }
    int pull_out_time(int k, int i) const { return d_.pull_out_time[k * num_trips() + i]; }
    int pull_in_time(int k, int i) const { return d_.pull_in_time[k * num_trips() + i]; }

    const json& meta() const { return d_.meta; }
    const InstanceData& data() const { return d_; }

    // Restriction to a subset of trips (sorted, 0-based). Route ids are
    // renumbered densely; `original_trip` maps back.
    Instance restrict_to(const std::vector<int>& trips, std::vector<int>* original_trip = nullptr) const;

private:
    InstanceData d_;
    std::vector<std::vector<int>> routes_;
    std::vector<int> pair_lookup_;
    std::vector<std::vector<int>> succ_;
    std::vector<std::vector<int>> pred_;
};

struct ServiceParams {
    int lb = 1;
    int ub = 5;
    double delta_trip = 0.9;
    double delta_route = 0.8;
    double epsilon = 0.05;
    int eps_tol = 1;

    void validate() const;
};

// floor(n * ratio) with a guard against binary round-off.
int floor_count(int n, double ratio);

// Requirement thresholds derived for a given instance.
struct Requirements {
    int num_trips = 0;
    int f_trip = 0;
    std::vector<int> route_size;
    std::vector<int> f_route;

    int max_trip_delays() const { return num_trips - f_trip; }
    int max_route_delays(int r) const { return route_size[r] - f_route[r]; }
};

Requirements derive_requirements(const Instance& inst, const ServiceParams& params);
// floor(S * eps)
int max_violated_scenarios(int S, double epsilon);

struct Bus {
    int depot = 0;
    std::vector<int> trips;
};

struct Schedule {
    std::vector<Bus> buses;
    bool capacity_relaxed = false;
};

struct Arc {
    enum class Kind { Pair, PullOut, PullIn };
    Kind kind = Kind::Pair;
    int from = 0;  // trip, or depot for PullOut
    int to = 0;    // trip, or depot for PullIn
    int depot = 0;
    auto operator<=>(const Arc&) const = default;
};

// Throws InputError naming the first broken invariant.
void validate_schedule(const Instance& inst, const Schedule& sched);
long long schedule_cost(const Instance& inst, const Schedule& sched);
std::vector<Arc> schedule_arcs(const Instance& inst, const Schedule& sched);
Schedule schedule_from_arcs(const Instance& inst, const std::vector<Arc>& arcs);
// Sequenced trip pairs (compat indices) of all buses.
std::vector<int> sequenced_pairs(const Instance& inst, const Schedule& sched);
std::vector<int> buses_per_depot(const Instance& inst, const Schedule& sched);

// Canonical form: buses sorted by first trip. Used for comparisons.
Schedule canonical(Schedule sched);

Instance instance_from_json(const json& j);
json instance_to_json(const Instance& inst);
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

Schedule schedule_from_json(const Instance& inst, const json& j);
json schedule_to_json(const Schedule& sched, const Instance& inst);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ccmdvsp
