#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ccmdvsp/core.hpp"

namespace ccmdvsp {

struct GenParams {
    int n_trips = 20;
    int n_depots = 2;
    int trips_per_route = 10;
    int grid_width = 60;
    int grid_height = 60;
    double long_trip_fraction = 0.4;
    // Scheduled starts are uniform over the union of the two peak windows.
    int peak1_begin = 420;
    int peak1_end = 540;
    int peak2_begin = 960;
    int peak2_end = 1080;
    int short_extra_min = 5;
    int short_extra_max = 15;
    int long_duration_min = 60;
    int long_duration_max = 120;
    double lognormal_cv = 0.2;
    int deployment_cost = 1000;
    int travel_cost_per_min = 10;
    int idle_cost_per_min = 2;
    int depot_capacity = 0;  // 0 -> ceil(I/K)
    // "mean" builds C from mean times; "sampled_min" from per-entry minima of
    // compat_samples lognormal draws (conservative mode).
    std::string compat_estimate = "mean";
    int compat_samples = 50;
    std::uint64_t seed = 1;

    void validate() const;
    json to_json() const;
};

Instance generate_instance(const GenParams& p);

// Deterministic per-entry time table (durations, pair times for C, depot arcs).
struct TimeTable {
    std::vector<int> dur;            // [i]
    std::vector<int> pair_time;      // [p]
    std::vector<int> pull_out_time;  // [k * I + i]
    std::vector<int> pull_in_time;   // [k * I + i]
};

class ScenarioSet {
public:
    ScenarioSet() = default;
    ScenarioSet(int S, int I, int P, int K, std::uint64_t seed);

    int size() const { return S_; }
    int num_trips() const { return I_; }
    int num_pairs() const { return P_; }
    int num_depots() const { return K_; }
    std::uint64_t seed() const { return seed_; }

    int dur(int s, int i) const { return dur_[static_cast<std::size_t>(s) * I_ + i]; }
    int pair_time(int s, int p) const { return pair_[static_cast<std::size_t>(s) * P_ + p]; }
    int pull_out_time(int s, int k, int i) const { return out_[(static_cast<std::size_t>(s) * K_ + k) * I_ + i]; }
    int pull_in_time(int s, int k, int i) const { return in_[(static_cast<std::size_t>(s) * K_ + k) * I_ + i]; }

    int& dur(int s, int i) { return dur_[static_cast<std::size_t>(s) * I_ + i]; }
    int& pair_time(int s, int p) { return pair_[static_cast<std::size_t>(s) * P_ + p]; }
    int& pull_out_time(int s, int k, int i) { return out_[(static_cast<std::size_t>(s) * K_ + k) * I_ + i]; }
    int& pull_in_time(int s, int k, int i) { return in_[(static_cast<std::size_t>(s) * K_ + k) * I_ + i]; }

    // Subset of scenarios, in the given order.
    ScenarioSet select(const std::vector<int>& scenarios) const;
    // Restriction to trips of a sub-instance built by Instance::restrict_to.
    ScenarioSet restrict_to(const Instance& full, const Instance& sub, const std::vector<int>& original_trip) const;
    void check_matches(const Instance& inst) const;

    bool operator==(const ScenarioSet&) const = default;

private:
    int S_ = 0, I_ = 0, P_ = 0, K_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<int> dur_, pair_, out_, in_;
};

struct SampleOptions {
    double cv = 0.2;
};

// Substream seed for scenario s.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t s);

// Lognormal with mean m and sd cv*m: sigma^2 = ln(1 + cv^2), mu = ln m - sigma^2/2.
class LognormalSampler {
public:
    explicit LognormalSampler(std::uint64_t seed) : rng_(seed) {}
    double draw_real(double mean, double cv);
    // Rounded to the nearest integer and clamped at 0; mean 0 or cv 0 returns the rounded mean.
    int draw(double mean, double cv);

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

ScenarioSet sample_scenarios(const Instance& inst, int S, std::uint64_t seed, const SampleOptions& opt = {});
TimeTable mean_times(const Instance& inst);
TimeTable percentile_times(const Instance& inst, const ScenarioSet& scen, double q);
// A single-scenario set holding a fixed time table.
ScenarioSet scenario_from_table(const Instance& inst, const TimeTable& t);

json scenarios_to_json(const ScenarioSet& scen);
ScenarioSet scenarios_from_json(const json& j);
void save_scenarios(const ScenarioSet& scen, const std::string& path);  // .json or binary
ScenarioSet load_scenarios(const std::string& path);

}  // namespace ccmdvsp
