#pragma once

#include <random>

#include "ccmdvsp/core.hpp"
#include "ccmdvsp/scenario.hpp"

namespace testsupport {

// Random valid schedule: trips in start order, each either opens a new bus
// or follows a compatible unused bus end.
inline ccmdvsp::Schedule random_schedule(const ccmdvsp::Instance& inst, std::mt19937_64& rng, double chain_bias = 0.7) {
    using namespace ccmdvsp;
    const int I = inst.num_trips();
    std::vector<int> order(I);
    for (int i = 0; i < I; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return inst.trip(a).s < inst.trip(b).s || (inst.trip(a).s == inst.trip(b).s && a < b); });
    Schedule sched;
    std::uniform_real_distribution<double> U(0, 1);
    for (int i : order) {
        std::vector<int> cand;
        for (std::size_t b = 0; b < sched.buses.size(); ++b)
            if (inst.compatible(sched.buses[b].trips.back(), i)) cand.push_back(static_cast<int>(b));
        if (!cand.empty() && U(rng) < chain_bias) {
            int b = cand[std::uniform_int_distribution<int>(0, static_cast<int>(cand.size()) - 1)(rng)];
            if (U(rng) < 0.6) {
                // tightest connection
                auto slack = [&](int c) {
                    const int j = sched.buses[c].trips.back();
                    return inst.trip(i).s - inst.trip(j).s - inst.trip(j).mean_d - inst.pair_time(inst.pair_index(j, i));
                };
                for (int c : cand)
                    if (slack(c) < slack(b)) b = c;
            }
            sched.buses[b].trips.push_back(i);
        } else {
            Bus bus;
            bus.depot = std::uniform_int_distribution<int>(0, inst.num_depots() - 1)(rng);
            bus.trips.push_back(i);
            sched.buses.push_back(bus);
        }
    }
    return sched;
}

inline ccmdvsp::Instance small_instance(int I, int K, std::uint64_t seed, int route_size = 3) {
    ccmdvsp::GenParams gp;
    gp.n_trips = I;
    gp.n_depots = K;
    gp.trips_per_route = route_size;
    gp.seed = seed;
    gp.depot_capacity = I;
    return ccmdvsp::generate_instance(gp);
}

// Instance whose trips come in tightly chained groups (a few minutes of
// slack), so sampled scenarios regularly delay trips.
inline ccmdvsp::Instance tight_instance(int I, int K, std::uint64_t seed, int route_size = 3, int max_e = 2) {
    using namespace ccmdvsp;
    std::mt19937_64 rng(seed);
    auto uni = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
    InstanceData d;
    int next_start = 60 + uni(0, 20);
    int chain_left = 0;
    Point last{0, 0};
    int prev_end = 0;
    for (int i = 0; i < I; ++i) {
        Trip t;
        t.id = i + 1;
        t.route = i / route_size;
        t.start_loc = {uni(0, 10), uni(0, 10)};
        t.end_loc = {uni(0, 10), uni(0, 10)};
        t.mean_d = uni(15, 40);
        t.e = std::min(uni(0, max_e), t.mean_d);
        if (chain_left == 0) {
            chain_left = uni(2, 4);
            t.s = next_start + uni(0, 30);
        } else {
            t.s = prev_end + manhattan(last, t.start_loc) + uni(0, 2);
        }
        --chain_left;
        prev_end = t.s + t.mean_d;
        last = t.end_loc;
        next_start = std::max(next_start, t.s / 2);
        d.trips.push_back(t);
    }
    for (int k = 0; k < K; ++k) d.depots.push_back({k + 1, {uni(0, 10), uni(0, 10)}, I});
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < I; ++j) {
            if (i == j) continue;
            const int dist = manhattan(d.trips[i].end_loc, d.trips[j].start_loc);
            if (d.trips[i].s + d.trips[i].mean_d + dist > d.trips[j].s) continue;
            d.compat.push_back({i, j});
            d.pair_cost.push_back(10 * dist + 2 * (d.trips[j].s - d.trips[i].s - d.trips[i].mean_d - dist));
            d.pair_time.push_back(dist);
        }
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < I; ++i) {
            const int out = manhattan(d.depots[k].loc, d.trips[i].start_loc);
            const int in = manhattan(d.trips[i].end_loc, d.depots[k].loc);
            d.pull_out_cost.push_back(10 * out + 1000);
            d.pull_in_cost.push_back(10 * in);
            d.pull_out_time.push_back(out);
            d.pull_in_time.push_back(in);
        }
    d.meta = {{"generator", "tight"}, {"seed", seed}};
    return Instance(std::move(d));
}

}  // namespace testsupport
