#include "ccmdvsp/fixtures.hpp"

namespace ccmdvsp::fixtures {

namespace {

Bus bus(int depot, std::initializer_list<int> ids) {
    Bus b;
    b.depot = depot;
    for (int id : ids) b.trips.push_back(id - 1);
    return b;
}

}  // namespace

Instance grid_example() {
    struct Row {
        Point a, b;
        int s2, d2;
    };
    const Row rows[8] = {
        {{2, 1}, {2, 6}, 10, 10}, {{2, 6}, {2, 1}, 46, 10}, {{4, 6}, {8, 6}, 24, 8}, {{8, 6}, {4, 6}, 32, 8},
        {{3, 2}, {3, 5}, 31, 6},  {{3, 5}, {3, 2}, 24, 6},  {{4, 4}, {9, 4}, 46, 10}, {{9, 4}, {4, 4}, 4, 10},
    };
    InstanceData d;
    for (int i = 0; i < 8; ++i) {
        Trip t;
        t.id = i + 1;
        t.route = i / 2;
        t.start_loc = rows[i].a;
        t.end_loc = rows[i].b;
        t.s = rows[i].s2;
        t.mean_d = rows[i].d2;
        t.e = 0;
        d.trips.push_back(t);
    }
    d.depots = {{1, {1, 2}, 4}, {2, {8, 3}, 4}};
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            if (i == j) continue;
            const int dist = manhattan(d.trips[i].end_loc, d.trips[j].start_loc);
            if (d.trips[i].s + d.trips[i].mean_d + 2 * dist > d.trips[j].s) continue;
            d.compat.push_back({i, j});
            d.pair_cost.push_back(dist);
            d.pair_time.push_back(2 * dist);
        }
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 8; ++i) {
            const int out = manhattan(d.depots[k].loc, d.trips[i].start_loc);
            const int in = manhattan(d.trips[i].end_loc, d.depots[k].loc);
            d.pull_out_cost.push_back(out + 2);
            d.pull_in_cost.push_back(in);
            d.pull_out_time.push_back(2 * out);
            d.pull_in_time.push_back(2 * in);
        }
    d.meta = {{"name", "grid_example"}, {"time_unit", "half"}};
    return Instance(std::move(d));
}

Schedule grid_left() { return Schedule{{bus(0, {1, 3, 4, 2}), bus(1, {8, 6, 5, 7})}, false}; }

Schedule grid_right() { return Schedule{{bus(0, {1, 6, 5, 2}), bus(1, {8, 3, 4, 7})}, false}; }

ScenarioSet grid_scenarios(const Instance& inst) {
    TimeTable base = mean_times(inst);
    ScenarioSet sc(2, inst.num_trips(), inst.num_pairs(), inst.num_depots(), 0);
    for (int s = 0; s < 2; ++s) {
        for (int i = 0; i < inst.num_trips(); ++i) sc.dur(s, i) = base.dur[i];
        for (int p = 0; p < inst.num_pairs(); ++p) sc.pair_time(s, p) = base.pair_time[p];
        for (int k = 0; k < inst.num_depots(); ++k)
            for (int i = 0; i < inst.num_trips(); ++i) {
                sc.pull_out_time(s, k, i) = base.pull_out_time[k * inst.num_trips() + i];
                sc.pull_in_time(s, k, i) = base.pull_in_time[k * inst.num_trips() + i];
            }
    }
    // Scenario 1 slows the edge crossed by trips 1 and 2.
    sc.dur(0, 0) += 1;
    sc.dur(0, 1) += 1;
    // Scenario 2 slows the edges crossed by trips 3, 4, 7 and 8, plus the
    // deadhead 4 -> 2.
    for (int i : {2, 3, 6, 7}) sc.dur(1, i) += 1;
    sc.pair_time(1, inst.pair_index(3, 1)) += 1;
    return sc;
}

ServiceParams grid_params() {
    ServiceParams p;
    p.lb = 0;
    p.ub = 0;
    p.delta_trip = 0.875;
    p.delta_route = 0.5;
    p.epsilon = 0.5;
    p.eps_tol = 1;
    return p;
}

namespace {
const int kChainStart[8] = {7, 24, 39, 55, 73, 92, 30, 100};
const int kChainLeg[5] = {18, 15, 21, 14, 23};
}  // namespace

Instance worked_chain() {
    InstanceData d;
    for (int i = 0; i < 8; ++i) {
        Trip t;
        t.id = i + 1;
        t.route = (i < 4 || i == 6) ? 0 : 1;
        t.s = kChainStart[i];
        t.mean_d = 5;
        t.e = 0;
        d.trips.push_back(t);
    }
    d.depots = {{1, {0, 0}, 8}, {2, {0, 0}, 8}};
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            if (i == j || d.trips[i].s + 5 + 1 > d.trips[j].s) continue;
            d.compat.push_back({i, j});
            d.pair_cost.push_back(1);
            d.pair_time.push_back(1);
        }
    d.pull_out_cost.assign(16, 10);
    d.pull_in_cost.assign(16, 1);
    d.pull_out_time.assign(16, 1);
    d.pull_in_time.assign(16, 1);
    d.meta = {{"name", "worked_chain"}};
    return Instance(std::move(d));
}

ScenarioSet chain_scenario(const Instance& inst) {
    ScenarioSet sc(1, inst.num_trips(), inst.num_pairs(), inst.num_depots(), 0);
    for (int i = 0; i < inst.num_trips(); ++i) sc.dur(0, i) = 5;
    for (int i = 0; i < 5; ++i) sc.dur(0, i) = kChainLeg[i] - 2;
    sc.dur(0, 6) = 28;
    for (int p = 0; p < inst.num_pairs(); ++p) sc.pair_time(0, p) = 2;
    for (int k = 0; k < inst.num_depots(); ++k)
        for (int i = 0; i < inst.num_trips(); ++i) {
            sc.pull_out_time(0, k, i) = 1;
            sc.pull_in_time(0, k, i) = 1;
        }
    return sc;
}

Schedule chain_schedule() { return Schedule{{bus(0, {1, 2, 3, 4, 5, 6}), bus(0, {7}), bus(1, {8})}, false}; }

ServiceParams chain_params() {
    ServiceParams p;
    p.lb = 1;
    p.ub = 3;
    p.delta_trip = 0.875;
    p.delta_route = 0.5;
    p.epsilon = 0.05;
    p.eps_tol = 1;
    return p;
}

}  // namespace ccmdvsp::fixtures
