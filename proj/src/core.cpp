#include "ccmdvsp/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace ccmdvsp {

namespace {

[[noreturn]] void fail(const std::string& what) { throw InputError(what); }

std::string trip_name(const Instance& inst, int i) { return "trip " + std::to_string(inst.trip(i).id); }

}  // namespace

int manhattan(Point a, Point b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

int euclid_rounded(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return static_cast<int>(std::lround(std::sqrt(dx * dx + dy * dy)));
}

Instance::Instance(InstanceData data) : d_(std::move(data)) {
    const int I = num_trips();
    const int K = num_depots();
    for (int i = 0; i < I; ++i) {
        const Trip& t = d_.trips[i];
        if (t.id != i + 1) fail("trip ids must be 1..I in order; found id " + std::to_string(t.id) + " at position " + std::to_string(i + 1));
        if (t.s < 0) fail("trip " + std::to_string(t.id) + ": scheduled start must be non-negative");
        if (t.mean_d < 1) fail("trip " + std::to_string(t.id) + ": mean duration must be positive");
        if (t.e < 0 || t.e > t.mean_d) fail("trip " + std::to_string(t.id) + ": max express must lie in [0, mean duration]");
        if (t.route < 0) fail("trip " + std::to_string(t.id) + ": invalid route");
    }
    for (int k = 0; k < K; ++k) {
        const Depot& dp = d_.depots[k];
        if (dp.id != k + 1) fail("depot ids must be 1..K in order; found id " + std::to_string(dp.id));
        if (dp.capacity < 1) fail("depot " + std::to_string(dp.id) + ": capacity must be >= 1");
    }
    int R = 0;
    for (const Trip& t : d_.trips) R = std::max(R, t.route + 1);
    routes_.assign(R, {});
    for (int i = 0; i < I; ++i) routes_[d_.trips[i].route].push_back(i);
    for (int r = 0; r < R; ++r)
        if (routes_[r].empty()) fail("route " + std::to_string(r + 1) + " has no trips (routes must be numbered densely)");

    const std::size_t P = d_.compat.size();
    if (d_.pair_cost.size() != P || d_.pair_time.size() != P) fail("pair cost/time arrays must match compat size");
    const std::size_t KI = static_cast<std::size_t>(K) * I;
    if (d_.pull_out_cost.size() != KI || d_.pull_in_cost.size() != KI || d_.pull_out_time.size() != KI ||
        d_.pull_in_time.size() != KI)
        fail("depot arc arrays must have K*I entries");

    if (!std::is_sorted(d_.compat.begin(), d_.compat.end())) {
        std::vector<std::size_t> order(P);
        for (std::size_t p = 0; p < P; ++p) order[p] = p;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d_.compat[a] < d_.compat[b]; });
        std::vector<Pair> compat(P);
        std::vector<int> cost(P), time(P);
        for (std::size_t p = 0; p < P; ++p) {
            compat[p] = d_.compat[order[p]];
            cost[p] = d_.pair_cost[order[p]];
            time[p] = d_.pair_time[order[p]];
        }
        d_.compat = std::move(compat);
        d_.pair_cost = std::move(cost);
        d_.pair_time = std::move(time);
    }
    pair_lookup_.assign(static_cast<std::size_t>(I) * I, -1);
    succ_.assign(I, {});
    pred_.assign(I, {});
    const bool mean_estimates = !d_.meta.contains("compat_estimate") || d_.meta["compat_estimate"] == "mean";
    for (std::size_t p = 0; p < P; ++p) {
        const Pair pr = d_.compat[p];
        if (pr.i < 0 || pr.i >= I || pr.j < 0 || pr.j >= I) fail("compat pair references unknown trip");
        if (pr.i == pr.j) fail("compat pair (" + std::to_string(pr.i + 1) + "," + std::to_string(pr.j + 1) + ") is a self loop");
        auto& slot = pair_lookup_[static_cast<std::size_t>(pr.i) * I + pr.j];
        if (slot >= 0) fail("duplicate compat pair (" + std::to_string(pr.i + 1) + "," + std::to_string(pr.j + 1) + ")");
        slot = static_cast<int>(p);
        if (d_.pair_cost[p] < 0) fail("negative cost on pair (" + std::to_string(pr.i + 1) + "," + std::to_string(pr.j + 1) + ")");
        if (d_.pair_time[p] < 0) fail("negative travel time on pair (" + std::to_string(pr.i + 1) + "," + std::to_string(pr.j + 1) + ")");
        const Trip& a = d_.trips[pr.i];
        const Trip& b = d_.trips[pr.j];
        const bool ok = mean_estimates ? a.s + a.mean_d + d_.pair_time[p] <= b.s : a.s < b.s;
        if (!ok) fail("compat pair (" + std::to_string(pr.i + 1) + "," + std::to_string(pr.j + 1) + ") is not time-feasible");
        succ_[pr.i].push_back(static_cast<int>(p));
        pred_[pr.j].push_back(static_cast<int>(p));
    }
    for (std::size_t q = 0; q < KI; ++q) {
        if (d_.pull_out_cost[q] < 0 || d_.pull_in_cost[q] < 0) fail("negative depot arc cost");
        if (d_.pull_out_time[q] < 0 || d_.pull_in_time[q] < 0) fail("negative depot arc time");
    }
}

Instance Instance::restrict_to(const std::vector<int>& trips, std::vector<int>* original_trip) const {
    const int I = num_trips();
    const int K = num_depots();
    std::vector<int> sel = trips;
    std::sort(sel.begin(), sel.end());
    std::vector<int> local(I, -1);
    for (std::size_t a = 0; a < sel.size(); ++a) local[sel[a]] = static_cast<int>(a);
    InstanceData out;
    std::map<int, int> route_map;
    for (int i : sel) {
        Trip t = d_.trips[i];
        t.id = local[i] + 1;
        auto [it, inserted] = route_map.emplace(t.route, static_cast<int>(route_map.size()));
        (void)inserted;
        out.trips.push_back(t);
    }
    // Dense route numbering in order of first appearance by original route id.
    int next = 0;
    for (auto& kv : route_map) kv.second = next++;
    for (auto& t : out.trips) t.route = route_map[t.route];
    out.depots = d_.depots;
    for (int p = 0; p < num_pairs(); ++p) {
        const Pair pr = d_.compat[p];
        if (local[pr.i] < 0 || local[pr.j] < 0) continue;
        out.compat.push_back({local[pr.i], local[pr.j]});
        out.pair_cost.push_back(d_.pair_cost[p]);
        out.pair_time.push_back(d_.pair_time[p]);
    }
    const int n = static_cast<int>(sel.size());
    out.pull_out_cost.resize(static_cast<std::size_t>(K) * n);
    out.pull_in_cost.resize(out.pull_out_cost.size());
    out.pull_out_time.resize(out.pull_out_cost.size());
    out.pull_in_time.resize(out.pull_out_cost.size());
    for (int k = 0; k < K; ++k)
        for (int a = 0; a < n; ++a) {
            out.pull_out_cost[k * n + a] = pull_out_cost(k, sel[a]);
            out.pull_in_cost[k * n + a] = pull_in_cost(k, sel[a]);
            out.pull_out_time[k * n + a] = pull_out_time(k, sel[a]);
            out.pull_in_time[k * n + a] = pull_in_time(k, sel[a]);
        }
    out.meta = d_.meta;
    if (original_trip) *original_trip = sel;
    // Pair ordering is preserved by the sort in the constructor.
    return Instance(std::move(out));
}

void ServiceParams::validate() const {
    if (lb < 0 || ub < 0) fail("lb and ub must be non-negative");
    if (!(delta_trip > 0.0 && delta_trip <= 1.0)) fail("delta_trip must lie in (0,1]");
    if (!(delta_route > 0.0 && delta_route <= 1.0)) fail("delta_route must lie in (0,1]");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) fail("epsilon must lie in [0,1)");
    if (eps_tol <= 0) fail("eps_tol must be positive");
}

int floor_count(int n, double ratio) { return static_cast<int>(std::floor(n * ratio + 1e-9)); }

Requirements derive_requirements(const Instance& inst, const ServiceParams& params) {
    Requirements req;
    req.num_trips = inst.num_trips();
    req.f_trip = floor_count(req.num_trips, params.delta_trip);
    for (const auto& r : inst.routes()) {
        const int n = static_cast<int>(r.size());
        req.route_size.push_back(n);
        req.f_route.push_back(floor_count(n, params.delta_route));
    }
    return req;
}

int max_violated_scenarios(int S, double epsilon) { return floor_count(S, epsilon); }

void validate_schedule(const Instance& inst, const Schedule& sched) {
    const int I = inst.num_trips();
    std::vector<int> seen(I, 0);
    std::vector<int> per_depot(inst.num_depots(), 0);
    for (const Bus& b : sched.buses) {
        if (b.depot < 0 || b.depot >= inst.num_depots()) fail("bus references unknown depot");
        if (b.trips.empty()) fail("bus without trips");
        ++per_depot[b.depot];
        for (std::size_t a = 0; a < b.trips.size(); ++a) {
            const int i = b.trips[a];
            if (i < 0 || i >= I) fail("bus references unknown trip");
            if (seen[i]++) fail(trip_name(inst, i) + " appears more than once");
            if (a > 0 && !inst.compatible(b.trips[a - 1], i))
                fail("pair (" + std::to_string(b.trips[a - 1] + 1) + "," + std::to_string(i + 1) + ") is not in C");
        }
    }
    for (int i = 0; i < I; ++i)
        if (!seen[i]) fail(trip_name(inst, i) + " is not covered");
    if (!sched.capacity_relaxed)
        for (int k = 0; k < inst.num_depots(); ++k)
            if (per_depot[k] > inst.depot(k).capacity) fail("depot " + std::to_string(k + 1) + " exceeds its capacity");
}

long long schedule_cost(const Instance& inst, const Schedule& sched) {
    long long total = 0;
    for (const Bus& b : sched.buses) {
        if (b.trips.empty()) continue;
        total += inst.pull_out_cost(b.depot, b.trips.front());
        for (std::size_t a = 1; a < b.trips.size(); ++a) {
            const int p = inst.pair_index(b.trips[a - 1], b.trips[a]);
            if (p < 0) fail("pair (" + std::to_string(b.trips[a - 1] + 1) + "," + std::to_string(b.trips[a] + 1) + ") is not in C");
            total += inst.pair_cost(p);
        }
        total += inst.pull_in_cost(b.depot, b.trips.back());
    }
    return total;
}

std::vector<Arc> schedule_arcs(const Instance& inst, const Schedule& sched) {
    (void)inst;
    std::vector<Arc> arcs;
    for (const Bus& b : sched.buses) {
        if (b.trips.empty()) continue;
        arcs.push_back({Arc::Kind::PullOut, b.depot, b.trips.front(), b.depot});
        for (std::size_t a = 1; a < b.trips.size(); ++a) arcs.push_back({Arc::Kind::Pair, b.trips[a - 1], b.trips[a], b.depot});
        arcs.push_back({Arc::Kind::PullIn, b.trips.back(), b.depot, b.depot});
    }
    std::sort(arcs.begin(), arcs.end());
    return arcs;
}

Schedule schedule_from_arcs(const Instance& inst, const std::vector<Arc>& arcs) {
    const int I = inst.num_trips();
    const int K = inst.num_depots();
    std::vector<int> in_depot(I, -1), out_depot(I, -1);
    std::vector<int> next(I, -1), prev(I, -1);
    std::vector<int> in_count(I, 0), out_count(I, 0);
    std::vector<int> starts;
    auto trip_ok = [&](int i) {
        if (i < 0 || i >= I) fail("arc references unknown trip");
    };
    for (const Arc& a : arcs) {
        if (a.depot < 0 || a.depot >= K) fail("arc references unknown depot");
        switch (a.kind) {
        case Arc::Kind::PullOut:
            trip_ok(a.to);
            if (a.from != a.depot) fail("pull-out arc must leave its own depot");
            ++in_count[a.to];
            in_depot[a.to] = a.depot;
            starts.push_back(a.to);
            break;
        case Arc::Kind::PullIn:
            trip_ok(a.from);
            if (a.to != a.depot) fail("pull-in arc must enter its own depot");
            ++out_count[a.from];
            out_depot[a.from] = a.depot;
            break;
        case Arc::Kind::Pair:
            trip_ok(a.from);
            trip_ok(a.to);
            if (!inst.compatible(a.from, a.to))
                fail("pair (" + std::to_string(a.from + 1) + "," + std::to_string(a.to + 1) + ") is not in C");
            ++out_count[a.from];
            ++in_count[a.to];
            next[a.from] = a.to;
            prev[a.to] = a.from;
            in_depot[a.to] = in_depot[a.to] < 0 ? a.depot : in_depot[a.to];
            break;
        }
    }
    for (int i = 0; i < I; ++i) {
        if (in_count[i] != 1) fail(trip_name(inst, i) + " is entered " + std::to_string(in_count[i]) + " times");
        if (out_count[i] != 1) fail(trip_name(inst, i) + " is left " + std::to_string(out_count[i]) + " times");
    }
    // Depot consistency: every arc on a path carries the path's depot.
    std::vector<int> arc_depot_next(I, -1);
    for (const Arc& a : arcs)
        if (a.kind == Arc::Kind::Pair) arc_depot_next[a.from] = a.depot;
    std::sort(starts.begin(), starts.end());
    Schedule sched;
    std::vector<int> visited(I, 0);
    for (int first : starts) {
        Bus b;
        b.depot = in_depot[first];
        int cur = first;
        while (cur >= 0) {
            if (visited[cur]++) fail(trip_name(inst, cur) + " lies on a cycle");
            b.trips.push_back(cur);
            if (next[cur] >= 0) {
                if (arc_depot_next[cur] != b.depot) fail(trip_name(inst, cur) + ": depot changes along the bus");
            } else if (out_depot[cur] != b.depot) {
                fail(trip_name(inst, cur) + ": pull-in depot differs from pull-out depot");
            }
            cur = next[cur];
        }
        sched.buses.push_back(std::move(b));
    }
    for (int i = 0; i < I; ++i)
        if (!visited[i]) fail(trip_name(inst, i) + " lies on a cycle");
    return sched;
}

std::vector<int> sequenced_pairs(const Instance& inst, const Schedule& sched) {
    std::vector<int> out;
    for (const Bus& b : sched.buses)
        for (std::size_t a = 1; a < b.trips.size(); ++a) out.push_back(inst.pair_index(b.trips[a - 1], b.trips[a]));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> buses_per_depot(const Instance& inst, const Schedule& sched) {
    std::vector<int> n(inst.num_depots(), 0);
    for (const Bus& b : sched.buses) ++n[b.depot];
    return n;
}

Schedule canonical(Schedule sched) {
    std::sort(sched.buses.begin(), sched.buses.end(), [](const Bus& a, const Bus& b) { return a.trips.front() < b.trips.front(); });
    return sched;
}

namespace {

Point read_point(const json& j) {
    if (!j.is_array() || j.size() != 2) fail("location must be [x, y]");
    return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

Instance instance_from_json(const json& j) {
    try {
        InstanceData d;
        for (const auto& jt : j.at("trips")) {
            Trip t;
            t.id = jt.at("id").get<int>();
            t.route = jt.at("route").get<int>() - 1;
            t.start_loc = read_point(jt.at("start_loc"));
            t.end_loc = read_point(jt.at("end_loc"));
            t.s = jt.at("s").get<int>();
            t.mean_d = jt.at("mean_d").get<int>();
            t.e = jt.at("e").get<int>();
            d.trips.push_back(t);
        }
        std::sort(d.trips.begin(), d.trips.end(), [](const Trip& a, const Trip& b) { return a.id < b.id; });
        for (const auto& jd : j.at("depots")) {
            Depot dp;
            dp.id = jd.at("id").get<int>();
            dp.loc = read_point(jd.at("loc"));
            dp.capacity = jd.at("b").get<int>();
            d.depots.push_back(dp);
        }
        std::sort(d.depots.begin(), d.depots.end(), [](const Depot& a, const Depot& b) { return a.id < b.id; });
        const int I = static_cast<int>(d.trips.size());
        const int K = static_cast<int>(d.depots.size());
        auto check_trip = [&](int id) {
            if (id < 1 || id > I) fail("unknown trip id " + std::to_string(id));
            return id - 1;
        };
        auto check_depot = [&](int id) {
            if (id < 1 || id > K) fail("unknown depot id " + std::to_string(id));
            return id - 1;
        };
        std::map<std::pair<int, int>, int> cost, ttime;
        const json& costs = j.at("costs");
        for (const auto& e : costs.at("pairs")) cost[{check_trip(e.at(0).get<int>()), check_trip(e.at(1).get<int>())}] = e.at(2).get<int>();
        const json* dh = j.contains("deadhead") ? &j.at("deadhead") : nullptr;
        if (dh)
            for (const auto& e : dh->at("pairs")) ttime[{check_trip(e.at(0).get<int>()), check_trip(e.at(1).get<int>())}] = e.at(2).get<int>();
        for (const auto& e : j.at("compat")) {
            const int a = check_trip(e.at(0).get<int>());
            const int b = check_trip(e.at(1).get<int>());
            d.compat.push_back({a, b});
        }
        std::sort(d.compat.begin(), d.compat.end());
        for (const Pair& p : d.compat) {
            auto c = cost.find({p.i, p.j});
            if (c == cost.end()) fail("missing cost for pair (" + std::to_string(p.i + 1) + "," + std::to_string(p.j + 1) + ")");
            d.pair_cost.push_back(c->second);
            auto t = ttime.find({p.i, p.j});
            d.pair_time.push_back(t == ttime.end() ? 0 : t->second);
        }
        const std::size_t KI = static_cast<std::size_t>(K) * I;
        d.pull_out_cost.assign(KI, -1);
        d.pull_in_cost.assign(KI, -1);
        d.pull_out_time.assign(KI, 0);
        d.pull_in_time.assign(KI, 0);
        for (const auto& e : costs.at("pull_out"))
            d.pull_out_cost[check_depot(e.at(0).get<int>()) * I + check_trip(e.at(1).get<int>())] = e.at(2).get<int>();
        for (const auto& e : costs.at("pull_in"))
            d.pull_in_cost[check_depot(e.at(1).get<int>()) * I + check_trip(e.at(0).get<int>())] = e.at(2).get<int>();
        if (dh) {
            for (const auto& e : dh->at("pull_out"))
                d.pull_out_time[check_depot(e.at(0).get<int>()) * I + check_trip(e.at(1).get<int>())] = e.at(2).get<int>();
            for (const auto& e : dh->at("pull_in"))
                d.pull_in_time[check_depot(e.at(1).get<int>()) * I + check_trip(e.at(0).get<int>())] = e.at(2).get<int>();
        }
        for (std::size_t q = 0; q < KI; ++q)
            if (d.pull_out_cost[q] == -1 || d.pull_in_cost[q] == -1)
                fail("missing depot arc cost for depot " + std::to_string(q / I + 1) + " and trip " + std::to_string(q % I + 1));
        if (j.contains("meta")) d.meta = j.at("meta");
        // A trip listed under two routes is reported explicitly.
        if (j.contains("routes")) {
            std::vector<int> owner(I, 0);
            int r = 0;
            for (const auto& jr : j.at("routes")) {
                ++r;
                for (const auto& id : jr) {
                    const int i = check_trip(id.get<int>());
                    if (owner[i] && owner[i] != r) fail("trip " + std::to_string(i + 1) + " belongs to more than one route");
                    owner[i] = r;
                    if (d.trips[i].route != r - 1) fail("trip " + std::to_string(i + 1) + " belongs to more than one route");
                }
            }
        }
        return Instance(std::move(d));
    } catch (const json::exception& e) {
        throw InputError(std::string("instance parse error: ") + e.what());
    }
}

json instance_to_json(const Instance& inst) {
    const int I = inst.num_trips();
    const int K = inst.num_depots();
    json j;
    j["trips"] = json::array();
    for (const Trip& t : inst.trips())
        j["trips"].push_back({{"id", t.id},
                              {"route", t.route + 1},
                              {"start_loc", {t.start_loc.x, t.start_loc.y}},
                              {"end_loc", {t.end_loc.x, t.end_loc.y}},
                              {"s", t.s},
                              {"mean_d", t.mean_d},
                              {"e", t.e}});
    j["depots"] = json::array();
    for (const Depot& dp : inst.depots()) j["depots"].push_back({{"id", dp.id}, {"loc", {dp.loc.x, dp.loc.y}}, {"b", dp.capacity}});
    json pairs = json::array(), ptimes = json::array(), compat = json::array();
    for (int p = 0; p < inst.num_pairs(); ++p) {
        const Pair pr = inst.pair(p);
        pairs.push_back({pr.i + 1, pr.j + 1, inst.pair_cost(p)});
        ptimes.push_back({pr.i + 1, pr.j + 1, inst.pair_time(p)});
        compat.push_back({pr.i + 1, pr.j + 1});
    }
    json po = json::array(), pi = json::array(), pot = json::array(), pit = json::array();
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < I; ++i) {
            po.push_back({k + 1, i + 1, inst.pull_out_cost(k, i)});
            pi.push_back({i + 1, k + 1, inst.pull_in_cost(k, i)});
            pot.push_back({k + 1, i + 1, inst.pull_out_time(k, i)});
            pit.push_back({i + 1, k + 1, inst.pull_in_time(k, i)});
        }
    j["costs"] = {{"pairs", pairs}, {"pull_out", po}, {"pull_in", pi}};
    j["deadhead"] = {{"pairs", ptimes}, {"pull_out", pot}, {"pull_in", pit}};
    j["compat"] = compat;
    j["meta"] = inst.meta();
    return j;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path + ": parse error: " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

Instance load_instance(const std::string& path) { return instance_from_json(read_json_file(path)); }

void save_instance(const Instance& inst, const std::string& path) { write_text_file(path, instance_to_json(inst).dump(1) + "\n"); }

Schedule schedule_from_json(const Instance& inst, const json& j) {
    try {
        const json& jb = j.contains("schedule") ? j.at("schedule").at("buses") : j.at("buses");
        Schedule sched;
        for (const auto& b : jb) {
            Bus bus;
            bus.depot = b.at("depot").get<int>() - 1;
            for (const auto& t : b.at("trips")) bus.trips.push_back(t.get<int>() - 1);
            sched.buses.push_back(std::move(bus));
        }
        validate_schedule(inst, sched);
        return sched;
    } catch (const json::exception& e) {
        throw InputError(std::string("schedule parse error: ") + e.what());
    }
}

json schedule_to_json(const Schedule& sched, const Instance& inst) {
    (void)inst;
    json buses = json::array();
    for (const Bus& b : sched.buses) {
        json trips = json::array();
        for (int i : b.trips) trips.push_back(i + 1);
        buses.push_back({{"depot", b.depot + 1}, {"trips", trips}});
    }
    return {{"buses", buses}};
}

}  // namespace ccmdvsp
