#include "ccmdvsp/lagrangian.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ccmdvsp/baselines.hpp"

namespace ccmdvsp {

using milp::kInf;

Partition partition_trips(const Schedule& det_sched, int m_gr) {
    if (m_gr < 1) throw InputError("group size must be at least 1");
    Partition part;
    part.m_gr = m_gr;
    std::vector<int> aux;
    for (const Bus& b : det_sched.buses) {
        aux.insert(aux.end(), b.trips.begin(), b.trips.end());
        if (static_cast<int>(aux.size()) >= m_gr) {
            std::sort(aux.begin(), aux.end());
            part.groups.push_back(std::move(aux));
            aux.clear();
        }
    }
    if (!aux.empty()) {
        if (part.groups.empty()) {
            part.groups.push_back({});
        }
        auto& last = part.groups.back();
        last.insert(last.end(), aux.begin(), aux.end());
        std::sort(last.begin(), last.end());
    }
    return part;
}

double group_weight(int p, int P) { return p == 0 ? -(P - 1.0) : 1.0; }

GroupSolution solve_group(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, const std::vector<int>& group,
                          const std::vector<double>& mu, int p, int P, const BnCConfig& cfg) {
    std::vector<int> orig;
    const Instance sub = inst.restrict_to(group, &orig);
    const ScenarioSet sub_scen = scen.restrict_to(inst, sub, orig);
    BnCConfig c = cfg;
    c.z_cost.assign(scen.size(), 0.0);
    const double w = group_weight(p, P);
    for (int s = 0; s < scen.size(); ++s) c.z_cost[s] = w * mu[s];
    // Negative weights would leave z fractional under the relaxation.
    if (w < 0) c.relax_z = false;
    const BnCResult r = solve_bnc(sub, params, sub_scen, c);
    if (!r.has_schedule) throw InputError("group " + std::to_string(p + 1) + " has no feasible schedule (" + to_string(r.status) + ")");
    GroupSolution g;
    g.optimal = r.status == milp::Status::Optimal;
    g.schedule = r.schedule;
    for (Bus& b : g.schedule.buses)
        for (int& t : b.trips) t = orig[t];
    g.cost = schedule_cost(sub, r.schedule);
    g.value = static_cast<double>(g.cost);
    for (int s = 0; s < scen.size(); ++s) {
        // A z with zero weight is free; report the verdict the schedule forces.
        int z = static_cast<int>(std::lround(r.z_master[s]));
        if (c.z_cost[s] == 0.0) z = r.z[s];
        g.z.push_back(z);
        g.value += c.z_cost[s] * z;
    }
    return g;
}

std::vector<double> subgradient(const std::vector<std::vector<int>>& z_by_group) {
    const int P = static_cast<int>(z_by_group.size());
    if (P == 0) return {};
    std::vector<double> g(z_by_group[0].size(), 0.0);
    for (int p = 0; p < P; ++p)
        for (std::size_t s = 0; s < g.size(); ++s) g[s] += group_weight(p, P) * z_by_group[p][s];
    return g;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r += a[i] * b[i];
    return r;
}

void project_simplex(std::vector<double>& v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0, tau = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cum += u[k];
        const double cand = (cum - 1.0) / static_cast<double>(k + 1);
        if (u[k] - cand > 0) tau = cand;
    }
    for (double& x : v) x = std::max(0.0, x - tau);
}

}  // namespace

BundleStep bundle_step(const BundleState& st, double qp_tol, int max_iter) {
    const std::size_t L = st.cuts.size();
    BundleStep out;
    if (L == 0) throw InputError("bundle_step needs at least one cut");
    const std::size_t S = st.center.size();
    std::vector<double> a(L);
    double lip = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        a[l] = st.cuts[l].value - dot(st.cuts[l].g, st.cuts[l].mu);
        lip += dot(st.cuts[l].g, st.cuts[l].g);
    }
    lip *= st.t;
    auto mu_of = [&](const std::vector<double>& lam) {
        std::vector<double> mu(S);
        for (std::size_t s = 0; s < S; ++s) {
            double G = 0.0;
            for (std::size_t l = 0; l < L; ++l) G += lam[l] * st.cuts[l].g[s];
            mu[s] = std::max(0.0, st.center[s] + st.t * G);
        }
        return mu;
    };
    std::vector<double> lam(L, 1.0 / static_cast<double>(L));
    if (lip > 0.0) {
        const double step = 1.0 / lip;
        bool converged = false;
        for (int it = 0; it < max_iter; ++it) {
            const std::vector<double> mu = mu_of(lam);
            std::vector<double> next(L);
            for (std::size_t l = 0; l < L; ++l) next[l] = lam[l] - step * (a[l] + dot(st.cuts[l].g, mu));
            project_simplex(next);
            double diff = 0.0;
            for (std::size_t l = 0; l < L; ++l) diff = std::max(diff, std::abs(next[l] - lam[l]));
            lam = std::move(next);
            if (diff <= qp_tol) {
                converged = true;
                break;
            }
        }
        out.qp_ok = converged;
    }
    out.mu = mu_of(lam);
    out.model_value = kInf;
    for (std::size_t l = 0; l < L; ++l) out.model_value = std::min(out.model_value, a[l] + dot(st.cuts[l].g, out.mu));
    return out;
}

double bundle_dual_bound(const BundleState& st) {
    using namespace milp;
    if (st.cuts.empty()) return kInf;
    const std::size_t S = st.cuts[0].g.size();
    Model m;
    const int theta = m.add_var(-kInf, kInf, -1.0, false, "theta");
    std::vector<int> mu(S);
    for (std::size_t s = 0; s < S; ++s) mu[s] = m.add_var(0.0, kInf, 0.0, false);
    for (const BundleCut& c : st.cuts) {
        std::vector<Term> t{{theta, 1.0}};
        for (std::size_t s = 0; s < S; ++s)
            if (c.g[s] != 0.0) t.push_back({mu[s], -c.g[s]});
        m.add_row(t, Sense::LE, c.value - dot(c.g, c.mu));
    }
    const LpSolution lp = lp_solve(m);
    if (lp.status == Status::Optimal) return -lp.objective;
    return kInf;
}

RepairResult combine_and_repair(const std::vector<Schedule>& group_schedules, const Instance& inst) {
    RepairResult out;
    for (const Schedule& s : group_schedules)
        for (const Bus& b : s.buses) out.schedule.buses.push_back(b);
    const int K = inst.num_depots();
    long total_cap = 0;
    for (const Depot& d : inst.depots()) total_cap += d.capacity;
    if (static_cast<long>(out.schedule.buses.size()) > total_cap) {
        out.feasible = false;
        return out;
    }
    while (true) {
        const std::vector<int> used = buses_per_depot(inst, out.schedule);
        int over = -1;
        for (int k = 0; k < K; ++k)
            if (used[k] > inst.depot(k).capacity) {
                over = k;
                break;
            }
        if (over < 0) break;
        long long best = 0;
        int best_bus = -1, best_k = -1;
        for (std::size_t b = 0; b < out.schedule.buses.size(); ++b) {
            const Bus& bus = out.schedule.buses[b];
            if (bus.depot != over) continue;
            for (int k = 0; k < K; ++k) {
                if (k == over || used[k] >= inst.depot(k).capacity) continue;
                const long long c = inst.pull_out_cost(k, bus.trips.front()) + inst.pull_in_cost(k, bus.trips.back());
                if (best_bus < 0 || c < best) {
                    best = c;
                    best_bus = static_cast<int>(b);
                    best_k = k;
                }
            }
        }
        out.schedule.buses[best_bus].depot = best_k;
        ++out.moves;
    }
    return out;
}

LagrResult solve_lagrangian(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, const LagrConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    params.validate();
    LagrResult res;
    const int S = scen.size();
    const int limit = max_violated_scenarios(S, params.epsilon);

    DetResult det = solve_deterministic(inst, percentile_times(inst, scen, cfg.det_percentile), cfg.group.time_limit);
    if (!det.has_schedule) det = solve_deterministic(inst, mean_times(inst), cfg.group.time_limit);
    if (!det.has_schedule) throw InputError("no deterministic schedule to partition the trips");
    res.partition = partition_trips(det.schedule, cfg.group_size);
    const int P = static_cast<int>(res.partition.groups.size());
    res.mu_scale = std::max(1.0, static_cast<double>(det.cost) / std::max<std::size_t>(1, det.schedule.buses.size()));

    BundleState bundle;
    bundle.t = cfg.t0;
    bundle.center.assign(S, 0.0);
    std::vector<double> mu(S, 0.0);
    double pending_model = kInf;
    bool have_inc = false;
    std::pair<int, long long> inc_key{0, 0};
    double prev_primal = kInf, prev_dual = kInf;

    for (int it = 0; it < cfg.max_iterations; ++it) {
        res.iterations = it + 1;
        std::vector<double> mu_cost(S);
        for (int s = 0; s < S; ++s) mu_cost[s] = mu[s] * res.mu_scale;
        std::vector<Schedule> scheds;
        std::vector<std::vector<int>> zs;
        double value = 0.0;
        for (int p = 0; p < P; ++p) {
            GroupSolution g = solve_group(inst, params, scen, res.partition.groups[p], mu_cost, p, P, cfg.group);
            res.partial |= !g.optimal;
            value += g.value;
            scheds.push_back(std::move(g.schedule));
            zs.push_back(std::move(g.z));
        }
        const double L = value / res.mu_scale;

        RepairResult rep = combine_and_repair(scheds, inst);
        if (rep.feasible) {
            const Schedule full = canonical(rep.schedule);
            const int viol = count_violated_scenarios(inst, params, full, scen);
            const std::pair<int, long long> key{std::max(0, viol - limit), schedule_cost(inst, full)};
            if (!have_inc || key < inc_key) {
                have_inc = true;
                inc_key = key;
                res.report.schedule = full;
                res.report.violated = viol;
            }
        } else {
            res.capacity_feasible = false;
        }

        const std::vector<double> g = subgradient(zs);
        bundle.cuts.push_back({L, g, mu});
        std::string step;
        if (bundle.center_value == -kInf) {
            bundle.center = mu;
            bundle.center_value = L;
            step = "serious";
        } else if (L - bundle.center_value >= bundle.serious_fraction * (pending_model - bundle.center_value)) {
            bundle.center = mu;
            bundle.center_value = L;
            bundle.t = std::min(2.0 * bundle.t, bundle.t_max);
            step = "serious";
        } else {
            bundle.t *= 0.5;
            step = "null";
        }
        res.best_lagrangian = std::max(res.best_lagrangian, L);
        const double dual = bundle_dual_bound(bundle);
        res.dual_bound = std::min(res.dual_bound, dual);

        LagrIteration row;
        row.iteration = it;
        row.primal = L * res.mu_scale;
        row.dual = res.dual_bound * res.mu_scale;
        row.t = bundle.t;
        row.incumbent_violations = have_inc ? res.report.violated : -1;
        row.incumbent_cost = have_inc ? inc_key.second : 0;

        auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
        const bool stationary = std::all_of(g.begin(), g.end(), [](double x) { return x == 0.0; });
        const bool closed = std::isfinite(res.dual_bound) && rel(res.best_lagrangian, res.dual_bound) <= cfg.tol;
        const bool stalled = std::isfinite(dual) && std::isfinite(prev_dual) && rel(L, prev_primal) <= cfg.tol && rel(dual, prev_dual) <= cfg.tol;
        prev_primal = L;
        prev_dual = dual;
        if (stationary || closed || stalled || it + 1 == cfg.max_iterations) {
            row.step = step + "/stop";
            res.log.push_back(row);
            break;
        }
        row.step = step;
        res.log.push_back(row);

        if (cfg.plain_subgradient) {
            for (int s = 0; s < S; ++s) mu[s] = std::max(0.0, mu[s] + cfg.subgradient_step / (it + 1.0) * g[s]);
            pending_model = kInf;
        } else {
            const BundleStep bs = bundle_step(bundle);
            if (bs.qp_ok) {
                mu = bs.mu;
                pending_model = bs.model_value;
            } else {
                for (int s = 0; s < S; ++s) mu[s] = std::max(0.0, bundle.center[s] + cfg.subgradient_step * g[s]);
                pending_model = kInf;
            }
        }
    }

    BnCResult& r = res.report;
    r.has_schedule = have_inc;
    const bool closed = have_inc && inc_key.first == 0 && std::isfinite(res.dual_bound) &&
                        static_cast<double>(inc_key.second) <= res.dual_bound * res.mu_scale + 1e-6;
    r.status = !have_inc ? milp::Status::Infeasible : closed ? milp::Status::Optimal : milp::Status::IterLimit;
    if (have_inc) {
        r.objective = static_cast<double>(inc_key.second);
        for (int s = 0; s < S; ++s) r.z.push_back(greedy_evaluate(inst, params, r.schedule, scen, s).z);
    }
    r.bound = res.dual_bound * res.mu_scale;
    r.gap = have_inc && std::isfinite(r.bound) ? std::max(0.0, r.objective - r.bound) / std::max(1.0, std::abs(r.objective)) : kInf;
    res.best_lagrangian *= res.mu_scale;
    res.dual_bound *= res.mu_scale;
    r.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::string lagr_log_csv(const LagrResult& r) {
    std::string out = "iteration,primal,dual,step,t,incumbent_violations,incumbent_cost\n";
    char buf[256];
    for (const LagrIteration& it : r.log) {
        std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%s,%.6g,%d,%lld\n", it.iteration, it.primal, it.dual, it.step.c_str(), it.t,
                      it.incumbent_violations, it.incumbent_cost);
        out += buf;
    }
    return out;
}

}  // namespace ccmdvsp
