#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ccmdvsp/baselines.hpp"
#include "ccmdvsp/bnc.hpp"
#include "ccmdvsp/lagrangian.hpp"

using namespace ccmdvsp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct GenerateArgs {
    GenParams gen;
    std::string out;
};

struct SampleArgs {
    std::string instance;
    int scenarios = 100;
    std::uint64_t seed = 1;
    double cv = 0.2;
    std::string out;
};

struct SolveArgs {
    std::string instance;
    std::string scenarios;
    std::string method = "bnc";
    std::string cuts = "cmis";
    std::string vi = "off";
    std::string zc = "off";
    ServiceParams params;
    double time_limit = 600.0;
    int group_size = 10;
    int max_iterations = 100;
    std::string lagr_log;
    std::string out;
};

struct EvaluateArgs {
    std::string result;
    std::string instance;
    int scenarios = 2000;
    std::uint64_t seed = 2;
    std::string mean_result;
    std::string label;
    std::string out;
};

struct CompareArgs {
    std::vector<std::string> reports;
    std::string out;
};

CutKind cut_kind_from_cli(const std::string& s) {
    static const std::map<std::string, CutKind> m{{"nogood", CutKind::NoGood},
                                                  {"snogood", CutKind::StrongNoGood},
                                                  {"mis", CutKind::MIS},
                                                  {"cmis", CutKind::CMIS},
                                                  {"ecmis", CutKind::ECMIS}};
    return m.at(s);
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_text_file(path, text);
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

int run_generate(const GenerateArgs& a) {
    a.gen.validate();
    const Instance inst = generate_instance(a.gen);
    emit(a.out, instance_to_json(inst).dump(2) + "\n");
    return kExitOk;
}

int run_sample(const SampleArgs& a) {
    const Instance inst = load_instance(a.instance);
    SampleOptions opt;
    opt.cv = a.cv;
    const ScenarioSet scen = sample_scenarios(inst, a.scenarios, a.seed, opt);
    if (a.out.empty() || a.out == "-")
        std::cout << scenarios_to_json(scen).dump() << "\n";
    else
        save_scenarios(scen, a.out);
    return kExitOk;
}

json config_echo(const SolveArgs& a, const ScenarioSet& scen) {
    return {{"instance", a.instance},
            {"scenarios", a.scenarios},
            {"num_scenarios", scen.size()},
            {"scenario_seed", scen.seed()},
            {"method", a.method},
            {"cuts", a.cuts},
            {"vi", a.vi},
            {"zc", a.zc},
            {"epsilon", a.params.epsilon},
            {"delta_trip", a.params.delta_trip},
            {"delta_route", a.params.delta_route},
            {"lb", a.params.lb},
            {"ub", a.params.ub},
            {"time_limit", a.time_limit},
            {"group_size", a.group_size}};
}

int run_solve(const SolveArgs& a) {
    a.params.validate();
    const Instance inst = load_instance(a.instance);
    ScenarioSet scen;
    if (!a.scenarios.empty()) {
        scen = load_scenarios(a.scenarios);
        scen.check_matches(inst);
    } else if (a.method == "bnc" || a.method == "lagr" || a.method == "det-p75") {
        throw InputError("--scenarios is required for method " + a.method);
    }

    json out;
    bool feasible = false;
    if (a.method == "bnc" || a.method == "lagr") {
        BnCConfig cfg;
        cfg.cut_family = cut_kind_from_cli(a.cuts);
        cfg.use_vi = a.vi == "on";
        cfg.relax_z = a.zc == "on";
        cfg.time_limit = a.time_limit;
        BnCResult r;
        if (a.method == "bnc") {
            r = solve_bnc(inst, a.params, scen, cfg);
            out = bnc_result_to_json(inst, r);
        } else {
            LagrConfig lc;
            lc.group = cfg;
            lc.group_size = a.group_size;
            lc.max_iterations = a.max_iterations;
            const LagrResult lr = solve_lagrangian(inst, a.params, scen, lc);
            r = lr.report;
            out = bnc_result_to_json(inst, r);
            std::vector<int> sizes;
            for (const auto& g : lr.partition.groups) sizes.push_back(static_cast<int>(g.size()));
            out["lagrangian"] = {{"groups", sizes},
                                 {"iterations", lr.iterations},
                                 {"best_lagrangian", lr.best_lagrangian},
                                 {"dual_bound", lr.dual_bound},
                                 {"mu_scale", lr.mu_scale},
                                 {"partial", lr.partial},
                                 {"capacity_feasible", lr.capacity_feasible}};
            if (!a.lagr_log.empty()) write_text_file(a.lagr_log, lagr_log_csv(lr));
        }
        feasible = r.has_schedule;
        if (feasible) out["train_sat_pct"] = satisfaction_pct(inst, a.params, r.schedule, scen);
    } else {
        const TimeTable table = a.method == "det-mean" ? mean_times(inst) : percentile_times(inst, scen, 75.0);
        const DetResult d = solve_deterministic(inst, table, a.time_limit);
        feasible = d.has_schedule;
        out = {{"status", milp::to_string(d.status)}, {"objective", static_cast<double>(d.cost)}, {"bound", d.bound},
               {"time_s", d.time_s}};
        out["schedule"] = feasible ? schedule_to_json(d.schedule, inst) : json(nullptr);
        if (feasible) {
            out["cost"] = d.cost;
            if (scen.size() > 0) {
                out["violated_scenarios"] = count_violated_scenarios(inst, a.params, d.schedule, scen);
                out["train_sat_pct"] = satisfaction_pct(inst, a.params, d.schedule, scen);
            }
        }
    }
    out["config"] = config_echo(a, scen);
    emit(a.out, out.dump(2) + "\n");
    if (!feasible) {
        std::cerr << "no feasible schedule (" << out["status"].get<std::string>() << ")\n";
        return kExitInfeasible;
    }
    return kExitOk;
}

ServiceParams params_from_config(const json& c) {
    ServiceParams p;
    p.epsilon = c.value("epsilon", p.epsilon);
    p.delta_trip = c.value("delta_trip", p.delta_trip);
    p.delta_route = c.value("delta_route", p.delta_route);
    p.lb = c.value("lb", p.lb);
    p.ub = c.value("ub", p.ub);
    return p;
}

int run_evaluate(const EvaluateArgs& a) {
    const json res = read_json_file(a.result);
    if (!res.contains("config")) throw InputError("result file has no config block: " + a.result);
    const json& cfg = res.at("config");
    if (res.at("schedule").is_null()) throw InputError("result file holds no schedule: " + a.result);
    const std::string inst_path = a.instance.empty() ? cfg.at("instance").get<std::string>() : a.instance;
    const Instance inst = load_instance(inst_path);
    if (cfg.value("num_scenarios", 0) > 0 && cfg.value("scenario_seed", std::uint64_t{0}) == a.seed)
        throw InputError("evaluation seed must differ from the training seed");
    const ServiceParams params = params_from_config(cfg);
    const Schedule sched = schedule_from_json(inst, res);
    const ScenarioSet eval = sample_scenarios(inst, a.scenarios, a.seed);

    EvalReport r = evaluate_out_of_sample(inst, params, sched, eval);
    r.method = a.label.empty() ? cfg.at("method").get<std::string>() : a.label;
    r.instance = stem(inst_path);
    r.S = cfg.value("num_scenarios", 0);
    r.train_sat_pct = res.value("train_sat_pct", 100.0);
    r.time_s = res.value("time_s", 0.0);
    if (!a.mean_result.empty()) {
        const json mean = read_json_file(a.mean_result);
        const double m = mean.at("cost").get<double>();
        if (m > 0) r.obj_diff_vs_mean_pct = 100.0 * (r.objective - m) / m;
    }
    emit(a.out, std::string(kReportHeader) + "\n" + report_csv_row(r) + "\n");
    return kExitOk;
}

std::vector<EvalReport> read_reports(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open report: " + path);
    std::vector<EvalReport> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line == kReportHeader) {
            first = false;
            continue;
        }
        first = false;
        rows.push_back(report_from_csv_row(line));
    }
    return rows;
}

// Per-instance objective difference against the det-mean row, then the
// average of every column per method.
int run_compare(const CompareArgs& a) {
    std::vector<EvalReport> rows;
    for (const auto& p : a.reports) {
        auto r = read_reports(p);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    if (rows.empty()) throw InputError("no report rows to compare");
    std::map<std::string, double> mean_obj;
    for (const auto& r : rows)
        if (r.method == "det-mean") mean_obj[r.instance] = r.objective;
    std::vector<std::string> order;
    std::map<std::string, std::vector<EvalReport>> by_method;
    for (auto r : rows) {
        auto it = mean_obj.find(r.instance);
        if (it != mean_obj.end() && it->second > 0) r.obj_diff_vs_mean_pct = 100.0 * (r.objective - it->second) / it->second;
        if (!by_method.count(r.method)) order.push_back(r.method);
        by_method[r.method].push_back(r);
    }
    std::ostringstream os;
    os << kReportHeader << "\n";
    for (const auto& m : order) {
        const auto& v = by_method[m];
        EvalReport avg;
        avg.method = m;
        avg.instance = "avg" + std::to_string(v.size());
        avg.I = v.front().I;
        avg.K = v.front().K;
        avg.S = v.front().S;
        for (const auto& r : v) {
            avg.objective += r.objective / v.size();
            avg.obj_diff_vs_mean_pct += r.obj_diff_vs_mean_pct / v.size();
            avg.train_sat_pct += r.train_sat_pct / v.size();
            avg.eval_sat_pct += r.eval_sat_pct / v.size();
            avg.time_s += r.time_s / v.size();
        }
        os << report_csv_row(avg) << "\n";
    }
    emit(a.out, os.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chance-constrained multi-depot vehicle scheduling"};
    app.require_subcommand(1);

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "generate a random instance");
    gen->add_option("--trips", ga.gen.n_trips)->required();
    gen->add_option("--depots", ga.gen.n_depots)->required();
    gen->add_option("--route-size", ga.gen.trips_per_route);
    gen->add_option("--seed", ga.gen.seed);
    gen->add_option("--capacity", ga.gen.depot_capacity, "buses per depot, 0 for ceil(I/K)");
    gen->add_option("--compat-estimate", ga.gen.compat_estimate)->check(CLI::IsMember({"mean", "sampled_min"}));
    gen->add_option("-o,--output", ga.out);

    SampleArgs sa;
    auto* smp = app.add_subcommand("sample", "sample travel-time scenarios");
    smp->add_option("--instance", sa.instance)->required();
    smp->add_option("--scenarios", sa.scenarios)->required();
    smp->add_option("--seed", sa.seed);
    smp->add_option("--cv", sa.cv);
    smp->add_option("-o,--output", sa.out);

    SolveArgs so;
    auto* sol = app.add_subcommand("solve", "solve an instance");
    sol->add_option("--instance", so.instance)->required();
    sol->add_option("--scenarios", so.scenarios);
    sol->add_option("--method", so.method)->check(CLI::IsMember({"bnc", "lagr", "det-mean", "det-p75"}));
    sol->add_option("--cuts", so.cuts)->check(CLI::IsMember({"nogood", "snogood", "mis", "cmis", "ecmis"}));
    sol->add_option("--vi", so.vi)->check(CLI::IsMember({"on", "off"}));
    sol->add_option("--zc", so.zc)->check(CLI::IsMember({"on", "off"}));
    sol->add_option("--epsilon", so.params.epsilon);
    sol->add_option("--delta-trip", so.params.delta_trip);
    sol->add_option("--delta-route", so.params.delta_route);
    sol->add_option("--lb", so.params.lb);
    sol->add_option("--ub", so.params.ub);
    sol->add_option("--time-limit", so.time_limit);
    sol->add_option("--group-size", so.group_size);
    sol->add_option("--max-iterations", so.max_iterations);
    sol->add_option("--lagr-log", so.lagr_log, "write the per-iteration Lagrangian log as CSV");
    sol->add_option("-o,--output", so.out);

    EvaluateArgs ea;
    auto* ev = app.add_subcommand("evaluate", "out-of-sample evaluation of a solved schedule");
    ev->add_option("--schedule", ea.result)->required();
    ev->add_option("--instance", ea.instance, "overrides the instance path recorded in the result");
    ev->add_option("--eval-scenarios", ea.scenarios);
    ev->add_option("--seed", ea.seed);
    ev->add_option("--mean-result", ea.mean_result, "det-mean result for the objective difference column");
    ev->add_option("--label", ea.label);
    ev->add_option("-o,--output", ea.out);

    CompareArgs ca;
    auto* cmp = app.add_subcommand("compare", "aggregate evaluation reports per method");
    cmp->add_option("reports", ca.reports)->required();
    cmp->add_option("-o,--output", ca.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (*gen) return run_generate(ga);
        if (*smp) return run_sample(sa);
        if (*sol) return run_solve(so);
        if (*ev) return run_evaluate(ea);
        if (*cmp) return run_compare(ca);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
