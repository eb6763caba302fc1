#include "ccmdvsp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace ccmdvsp {

namespace {

[[noreturn]] void fail(const std::string& what) { throw InputError(what); }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace

void GenParams::validate() const {
    if (n_trips < 1) fail("n_trips must be positive");
    if (n_depots < 1) fail("n_depots must be positive");
    if (trips_per_route < 1) fail("trips_per_route must be positive");
    if (grid_width < 1 || grid_height < 1) fail("grid dimensions must be positive");
    if (!(long_trip_fraction >= 0.0 && long_trip_fraction <= 1.0)) fail("long_trip_fraction must lie in [0,1]");
    if (peak1_begin < 0 || peak1_end < peak1_begin || peak2_end < peak2_begin || peak2_begin < 0)
        fail("peak windows must be non-empty and non-negative");
    if (short_extra_min < 0 || short_extra_max < short_extra_min) fail("invalid short-trip extra duration range");
    if (long_duration_min < 1 || long_duration_max < long_duration_min) fail("invalid long-trip duration range");
    if (!(lognormal_cv > 0.0)) fail("lognormal_cv must be positive");
    if (deployment_cost < 0 || travel_cost_per_min < 0 || idle_cost_per_min < 0) fail("costs must be non-negative");
    if (depot_capacity < 0) fail("depot_capacity must be non-negative");
    if (compat_estimate != "mean" && compat_estimate != "sampled_min") fail("compat_estimate must be mean or sampled_min");
    if (compat_samples < 1) fail("compat_samples must be positive");
}

json GenParams::to_json() const {
    return {{"n_trips", n_trips},
            {"n_depots", n_depots},
            {"trips_per_route", trips_per_route},
            {"grid_width", grid_width},
            {"grid_height", grid_height},
            {"long_trip_fraction", long_trip_fraction},
            {"peak_windows", {{peak1_begin, peak1_end}, {peak2_begin, peak2_end}}},
            {"short_extra", {short_extra_min, short_extra_max}},
            {"long_duration", {long_duration_min, long_duration_max}},
            {"lognormal_cv", lognormal_cv},
            {"deployment_cost", deployment_cost},
            {"travel_cost_per_min", travel_cost_per_min},
            {"idle_cost_per_min", idle_cost_per_min},
            {"depot_capacity", depot_capacity},
            {"compat_estimate", compat_estimate},
            {"compat_samples", compat_samples},
            {"distance", "euclidean_rounded"}};
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t s) { return splitmix64(splitmix64(seed) ^ (s * 0xD1B54A32D192ED03ULL + 1)); }

double LognormalSampler::draw_real(double mean, double cv) {
    if (mean <= 0.0 || cv <= 0.0) return std::max(0.0, mean);
    const double sigma2 = std::log(1.0 + cv * cv);
    const double mu = std::log(mean) - sigma2 / 2.0;
    return std::exp(mu + std::sqrt(sigma2) * normal_(rng_));
}

int LognormalSampler::draw(double mean, double cv) {
    const double v = draw_real(mean, cv);
    return std::max(0, static_cast<int>(std::lround(v)));
}

Instance generate_instance(const GenParams& p) {
    p.validate();
    std::mt19937_64 rng(splitmix64(p.seed));
    const int I = p.n_trips;
    const int K = p.n_depots;
    const int R = (I + p.trips_per_route - 1) / p.trips_per_route;
    auto random_point = [&] { return Point{uniform_int(rng, 0, p.grid_width - 1), uniform_int(rng, 0, p.grid_height - 1)}; };

    struct RouteShape {
        Point a, b;
        bool long_trips;
    };
    std::vector<RouteShape> shapes;
    for (int r = 0; r < R; ++r) {
        RouteShape sh;
        sh.a = random_point();
        do sh.b = random_point();
        while (sh.b == sh.a && p.grid_width * p.grid_height > 1);
        sh.long_trips = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p.long_trip_fraction;
        shapes.push_back(sh);
    }

    InstanceData d;
    const int len1 = p.peak1_end - p.peak1_begin + 1;
    const int len2 = p.peak2_end - p.peak2_begin + 1;
    for (int i = 0; i < I; ++i) {
        const int r = i / p.trips_per_route;
        const int pos = i % p.trips_per_route;
        const RouteShape& sh = shapes[r];
        Trip t;
        t.id = i + 1;
        t.route = r;
        if (sh.long_trips) {
            t.start_loc = t.end_loc = (pos % 2 == 0) ? sh.a : sh.b;
            t.mean_d = uniform_int(rng, p.long_duration_min, p.long_duration_max);
        } else {
            t.start_loc = (pos % 2 == 0) ? sh.a : sh.b;
            t.end_loc = (pos % 2 == 0) ? sh.b : sh.a;
            t.mean_d = std::max(1, euclid_rounded(sh.a, sh.b) + uniform_int(rng, p.short_extra_min, p.short_extra_max));
        }
        const int u = uniform_int(rng, 0, len1 + len2 - 1);
        t.s = u < len1 ? p.peak1_begin + u : p.peak2_begin + (u - len1);
        if (t.mean_d < 10) {
            t.e = 0;
        } else {
            const int lo = static_cast<int>(std::ceil(0.05 * t.mean_d - 1e-9));
            const int hi = static_cast<int>(std::floor(0.10 * t.mean_d + 1e-9));
            t.e = uniform_int(rng, lo, std::max(lo, hi));
        }
        d.trips.push_back(t);
    }
    const int cap = p.depot_capacity > 0 ? p.depot_capacity : (I + K - 1) / K;
    for (int k = 0; k < K; ++k) d.depots.push_back({k + 1, random_point(), cap});

    // Planning estimates for C.
    std::vector<int> est_d(I);
    for (int i = 0; i < I; ++i) est_d[i] = d.trips[i].mean_d;
    std::mt19937_64 est_rng(splitmix64(p.seed ^ 0x5EED5EEDULL));
    LognormalSampler est_sampler(splitmix64(p.seed ^ 0xC0FFEEULL));
    const bool conservative = p.compat_estimate == "sampled_min";
    auto estimate = [&](int mean) {
        if (!conservative) return mean;
        int m = est_sampler.draw(mean, p.lognormal_cv);
        for (int a = 1; a < p.compat_samples; ++a) m = std::min(m, est_sampler.draw(mean, p.lognormal_cv));
        return m;
    };
    if (conservative)
        for (int i = 0; i < I; ++i) est_d[i] = estimate(d.trips[i].mean_d);
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < I; ++j) {
            if (i == j) continue;
            const Trip& a = d.trips[i];
            const Trip& b = d.trips[j];
            const int tbar = euclid_rounded(a.end_loc, b.start_loc);
            const int test = estimate(tbar);
            if (a.s + est_d[i] + test > b.s) continue;
            if (a.s >= b.s) continue;
            d.compat.push_back({i, j});
            d.pair_time.push_back(tbar);
            const int idle = std::max(0, b.s - (a.s + a.mean_d + tbar));
            d.pair_cost.push_back(p.travel_cost_per_min * tbar + p.idle_cost_per_min * idle);
        }
    const std::size_t KI = static_cast<std::size_t>(K) * I;
    d.pull_out_cost.resize(KI);
    d.pull_in_cost.resize(KI);
    d.pull_out_time.resize(KI);
    d.pull_in_time.resize(KI);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < I; ++i) {
            const int to = euclid_rounded(d.depots[k].loc, d.trips[i].start_loc);
            const int from = euclid_rounded(d.trips[i].end_loc, d.depots[k].loc);
            d.pull_out_time[k * I + i] = to;
            d.pull_in_time[k * I + i] = from;
            d.pull_out_cost[k * I + i] = p.travel_cost_per_min * to + p.deployment_cost;
            d.pull_in_cost[k * I + i] = p.travel_cost_per_min * from;
        }
    d.meta = {{"seed", p.seed}, {"generator_params", p.to_json()}, {"compat_estimate", p.compat_estimate}};
    return Instance(std::move(d));
}

ScenarioSet::ScenarioSet(int S, int I, int P, int K, std::uint64_t seed)
    : S_(S), I_(I), P_(P), K_(K), seed_(seed),
      dur_(static_cast<std::size_t>(S) * I), pair_(static_cast<std::size_t>(S) * P),
      out_(static_cast<std::size_t>(S) * K * I), in_(static_cast<std::size_t>(S) * K * I) {
    if (S < 0) fail("scenario count must be non-negative");
}

void ScenarioSet::check_matches(const Instance& inst) const {
    if (I_ != inst.num_trips() || P_ != inst.num_pairs() || K_ != inst.num_depots())
        fail("scenario set dimensions do not match the instance");
}

ScenarioSet ScenarioSet::select(const std::vector<int>& scenarios) const {
    ScenarioSet out(static_cast<int>(scenarios.size()), I_, P_, K_, seed_);
    for (std::size_t a = 0; a < scenarios.size(); ++a) {
        const int s = scenarios[a];
        const int t = static_cast<int>(a);
        for (int i = 0; i < I_; ++i) out.dur(t, i) = dur(s, i);
        for (int p = 0; p < P_; ++p) out.pair_time(t, p) = pair_time(s, p);
        for (int k = 0; k < K_; ++k)
            for (int i = 0; i < I_; ++i) {
                out.pull_out_time(t, k, i) = pull_out_time(s, k, i);
                out.pull_in_time(t, k, i) = pull_in_time(s, k, i);
            }
    }
    return out;
}

ScenarioSet ScenarioSet::restrict_to(const Instance& full, const Instance& sub, const std::vector<int>& original_trip) const {
    check_matches(full);
    const int n = sub.num_trips();
    ScenarioSet out(S_, n, sub.num_pairs(), K_, seed_);
    for (int s = 0; s < S_; ++s) {
        for (int a = 0; a < n; ++a) {
            out.dur(s, a) = dur(s, original_trip[a]);
            for (int k = 0; k < K_; ++k) {
                out.pull_out_time(s, k, a) = pull_out_time(s, k, original_trip[a]);
                out.pull_in_time(s, k, a) = pull_in_time(s, k, original_trip[a]);
            }
        }
        for (int p = 0; p < sub.num_pairs(); ++p) {
            const Pair pr = sub.pair(p);
            out.pair_time(s, p) = pair_time(s, full.pair_index(original_trip[pr.i], original_trip[pr.j]));
        }
    }
    return out;
}

ScenarioSet sample_scenarios(const Instance& inst, int S, std::uint64_t seed, const SampleOptions& opt) {
    if (S < 1) fail("scenario count must be positive");
    if (opt.cv < 0.0) fail("cv must be non-negative");
    const int I = inst.num_trips();
    const int K = inst.num_depots();
    ScenarioSet scen(S, I, inst.num_pairs(), K, seed);
    for (int s = 0; s < S; ++s) {
        LognormalSampler rng(substream_seed(seed, static_cast<std::uint64_t>(s)));
        for (int i = 0; i < I; ++i) scen.dur(s, i) = rng.draw(inst.trip(i).mean_d, opt.cv);
        for (int p = 0; p < inst.num_pairs(); ++p) scen.pair_time(s, p) = rng.draw(inst.pair_time(p), opt.cv);
        for (int k = 0; k < K; ++k)
            for (int i = 0; i < I; ++i) {
                scen.pull_out_time(s, k, i) = rng.draw(inst.pull_out_time(k, i), opt.cv);
                scen.pull_in_time(s, k, i) = rng.draw(inst.pull_in_time(k, i), opt.cv);
            }
    }
    return scen;
}

TimeTable mean_times(const Instance& inst) {
    TimeTable t;
    for (const Trip& tr : inst.trips()) t.dur.push_back(tr.mean_d);
    for (int p = 0; p < inst.num_pairs(); ++p) t.pair_time.push_back(inst.pair_time(p));
    for (int k = 0; k < inst.num_depots(); ++k)
        for (int i = 0; i < inst.num_trips(); ++i) {
            t.pull_out_time.push_back(inst.pull_out_time(k, i));
            t.pull_in_time.push_back(inst.pull_in_time(k, i));
        }
    return t;
}

TimeTable percentile_times(const Instance& inst, const ScenarioSet& scen, double q) {
    if (!(q > 0.0 && q <= 100.0)) fail("percentile must lie in (0,100]");
    if (scen.size() < 1) fail("empty scenario set");
    scen.check_matches(inst);
    const int S = scen.size();
    const int rank = std::clamp(static_cast<int>(std::ceil(q * S / 100.0 - 1e-9)), 1, S);
    std::vector<int> buf(S);
    auto pick = [&](auto getter) {
        for (int s = 0; s < S; ++s) buf[s] = getter(s);
        std::nth_element(buf.begin(), buf.begin() + (rank - 1), buf.end());
        return buf[rank - 1];
    };
    TimeTable t;
    const int I = inst.num_trips();
    const int K = inst.num_depots();
    for (int i = 0; i < I; ++i) t.dur.push_back(pick([&](int s) { return scen.dur(s, i); }));
    for (int p = 0; p < inst.num_pairs(); ++p) t.pair_time.push_back(pick([&](int s) { return scen.pair_time(s, p); }));
    t.pull_out_time.resize(static_cast<std::size_t>(K) * I);
    t.pull_in_time.resize(t.pull_out_time.size());
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < I; ++i) {
            t.pull_out_time[k * I + i] = pick([&](int s) { return scen.pull_out_time(s, k, i); });
            t.pull_in_time[k * I + i] = pick([&](int s) { return scen.pull_in_time(s, k, i); });
        }
    return t;
}

ScenarioSet scenario_from_table(const Instance& inst, const TimeTable& t) {
    const int I = inst.num_trips();
    const int K = inst.num_depots();
    ScenarioSet scen(1, I, inst.num_pairs(), K, 0);
    for (int i = 0; i < I; ++i) scen.dur(0, i) = t.dur[i];
    for (int p = 0; p < inst.num_pairs(); ++p) scen.pair_time(0, p) = t.pair_time[p];
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < I; ++i) {
            scen.pull_out_time(0, k, i) = t.pull_out_time[k * I + i];
            scen.pull_in_time(0, k, i) = t.pull_in_time[k * I + i];
        }
    return scen;
}

json scenarios_to_json(const ScenarioSet& scen) {
    json j;
    j["S"] = scen.size();
    j["I"] = scen.num_trips();
    j["P"] = scen.num_pairs();
    j["K"] = scen.num_depots();
    j["seed"] = scen.seed();
    json dur = json::array(), pairs = json::array(), out = json::array(), in = json::array();
    for (int s = 0; s < scen.size(); ++s) {
        json a = json::array(), b = json::array(), c = json::array(), e = json::array();
        for (int i = 0; i < scen.num_trips(); ++i) a.push_back(scen.dur(s, i));
        for (int p = 0; p < scen.num_pairs(); ++p) b.push_back(scen.pair_time(s, p));
        for (int k = 0; k < scen.num_depots(); ++k)
            for (int i = 0; i < scen.num_trips(); ++i) {
                c.push_back(scen.pull_out_time(s, k, i));
                e.push_back(scen.pull_in_time(s, k, i));
            }
        dur.push_back(a);
        pairs.push_back(b);
        out.push_back(c);
        in.push_back(e);
    }
    j["dur"] = dur;
    j["pair_time"] = pairs;
    j["pull_out"] = out;
    j["pull_in"] = in;
    return j;
}

ScenarioSet scenarios_from_json(const json& j) {
    try {
        const int S = j.at("S").get<int>();
        const int I = j.at("I").get<int>();
        const int P = j.at("P").get<int>();
        const int K = j.at("K").get<int>();
        ScenarioSet scen(S, I, P, K, j.at("seed").get<std::uint64_t>());
        for (int s = 0; s < S; ++s) {
            for (int i = 0; i < I; ++i) scen.dur(s, i) = j.at("dur").at(s).at(i).get<int>();
            for (int p = 0; p < P; ++p) scen.pair_time(s, p) = j.at("pair_time").at(s).at(p).get<int>();
            for (int k = 0; k < K; ++k)
                for (int i = 0; i < I; ++i) {
                    scen.pull_out_time(s, k, i) = j.at("pull_out").at(s).at(k * I + i).get<int>();
                    scen.pull_in_time(s, k, i) = j.at("pull_in").at(s).at(k * I + i).get<int>();
                }
        }
        return scen;
    } catch (const json::exception& e) {
        throw InputError(std::string("scenario parse error: ") + e.what());
    }
}

namespace {

constexpr char kMagic[8] = {'C', 'C', 'S', 'C', 'E', 'N', '1', '\0'};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void save_scenarios(const ScenarioSet& scen, const std::string& path) {
    if (ends_with(path, ".json")) {
        write_text_file(path, scenarios_to_json(scen).dump() + "\n");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write " + path);
    out.write(kMagic, sizeof kMagic);
    const std::int32_t dims[4] = {scen.size(), scen.num_trips(), scen.num_pairs(), scen.num_depots()};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    const std::uint64_t seed = scen.seed();
    out.write(reinterpret_cast<const char*>(&seed), sizeof seed);
    auto put = [&](int v) {
        const std::int32_t x = v;
        out.write(reinterpret_cast<const char*>(&x), sizeof x);
    };
    for (int s = 0; s < scen.size(); ++s) {
        for (int i = 0; i < scen.num_trips(); ++i) put(scen.dur(s, i));
        for (int p = 0; p < scen.num_pairs(); ++p) put(scen.pair_time(s, p));
        for (int k = 0; k < scen.num_depots(); ++k)
            for (int i = 0; i < scen.num_trips(); ++i) put(scen.pull_out_time(s, k, i));
        for (int k = 0; k < scen.num_depots(); ++k)
            for (int i = 0; i < scen.num_trips(); ++i) put(scen.pull_in_time(s, k, i));
    }
}

ScenarioSet load_scenarios(const std::string& path) {
    if (ends_with(path, ".json")) return scenarios_from_json(read_json_file(path));
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) fail(path + ": not a scenario file");
    std::int32_t dims[4];
    std::uint64_t seed = 0;
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    in.read(reinterpret_cast<char*>(&seed), sizeof seed);
    if (!in || dims[0] < 1 || dims[1] < 0 || dims[2] < 0 || dims[3] < 0) fail(path + ": corrupt header");
    ScenarioSet scen(dims[0], dims[1], dims[2], dims[3], seed);
    auto get = [&] {
        std::int32_t x = 0;
        in.read(reinterpret_cast<char*>(&x), sizeof x);
        if (!in) fail(path + ": truncated scenario file");
        return static_cast<int>(x);
    };
    for (int s = 0; s < scen.size(); ++s) {
        for (int i = 0; i < scen.num_trips(); ++i) scen.dur(s, i) = get();
        for (int p = 0; p < scen.num_pairs(); ++p) scen.pair_time(s, p) = get();
        for (int k = 0; k < scen.num_depots(); ++k)
            for (int i = 0; i < scen.num_trips(); ++i) scen.pull_out_time(s, k, i) = get();
        for (int k = 0; k < scen.num_depots(); ++k)
            for (int i = 0; i < scen.num_trips(); ++i) scen.pull_in_time(s, k, i) = get();
    }
    return scen;
}

}  // namespace ccmdvsp
