#include "mbcool/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include <json.hpp>

#include "mbcool/rng.hpp"

#ifndef MBCOOL_VERSION
#define MBCOOL_VERSION "unknown"
#endif

namespace mbcool {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

StepAggregate aggregate(int step, double time, const std::vector<const StepObservables*>& obs) {
    std::vector<double> entropy, uncert, ground, n;
    for (const StepObservables* o : obs) {
        entropy.push_back(o->entropy);
        uncert.push_back(o->uncertainty);
        ground.push_back(o->ground_population);
        n.push_back(o->mean_n);
    }
    StepAggregate a;
    a.step = step;
    a.time = time;
    a.mean_entropy = mean_of(entropy);
    a.mean_uncert = mean_of(uncert);
    a.median_uncert = median_of(uncert);
    a.mean_ground_pop = mean_of(ground);
    a.mean_n = mean_of(n);
    a.count = static_cast<int>(obs.size());
    return a;
}

class OutputFile {
public:
    explicit OutputFile(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
    }
    std::ofstream& stream() { return out_; }
    void close() {
        out_.close();
        if (!out_) throw IoError("failed writing '" + path_.string() + "'");
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

nlohmann::json config_json(const RunConfig& c) {
    const SystemParams& p = c.params;
    nlohmann::json j;
    j["experiment"] = std::string(experiment_name(c.experiment));
    j["trajectories"] = c.trajectories;
    j["master_seed"] = c.master_seed;
    j["kappa"] = p.kappa;
    j["chi"] = p.chi;
    j["interaction_angle"] = p.interaction_angle;
    j["wait_angle"] = p.wait_angle;
    j["theta_T"] = p.theta_T;
    j["nbar0"] = thermal_occupation(p.theta_T);
    j["n_measurements"] = p.n_measurements;
    j["feedback_enabled"] = p.feedback_enabled;
    j["coupling_during_wait"] = p.coupling_during_wait;
    j["gamma_tilde"] = p.bath.gamma_tilde;
    j["bath_nbar"] = p.bath.nbar;
    j["dim"] = p.resolved_dim();
    j["tail_tol"] = p.truncation.tail_tol;
    j["pad"] = p.truncation.pad ? nlohmann::json(*p.truncation.pad) : nlohmann::json(nullptr);
    j["eps_skip"] = p.eps_skip;
    j["step_angle"] = p.step_angle ? nlohmann::json(*p.step_angle) : nlohmann::json(nullptr);
    j["burn_in"] = c.burn_in;
    j["q_grid_resolution"] = c.q_grid_resolution;
    j["q_factors"] = c.q_factors;
    j["nbars"] = c.nbars;
    return j;
}

}  // namespace

double Histogram::bin_lo(int i) const { return lo + (hi - lo) * i / double(counts.size()); }
double Histogram::bin_hi(int i) const { return lo + (hi - lo) * (i + 1) / double(counts.size()); }

long Histogram::total() const {
    long t = 0;
    for (long c : counts) t += c;
    return t;
}

Histogram Histogram::build(std::string name, const std::vector<double>& values, int bins, double lo, double hi) {
    Histogram h{std::move(name), lo, hi, std::vector<long>(bins, 0)};
    for (double v : values) {
        int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
        h.counts[std::clamp(b, 0, bins - 1)] += 1;
    }
    return h;
}

int default_workers() {
    if (const char* env = std::getenv("MBCOOL_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<TrajectoryResult> run_trajectories(const SystemParams& params, int count,
                                               std::uint64_t master_seed,
                                               const TrajectoryOptions& options, int workers) {
    std::vector<std::optional<TrajectoryResult>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<int> next{0};
    std::atomic<bool> abort{false};

    auto work = [&] {
        for (int i = next++; i < count && !abort; i = next++) {
            try {
                slots[i] = run_trajectory(params, derive_seed(master_seed, i), options);
            } catch (...) {
                errors[i] = std::current_exception();
                abort = true;
            }
        }
    };

    const int n = std::clamp(workers > 0 ? workers : default_workers(), 1, std::max(count, 1));
    if (n == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<TrajectoryResult> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

double step_time(const SystemParams& params, int step) {
    if (step <= 0) return 0.0;
    return step * params.interaction_angle + (step - 1) * params.wait_angle;
}

std::vector<StepAggregate> aggregate_steps(const std::vector<TrajectoryResult>& runs) {
    if (runs.empty()) return {};
    std::size_t steps = runs.front().steps.size();
    for (const auto& r : runs) steps = std::min(steps, r.steps.size());
    const SystemParams& p = runs.front().params;

    std::vector<StepAggregate> out;
    std::vector<const StepObservables*> obs(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) obs[i] = &runs[i].initial;
    out.push_back(aggregate(0, 0.0, obs));
    for (std::size_t k = 0; k < steps; ++k) {
        for (std::size_t i = 0; i < runs.size(); ++i) obs[i] = &runs[i].steps[k].obs;
        out.push_back(aggregate(int(k) + 1, step_time(p, int(k) + 1), obs));
    }
    return out;
}

SweepCell sweep_cell(const std::vector<TrajectoryResult>& runs, int burn_in) {
    std::vector<double> e;
    for (const auto& r : runs) e.push_back(steady_state_energy(r, burn_in));
    SweepCell cell;
    if (!runs.empty()) {
        cell.q_factor = runs.front().params.bath.q_factor();
        cell.nbar = runs.front().params.bath.nbar;
    }
    cell.trajectories = static_cast<int>(runs.size());
    cell.steady_n = mean_of(e);
    if (e.size() > 1) {
        double ss = 0.0;
        for (double x : e) ss += (x - cell.steady_n) * (x - cell.steady_n);
        cell.steady_n_sd = std::sqrt(ss / double(e.size() - 1));
    }
    return cell;
}

TrajectoryOptions experiment_options(const RunConfig& config) {
    TrajectoryOptions o;
    if (config.experiment == Experiment::FidelityHist) o.compute_max_q = true;
    if (config.experiment == Experiment::QfuncDump) {
        o.compute_max_q = true;
        const double radius = std::sqrt(thermal_occupation(config.params.theta_T)) + 4.0;
        o.q_grid = GridSpec::covering(radius, config.q_grid_resolution);
    }
    return o;
}

EnsembleSummary summarize(const RunConfig& config, const std::vector<TrajectoryResult>& runs) {
    EnsembleSummary s;
    s.config = config;
    s.trajectories = static_cast<int>(runs.size());
    s.steps = aggregate_steps(runs);

    std::vector<double> fidelity, ground, maxq;
    for (const auto& r : runs) {
        fidelity.push_back(r.final.coherent_fidelity);
        ground.push_back(r.final.obs.ground_population);
        if (r.final.max_q) maxq.push_back(r.final.max_q->q_max);
    }
    s.mean_final_fidelity = mean_of(fidelity);
    s.mean_final_ground_pop = mean_of(ground);
    s.histograms.push_back(Histogram::build("fidelity", fidelity));
    s.histograms.push_back(Histogram::build("ground_pop", ground));
    if (maxq.size() == runs.size() && !runs.empty()) s.histograms.push_back(Histogram::build("max_q", maxq));

    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i].final.q_grid) {
            s.qdumps.push_back({int(i), runs[i].seed, runs[i].final.coherent_fidelity, *runs[i].final.q_grid});
        }
    }
    return s;
}

EnsembleSummary run_ensemble(const RunConfig& config, int workers) {
    config.validate();
    if (config.experiment != Experiment::Qsweep) {
        const auto runs = run_trajectories(config.params, config.trajectories, config.master_seed,
                                           experiment_options(config), workers);
        return summarize(config, runs);
    }

    EnsembleSummary s;
    s.config = config;
    s.trajectories = config.trajectories;
    for (double q : config.q_factors) {
        for (double nbar : config.nbars) {
            SystemParams p = config.params;
            p.bath = BathParams::from_q(q, nbar);
            const auto runs = run_trajectories(p, config.trajectories, config.master_seed, {}, workers);
            SweepCell cell = sweep_cell(runs, config.burn_in);
            cell.q_factor = q;
            s.sweep.push_back(cell);
        }
    }
    return s;
}

void write_outputs(const EnsembleSummary& summary, const std::string& output_dir) {
    namespace fs = std::filesystem;
    const fs::path dir(output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + output_dir + "'");

    std::vector<std::string> written;
    auto emit = [&](const std::string& name, auto&& body) {
        OutputFile f(dir / name);
        body(f.stream());
        f.close();
        written.push_back(name);
    };

    if (!summary.steps.empty()) {
        emit("steps.csv", [&](std::ostream& out) {
            out << "step,time,mean_entropy,mean_uncert,median_uncert,mean_ground_pop,mean_n\n";
            for (const auto& a : summary.steps) {
                out << a.step << ',' << fmt(a.time) << ',' << fmt(a.mean_entropy) << ',' << fmt(a.mean_uncert)
                    << ',' << fmt(a.median_uncert) << ',' << fmt(a.mean_ground_pop) << ',' << fmt(a.mean_n)
                    << '\n';
            }
        });
    }
    for (const auto& h : summary.histograms) {
        emit("hist_" + h.name + ".csv", [&](std::ostream& out) {
            out << "bin_lo,bin_hi,count\n";
            for (int i = 0; i < int(h.counts.size()); ++i)
                out << fmt(h.bin_lo(i)) << ',' << fmt(h.bin_hi(i)) << ',' << h.counts[i] << '\n';
        });
    }
    if (!summary.sweep.empty()) {
        emit("sweep.csv", [&](std::ostream& out) {
            out << "q_factor,nbar,steady_n\n";
            for (const auto& c : summary.sweep)
                out << fmt(c.q_factor) << ',' << fmt(c.nbar) << ',' << fmt(c.steady_n) << '\n';
        });
    }
    for (const auto& d : summary.qdumps) {
        emit("qfunc_" + std::to_string(d.trajectory) + ".csv", [&](std::ostream& out) {
            out << "re,im,q\n";
            const GridSpec& g = d.grid.spec;
            for (int j = 0; j < g.resolution; ++j)
                for (int i = 0; i < g.resolution; ++i)
                    out << fmt(g.re_at(i)) << ',' << fmt(g.im_at(j)) << ',' << fmt(d.grid.values(i, j)) << '\n';
        });
    }

    nlohmann::json j;
    j["config"] = config_json(summary.config);
    j["master_seed"] = summary.config.master_seed;
    j["trajectories"] = summary.trajectories;
    j["units"] = {{"entropy", "nats"},
                  {"uncertainty", "hbar/2"},
                  {"energy", "hbar*omega"},
                  {"time", "omega*t (nominal protocol phase, feedback excluded)"},
                  {"q_function", "<alpha|rho|alpha> without 1/pi"}};
    j["versions"] = {{"mbcool", MBCOOL_VERSION},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                   "." + std::to_string(EIGEN_MINOR_VERSION)},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    j["histogram_bins"] = {{"count", kHistogramBins}, {"lo", 0.0}, {"hi", 1.0}};
    j["quantile"] = "median_uncert is the 50% quantile (median) across trajectories";
    if (!summary.steps.empty()) {
        j["final"] = {{"mean_coherent_fidelity", summary.mean_final_fidelity},
                      {"mean_ground_pop", summary.mean_final_ground_pop}};
    }
    if (!summary.sweep.empty()) {
        j["steady_state_estimator"] = "mean of mean_n over steps after burn_in, averaged over trajectories";
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& c : summary.sweep) {
            cells.push_back({{"q_factor", c.q_factor},
                             {"nbar", c.nbar},
                             {"steady_n", c.steady_n},
                             {"steady_n_sd", c.steady_n_sd},
                             {"trajectories", c.trajectories}});
        }
        j["sweep"] = cells;
    }
    j["files"] = written;

    emit("summary.json", [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

}  // namespace mbcool
