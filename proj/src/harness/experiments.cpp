// SPDX-License-Identifier: Apache-2.0
#include "starris/harness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <thread>

#include "starris/harness/output.hpp"
#include "starris/metrics.hpp"
#include "starris/rng.hpp"
#include "starris/units.hpp"

namespace starris::harness {

using nlohmann::json;

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 0)
    jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

namespace {

double vec_mean(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  double acc = 0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double vec_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = vec_mean(v);
  double acc = 0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

// applies env override of the backend tolerance, if present
SolverOptions effective_solver(const ScenarioConfig& cfg) {
  SolverOptions opts = cfg.solver;
  if (const char* env = std::getenv("STARRIS_SOLVER_TOL")) {
    const double tol = std::atof(env);
    if (tol > 0) opts.conic_tol = tol;
  }
  return opts;
}

void write_metadata(const ScenarioConfig& cfg, const std::string& name,
                    const std::vector<std::uint64_t>& seeds,
                    const std::vector<std::string>& outputs) {
  json meta;
  meta["experiment"] = name;
  meta["version"] = "starris 1.0";
  meta["config"] = config_to_json(cfg);
  meta["solver_tol_effective"] = effective_solver(cfg).conic_tol;
  meta["trial_seeds"] = seeds;
  meta["outputs"] = outputs;
  std::ofstream out(cfg.experiment.out_dir + "/" + name + "_metadata.json",
                    std::ios::binary);
  out << meta.dump(2) << "\n";
}

}  // namespace

double ReVsMCell::mean() const { return vec_mean(re); }
double ReVsMCell::stddev() const { return vec_std(re); }

const ReVsMCell& ReVsMResult::at(Scheme s, int m) const {
  for (const auto& c : cells)
    if (c.scheme == s && c.m == m) return c;
  throw std::out_of_range("ReVsMResult::at: no such cell");
}

double SeEeCell::mean_se() const { return vec_mean(se); }
double SeEeCell::mean_ee() const { return vec_mean(ee); }

const SeEeCell& SeEeResult::at(double p_dbm, double omega) const {
  for (const auto& c : cells)
    if (c.p_bs_max_dbm == p_dbm && c.omega == omega) return c;
  throw std::out_of_range("SeEeResult::at: no such cell");
}

ConvergenceResult run_convergence(const ScenarioConfig& cfg) {
  const ExperimentSpec& spec = cfg.experiment;
  ensure_directory(spec.out_dir);
  const SolverOptions base_opts = effective_solver(cfg);

  struct Task {
    int point;
    int trial;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < spec.n_grid.size(); ++p)
    for (int t = 0; t < spec.trials; ++t)
      tasks.push_back(
          {static_cast<int>(p), t,
           derive_seed(spec.master_seed, p * 100000ULL + t)});

  struct Outcome {
    bool ok = false;
    std::vector<double> re_history;
  };
  std::vector<Outcome> outcomes(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), spec.jobs, [&](int i) {
    const Task& task = tasks[i];
    ScenarioConfig local = cfg;
    local.system.n_antennas = spec.n_grid[task.point];
    local.refresh_omega();
    const ChannelSet ch =
        generate_channels(local.geometry, local.system, task.seed);
    SolverOptions opts = base_opts;
    opts.seed = task.seed;
    const SolveTrace tr = ao_solve(ch, local.system, opts);
    if (!tr.ok()) return;
    outcomes[i].ok = true;
    for (const OuterRecord& rec : tr.outers)
      outcomes[i].re_history.push_back(rec.re);
  });

  ConvergenceResult out;
  for (std::size_t p = 0; p < spec.n_grid.size(); ++p) {
    ConvergenceCurve curve;
    curve.n_antennas = spec.n_grid[p];
    std::size_t longest = 0;
    for (std::size_t i = 0; i < tasks.size(); ++i)
      if (tasks[i].point == static_cast<int>(p) && outcomes[i].ok)
        longest = std::max(longest, outcomes[i].re_history.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].point != static_cast<int>(p)) continue;
      if (!outcomes[i].ok) {
        ++curve.trials_failed;
        continue;
      }
      auto hist = outcomes[i].re_history;
      while (hist.size() < longest && !hist.empty())
        hist.push_back(hist.back());  // converged value persists
      curve.per_trial.push_back(std::move(hist));
      ++curve.trials_ok;
    }
    for (std::size_t it = 0; it < longest; ++it) {
      std::vector<double> vals;
      for (const auto& hist : curve.per_trial) vals.push_back(hist[it]);
      curve.mean_re.push_back(vec_mean(vals));
      curve.std_re.push_back(vec_std(vals));
    }
    out.curves.push_back(std::move(curve));
  }

  out.csv_path = spec.out_dir + "/convergence.csv";
  CsvWriter csv(out.csv_path);
  csv.header({"iteration", "n_antennas", "mean_re[1]", "std_re[1]",
              "trials_ok"});
  for (const auto& curve : out.curves)
    for (std::size_t it = 0; it < curve.mean_re.size(); ++it)
      csv.row({CsvWriter::num(static_cast<int>(it) + 1),
               CsvWriter::num(curve.n_antennas), CsvWriter::num(curve.mean_re[it]),
               CsvWriter::num(curve.std_re[it]), CsvWriter::num(curve.trials_ok)});
  csv.close();

  std::vector<PlotSeries> series;
  for (const auto& curve : out.curves) {
    PlotSeries s;
    s.label = "N = " + std::to_string(curve.n_antennas);
    for (std::size_t it = 0; it < curve.mean_re.size(); ++it) {
      s.x.push_back(static_cast<double>(it + 1));
      s.y.push_back(curve.mean_re[it]);
    }
    series.push_back(std::move(s));
  }
  write_svg_plot(spec.out_dir + "/convergence.svg",
                 "Convergence of the alternating optimization",
                 "outer iteration", "resource efficiency", series);

  std::vector<std::uint64_t> seeds;
  for (const Task& task : tasks) seeds.push_back(task.seed);
  write_metadata(cfg, "convergence", seeds,
                 {out.csv_path, spec.out_dir + "/convergence.svg"});
  return out;
}

ReVsMResult run_re_vs_m(const ScenarioConfig& cfg) {
  const ExperimentSpec& spec = cfg.experiment;
  ensure_directory(spec.out_dir);
  const SolverOptions base_opts = effective_solver(cfg);

  struct Task {
    int m_idx;
    int scheme_idx;
    int trial;
    std::uint64_t seed;  // channel seed, shared across schemes (paired runs)
  };
  std::vector<Task> tasks;
  for (std::size_t mi = 0; mi < spec.m_grid.size(); ++mi)
    for (std::size_t si = 0; si < spec.schemes.size(); ++si)
      for (int t = 0; t < spec.trials; ++t)
        tasks.push_back({static_cast<int>(mi), static_cast<int>(si), t,
                         derive_seed(spec.master_seed, mi * 1000ULL + t)});

  struct Outcome {
    bool ok = false;
    double re = 0;
  };
  std::vector<Outcome> outcomes(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), spec.jobs, [&](int i) {
    const Task& task = tasks[i];
    ScenarioConfig local = cfg;
    local.system.n_elements = spec.m_grid[task.m_idx];
    local.refresh_omega();  // omega follows P_max(M)
    const ChannelSet ch =
        generate_channels(local.geometry, local.system, task.seed);
    SolverOptions opts = base_opts;
    opts.seed = task.seed;
    SchemeSpec scheme;
    scheme.scheme = spec.schemes[task.scheme_idx];
    const SchemeResult res = run_scheme(scheme, ch, local.system, opts);
    if (!res.ok()) return;
    outcomes[i].ok = true;
    outcomes[i].re = res.metrics.re;
  });

  ReVsMResult out;
  for (std::size_t si = 0; si < spec.schemes.size(); ++si)
    for (std::size_t mi = 0; mi < spec.m_grid.size(); ++mi) {
      ReVsMCell cell;
      cell.scheme = spec.schemes[si];
      cell.m = spec.m_grid[mi];
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].m_idx != static_cast<int>(mi) ||
            tasks[i].scheme_idx != static_cast<int>(si))
          continue;
        if (outcomes[i].ok) {
          cell.re.push_back(outcomes[i].re);
          cell.re_by_trial.push_back(outcomes[i].re);
        } else {
          ++cell.trials_failed;
          cell.re_by_trial.push_back(std::nan(""));
        }
      }
      out.cells.push_back(std::move(cell));
    }

  out.csv_path = spec.out_dir + "/re_vs_m.csv";
  CsvWriter csv(out.csv_path);
  csv.header({"scheme", "m_elements", "mean_re[1]", "std_re[1]", "trials_ok",
              "trials_failed"});
  for (const auto& cell : out.cells)
    csv.row({to_string(cell.scheme), CsvWriter::num(cell.m),
             CsvWriter::num(cell.mean()), CsvWriter::num(cell.stddev()),
             CsvWriter::num(static_cast<int>(cell.re.size())),
             CsvWriter::num(cell.trials_failed)});
  csv.close();

  std::vector<PlotSeries> series;
  for (std::size_t si = 0; si < spec.schemes.size(); ++si) {
    PlotSeries s;
    s.label = to_string(spec.schemes[si]);
    for (std::size_t mi = 0; mi < spec.m_grid.size(); ++mi) {
      const auto& cell = out.cells[si * spec.m_grid.size() + mi];
      s.x.push_back(cell.m);
      s.y.push_back(cell.mean());
    }
    series.push_back(std::move(s));
  }
  write_svg_plot(spec.out_dir + "/re_vs_m.svg",
                 "Resource efficiency vs surface size", "surface elements M",
                 "mean resource efficiency", series);

  std::vector<std::uint64_t> seeds;
  for (const Task& task : tasks)
    if (task.scheme_idx == 0) seeds.push_back(task.seed);
  write_metadata(cfg, "re_vs_m", seeds,
                 {out.csv_path, spec.out_dir + "/re_vs_m.svg"});
  return out;
}

SeEeResult run_se_ee_tradeoff(const ScenarioConfig& cfg) {
  const ExperimentSpec& spec = cfg.experiment;
  ensure_directory(spec.out_dir);
  const SolverOptions base_opts = effective_solver(cfg);

  struct Task {
    int p_idx;
    int w_idx;
    int trial;
    std::uint64_t seed;  // per-trial channel, shared across the sweep grid
  };
  std::vector<Task> tasks;
  for (std::size_t pi = 0; pi < spec.p_bs_max_dbm_grid.size(); ++pi)
    for (std::size_t wi = 0; wi < spec.omega_grid.size(); ++wi)
      for (int t = 0; t < spec.trials; ++t)
        tasks.push_back({static_cast<int>(pi), static_cast<int>(wi), t,
                         derive_seed(spec.master_seed, t)});

  struct Outcome {
    bool ok = false;
    double se = 0, ee = 0;
  };
  std::vector<Outcome> outcomes(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), spec.jobs, [&](int i) {
    const Task& task = tasks[i];
    ScenarioConfig local = cfg;
    local.system.p_bs_max = dbm_to_watt(spec.p_bs_max_dbm_grid[task.p_idx]);
    local.omega_tracks_p_max = false;
    local.system.omega = spec.omega_grid[task.w_idx];
    const ChannelSet ch =
        generate_channels(local.geometry, local.system, task.seed);
    SolverOptions opts = base_opts;
    opts.seed = task.seed;
    const SolveTrace tr = ao_solve(ch, local.system, opts);
    if (!tr.ok()) return;
    outcomes[i].ok = true;
    outcomes[i].se = tr.metrics.se;
    outcomes[i].ee = tr.metrics.ee;
  });

  SeEeResult out;
  for (std::size_t pi = 0; pi < spec.p_bs_max_dbm_grid.size(); ++pi)
    for (std::size_t wi = 0; wi < spec.omega_grid.size(); ++wi) {
      SeEeCell cell;
      cell.p_bs_max_dbm = spec.p_bs_max_dbm_grid[pi];
      cell.omega = spec.omega_grid[wi];
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].p_idx != static_cast<int>(pi) ||
            tasks[i].w_idx != static_cast<int>(wi))
          continue;
        if (outcomes[i].ok) {
          cell.se.push_back(outcomes[i].se);
          cell.ee.push_back(outcomes[i].ee);
        } else {
          ++cell.trials_failed;
        }
      }
      out.cells.push_back(std::move(cell));
    }

  out.csv_path = spec.out_dir + "/se_ee.csv";
  CsvWriter csv(out.csv_path);
  csv.header({"p_bs_max_dbm", "omega[1]", "trial", "se[bit/s/Hz]",
              "ee[bit/s/W]"});
  for (const auto& cell : out.cells)
    for (std::size_t t = 0; t < cell.se.size(); ++t)
      csv.row({CsvWriter::num(cell.p_bs_max_dbm), CsvWriter::num(cell.omega),
               CsvWriter::num(static_cast<int>(t)), CsvWriter::num(cell.se[t]),
               CsvWriter::num(cell.ee[t])});
  csv.close();

  // Pareto front of the mean points per power budget
  out.pareto_csv_path = spec.out_dir + "/se_ee_pareto.csv";
  CsvWriter pareto(out.pareto_csv_path);
  pareto.header({"p_bs_max_dbm", "omega[1]", "mean_se[bit/s/Hz]",
                 "mean_ee[bit/s/W]", "non_dominated"});
  for (double p : spec.p_bs_max_dbm_grid) {
    std::vector<const SeEeCell*> budget_cells;
    for (const auto& cell : out.cells)
      if (cell.p_bs_max_dbm == p) budget_cells.push_back(&cell);
    for (const SeEeCell* cell : budget_cells) {
      bool dominated = false;
      for (const SeEeCell* other : budget_cells)
        if (other != cell && other->mean_se() >= cell->mean_se() &&
            other->mean_ee() >= cell->mean_ee() &&
            (other->mean_se() > cell->mean_se() ||
             other->mean_ee() > cell->mean_ee()))
          dominated = true;
      pareto.row({CsvWriter::num(cell->p_bs_max_dbm),
                  CsvWriter::num(cell->omega), CsvWriter::num(cell->mean_se()),
                  CsvWriter::num(cell->mean_ee()),
                  CsvWriter::num(dominated ? 0 : 1)});
    }
  }
  pareto.close();

  std::vector<PlotSeries> series;
  for (double p : spec.p_bs_max_dbm_grid) {
    PlotSeries s;
    char label[48];
    std::snprintf(label, sizeof label, "P_BS = %g dBm", p);
    s.label = label;
    for (const auto& cell : out.cells)
      if (cell.p_bs_max_dbm == p && !cell.se.empty()) {
        s.x.push_back(cell.mean_se());
        s.y.push_back(cell.mean_ee());
      }
    series.push_back(std::move(s));
  }
  write_svg_plot(spec.out_dir + "/se_ee.svg", "SE-EE tradeoff",
                 "spectral efficiency [bit/s/Hz]",
                 "energy efficiency [bit/s/W]", series);

  std::vector<std::uint64_t> seeds;
  for (int t = 0; t < spec.trials; ++t)
    seeds.push_back(derive_seed(spec.master_seed, t));
  write_metadata(cfg, "se_ee", seeds,
                 {out.csv_path, out.pareto_csv_path,
                  spec.out_dir + "/se_ee.svg"});
  return out;
}

SolveTrace run_single_solve(const ScenarioConfig& cfg) {
  const ExperimentSpec& spec = cfg.experiment;
  ensure_directory(spec.out_dir);
  SolverOptions opts = effective_solver(cfg);
  opts.seed = spec.master_seed;
  ScenarioConfig local = cfg;
  local.refresh_omega();
  const ChannelSet ch =
      generate_channels(local.geometry, local.system, spec.master_seed);
  const SolveTrace tr = ao_solve(ch, local.system, opts);

  json j;
  j["converged"] = tr.converged;
  j["failure"] = tr.failure;
  j["outer_iterations"] = tr.outer_iterations;
  j["wall_seconds"] = tr.wall_seconds;
  if (tr.ok()) {
    j["metrics"] = {{"se_bit_per_s_per_hz", tr.metrics.se},
                    {"ee_bit_per_s_per_w", tr.metrics.ee},
                    {"re", tr.metrics.re},
                    {"p_bs_w", tr.metrics.p_bs},
                    {"p_act_w", tr.metrics.p_act},
                    {"p_tot_w", tr.metrics.p_tot}};
    j["per_user_rate"] = std::vector<double>(
        tr.metrics.per_user_rate.data(),
        tr.metrics.per_user_rate.data() + tr.metrics.per_user_rate.size());
    j["feasible"] = tr.final_feasibility.ok(1e-6);
  }
  json outers = json::array();
  for (const OuterRecord& rec : tr.outers)
    outers.push_back({{"alpha", rec.alpha},
                      {"re", rec.re},
                      {"inner_objectives", rec.inner_objectives},
                      {"statuses", rec.statuses}});
  j["outers"] = outers;
  std::ofstream out(spec.out_dir + "/solve_trace.json", std::ios::binary);
  out << j.dump(2) << "\n";

  write_metadata(cfg, "solve", {spec.master_seed},
                 {spec.out_dir + "/solve_trace.json"});
  return tr;
}

}  // namespace starris::harness
