#include "mplq/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <omp.h>

#include "mplq/csv.hpp"
#include "mplq/errors.hpp"
#include "mplq/ga.hpp"
#include "mplq/hqm.hpp"
#include "mplq/taskgen.hpp"

namespace mplq {

double improvement_rate(const RunHistory& history) {
  if (!(history.initial > 0.0)) {
    throw UndefinedRateError("improvement rate is undefined for a non-positive initial reward");
  }
  return (history.final - history.initial) / history.initial * 100.0;
}

double reward_gap(double reward_btd, double reward_hcps) {
  if (!std::isfinite(reward_btd) || !std::isfinite(reward_hcps)) {
    throw ParameterError("reward_gap: rewards must be finite");
  }
  return reward_btd - reward_hcps;
}

std::string to_string(Solver solver) { return solver == Solver::hqm ? "hqm" : "ga"; }

Solver parse_solver(const std::string& text) {
  if (text == "hqm") return Solver::hqm;
  if (text == "ga") return Solver::ga;
  throw ConfigError("unknown solver '" + text + "' (expected hqm or ga)");
}

Budget parse_budget(const std::string& text) {
  if (text == "desk") return Budget::desk();
  if (text == "full") return Budget::full();
  throw ConfigError("unknown budget '" + text + "' (expected desk or full)");
}

SolveResult solve(const Problem& problem, const SolverSetup& setup) {
  if (setup.solver == Solver::hqm) {
    HqmParams p;
    p.agents = setup.budget.agents;
    p.timesteps = setup.budget.iterations;
    p.seed = setup.seed;
    return run_hqm(problem, p);
  }
  GaParams p;
  p.population = setup.budget.agents;
  p.generations = setup.budget.iterations;
  p.seed = setup.seed;
  return run_ga(problem, p);
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t solver_seed(std::uint64_t instance_seed, Solver solver) {
  return mix(instance_seed ^ (solver == Solver::hqm ? 0x68716dULL : 0x6761ULL));
}

// Runs job(i) for i in [0, n) across threads and rethrows the first failure.
template <typename Fn>
void parallel_jobs(std::size_t n, Fn&& job) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      job(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(mplq_bench_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t base, int spaces, int locations, int rep) {
  std::uint64_t h = mix(base);
  h = mix(h ^ static_cast<std::uint64_t>(spaces));
  h = mix(h ^ (static_cast<std::uint64_t>(locations) << 16));
  return mix(h ^ (static_cast<std::uint64_t>(rep) << 32));
}

void check_config(const GridConfig& grid) {
  if (grid.space_counts.empty() || grid.locations_per_space.empty() || grid.policies.empty() ||
      grid.solvers.empty()) {
    throw ConfigError("grid: every list must be non-empty");
  }
  if (grid.replications < 1) throw ConfigError("grid: replications must be >= 1");
  if (grid.budget.agents < 2 || grid.budget.iterations < 1) {
    throw ConfigError("grid: budget needs >= 2 agents and >= 1 iteration");
  }
  for (int s : grid.space_counts) {
    if (s < 1) throw ConfigError("grid: space counts must be >= 1");
  }
  for (int l : grid.locations_per_space) {
    if (l < 1) throw ConfigError("grid: locations per space must be >= 1");
  }
  check_config(grid.base);
}

namespace {

std::vector<GridEntry> run_cell(const GridConfig& grid, int spaces, int locations, int rep,
                                GridEntry& skipped, const GridObserver& observer) {
  GeneratorConfig cfg = grid.base;
  cfg.num_spaces = spaces;
  cfg.locations_per_space = locations;
  cfg.seed = replication_seed(grid.seed, spaces, locations, rep);

  const Instance inst = generate_instance(cfg);
  const TaskPool pool = build_tasks(inst, assign_customers(inst));

  GridEntry base;
  base.spaces = spaces;
  base.locations = locations;
  base.replication = rep;
  base.seed = cfg.seed;
  base.tasks = static_cast<int>(pool.size());
  if (pool.empty()) {
    skipped = base;
    return {};
  }

  std::vector<GridEntry> out;
  for (Solver solver : grid.solvers) {
    const std::size_t first = out.size();
    for (AdjustmentPolicy policy : grid.policies) {
      const Problem problem(inst, pool, policy, inst.fleet.max_lockers);
      const SolveResult r = solve(problem, {solver, policy, grid.budget, solver_seed(cfg.seed, solver)});
      GridEntry e = base;
      e.solver = solver;
      e.policy = policy;
      e.lockers = r.evaluation.plan.lockers_dispatched;
      e.distance_km = r.evaluation.plan.total_distance;
      e.average_delay = compute_delay(r.evaluation.plan).average;
      e.reward = r.best.reward;
      e.improvement_rate = improvement_rate(r.history);
      if (observer) {
        std::exception_ptr error;
#pragma omp critical(mplq_grid_observer)
        try {
          observer(e, problem, r);
        } catch (...) {
          error = std::current_exception();
        }
        if (error) std::rethrow_exception(error);
      }
      out.push_back(e);
    }
    const GridEntry* btd = nullptr;
    const GridEntry* hcps = nullptr;
    for (std::size_t k = first; k < out.size(); ++k) {
      (out[k].policy == AdjustmentPolicy::btd ? btd : hcps) = &out[k];
    }
    if (btd && hcps) {
      const double gap = reward_gap(btd->reward, hcps->reward);
      for (std::size_t k = first; k < out.size(); ++k) out[k].reward_gap = gap;
    }
  }
  return out;
}

}  // namespace

std::vector<GridAggregate> aggregate(const std::vector<GridEntry>& entries) {
  using Key = std::tuple<int, int, int, int>;  // spaces, locations, solver, policy
  std::map<Key, std::vector<const GridEntry*>> groups;
  auto key = [](int spaces, int locations, const GridEntry& e) {
    return Key{spaces, locations, static_cast<int>(e.solver), static_cast<int>(e.policy)};
  };
  for (const auto& e : entries) {
    groups[key(e.spaces, e.locations, e)].push_back(&e);
    groups[key(e.spaces, 0, e)].push_back(&e);
  }

  std::vector<GridAggregate> out;
  for (const auto& [k, members] : groups) {
    GridAggregate a;
    a.spaces = std::get<0>(k);
    a.locations = std::get<1>(k);
    a.solver = static_cast<Solver>(std::get<2>(k));
    a.policy = static_cast<AdjustmentPolicy>(std::get<3>(k));
    a.count = static_cast<int>(members.size());
    std::vector<double> lockers, dist, delay, reward, rate, gap;
    bool all_gaps = true;
    for (const auto* e : members) {
      lockers.push_back(e->lockers);
      dist.push_back(e->distance_km);
      delay.push_back(e->average_delay);
      reward.push_back(e->reward);
      rate.push_back(e->improvement_rate);
      if (e->reward_gap) {
        gap.push_back(*e->reward_gap);
      } else {
        all_gaps = false;
      }
    }
    a.mean_lockers = mean(lockers);
    a.lockers = static_cast<int>(std::ceil(a.mean_lockers - 1e-9));
    a.distance_km = mean(dist);
    a.average_delay = mean(delay);
    a.reward = mean(reward);
    a.improvement_rate = mean(rate);
    if (all_gaps) a.reward_gap = mean(gap);
    out.push_back(a);
  }
  // Per-cell rows first, then per-row means (locations == 0).
  std::stable_partition(out.begin(), out.end(),
                        [](const GridAggregate& a) { return a.locations != 0; });
  return out;
}

GridResult run_grid(const GridConfig& grid, const GridObserver& observer) {
  check_config(grid);
  struct Job {
    int spaces, locations, rep;
  };
  std::vector<Job> jobs;
  for (int s : grid.space_counts) {
    for (int l : grid.locations_per_space) {
      for (int r = 0; r < grid.replications; ++r) jobs.push_back({s, l, r});
    }
  }

  std::vector<std::vector<GridEntry>> per_job(jobs.size());
  std::vector<std::optional<GridEntry>> skipped(jobs.size());
  parallel_jobs(jobs.size(), [&](std::size_t i) {
    GridEntry skip;
    per_job[i] = run_cell(grid, jobs[i].spaces, jobs[i].locations, jobs[i].rep, skip, observer);
    if (per_job[i].empty()) skipped[i] = skip;
  });

  GridResult result;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    for (auto& e : per_job[i]) result.entries.push_back(std::move(e));
    if (skipped[i]) result.skipped.push_back(*skipped[i]);
  }
  result.aggregates = aggregate(result.entries);
  return result;
}

std::string to_string(Factor factor) {
  switch (factor) {
    case Factor::customer_span: return "ts";
    case Factor::parking_span: return "tp";
    case Factor::capacity: return "q";
    case Factor::speed: return "vl";
    case Factor::spaces: return "spaces";
    case Factor::locations: return "locations";
    case Factor::service_radius: return "rho_l";
    case Factor::walk_range: return "rho_c";
  }
  return "?";
}

Factor parse_factor(const std::string& text) {
  for (Factor f : {Factor::customer_span, Factor::parking_span, Factor::capacity, Factor::speed,
                   Factor::spaces, Factor::locations, Factor::service_radius, Factor::walk_range}) {
    if (to_string(f) == text) return f;
  }
  throw ConfigError("unknown sweep factor '" + text +
                    "' (expected ts, tp, q, vl, spaces, locations, rho_l or rho_c)");
}

void apply_factor(GeneratorConfig& config, Factor factor, double value) {
  auto count = [&](const char* what) {
    const auto v = std::llround(value);
    if (v < 1 || std::abs(value - static_cast<double>(v)) > 1e-9) {
      throw ConfigError(std::string("sweep: ") + what + " must be a positive integer");
    }
    return static_cast<int>(v);
  };
  auto span = [&](const char* what) {
    if (!(value - 20.0 > 0.0)) {
      throw ConfigError(std::string("sweep: ") + what + " must exceed 20 minutes");
    }
    return Range<double>{value - 20.0, value + 20.0};
  };
  switch (factor) {
    case Factor::customer_span: config.customer_span = span("ts"); break;
    case Factor::parking_span: config.parking_span = span("tp"); break;
    case Factor::capacity: config.fleet.capacity = count("q"); break;
    case Factor::speed:
      if (!(value > 0.0)) throw ConfigError("sweep: vl must be > 0");
      config.fleet.speed = value;
      break;
    case Factor::spaces: config.num_spaces = count("spaces"); break;
    case Factor::locations: config.locations_per_space = count("locations"); break;
    case Factor::service_radius:
      if (!(value > 0.0)) throw ConfigError("sweep: rho_l must be > 0");
      config.service_radius = value;
      break;
    case Factor::walk_range:
      if (!(value > 0.0)) throw ConfigError("sweep: rho_c must be > 0");
      config.walk_range = {std::min(config.walk_range.min, value), value};
      break;
  }
}

void check_config(const SweepConfig& sweep) {
  if (sweep.axes.empty()) throw ConfigError("sweep: at least one axis is required");
  for (const auto& axis : sweep.axes) {
    if (axis.values.empty()) throw ConfigError("sweep: axis " + to_string(axis.factor) + " is empty");
    GeneratorConfig probe = sweep.base;
    for (double v : axis.values) apply_factor(probe, axis.factor, v);
  }
  if (sweep.replications < 1) throw ConfigError("sweep: replications must be >= 1");
  if (sweep.budget.agents < 1 || sweep.budget.iterations < 1) {
    throw ConfigError("sweep: budget needs >= 1 agent and >= 1 iteration");
  }
  check_config(sweep.base);
}

SweepResult sweep_factor(const SweepConfig& sweep) {
  check_config(sweep);

  // Cartesian product of the axes, first axis varying slowest.
  std::vector<std::vector<double>> points{{}};
  for (const auto& axis : sweep.axes) {
    std::vector<std::vector<double>> next;
    for (const auto& p : points) {
      for (double v : axis.values) {
        auto q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }

  const auto reps = static_cast<std::size_t>(sweep.replications);
  std::vector<std::optional<double>> delays(points.size() * reps);
  parallel_jobs(delays.size(), [&](std::size_t job) {
    const std::size_t point = job / reps;
    const int rep = static_cast<int>(job % reps);
    GeneratorConfig cfg = sweep.base;
    for (std::size_t a = 0; a < sweep.axes.size(); ++a) {
      apply_factor(cfg, sweep.axes[a].factor, points[point][a]);
    }
    // Common random numbers: replication r uses the same seed at every point.
    cfg.seed = replication_seed(sweep.seed, 0, 0, rep);
    const Instance inst = generate_instance(cfg);
    const TaskPool pool = build_tasks(inst, assign_customers(inst));
    if (pool.empty()) return;
    const Problem problem(inst, pool, sweep.policy, inst.fleet.max_lockers);
    const SolveResult r = solve(problem, {Solver::hqm, sweep.policy, sweep.budget,
                                          solver_seed(cfg.seed, Solver::hqm)});
    delays[job] = compute_delay(r.evaluation.plan).average;
  });

  SweepResult result;
  for (const auto& axis : sweep.axes) result.factors.push_back(axis.factor);
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::vector<double> d;
    for (std::size_t r = 0; r < reps; ++r) {
      if (delays[p * reps + r]) d.push_back(*delays[p * reps + r]);
    }
    SweepRow row;
    row.values = points[p];
    row.count = static_cast<int>(d.size());
    row.mean_delay = d.empty() ? std::nan("") : mean(d);
    if (d.size() > 1) {
      double ss = 0.0;
      for (double x : d) ss += (x - row.mean_delay) * (x - row.mean_delay);
      row.stderr_delay = std::sqrt(ss / static_cast<double>(d.size() - 1)) /
                         std::sqrt(static_cast<double>(d.size()));
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

namespace {

constexpr const char* kGridHeader =
    "row_type,spaces,locations,replication,seed,solver,policy,tasks,count,lockers,mean_lockers,"
    "distance_km,average_delay,reward,improvement_rate,reward_gap";

std::string opt(const std::optional<double>& v) { return v ? csv::format(*v) : ""; }

std::optional<double> opt_from(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return csv::to_double(s);
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("not a seed: '" + s + "'");
  return v;
}

void entry_row(std::ostringstream& os, const char* type, const GridEntry& e, bool solved) {
  using csv::format;
  os << type << ',' << e.spaces << ',' << e.locations << ',' << e.replication << ',' << e.seed
     << ',';
  if (solved) {
    os << to_string(e.solver) << ',' << to_string(e.policy) << ',' << e.tasks << ",1,"
       << e.lockers << ',' << format(e.lockers) << ',' << format(e.distance_km) << ','
       << format(e.average_delay) << ',' << format(e.reward) << ','
       << format(e.improvement_rate) << ',' << opt(e.reward_gap);
  } else {
    os << ",," << e.tasks << ",0,,,,,,,";
  }
  os << '\n';
}

}  // namespace

std::string grid_csv(const GridResult& result) {
  using csv::format;
  std::ostringstream os;
  os << kGridHeader << '\n';
  for (const auto& e : result.entries) entry_row(os, "entry", e, true);
  for (const auto& e : result.skipped) entry_row(os, "skipped", e, false);
  for (const auto& a : result.aggregates) {
    os << (a.locations == 0 ? "row_mean" : "cell_mean") << ',' << a.spaces << ',' << a.locations
       << ",,," << to_string(a.solver) << ',' << to_string(a.policy) << ",," << a.count << ','
       << a.lockers << ',' << format(a.mean_lockers) << ',' << format(a.distance_km) << ','
       << format(a.average_delay) << ',' << format(a.reward) << ','
       << format(a.improvement_rate) << ',' << opt(a.reward_gap) << '\n';
  }
  return os.str();
}

GridResult grid_from_csv(const std::string& text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows[0].size() != 16) throw ParseError("grid csv: unexpected header");
  GridResult result;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 16) throw ParseError("grid csv: row " + std::to_string(i) + " has wrong width");
    if (r[0] == "entry" || r[0] == "skipped") {
      GridEntry e;
      e.spaces = csv::to_int(r[1]);
      e.locations = csv::to_int(r[2]);
      e.replication = csv::to_int(r[3]);
      e.seed = to_u64(r[4]);
      e.tasks = csv::to_int(r[7]);
      if (r[0] == "skipped") {
        result.skipped.push_back(e);
        continue;
      }
      e.solver = parse_solver(r[5]);
      e.policy = parse_policy(r[6]);
      e.lockers = csv::to_int(r[9]);
      e.distance_km = csv::to_double(r[11]);
      e.average_delay = csv::to_double(r[12]);
      e.reward = csv::to_double(r[13]);
      e.improvement_rate = csv::to_double(r[14]);
      e.reward_gap = opt_from(r[15]);
      result.entries.push_back(e);
    } else if (r[0] == "cell_mean" || r[0] == "row_mean") {
      GridAggregate a;
      a.spaces = csv::to_int(r[1]);
      a.locations = csv::to_int(r[2]);
      a.solver = parse_solver(r[5]);
      a.policy = parse_policy(r[6]);
      a.count = csv::to_int(r[8]);
      a.lockers = csv::to_int(r[9]);
      a.mean_lockers = csv::to_double(r[10]);
      a.distance_km = csv::to_double(r[11]);
      a.average_delay = csv::to_double(r[12]);
      a.reward = csv::to_double(r[13]);
      a.improvement_rate = csv::to_double(r[14]);
      a.reward_gap = opt_from(r[15]);
      result.aggregates.push_back(a);
    } else {
      throw ParseError("grid csv: unknown row type '" + r[0] + "'");
    }
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream os;
  for (Factor f : result.factors) os << to_string(f) << ',';
  os << "count,mean_delay,stderr_delay\n";
  for (const auto& row : result.rows) {
    for (double v : row.values) os << csv::format(v) << ',';
    os << row.count << ',' << csv::format(row.mean_delay) << ',' << csv::format(row.stderr_delay)
       << '\n';
  }
  return os.str();
}

SweepResult sweep_from_csv(const std::string& text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows[0].size() < 4) throw ParseError("sweep csv: unexpected header");
  SweepResult result;
  const std::size_t axes = rows[0].size() - 3;
  for (std::size_t a = 0; a < axes; ++a) result.factors.push_back(parse_factor(rows[0][a]));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != axes + 3) throw ParseError("sweep csv: row " + std::to_string(i) + " has wrong width");
    SweepRow row;
    for (std::size_t a = 0; a < axes; ++a) row.values.push_back(csv::to_double(r[a]));
    row.count = csv::to_int(r[axes]);
    row.mean_delay = csv::to_double(r[axes + 1]);
    row.stderr_delay = csv::to_double(r[axes + 2]);
    result.rows.push_back(std::move(row));
  }
  return result;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << body;
}

}  // namespace

std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir,
                                                   const GridResult& result) {
  std::filesystem::create_directories(dir);
  struct Metric {
    const char* name;
    double (*get)(const GridAggregate&);
  };
  const Metric metrics[] = {
      {"lockers", [](const GridAggregate& a) { return static_cast<double>(a.lockers); }},
      {"distance_km", [](const GridAggregate& a) { return a.distance_km; }},
      {"average_delay", [](const GridAggregate& a) { return a.average_delay; }},
      {"reward", [](const GridAggregate& a) { return a.reward; }},
      {"improvement_rate", [](const GridAggregate& a) { return a.improvement_rate; }},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& m : metrics) {
    std::ostringstream os;
    os << "x,y,series\n";
    for (const auto& a : result.aggregates) {
      if (a.locations == 0) continue;
      os << a.locations << ',' << csv::format(m.get(a)) << ',' << to_string(a.solver) << '-'
         << to_string(a.policy) << "-s" << a.spaces << '\n';
    }
    const auto path = dir / (std::string(m.name) + ".csv");
    write_file(path, os.str());
    written.push_back(path);
  }
  return written;
}

std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir,
                                                   const SweepResult& result) {
  std::filesystem::create_directories(dir);
  std::string name = "delay";
  for (Factor f : result.factors) name += "_" + to_string(f);
  std::ostringstream os;
  os << "x,y,series\n";
  for (const auto& row : result.rows) {
    std::string series;
    for (std::size_t a = 1; a < row.values.size(); ++a) {
      if (!series.empty()) series += ';';
      series += to_string(result.factors[a]) + "=" + csv::format(row.values[a]);
    }
    os << csv::format(row.values.front()) << ',' << csv::format(row.mean_delay) << ','
       << (series.empty() ? "mean_delay" : series) << '\n';
  }
  const auto path = dir / (name + ".csv");
  write_file(path, os.str());
  return {path};
}

}  // namespace mplq
