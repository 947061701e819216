#include "mplq/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "mplq/bench.hpp"
#include "mplq/csv.hpp"
#include "mplq/errors.hpp"
#include "mplq/ga.hpp"
#include "mplq/hqm.hpp"
#include "mplq/instance.hpp"
#include "mplq/kernels.hpp"
#include "mplq/oracle.hpp"
#include "mplq/routing.hpp"
#include "mplq/taskgen.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace mplq {

namespace {

// Failure that maps to exit code 1 after its message has been printed.
struct Refusal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  std::string out_dir = ".";

  std::string instance;
  std::string solution;
  std::string out_file;
  std::string solver = "hqm";
  std::string policy = "hcps";
  std::string budget = "desk";
  std::optional<int> agents;
  std::optional<int> iters;
  std::optional<int> lockers;
  std::optional<double> epsilon;
  double alpha0 = 0.9;
  double gamma = 0.9;
  double tol = 1e-8;
  double noise = 0.0;
  std::uint64_t limit = OracleLimit{}.max_enumerations;

  // generate
  int spaces = 5;
  int locations = 5;
  std::optional<double> radius;
  std::optional<int> capacity;
  std::optional<double> speed;

  // bench / sweep
  std::vector<int> space_counts;
  std::vector<int> location_counts;
  std::vector<std::string> solvers;
  std::vector<std::string> policies;
  std::vector<std::string> factors;
  int reps = 1;
};

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("MPLQ_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("MPLQ_SEED is not an unsigned integer: '") + env + "'");
  }
  return 1;
}

using Config = std::vector<std::pair<std::string, std::string>>;

std::string fmt(double v) { return csv::format(v); }

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << body;
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string config_text(const Config& c) {
  std::string s = csv::header_line(c);
  return s.substr(2, s.size() - 3);  // drop "# " and newline
}

void print_summary(std::ostream& out, const Config& c) {
  std::string line = "summary";
  for (const auto& [k, v] : c) line += " " + k + "=" + v;
  out << line << '\n';
}

Instance load(const std::string& path, std::ostream& err) {
  auto loaded = load_instance(path);
  for (const auto& w : loaded.warnings) err << "warning: " << w << '\n';
  return std::move(loaded.instance);
}

struct Prepared {
  Instance instance;
  TaskPool pool;
};

Prepared prepare(const Options& o, std::ostream& err) {
  Prepared p{load(o.instance, err), {}};
  const auto violations = validate_instance(p.instance);
  if (!violations.empty()) {
    for (const auto& v : violations) err << "invalid instance: " << v.entity << ": " << v.rule << '\n';
    throw ParseError("instance failed validation");
  }
  p.pool = build_tasks(p.instance, assign_customers(p.instance));
  for (int c : p.pool.unservable) err << "note: customer " << c << " cannot be served\n";
  return p;
}

int locker_count(const Options& o, const Instance& inst) {
  const int m = o.lockers.value_or(inst.fleet.max_lockers);
  if (m < 1) throw ConfigError("--lockers must be >= 1");
  return m;
}

void print_report(std::ostream& out, const FeasibilityReport& report) {
  for (const auto& i : report.issues) {
    out << "violation constraint=" << to_string(i.constraint) << ' ' << (i.hard ? "hard" : "soft") << ' '
        << i.entity << ": " << i.description;
    if (!i.hard) out << " lateness=" << fmt(i.lateness);
    out << '\n';
  }
  out << "feasibility hard=" << (report.has_hard() ? "violated" : "ok")
      << " soft_lateness=" << fmt(report.soft_lateness()) << '\n';
}

json solution_json(const SearchState& s, AdjustmentPolicy policy, int lockers) {
  return json{{"x1", s.x1}, {"x2", s.x2}, {"reward", s.reward}, {"policy", to_string(policy)},
              {"lockers", lockers}};
}

int cmd_generate(const Options& o, std::ostream& out) {
  GeneratorConfig cfg;
  cfg.num_spaces = o.spaces;
  cfg.locations_per_space = o.locations;
  cfg.seed = resolve_seed(o);
  if (o.radius) cfg.service_radius = *o.radius;
  if (o.capacity) cfg.fleet.capacity = *o.capacity;
  if (o.speed) cfg.fleet.speed = *o.speed;
  if (o.lockers) cfg.fleet.max_lockers = *o.lockers;
  check_config(cfg);
  const Instance inst = generate_instance(cfg);

  const Config c{{"command", "generate"},
                 {"seed", std::to_string(cfg.seed)},
                 {"spaces", std::to_string(cfg.num_spaces)},
                 {"locations", std::to_string(cfg.locations_per_space)},
                 {"radius_km", fmt(cfg.service_radius)},
                 {"capacity", std::to_string(cfg.fleet.capacity)},
                 {"speed", fmt(cfg.fleet.speed)},
                 {"lockers", std::to_string(cfg.fleet.max_lockers)}};
  fs::path path = o.out_file.empty() ? fs::path(o.out_dir) / "instance.json" : fs::path(o.out_file);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_instance(inst, path, config_text(c));
  out << "wrote " << path.string() << '\n';
  Config s = c;
  s.emplace_back("customers", std::to_string(inst.customers.size()));
  s.emplace_back("file", path.string());
  print_summary(out, s);
  return 0;
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  const Prepared p = prepare(o, err);
  if (p.pool.empty()) throw Refusal("nothing to solve: the task pool is empty");
  const auto policy = parse_policy(o.policy);
  const auto solver = parse_solver(o.solver);
  const int lockers = locker_count(o, p.instance);
  const std::uint64_t seed = resolve_seed(o);
  RoutingOptions routing;
  routing.noise = o.noise;
  routing.noise_seed = seed;
  const Problem problem(p.instance, p.pool, policy, lockers, routing);

  const int agents = o.agents.value_or(100);
  const int iters = o.iters.value_or(1000);
  SolveResult r;
  if (solver == Solver::hqm) {
    HqmParams hp;
    hp.agents = agents;
    hp.timesteps = iters;
    hp.alpha0 = o.alpha0;
    hp.gamma = o.gamma;
    hp.tol = o.tol;
    hp.seed = seed;
    hp.epsilon = o.epsilon;
    r = run_hqm(problem, hp);
  } else {
    GaParams gp;
    gp.population = agents;
    gp.generations = iters;
    gp.seed = seed;
    r = run_ga(problem, gp);
  }

  const Config c{{"command", "solve"},
                 {"instance", o.instance},
                 {"solver", to_string(solver)},
                 {"policy", to_string(policy)},
                 {"agents", std::to_string(agents)},
                 {"iters", std::to_string(iters)},
                 {"lockers", std::to_string(lockers)},
                 {"alpha0", fmt(o.alpha0)},
                 {"gamma", fmt(o.gamma)},
                 {"tol", fmt(o.tol)},
                 {"epsilon", o.epsilon ? fmt(*o.epsilon) : "random"},
                 {"noise", fmt(o.noise)},
                 {"seed", std::to_string(seed)}};
  const std::string header = csv::header_line(c);
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  write_text(dir / "plan.csv", header + route_plan_csv(r.evaluation.plan));
  write_text(dir / "history.csv", header + history_csv(r.history));
  write_text(dir / "tasks.csv", header + taskpool_csv(p.pool));
  json sol = solution_json(r.best, policy, lockers);
  sol["config"] = config_text(c);
  write_text(dir / "solution.json", sol.dump(1) + "\n");

  const auto report = check_feasibility(r.evaluation.plan, r.best, p.pool, p.instance);
  print_report(out, report);

  const auto& plan = r.evaluation.plan;
  Config s = c;
  s.emplace_back("tasks", std::to_string(p.pool.size()));
  s.emplace_back("reward", fmt(r.best.reward));
  s.emplace_back("objective", fmt(r.evaluation.cost.objective));
  s.emplace_back("lockers_dispatched", std::to_string(plan.lockers_dispatched));
  s.emplace_back("distance_km", fmt(plan.total_distance));
  s.emplace_back("average_delay", fmt(compute_delay(plan).average));
  s.emplace_back("improvement_rate", r.history.initial > 0.0 ? fmt(improvement_rate(r.history)) : "nan");
  s.emplace_back("iterations_run", std::to_string(r.history.best_reward.size()));
  s.emplace_back("feasible", report.has_hard() ? "0" : "1");
  print_summary(out, s);
  return report.has_hard() ? 1 : 0;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.solution.empty()) {
    const Instance inst = load(o.instance, err);
    const auto violations = validate_instance(inst);
    for (const auto& v : violations) out << "invalid " << v.entity << ": " << v.rule << '\n';
    print_summary(out, {{"command", "validate"},
                        {"instance", o.instance},
                        {"seed", std::to_string(resolve_seed(o))},
                        {"violations", std::to_string(violations.size())}});
    return violations.empty() ? 0 : 1;
  }

  const Prepared p = prepare(o, err);
  json doc;
  try {
    doc = json::parse(read_text(o.solution));
  } catch (const json::parse_error& e) {
    throw ParseError("solution file: " + std::string(e.what()));
  }
  SearchState state;
  try {
    state.x1 = doc.at("x1").get<std::vector<int>>();
    state.x2 = doc.at("x2").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw ParseError("solution file: expected integer arrays 'x1' and 'x2' (" +
                     std::string(e.what()) + ")");
  }
  AdjustmentPolicy policy = parse_policy(o.policy);
  if (doc.contains("policy") && doc["policy"].is_string()) {
    policy = parse_policy(doc["policy"].get<std::string>());
  }
  Options with_lockers = o;
  if (!o.lockers && doc.contains("lockers") && doc["lockers"].is_number_integer()) {
    with_lockers.lockers = doc["lockers"].get<int>();
  }
  const int lockers = locker_count(with_lockers, p.instance);
  check_shape(state, p.pool.size(), lockers);
  const Problem problem(p.instance, p.pool, policy, lockers);
  const Evaluation ev = evaluate_solution(state, problem);
  const auto report = check_feasibility(ev.plan, state, p.pool, p.instance);
  print_report(out, report);
  print_summary(out, {{"command", "validate"},
                      {"instance", o.instance},
                      {"solution", o.solution},
                      {"policy", to_string(policy)},
                      {"lockers", std::to_string(lockers)},
                      {"seed", std::to_string(resolve_seed(o))},
                      {"reward", fmt(ev.cost.reward)},
                      {"feasible", report.has_hard() ? "0" : "1"}});
  return report.has_hard() ? 1 : 0;
}

int cmd_oracle(const Options& o, std::ostream& out, std::ostream& err) {
  const Prepared p = prepare(o, err);
  if (p.pool.empty()) throw Refusal("nothing to solve: the task pool is empty");
  const auto policy = parse_policy(o.policy);
  const int lockers = locker_count(o, p.instance);
  const Problem problem(p.instance, p.pool, policy, lockers);
  Config c{{"command", "oracle"},
           {"instance", o.instance},
           {"policy", to_string(policy)},
           {"lockers", std::to_string(lockers)},
           {"limit", std::to_string(o.limit)},
           {"seed", std::to_string(resolve_seed(o))}};
  try {
    const OracleResult r = brute_force_best(problem, {o.limit});
    const Evaluation ev = evaluate_solution(r.best, problem);
    json sol = solution_json(r.best, policy, lockers);
    out << "optimum " << sol.dump() << '\n';
    c.emplace_back("enumerated", std::to_string(r.enumerated));
    c.emplace_back("reward", fmt(r.best.reward));
    c.emplace_back("objective", fmt(ev.cost.objective));
    print_summary(out, c);
    return 0;
  } catch (const OracleRefused& e) {
    std::ostringstream count;
    count.precision(6);
    count << e.cardinality();
    out << "refused: " << count.str() << " states exceed the limit of " << e.limit() << '\n';
    c.emplace_back("states", count.str());
    c.emplace_back("refused", "1");
    print_summary(out, c);
    return 1;
  }
}

Budget resolve_budget(const Options& o) {
  Budget b = parse_budget(o.budget);
  if (o.agents) b.agents = *o.agents;
  if (o.iters) b.iterations = *o.iters;
  return b;
}

int cmd_bench(const Options& o, std::ostream& out) {
  GridConfig g;
  if (!o.space_counts.empty()) g.space_counts = o.space_counts;
  if (!o.location_counts.empty()) g.locations_per_space = o.location_counts;
  if (!o.solvers.empty()) {
    g.solvers.clear();
    for (const auto& s : o.solvers) g.solvers.push_back(parse_solver(s));
  }
  if (!o.policies.empty()) {
    g.policies.clear();
    for (const auto& s : o.policies) g.policies.push_back(parse_policy(s));
  }
  g.replications = o.reps;
  g.seed = resolve_seed(o);
  g.budget = resolve_budget(o);
  if (o.lockers) g.base.fleet.max_lockers = *o.lockers;

  auto join = [](const auto& v, auto str) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ";") + std::string(str(x));
    return s;
  };
  const Config c{{"command", "bench"},
                 {"spaces", join(g.space_counts, [](int v) { return std::to_string(v); })},
                 {"locations", join(g.locations_per_space, [](int v) { return std::to_string(v); })},
                 {"solvers", join(g.solvers, [](Solver s) { return to_string(s); })},
                 {"policies", join(g.policies, [](AdjustmentPolicy p) { return to_string(p); })},
                 {"reps", std::to_string(g.replications)},
                 {"agents", std::to_string(g.budget.agents)},
                 {"iters", std::to_string(g.budget.iterations)},
                 {"lockers", std::to_string(g.base.fleet.max_lockers)},
                 {"jobs", std::to_string(o.jobs)},
                 {"seed", std::to_string(g.seed)}};
  const GridResult r = run_grid(g);
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  write_text(dir / "grid.csv", csv::header_line(c) + grid_csv(r));
  write_plot_data(dir / "plotdata", r);
  for (const auto& s : r.skipped) {
    out << "skipped spaces=" << s.spaces << " locations=" << s.locations
        << " replication=" << s.replication << ": empty task pool\n";
  }
  Config s = c;
  s.emplace_back("entries", std::to_string(r.entries.size()));
  s.emplace_back("skipped", std::to_string(r.skipped.size()));
  s.emplace_back("file", (dir / "grid.csv").string());
  print_summary(out, s);
  return 0;
}

SweepAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("--factor expects name=v1,v2,... got '" + text + "'");
  SweepAxis axis;
  axis.factor = parse_factor(text.substr(0, eq));
  std::stringstream values(text.substr(eq + 1));
  std::string item;
  while (std::getline(values, item, ',')) {
    try {
      axis.values.push_back(csv::to_double(item));
    } catch (const ParseError&) {
      throw ConfigError("--factor " + text + ": '" + item + "' is not a number");
    }
  }
  return axis;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  SweepConfig sw;
  for (const auto& f : o.factors) sw.axes.push_back(parse_axis(f));
  if (sw.axes.empty()) sw.axes.push_back({Factor::customer_span, {30, 50, 70}});
  sw.replications = o.reps;
  sw.seed = resolve_seed(o);
  sw.budget = resolve_budget(o);
  sw.policy = parse_policy(o.policy);
  if (o.lockers) sw.base.fleet.max_lockers = *o.lockers;

  std::string axes;
  for (const auto& a : sw.axes) {
    std::string v;
    for (double x : a.values) v += (v.empty() ? "" : ";") + fmt(x);
    axes += (axes.empty() ? "" : "|") + to_string(a.factor) + ":" + v;
  }
  const Config c{{"command", "sweep"},
                 {"axes", axes},
                 {"policy", to_string(sw.policy)},
                 {"reps", std::to_string(sw.replications)},
                 {"agents", std::to_string(sw.budget.agents)},
                 {"iters", std::to_string(sw.budget.iterations)},
                 {"lockers", std::to_string(sw.base.fleet.max_lockers)},
                 {"jobs", std::to_string(o.jobs)},
                 {"seed", std::to_string(sw.seed)}};
  const SweepResult r = sweep_factor(sw);
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  write_text(dir / "sweep.csv", csv::header_line(c) + sweep_csv(r));
  write_plot_data(dir / "plotdata", r);
  Config s = c;
  s.emplace_back("rows", std::to_string(r.rows.size()));
  s.emplace_back("file", (dir / "sweep.csv").string());
  print_summary(out, s);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mobile parcel locker planning: instances, solvers, validation and benchmarks"};
  app.require_subcommand(1, 1);
  Options o;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "random seed (falls back to MPLQ_SEED, then 1)");
    cmd->add_option("--jobs", o.jobs, "worker threads, 0 = runtime default")->check(CLI::NonNegativeNumber);
    cmd->add_option("--out-dir", o.out_dir, "output directory");
  };
  auto solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--agents", o.agents, "HQM agents / GA population")->check(CLI::PositiveNumber);
    cmd->add_option("--iters", o.iters, "HQM timesteps / GA generations")->check(CLI::PositiveNumber);
  };
  auto policy_flag = [&](CLI::App* cmd) {
    cmd->add_option("--policy", o.policy, "early-arrival adjustment")
        ->check(CLI::IsMember({"btd", "hcps"}));
  };
  auto lockers_flag = [&](CLI::App* cmd) {
    cmd->add_option("--lockers", o.lockers, "number of lockers available (default: instance fleet)")
        ->check(CLI::PositiveNumber);
  };

  auto* gen = app.add_subcommand("generate", "write a random instance file");
  common(gen);
  gen->add_option("--spaces", o.spaces, "parking spaces")->check(CLI::PositiveNumber);
  gen->add_option("--locations", o.locations, "customer locations per space")->check(CLI::PositiveNumber);
  gen->add_option("--radius", o.radius, "service radius around the depot, km");
  gen->add_option("--capacity", o.capacity, "locker capacity (parcels)");
  gen->add_option("--speed", o.speed, "locker speed, km/min");
  gen->add_option("--out", o.out_file, "instance file (default <out-dir>/instance.json)");
  lockers_flag(gen);

  auto* solve_cmd = app.add_subcommand("solve", "solve an instance with HQM or GA");
  common(solve_cmd);
  solve_cmd->add_option("--instance", o.instance, "instance file")->required();
  solve_cmd->add_option("--solver", o.solver, "search method")->check(CLI::IsMember({"hqm", "ga"}));
  policy_flag(solve_cmd);
  solver_flags(solve_cmd);
  lockers_flag(solve_cmd);
  solve_cmd->add_option("--alpha0", o.alpha0, "initial learning rate");
  solve_cmd->add_option("--gamma", o.gamma, "discount factor");
  solve_cmd->add_option("--tol", o.tol, "Q-matrix convergence tolerance");
  solve_cmd->add_option("--epsilon", o.epsilon, "fixed greedy factor (default: drawn per choice)");
  solve_cmd->add_option("--noise", o.noise, "driving-time noise amplitude (0 = deterministic)");

  auto* val = app.add_subcommand("validate", "check an instance, or a solution against it");
  common(val);
  val->add_option("--instance", o.instance, "instance file")->required();
  val->add_option("--solution", o.solution, "solution JSON with x1 and x2");
  policy_flag(val);
  lockers_flag(val);

  auto* orc = app.add_subcommand("oracle", "exhaustive optimum for small instances");
  common(orc);
  orc->add_option("--instance", o.instance, "instance file")->required();
  orc->add_option("--limit", o.limit, "maximum number of states to enumerate");
  policy_flag(orc);
  lockers_flag(orc);

  auto* bench = app.add_subcommand("bench", "run the spaces x locations experiment grid");
  common(bench);
  bench->add_option("--spaces", o.space_counts, "parking-space counts")->delimiter(',');
  bench->add_option("--locations", o.location_counts, "locations per space")->delimiter(',');
  bench->add_option("--solver", o.solvers, "solvers to run")->delimiter(',');
  bench->add_option("--policy", o.policies, "policies to run")->delimiter(',');
  bench->add_option("--reps", o.reps, "replications per cell")->check(CLI::PositiveNumber);
  bench->add_option("--budget", o.budget, "search budget profile")
      ->check(CLI::IsMember({"desk", "full"}));
  solver_flags(bench);
  lockers_flag(bench);

  auto* sweep = app.add_subcommand("sweep", "delay against one or two generator factors");
  common(sweep);
  sweep->add_option("--factor", o.factors, "axis as name=v1,v2,... (repeat for a surface)");
  sweep->add_option("--reps", o.reps, "replications per point")->check(CLI::PositiveNumber);
  sweep->add_option("--budget", o.budget, "search budget profile")
      ->check(CLI::IsMember({"desk", "full"}));
  policy_flag(sweep);
  solver_flags(sweep);
  lockers_flag(sweep);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    set_worker_count(o.jobs);
    if (*gen) return cmd_generate(o, out);
    if (*solve_cmd) return cmd_solve(o, out, err);
    if (*val) return cmd_validate(o, out, err);
    if (*orc) return cmd_oracle(o, out, err);
    if (*bench) return cmd_bench(o, out);
    return cmd_sweep(o, out);
  } catch (const Refusal& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const NothingToSolveError& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace mplq
