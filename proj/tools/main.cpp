// Command-line front door: instance generation, single solves, lambda sweeps,
// mode comparisons, brute-force verification, disc refinement, evaluation.
//
// Exit codes: 0 success, 2 config error, 3 solver failure, 4 verification
// mismatch.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "uavtour/benders.hpp"
#include "uavtour/errors.hpp"
#include "uavtour/formulation.hpp"
#include "uavtour/io.hpp"
#include "uavtour/model.hpp"
#include "uavtour/tours.hpp"
#include "uavtour/trajopt.hpp"

namespace {

using namespace uavtour;

/// Either a path to an instance file or parameters for the built-in generator.
struct InstanceSpec {
  std::string path;
  int k = 0;
  double area_m = 1000.0;
  std::uint64_t seed = 1;
};

void add_instance_flags(CLI::App* cmd, InstanceSpec& spec) {
  cmd->add_option("--instance", spec.path, "Instance JSON file");
  cmd->add_option("--k", spec.k, "Sensor count for the built-in generator");
  cmd->add_option("--area", spec.area_m, "Square side length in metres (generator)")
      ->capture_default_str();
  cmd->add_option("--seed", spec.seed, "Generator RNG seed")->capture_default_str();
}

Instance resolve_instance(const InstanceSpec& spec) {
  if (!spec.path.empty()) return load_instance(spec.path);
  if (spec.k < 1)
    throw std::invalid_argument("provide --instance FILE or --k N for the generator");
  return gen_instance(spec.k, spec.area_m, spec.seed);
}

double parse_num(const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  if (pos != text.size()) throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Accepts "a:step:b" (inclusive grid) or a comma-separated list.
std::vector<double> parse_lambdas(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3)
      throw std::invalid_argument("--lambdas grid must be a:step:b, got '" + text + "'");
    return lambda_grid(parse_num(parts[0]), parse_num(parts[1]), parse_num(parts[2]));
  }
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    if (part.empty())
      throw std::invalid_argument("--lambdas has an empty entry: '" + text + "'");
    out.push_back(parse_num(part));
  }
  return out;
}

SolverChoice parse_solver(const std::string& name) {
  if (name == "benders") return SolverChoice::Benders;
  if (name == "monolithic") return SolverChoice::Monolithic;
  throw std::invalid_argument("--solver must be benders or monolithic, got '" + name + "'");
}

void check_format(const std::string& format) {
  if (format != "csv" && format != "json")
    throw std::invalid_argument("--format must be csv or json, got '" + format + "'");
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

/// lambda*(A-Amin)/(Amax-Amin) + (1-lambda)*(E-Emin)/(Emax-Emin), with a
/// degenerate span contributing zero (every tour then shares that value).
double scalarized_value(double avg_aoi_s, double energy_j, double lambda, const Extremes& ext) {
  const double da = ext.aoi_max - ext.aoi_min;
  const double de = ext.energy_max - ext.energy_min;
  double v = 0.0;
  if (da > 0.0) v += lambda * (avg_aoi_s - ext.aoi_min) / da;
  if (de > 0.0) v += (1.0 - lambda) * (energy_j - ext.energy_min) / de;
  return v;
}

ParetoPoint solve_point(const WeightMatrix& w, const Extremes& ext, double lambda,
                        SolverChoice solver, double tol, const std::string& trace_path) {
  if (solver == SolverChoice::Benders) {
    const BendersResult res = benders_solve(w, ext, lambda, tol);
    if (!trace_path.empty()) write_text_file(trace_path, trace_csv(res.trace));
    return res.point;
  }
  if (!trace_path.empty())
    std::cerr << "note: --trace applies to the benders solver only; ignored\n";
  return solve_scalarized_monolithic(w, ext, lambda);
}

/// The coverage constraint is stated over a squared distance but carries a
/// radius in metres; the artifact reads it as distance <= d_th. Printed once
/// by every command that refines, so the interpretation is never silent.
void print_coverage_note() {
  std::cerr << "note: coverage constraint interpreted as distance(q, sensor) <= d_th"
               " with d_th in metres\n";
}

/// Refined counterpart of a solved point, same row schema (solver "refined").
ParetoPoint refined_point(const ParetoPoint& base, const RefinedTour& refined,
                          double runtime_ms) {
  ParetoPoint rp;
  rp.lambda = base.lambda;
  rp.avg_aoi_s = refined.avg_aoi_s;
  rp.energy_j = refined.energy_j;
  rp.tour = base.tour;
  rp.solver = "refined";
  rp.iterations = 0;
  rp.runtime_ms = runtime_ms;
  return rp;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  int k = 10;
  double area_m = 1000.0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  emit(instance_to_json(gen_instance(a.k, a.area_m, a.seed)), a.out);
  return 0;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  InstanceSpec spec;
  double lambda = 0.5;
  std::string solver = "benders";
  double tol = 1e-6;
  bool refine = false;
  std::string out;          ///< tour JSON
  std::string trace;        ///< benders trace CSV
  std::string refined_out;  ///< refined trajectory JSON
  std::string format = "csv";
};

int cmd_solve(const SolveArgs& a) {
  check_format(a.format);
  const Instance inst = resolve_instance(a.spec);
  const WeightMatrix w = build_edge_weights(inst);
  const Extremes ext = compute_extremes(w);
  std::vector<ParetoPoint> rows;
  rows.push_back(solve_point(w, ext, a.lambda, parse_solver(a.solver), a.tol, a.trace));
  if (!a.out.empty()) save_tour(rows.front().tour, a.out);
  if (a.refine || !a.refined_out.empty()) {
    print_coverage_note();
    const auto start = std::chrono::steady_clock::now();
    const RefinedTour refined = refine_tour(rows.front().tour, inst, a.lambda, ext);
    rows.push_back(refined_point(rows.front(), refined, elapsed_ms(start)));
    if (!a.refined_out.empty()) write_text_file(a.refined_out, refined_to_json(refined));
  }
  std::cout << (a.format == "json" ? sweep_json(rows) : sweep_csv(rows));
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  InstanceSpec spec;
  std::string lambdas = "0:0.01:1";
  std::string solver = "benders";
  double tol = 1e-6;
  int jobs = 1;
  bool keep_duplicates = false;
  bool refine = false;
  std::string out;
  std::string format = "csv";
};

int cmd_sweep(const SweepArgs& a) {
  check_format(a.format);
  const Instance inst = resolve_instance(a.spec);
  const std::vector<double> lambdas = parse_lambdas(a.lambdas);
  std::vector<ParetoPoint> rows = pareto_sweep(inst, lambdas, parse_solver(a.solver), a.tol,
                                               a.jobs, a.keep_duplicates);
  if (a.refine) {
    print_coverage_note();
    const WeightMatrix w = build_edge_weights(inst);
    const Extremes ext = compute_extremes(w);
    const std::size_t n_base = rows.size();
    std::map<MultiTour, std::pair<double, double>> cache;  // refined metrics per tour
    for (std::size_t i = 0; i < n_base; ++i) {
      const ParetoPoint& base = rows[i];
      const auto start = std::chrono::steady_clock::now();
      const MultiTour key = base.tour.canonical();
      auto it = cache.find(key);
      if (it == cache.end()) {
        const RefinedTour refined = refine_tour(base.tour, inst, base.lambda, ext);
        it = cache.emplace(key, std::make_pair(refined.avg_aoi_s, refined.energy_j)).first;
      }
      RefinedTour summary;
      summary.avg_aoi_s = it->second.first;
      summary.energy_j = it->second.second;
      rows.push_back(refined_point(base, summary, elapsed_ms(start)));
    }
  }
  emit(a.format == "json" ? sweep_json(rows) : sweep_csv(rows), a.out);
  return 0;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleArgs {
  InstanceSpec spec;  ///< --area/--seed double as batch-mode parameters
  int count = 20;
  int kmin = 4;
  int kmax = 7;
  std::string lambdas = "0:0.25:1";
  double tol = 1e-6;
};

int verify_against_oracle(const Instance& inst, const std::vector<double>& lambdas, double tol,
                          const std::string& label) {
  const WeightMatrix w = build_edge_weights(inst);
  const Extremes ext = compute_extremes(w);
  const OracleResult oracle = oracle_pareto(w);
  const Normalization norms = ext.norms();
  for (double lambda : lambdas) {
    const double best = oracle.scalarized_min(lambda, norms);
    const ParetoPoint mono = solve_scalarized_monolithic(w, ext, lambda);
    const ParetoPoint bend = benders_solve(w, ext, lambda, tol).point;
    const double mono_obj = scalarized_value(mono.avg_aoi_s, mono.energy_j, lambda, ext);
    const double bend_obj = scalarized_value(bend.avg_aoi_s, bend.energy_j, lambda, ext);
    const double slack = tol * (1.0 + std::abs(best));
    if (std::abs(mono_obj - best) > slack || std::abs(bend_obj - best) > slack) {
      std::cerr << "oracle mismatch on " << label << " at lambda=" << lambda
                << ": brute-force " << best << ", monolithic " << mono_obj << ", benders "
                << bend_obj << "\n";
      return 4;
    }
  }
  return 0;
}

int cmd_oracle(const OracleArgs& a) {
  const std::vector<double> lambdas = parse_lambdas(a.lambdas);
  if (!a.spec.path.empty() || a.spec.k >= 1) {
    const Instance inst = resolve_instance(a.spec);
    const int rc = verify_against_oracle(inst, lambdas, a.tol, "instance");
    if (rc == 0)
      std::cout << "oracle verified: 1 instance x " << lambdas.size() << " lambdas\n";
    return rc;
  }
  if (a.count < 1) throw std::invalid_argument("--count must be >= 1");
  if (a.kmax < 1 || a.kmax > 8)
    throw std::invalid_argument("--kmax must lie in [1, 8] (brute force bound)");
  if (a.kmin < 1 || a.kmin > a.kmax)
    throw std::invalid_argument("--kmin must lie in [1, kmax]");
  for (int i = 0; i < a.count; ++i) {
    const int k = a.kmin + i % (a.kmax - a.kmin + 1);
    const std::uint64_t seed = a.spec.seed + static_cast<std::uint64_t>(i);
    const Instance inst = gen_instance(k, a.spec.area_m, seed);
    std::ostringstream label;
    label << "k=" << k << " seed=" << seed;
    const int rc = verify_against_oracle(inst, lambdas, a.tol, label.str());
    if (rc != 0) return rc;
  }
  std::cout << "oracle verified: " << a.count << " instances x " << lambdas.size()
            << " lambdas\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::string ks = "6,8,10";
  double area_m = 1000.0;
  std::uint64_t seed = 1;
  double lambda = 0.5;
  std::string solver = "benders";
  double tol = 1e-6;
  std::string out;
  std::string format = "csv";
};

struct CompareRow {
  int k = 0;
  std::string mode;
  std::string protocol;
  double avg_aoi_s = 0.0;
  double energy_j = 0.0;
  int n_cycles = 0;
};

int cmd_compare(const CompareArgs& a) {
  check_format(a.format);
  print_coverage_note();
  const SolverChoice solver = parse_solver(a.solver);
  std::vector<int> ks;
  for (const auto& part : split(a.ks, ',')) {
    const double v = parse_num(part);
    if (v < 1.0 || v != std::floor(v))
      throw std::invalid_argument("--ks entries must be positive integers, got '" + part + "'");
    ks.push_back(static_cast<int>(v));
  }
  std::vector<CompareRow> out_rows;
  for (int k : ks) {
    const Instance inst = gen_instance(k, a.area_m, a.seed);
    const WeightMatrix w = build_edge_weights(inst);
    const Extremes ext = compute_extremes(w);
    std::vector<std::pair<std::string, MultiTour>> modes;
    modes.emplace_back("multi", solve_point(w, ext, a.lambda, solver, a.tol, "").tour);
    modes.emplace_back("hamiltonian", solve_hamiltonian(w).tour);
    modes.emplace_back("tsp", ext.tsp_tour);
    for (const auto& [mode, tour] : modes) {
      const TourMetrics fly = evaluate_tour(tour, w);
      const int n_cycles = static_cast<int>(tour.cycles.size());
      out_rows.push_back({k, mode, "flyhover", fly.avg_aoi_s, fly.energy_j, n_cycles});
      const RefinedTour refined = refine_tour(tour, inst, a.lambda, ext);
      out_rows.push_back({k, mode, "refined", refined.avg_aoi_s, refined.energy_j, n_cycles});
    }
  }
  if (a.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : out_rows)
      arr.push_back({{"k", r.k},
                     {"mode", r.mode},
                     {"protocol", r.protocol},
                     {"avg_aoi_s", r.avg_aoi_s},
                     {"energy_j", r.energy_j},
                     {"n_cycles", r.n_cycles}});
    emit(arr.dump(2) + "\n", a.out);
    return 0;
  }
  std::ostringstream os;
  os << "k,mode,protocol,avg_aoi_s,energy_j,n_cycles\n";
  os.precision(12);
  for (const auto& r : out_rows)
    os << r.k << ',' << r.mode << ',' << r.protocol << ',' << r.avg_aoi_s << ','
       << r.energy_j << ',' << r.n_cycles << '\n';
  emit(os.str(), a.out);
  return 0;
}

// ---------------------------------------------------------------------------
// refine

struct RefineArgs {
  InstanceSpec spec;
  std::string tour;  ///< tour JSON; solved fresh when absent
  double lambda = 0.5;
  std::string solver = "benders";
  double tol = 1e-6;
  double d_th = -1.0;
  std::string out;
};

int cmd_refine(const RefineArgs& a) {
  print_coverage_note();
  Instance inst = resolve_instance(a.spec);
  if (a.d_th > 0.0) {
    std::cerr << "note: overriding coverage radius to " << a.d_th << " m\n";
    inst.cover_radius_m = a.d_th;
  }
  const WeightMatrix w = build_edge_weights(inst);
  const Extremes ext = compute_extremes(w);
  const MultiTour tour = a.tour.empty()
                             ? solve_point(w, ext, a.lambda, parse_solver(a.solver), a.tol, "")
                                   .tour
                             : load_tour(a.tour);
  try {
    tour.validate(w.k);
  } catch (const StructuralError& e) {
    throw std::invalid_argument(e.what());
  }
  emit(refined_to_json(refine_tour(tour, inst, a.lambda, ext)), a.out);
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  InstanceSpec spec;
  std::string tour;
  std::string format = "csv";
};

int cmd_evaluate(const EvaluateArgs& a) {
  check_format(a.format);
  if (a.tour.empty()) throw std::invalid_argument("evaluate requires --tour FILE");
  const Instance inst = resolve_instance(a.spec);
  const WeightMatrix w = build_edge_weights(inst);
  const MultiTour tour = load_tour(a.tour);
  TourMetrics metrics;
  try {
    metrics = evaluate_tour(tour, w);
  } catch (const StructuralError& e) {
    throw std::invalid_argument(e.what());  // malformed input, not a solver failure
  }
  const int n_cycles = static_cast<int>(tour.cycles.size());
  if (a.format == "json") {
    const nlohmann::json j = {{"avg_aoi_s", metrics.avg_aoi_s},
                              {"energy_j", metrics.energy_j},
                              {"n_cycles", n_cycles}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << metrics_csv(metrics.avg_aoi_s, metrics.energy_j, n_cycles);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-return UAV data-collection tour planner"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate a random instance");
  gen->add_option("--k", gen_args.k, "Sensor count")->capture_default_str();
  gen->add_option("--area", gen_args.area_m, "Square side length in metres")
      ->capture_default_str();
  gen->add_option("--seed", gen_args.seed, "RNG seed")->capture_default_str();
  gen->add_option("--out", gen_args.out, "Output file (stdout when omitted)");

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "Solve one scalarised point");
  add_instance_flags(solve, solve_args.spec);
  solve->add_option("--lambda", solve_args.lambda, "Trade-off weight in [0,1]")
      ->capture_default_str();
  solve->add_option("--solver", solve_args.solver, "benders or monolithic")
      ->capture_default_str();
  solve->add_option("--tol", solve_args.tol, "Convergence tolerance")->capture_default_str();
  solve->add_flag("--refine", solve_args.refine, "Also report the disc-refined metrics row");
  solve->add_option("--out", solve_args.out, "Tour JSON output file");
  solve->add_option("--trace", solve_args.trace, "Decomposition trace CSV (benders only)");
  solve->add_option("--refined-out", solve_args.refined_out,
                    "Refined trajectory JSON output file");
  solve->add_option("--format", solve_args.format, "csv or json")->capture_default_str();

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep the lambda grid");
  add_instance_flags(sweep, sweep_args.spec);
  sweep->add_option("--lambdas", sweep_args.lambdas, "Grid a:step:b or comma list")
      ->capture_default_str();
  sweep->add_option("--solver", sweep_args.solver, "benders or monolithic")
      ->capture_default_str();
  sweep->add_option("--tol", sweep_args.tol, "Convergence tolerance")->capture_default_str();
  sweep->add_option("--jobs", sweep_args.jobs, "Parallel solves")->capture_default_str();
  sweep->add_flag("--keep-duplicates", sweep_args.keep_duplicates,
                  "Keep rows whose tour already appeared at a smaller lambda");
  sweep->add_flag("--refine", sweep_args.refine,
                  "Append disc-refined rows (solver column 'refined')");
  sweep->add_option("--out", sweep_args.out, "Output file (stdout when omitted)");
  sweep->add_option("--format", sweep_args.format, "csv or json")->capture_default_str();

  OracleArgs oracle_args;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "Check both solvers against brute-force enumeration");
  add_instance_flags(oracle, oracle_args.spec);
  oracle->add_option("--count", oracle_args.count, "Number of generated instances")
      ->capture_default_str();
  oracle->add_option("--kmin", oracle_args.kmin, "Smallest sensor count")
      ->capture_default_str();
  oracle->add_option("--kmax", oracle_args.kmax, "Largest sensor count (<= 8)")
      ->capture_default_str();
  oracle->add_option("--lambdas", oracle_args.lambdas, "Grid a:step:b or comma list")
      ->capture_default_str();
  oracle->add_option("--tol", oracle_args.tol, "Match tolerance")->capture_default_str();

  CompareArgs compare_args;
  CLI::App* compare = app.add_subcommand(
      "compare", "Multi-return vs single-visit modes, fly-hover vs refined");
  compare->add_option("--ks", compare_args.ks, "Comma list of sensor counts")
      ->capture_default_str();
  compare->add_option("--area", compare_args.area_m, "Square side length in metres")
      ->capture_default_str();
  compare->add_option("--seed", compare_args.seed, "Generator RNG seed")
      ->capture_default_str();
  compare->add_option("--lambda", compare_args.lambda, "Weight for the multi-return mode")
      ->capture_default_str();
  compare->add_option("--solver", compare_args.solver, "benders or monolithic")
      ->capture_default_str();
  compare->add_option("--tol", compare_args.tol, "Convergence tolerance")
      ->capture_default_str();
  compare->add_option("--out", compare_args.out, "Output file (stdout when omitted)");
  compare->add_option("--format", compare_args.format, "csv or json")->capture_default_str();

  RefineArgs refine_args;
  CLI::App* refine = app.add_subcommand("refine", "Refine a tour within coverage discs");
  add_instance_flags(refine, refine_args.spec);
  refine->add_option("--tour", refine_args.tour, "Tour JSON (solved fresh when omitted)");
  refine->add_option("--lambda", refine_args.lambda, "Trade-off weight in [0,1]")
      ->capture_default_str();
  refine->add_option("--solver", refine_args.solver, "benders or monolithic")
      ->capture_default_str();
  refine->add_option("--tol", refine_args.tol, "Convergence tolerance")
      ->capture_default_str();
  refine->add_option("--d-th", refine_args.d_th, "Coverage radius override in metres");
  refine->add_option("--out", refine_args.out, "Output file (stdout when omitted)");

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Metrics of a given tour");
  add_instance_flags(evaluate, eval_args.spec);
  evaluate->add_option("--tour", eval_args.tour, "Tour JSON file");
  evaluate->add_option("--format", eval_args.format, "csv or json")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_args);
    if (solve->parsed()) return cmd_solve(solve_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (oracle->parsed()) return cmd_oracle(oracle_args);
    if (compare->parsed()) return cmd_compare(compare_args);
    if (refine->parsed()) return cmd_refine(refine_args);
    if (evaluate->parsed()) return cmd_evaluate(eval_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
