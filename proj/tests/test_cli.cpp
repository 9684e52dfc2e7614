#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "json.hpp"
#include "uavtour/formulation.hpp"
#include "uavtour/io.hpp"
#include "uavtour/tours.hpp"

using namespace uavtour;
using uavtour::testing::close;

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "uavtour_cli_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = work_dir() / ("stdout_" + std::to_string(counter) + ".txt");
  const fs::path err = work_dir() / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(UAVTOUR_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("generation is deterministic and validated") {
  const fs::path a = work_dir() / "gen_a.json";
  const fs::path b = work_dir() / "gen_b.json";
  CHECK(run_cli("gen --k 5 --seed 3 --out " + a.string()).exit_code == 0);
  CHECK(run_cli("gen --k 5 --seed 3 --out " + b.string()).exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) == instance_to_json(gen_instance(5, 1000.0, 3)));
  CHECK(run_cli("gen --k 0").exit_code == 2);
  CHECK(run_cli("gen --k 5 --area 1").exit_code == 2);
}

TEST_CASE("argument errors exit with the configuration code") {
  CHECK(run_cli("").exit_code == 2);                    // missing subcommand
  CHECK(run_cli("frobnicate").exit_code == 2);          // unknown subcommand
  CHECK(run_cli("solve --k 4 --solver roulette").exit_code == 2);
  CHECK(run_cli("solve --k 4 --lambda 1.5").exit_code == 2);
  CHECK(run_cli("solve").exit_code == 2);               // neither instance nor k
  CHECK(run_cli("evaluate --k 3").exit_code == 2);      // tour file is required
  CHECK(run_cli("solve --instance /nonexistent/x.json").exit_code == 2);
  const RunResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("solve") != std::string::npos);
  CHECK(help.out.find("sweep") != std::string::npos);
}

TEST_CASE("solving emits a metrics row and a tour that reproduces it") {
  const fs::path inst_path = work_dir() / "solve_inst.json";
  REQUIRE(run_cli("gen --k 4 --seed 9 --out " + inst_path.string()).exit_code == 0);
  const fs::path tour_path = work_dir() / "solve_tour.json";
  const RunResult solved = run_cli("solve --instance " + inst_path.string() +
                                   " --lambda 0.3 --out " + tour_path.string());
  REQUIRE(solved.exit_code == 0);
  const auto rows = parse_csv(solved.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"lambda", "avg_aoi_s", "energy_j", "n_cycles",
                                            "solver", "iterations", "runtime_ms"});
  REQUIRE(rows[1].size() == 7);
  CHECK(rows[1][4] == "benders");

  // The emitted tour must re-derive the emitted metrics.
  const RunResult eval = run_cli("evaluate --instance " + inst_path.string() + " --tour " +
                                 tour_path.string());
  REQUIRE(eval.exit_code == 0);
  const auto mrows = parse_csv(eval.out);
  REQUIRE(mrows.size() == 2);
  CHECK(mrows[0] == std::vector<std::string>{"avg_aoi_s", "energy_j", "n_cycles"});
  CHECK(close(std::stod(mrows[1][0]), std::stod(rows[1][1]), 1e-9));
  CHECK(close(std::stod(mrows[1][1]), std::stod(rows[1][2]), 1e-9));
  CHECK(mrows[1][2] == rows[1][3]);

  // Independent recomputation through the library agrees as well.
  const Instance inst = load_instance(inst_path.string());
  const TourMetrics m = evaluate_tour(load_tour(tour_path.string()), build_edge_weights(inst));
  CHECK(close(m.avg_aoi_s, std::stod(rows[1][1]), 1e-9));
  CHECK(close(m.energy_j, std::stod(rows[1][2]), 1e-9));
}

TEST_CASE("evaluation rejects malformed and structurally bad tours") {
  const fs::path inst_path = work_dir() / "eval_inst.json";
  REQUIRE(run_cli("gen --k 3 --seed 4 --out " + inst_path.string()).exit_code == 0);
  const fs::path bad = work_dir() / "bad_tour.json";
  std::ofstream(bad) << "{\"cycles\": [[1, 1]]}";
  CHECK(run_cli("evaluate --instance " + inst_path.string() + " --tour " + bad.string())
            .exit_code == 2);
  std::ofstream(bad) << "this is not json";
  CHECK(run_cli("evaluate --instance " + inst_path.string() + " --tour " + bad.string())
            .exit_code == 2);
  const fs::path ok = work_dir() / "ok_tour.json";
  std::ofstream(ok) << "{\"cycles\": [[2], [3, 1]]}";
  const RunResult json_eval = run_cli("evaluate --instance " + inst_path.string() +
                                      " --tour " + ok.string() + " --format json");
  REQUIRE(json_eval.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(json_eval.out);
  CHECK(j.contains("avg_aoi_s"));
  CHECK(j.contains("energy_j"));
  CHECK(j["n_cycles"] == 2);
}

TEST_CASE("sweep endpoints match the instance extremes") {
  const fs::path inst_path = work_dir() / "sweep_inst.json";
  REQUIRE(run_cli("gen --k 5 --seed 11 --out " + inst_path.string()).exit_code == 0);
  const RunResult swept = run_cli("sweep --instance " + inst_path.string() +
                                  " --lambdas 0,1 --solver monolithic --keep-duplicates");
  REQUIRE(swept.exit_code == 0);
  const auto rows = parse_csv(swept.out);
  REQUIRE(rows.size() == 3);
  const Instance inst = load_instance(inst_path.string());
  const Extremes ext = compute_extremes(build_edge_weights(inst));
  CHECK(std::stod(rows[1][0]) == 0.0);
  CHECK(close(std::stod(rows[1][2]), ext.energy_min, 1e-9));
  CHECK(std::stod(rows[2][0]) == 1.0);
  CHECK(close(std::stod(rows[2][1]), ext.aoi_min, 1e-9));

  // JSON form carries the cycles, making every row independently checkable.
  const RunResult js = run_cli("sweep --instance " + inst_path.string() +
                               " --lambdas 0,0.5,1 --solver monolithic --format json");
  REQUIRE(js.exit_code == 0);
  const nlohmann::json arr = nlohmann::json::parse(js.out);
  REQUIRE(arr.is_array());
  const WeightMatrix w = build_edge_weights(inst);
  for (const auto& row : arr) {
    MultiTour tour;
    for (const auto& c : row["cycles"]) tour.cycles.push_back(c.get<std::vector<int>>());
    const TourMetrics m = evaluate_tour(tour, w);
    CHECK(close(m.avg_aoi_s, row["avg_aoi_s"].get<double>(), 1e-9));
    CHECK(close(m.energy_j, row["energy_j"].get<double>(), 1e-9));
  }
  CHECK(run_cli("sweep --instance " + inst_path.string() + " --lambdas 0,2").exit_code == 2);
}

TEST_CASE("solver traces are written on request") {
  const fs::path inst_path = work_dir() / "trace_inst.json";
  REQUIRE(run_cli("gen --k 4 --seed 21 --out " + inst_path.string()).exit_code == 0);
  const fs::path trace_path = work_dir() / "trace.csv";
  REQUIRE(run_cli("solve --instance " + inst_path.string() + " --lambda 0.5 --trace " +
                  trace_path.string())
              .exit_code == 0);
  const auto rows = parse_csv(slurp(trace_path));
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == std::vector<std::string>{"iter", "lb", "ub", "cut_kind", "master_obj",
                                            "subproblem_obj"});
  CHECK(rows[1][0] == "1");
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK((rows[i][3] == "optimality" || rows[i][3] == "feasibility"));
}

TEST_CASE("oracle cross-check passes on a seeded batch") {
  // Twenty seeded instances cycling through the small sizes, one lambda for
  // speed; the full grid runs in the acceptance gate.
  const RunResult r = run_cli("oracle --count 20 --kmin 4 --kmax 7 --lambdas 0.5 --seed 100");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("oracle verified: 20 instances") != std::string::npos);
}

TEST_CASE("oracle cross-check on one explicit instance") {
  const fs::path inst_path = work_dir() / "oracle_inst.json";
  REQUIRE(run_cli("gen --k 5 --seed 42 --out " + inst_path.string()).exit_code == 0);
  const RunResult r =
      run_cli("oracle --instance " + inst_path.string() + " --lambdas 0,0.5,1");
  CHECK(r.exit_code == 0);
}

TEST_CASE("mode comparison reports all mode and protocol combinations") {
  const RunResult r = run_cli("compare --ks 5 --seed 2 --lambda 0.5");
  REQUIRE(r.exit_code == 0);
  CHECK(r.err.find("coverage constraint") != std::string::npos);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 7);  // header + 3 modes x 2 protocols
  CHECK(rows[0] == std::vector<std::string>{"k", "mode", "protocol", "avg_aoi_s",
                                            "energy_j", "n_cycles"});
  int multi = 0, ham = 0, tsp = 0, fly = 0, refined = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 6);
    CHECK(rows[i][0] == "5");
    multi += rows[i][1] == "multi";
    ham += rows[i][1] == "hamiltonian";
    tsp += rows[i][1] == "tsp";
    fly += rows[i][2] == "flyhover";
    refined += rows[i][2] == "refined";
  }
  CHECK(multi == 2);
  CHECK(ham == 2);
  CHECK(tsp == 2);
  CHECK(fly == 3);
  CHECK(refined == 3);
}

TEST_CASE("refinement subcommand writes the trajectory report") {
  const fs::path inst_path = work_dir() / "refine_inst.json";
  REQUIRE(run_cli("gen --k 3 --seed 6 --out " + inst_path.string()).exit_code == 0);
  const RunResult r = run_cli("refine --instance " + inst_path.string() + " --lambda 0.5");
  REQUIRE(r.exit_code == 0);
  CHECK(r.err.find("coverage constraint") != std::string::npos);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j.contains("avg_aoi_s"));
  REQUIRE(j["visits"].size() == 3);
  CHECK(j["visits"][0].contains("waypoints"));
  CHECK(j["avg_aoi_s"].get<double>() <=
        j["flyhover_avg_aoi_s"].get<double>() * (1.0 + 1e-9));
}
