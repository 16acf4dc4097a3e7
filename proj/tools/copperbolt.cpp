// copperbolt: factor RSA moduli with randomly leaked private-key bits using a
// CDCL SAT solver, a lattice-based factor-recovery oracle wired into the
// solver's propagation fixpoints, and two baseline reconstruction methods.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "copperbolt/harness.hpp"

namespace fs = std::filesystem;
using namespace copperbolt;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

harness::Method parse_method_or_die(const std::string& name) {
  const auto method = harness::parse_method(name);
  if (!method.has_value()) {
    throw CLI::ValidationError("--method", "unknown method '" + name +
                                               "' (expected sat|satcas|bnp|brute)");
  }
  return *method;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid SAT + lattice toolkit for leaked-bit RSA factorization"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen_cmd = app.add_subcommand("gen", "generate an instance, its ground truth, and DIMACS");
  std::size_t gen_bits = 64;
  int gen_leak_pct = 50;
  bool gen_with_d = false;
  std::uint64_t gen_seed = 1;
  std::string gen_out_dir = ".";
  gen_cmd->add_option("--bits", gen_bits, "bitlength of the modulus (even, >= 16)");
  gen_cmd->add_option("--leak-pct", gen_leak_pct, "percentage of leaked bits per key component");
  gen_cmd->add_flag("--with-d", gen_with_d, "e=3 instance with the exponent equation encoded");
  gen_cmd->add_option("--seed", gen_seed, "generation seed");
  gen_cmd->add_option("--out-dir", gen_out_dir, "output directory");

  // ---- solve ----
  auto* solve_cmd = app.add_subcommand("solve", "factor an instance with a chosen method");
  std::string solve_instance;
  std::string solve_dimacs;
  std::string solve_method = "satcas";
  double solve_theta = 0.6;
  double solve_timeout = 600.0;
  std::uint64_t solve_seed = 0;
  bool solve_seed_set = false;
  std::string solve_out;
  solve_cmd->add_option("--instance", solve_instance, "instance JSON path");
  solve_cmd->add_option("--dimacs", solve_dimacs, "DIMACS path (sat/satcas only)");
  solve_cmd->add_option("--method", solve_method, "sat|satcas|bnp|brute");
  solve_cmd->add_option("--theta", solve_theta, "low-bit fraction before the oracle runs");
  solve_cmd->add_option("--timeout-s", solve_timeout, "per-instance timeout in seconds");
  solve_cmd->add_option("--seed", solve_seed, "solver seed")->each([&](const std::string&) {
    solve_seed_set = true;
  });
  solve_cmd->add_option("--out", solve_out, "write the result record here as well");

  // ---- bench ----
  auto* bench_cmd = app.add_subcommand("bench", "run a size x leak-percentage x method grid");
  std::vector<std::size_t> bench_sizes;
  std::vector<int> bench_pcts;
  std::vector<std::string> bench_methods{"satcas", "sat"};
  int bench_keys = 15;
  bool bench_with_d = false;
  std::uint64_t bench_seed = 1;
  double bench_timeout = 600.0;
  double bench_theta = 0.6;
  int bench_workers = 1;
  std::string bench_out_dir = "bench";
  bench_cmd->add_option("--sizes", bench_sizes, "modulus bitlengths")->delimiter(',')->required();
  bench_cmd->add_option("--leak-pcts", bench_pcts, "leak percentages")->delimiter(',')->required();
  bench_cmd->add_option("--methods", bench_methods, "methods to compare")->delimiter(',');
  bench_cmd->add_option("--keys", bench_keys, "keys per cell");
  bench_cmd->add_flag("--with-d", bench_with_d, "generate e=3 instances and leak d too");
  bench_cmd->add_option("--seed", bench_seed, "master seed");
  bench_cmd->add_option("--timeout-s", bench_timeout, "per-run timeout in seconds");
  bench_cmd->add_option("--theta", bench_theta, "oracle threshold fraction");
  bench_cmd->add_option("--workers", bench_workers, "parallel workers");
  bench_cmd->add_option("--out-dir", bench_out_dir, "output directory");

  // ---- report ----
  auto* report_cmd = app.add_subcommand("report", "turn a bench CSV into plot-ready series");
  std::string report_csv;
  std::string report_out_dir = "report";
  report_cmd->add_option("--csv", report_csv, "bench results.csv path")->required();
  report_cmd->add_option("--out-dir", report_out_dir, "output directory for .tsv series");

  // ---- verify ----
  auto* verify_cmd = app.add_subcommand("verify", "check a result record against the ground truth");
  std::string verify_instance, verify_truth, verify_result_path;
  verify_cmd->add_option("--instance", verify_instance, "instance JSON path")->required();
  verify_cmd->add_option("--truth", verify_truth, "truth JSON path")->required();
  verify_cmd->add_option("--result", verify_result_path, "result JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      const harness::GenResult generated =
          harness::gen(gen_bits, gen_leak_pct, gen_with_d, gen_seed);
      fs::create_directories(gen_out_dir);
      const fs::path dir(gen_out_dir);
      write_file(dir / "instance.json", harness::instance_to_json(generated.instance));
      write_file(dir / "truth.json", harness::truth_to_json(generated.truth));
      write_file(dir / "instance.cnf", generated.dimacs);
      std::cout << (dir / "instance.json").string() << "\n"
                << (dir / "truth.json").string() << "\n"
                << (dir / "instance.cnf").string() << "\n";
      return 0;
    }

    if (solve_cmd->parsed()) {
      harness::SolveOptions options;
      options.method = parse_method_or_die(solve_method);
      options.theta = solve_theta;
      options.timeout_s = solve_timeout;
      if (solve_seed_set) options.seed = solve_seed;

      harness::RunOutcome outcome;
      if (!solve_dimacs.empty()) {
        outcome = harness::run_dimacs(read_file(solve_dimacs), options);
      } else if (!solve_instance.empty()) {
        const harness::Instance instance =
            harness::instance_from_json(read_file(solve_instance), solve_instance);
        outcome = harness::run_method(instance, options);
      } else {
        throw CLI::ValidationError("solve", "need --instance or --dimacs");
      }
      const std::string record = harness::outcome_to_json(outcome);
      std::cout << record;
      if (!solve_out.empty()) write_file(solve_out, record);
      return harness::outcome_exit_code(outcome);
    }

    if (bench_cmd->parsed()) {
      harness::BenchConfig config;
      config.sizes = bench_sizes;
      config.leak_pcts = bench_pcts;
      for (const std::string& name : bench_methods) {
        config.methods.push_back(parse_method_or_die(name));
      }
      config.keys_per_cell = bench_keys;
      config.with_d = bench_with_d;
      config.seed = bench_seed;
      config.timeout_s = bench_timeout;
      config.theta = bench_theta;
      config.workers = bench_workers;

      fs::create_directories(bench_out_dir);
      std::ofstream rows(fs::path(bench_out_dir) / "results.csv");
      std::ofstream summary(fs::path(bench_out_dir) / "summary.csv");
      const std::size_t runs = harness::bench(config, rows, summary);
      std::cout << "wrote " << runs << " rows to "
                << (fs::path(bench_out_dir) / "results.csv").string() << "\n";
      return 0;
    }

    if (report_cmd->parsed()) {
      std::ifstream in(report_csv);
      if (!in) throw std::runtime_error("cannot open " + report_csv);
      std::cout << harness::report(in, report_out_dir);
      return 0;
    }

    if (verify_cmd->parsed()) {
      const harness::Instance instance =
          harness::instance_from_json(read_file(verify_instance), verify_instance);
      const harness::Truth truth =
          harness::truth_from_json(read_file(verify_truth), verify_truth);
      return harness::verify_result(instance, truth, read_file(verify_result_path));
    }
  } catch (const harness::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
