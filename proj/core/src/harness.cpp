#include "copperbolt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "copperbolt/baselines.hpp"
#include "copperbolt/numtheory.hpp"

namespace copperbolt::harness {

using nlohmann::json;

std::string method_name(Method method) {
  switch (method) {
    case Method::kSat: return "sat";
    case Method::kSatCas: return "satcas";
    case Method::kBnp: return "bnp";
    case Method::kBrute: return "brute";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "sat") return Method::kSat;
  if (name == "satcas") return Method::kSatCas;
  if (name == "bnp") return Method::kBnp;
  if (name == "brute") return Method::kBrute;
  return std::nullopt;
}

namespace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  Rng rng(a ^ (b * 0x9e3779b97f4a7c15ULL + 0xd1b54a32d192ed03ULL));
  return rng.next_u64();
}

std::string target_name(cnf::LeakTarget target) {
  switch (target) {
    case cnf::LeakTarget::kP: return "p";
    case cnf::LeakTarget::kQ: return "q";
    case cnf::LeakTarget::kD: return "d";
  }
  return "?";
}

cnf::LeakTarget target_from_name(const std::string& name, const std::string& where) {
  if (name == "p") return cnf::LeakTarget::kP;
  if (name == "q") return cnf::LeakTarget::kQ;
  if (name == "d") return cnf::LeakTarget::kD;
  throw SchemaError(where + ": leak target must be p, q or d, got '" + name + "'");
}

// count distinct positions chosen uniformly from [0, len)
std::vector<std::size_t> sample_positions(Rng& rng, std::size_t len, std::size_t count) {
  std::vector<std::size_t> all(len);
  for (std::size_t i = 0; i < len; ++i) all[i] = i;
  for (std::size_t i = 0; i < count && i + 1 < len; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(len - i));
    std::swap(all[i], all[j]);
  }
  all.resize(std::min(count, len));
  std::sort(all.begin(), all.end());
  return all;
}

void append_component_leaks(std::vector<cnf::Leak>& leaks, Rng& rng,
                            cnf::LeakTarget target, const Int& value,
                            std::size_t len, int pct) {
  const std::size_t count = (static_cast<std::size_t>(pct) * len + 50) / 100;
  for (std::size_t index : sample_positions(rng, len, count)) {
    leaks.push_back({target, index, bit_of(value, index)});
  }
}

}  // namespace

GenResult gen(std::size_t n_bits, int leak_pct, bool with_d, std::uint64_t seed) {
  if (n_bits < 16 || n_bits % 2 != 0) {
    throw std::invalid_argument("gen: bits must be even and >= 16");
  }
  if (leak_pct < 0 || leak_pct > 100) {
    throw std::invalid_argument("gen: leak percentage out of range");
  }
  Rng rng(seed);
  const std::size_t k = n_bits / 2;
  Rng prime_rng = rng.fork(1);
  const Int p0 = nt::gen_prime(k, prime_rng, with_d);
  Int q0 = nt::gen_prime(k, prime_rng, with_d);
  while (q0 == p0) q0 = nt::gen_prime(k, prime_rng, with_d);
  const Int p = std::min(p0, q0);
  const Int q = std::max(p0, q0);
  const Int N = p * q;

  GenResult out;
  out.truth.p = p;
  out.truth.q = q;
  out.instance.n = N;
  out.instance.k = k;
  out.instance.with_d = with_d;
  out.instance.seed = seed;

  std::optional<Int> d;
  if (with_d) {
    d = nt::mod_inverse(3, (p - 1) * (q - 1));
    out.truth.d = d;
  }

  Rng leak_rng = rng.fork(2);
  append_component_leaks(out.instance.leaks, leak_rng, cnf::LeakTarget::kP, p, k,
                         leak_pct);
  append_component_leaks(out.instance.leaks, leak_rng, cnf::LeakTarget::kQ, q, k,
                         leak_pct);
  if (with_d) {
    const std::size_t n = bit_length(N);
    append_component_leaks(out.instance.leaks, leak_rng, cnf::LeakTarget::kD, *d, n,
                           leak_pct);
    // Provably shared high bits of d go in as automatic leaks.
    const cnf::DPrefix prefix = cnf::fixed_high_bits_of_d(N, n);
    for (std::size_t i = 0; i < prefix.l; ++i) {
      out.instance.leaks.push_back(
          {cnf::LeakTarget::kD, n - 1 - i, prefix.prefix[i] == '1'});
    }
  }

  auto [formula, vm] = cnf::encode_factoring(N, k);
  if (with_d) cnf::encode_d_equation(formula, vm, N);
  cnf::add_leak_units(formula, vm, out.instance.leaks);
  out.dimacs = cnf::write_dimacs(formula, &vm);
  return out;
}

std::string instance_to_json(const Instance& instance) {
  json leaks = json::array();
  for (const cnf::Leak& leak : instance.leaks) {
    leaks.push_back({{"target", target_name(leak.target)},
                     {"index", leak.index},
                     {"value", leak.value ? 1 : 0}});
  }
  const json doc = {
      {"schema_version", instance.schema_version},
      {"n_hex", to_hex(instance.n)},
      {"k", instance.k},
      {"with_d", instance.with_d},
      {"seed", instance.seed},
      {"leaks", leaks},
  };
  return doc.dump(2) + "\n";
}

namespace {

json parse_json(const std::string& text, const std::string& origin) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw SchemaError(origin + ": not valid JSON");
  return doc;
}

const json& require_field(const json& doc, const char* field, const std::string& origin) {
  const auto it = doc.find(field);
  if (it == doc.end()) {
    throw SchemaError(origin + ": missing field '" + field + "'");
  }
  return *it;
}

void check_schema_version(const json& doc, const std::string& origin) {
  const json& v = require_field(doc, "schema_version", origin);
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
    throw SchemaError(origin + ": field 'schema_version' must be " +
                      std::to_string(kSchemaVersion));
  }
}

}  // namespace

Instance instance_from_json(const std::string& text, const std::string& origin_in) {
  const std::string origin = origin_in.empty() ? "instance" : origin_in;
  const json doc = parse_json(text, origin);
  check_schema_version(doc, origin);
  Instance instance;
  try {
    instance.n = from_hex(require_field(doc, "n_hex", origin).get<std::string>());
    instance.k = require_field(doc, "k", origin).get<std::size_t>();
    instance.with_d = require_field(doc, "with_d", origin).get<bool>();
    instance.seed = require_field(doc, "seed", origin).get<std::uint64_t>();
    for (const json& entry : require_field(doc, "leaks", origin)) {
      cnf::Leak leak;
      leak.target = target_from_name(
          require_field(entry, "target", origin + ".leaks").get<std::string>(),
          origin + ".leaks");
      leak.index = require_field(entry, "index", origin + ".leaks").get<std::size_t>();
      const int value = require_field(entry, "value", origin + ".leaks").get<int>();
      if (value != 0 && value != 1) {
        throw SchemaError(origin + ".leaks: field 'value' must be 0 or 1");
      }
      leak.value = value == 1;
      instance.leaks.push_back(leak);
    }
  } catch (const json::exception& e) {
    throw SchemaError(origin + ": " + e.what());
  }
  if (instance.n % 2 == 0) throw SchemaError(origin + ": modulus must be odd");
  const std::size_t n = bit_length(instance.n);
  for (const cnf::Leak& leak : instance.leaks) {
    const std::size_t limit = leak.target == cnf::LeakTarget::kD ? n : instance.k;
    if (leak.index >= limit) {
      throw SchemaError(origin + ".leaks: field 'index' out of range (" +
                        std::to_string(leak.index) + " >= " + std::to_string(limit) +
                        ")");
    }
  }
  return instance;
}

std::string truth_to_json(const Truth& truth) {
  json doc = {
      {"schema_version", truth.schema_version},
      {"p_hex", to_hex(truth.p)},
      {"q_hex", to_hex(truth.q)},
  };
  if (truth.d.has_value()) doc["d_hex"] = to_hex(*truth.d);
  return doc.dump(2) + "\n";
}

Truth truth_from_json(const std::string& text, const std::string& origin_in) {
  const std::string origin = origin_in.empty() ? "truth" : origin_in;
  const json doc = parse_json(text, origin);
  check_schema_version(doc, origin);
  Truth truth;
  try {
    truth.p = from_hex(require_field(doc, "p_hex", origin).get<std::string>());
    truth.q = from_hex(require_field(doc, "q_hex", origin).get<std::string>());
    if (doc.contains("d_hex")) truth.d = from_hex(doc["d_hex"].get<std::string>());
  } catch (const json::exception& e) {
    throw SchemaError(origin + ": " + e.what());
  }
  return truth;
}

RunOutcome run_method(const Instance& instance, const SolveOptions& options) {
  RunOutcome outcome;
  outcome.method = options.method;
  outcome.seed = options.seed.value_or(instance.seed);
  const auto started = std::chrono::steady_clock::now();
  const auto deadline =
      started + std::chrono::milliseconds(
                    static_cast<std::int64_t>(options.timeout_s * 1000.0));

  switch (options.method) {
    case Method::kSat:
    case Method::kSatCas: {
      pipeline::HybridConfig config;
      config.theta = options.theta;
      config.method = options.method == Method::kSatCas ? pipeline::Method::kSatCas
                                                        : pipeline::Method::kSatOnly;
      config.use_d_encoding = instance.with_d;
      config.seed = outcome.seed;
      config.time_limit = std::chrono::milliseconds(
          static_cast<std::int64_t>(options.timeout_s * 1000.0));
      try {
        pipeline::FactorResult result =
            pipeline::factor(instance.n, instance.k, instance.leaks, config);
        outcome.status = "ok";
        outcome.factors = std::make_pair(result.p, result.q);
        outcome.stats = result.stats;
      } catch (const pipeline::Timeout&) {
        outcome.status = "timeout";
      } catch (const pipeline::UnsatEncoding&) {
        outcome.status = "unsat";
      }
      break;
    }
    case Method::kBnp: {
      const baselines::BnpResult result = baselines::branch_and_prune(
          instance.n, instance.k, instance.leaks, instance.with_d, 1ull << 22,
          &deadline);
      outcome.peak_frontier = result.peak_frontier;
      outcome.levels_completed = result.levels_completed;
      switch (result.outcome) {
        case baselines::BnpResult::Outcome::kFactors:
          outcome.status = "ok";
          outcome.factors = result.factors;
          break;
        case baselines::BnpResult::Outcome::kBranchExplosion:
          outcome.status = "explosion";
          break;
        case baselines::BnpResult::Outcome::kNoSolution:
          outcome.status = "nosolution";
          break;
        case baselines::BnpResult::Outcome::kTimeout:
          outcome.status = "timeout";
          break;
      }
      break;
    }
    case Method::kBrute: {
      try {
        const baselines::BruteResult result = baselines::brute_force_coppersmith(
            instance.n, instance.k, instance.leaks, options.theta, 30, &deadline);
        outcome.stats.oracle_calls = result.oracle_calls;
        outcome.stats.oracle_us = result.oracle_us;
        switch (result.outcome) {
          case baselines::BruteResult::Outcome::kFactors:
            outcome.status = "ok";
            outcome.factors = result.factors;
            break;
          case baselines::BruteResult::Outcome::kExhausted:
            outcome.status = "exhausted";
            break;
          case baselines::BruteResult::Outcome::kTimeout:
            outcome.status = "timeout";
            break;
        }
      } catch (const baselines::Infeasible&) {
        outcome.status = "infeasible";
      }
      break;
    }
  }
  outcome.stats.wall_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started)
          .count());
  return outcome;
}

namespace {
struct DimacsTimeoutSignal {};
}  // namespace

RunOutcome run_dimacs(const std::string& dimacs_text, const SolveOptions& options) {
  if (options.method != Method::kSat && options.method != Method::kSatCas) {
    throw std::invalid_argument("run_dimacs: only sat and satcas apply");
  }
  auto [formula, vm_opt] = cnf::read_dimacs(dimacs_text);
  if (!vm_opt.has_value() || vm_opt->p_bits.empty() || vm_opt->modulus == 0) {
    throw SchemaError("dimacs: missing varmap comments (pbit/qbit/modulus)");
  }
  const cnf::VarMap& vm = *vm_opt;
  const std::size_t k = vm.p_bits.size();

  RunOutcome outcome;
  outcome.method = options.method;
  outcome.seed = options.seed.value_or(0);
  const auto started = std::chrono::steady_clock::now();
  const auto deadline =
      started + std::chrono::milliseconds(
                    static_cast<std::int64_t>(options.timeout_s * 1000.0));

  std::optional<pipeline::CoppersmithOracle> oracle;
  if (options.method == Method::kSatCas) {
    try {
      const std::size_t t = pipeline::threshold_bits(k, vm.modulus, options.theta);
      oracle.emplace(vm.modulus, vm, t, outcome.stats);
    } catch (const std::exception& e) {
      log_info(std::string("hybrid threshold unavailable, running sat-only: ") +
               e.what());
    }
  }
  sat::Callback callback = [&](const sat::AssignmentView& view) -> sat::CallbackResult {
    ++outcome.stats.callback_invocations;
    if (std::chrono::steady_clock::now() >= deadline) {
      return sat::CallbackResult::terminate(DimacsTimeoutSignal{});
    }
    if (oracle.has_value()) return (*oracle)(view);
    return sat::CallbackResult::cont();
  };
  sat::SolverOptions solver_options;
  solver_options.seed = outcome.seed;
  const sat::SolveResult result = sat::solve(formula, &callback, solver_options);
  outcome.stats.conflicts = result.stats.conflicts;
  outcome.stats.decisions = result.stats.decisions;

  auto decode = [&](const std::vector<int>& bits) {
    Int value = 0;
    for (std::size_t i = bits.size(); i-- > 0;) {
      value <<= 1;
      if (result.model[bits[i] - 1]) value += 1;
    }
    return value;
  };
  switch (result.status) {
    case sat::SolveResult::Status::kUnsat:
      outcome.status = "unsat";
      break;
    case sat::SolveResult::Status::kSat: {
      Int p = decode(vm.p_bits);
      Int q = decode(vm.q_bits);
      if (p > q) std::swap(p, q);
      outcome.status = "ok";
      outcome.factors = std::make_pair(std::move(p), std::move(q));
      break;
    }
    case sat::SolveResult::Status::kTerminated:
      if (std::any_cast<DimacsTimeoutSignal>(&result.payload) != nullptr) {
        outcome.status = "timeout";
      } else if (const auto* factors = std::any_cast<cs::Factors>(&result.payload)) {
        outcome.status = "ok";
        outcome.factors = std::make_pair(factors->p, factors->q);
      } else {
        outcome.status = "unsat";
      }
      break;
  }
  outcome.stats.wall_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started)
          .count());
  return outcome;
}

std::string outcome_to_json(const RunOutcome& outcome) {
  json doc = {
      {"status", outcome.status},
      {"p_hex", outcome.found() ? json(to_hex(outcome.factors->first)) : json(nullptr)},
      {"q_hex", outcome.found() ? json(to_hex(outcome.factors->second)) : json(nullptr)},
      {"wall_ms", outcome.stats.wall_ms},
      {"oracle_calls", outcome.stats.oracle_calls},
      {"oracle_ms", outcome.stats.oracle_us / 1000},
      {"blocking_clauses", outcome.stats.blocking_clauses},
      {"conflicts", outcome.stats.conflicts},
      {"decisions", outcome.stats.decisions},
      {"seed", outcome.seed},
      {"method", method_name(outcome.method)},
      {"peak_frontier", outcome.peak_frontier},
      {"levels_completed", outcome.levels_completed},
  };
  return doc.dump(2) + "\n";
}

int outcome_exit_code(const RunOutcome& outcome) {
  if (outcome.status == "ok") return 0;
  if (outcome.status == "timeout" || outcome.status == "exhausted" ||
      outcome.status == "explosion" || outcome.status == "infeasible") {
    return 2;
  }
  return 1;  // unsat, nosolution: something is wrong with instance or tool
}

// ---- bench ------------------------------------------------------------

namespace {

constexpr const char* kRowsHeader =
    "n_bits,leak_pct,with_d,method,seed,status,wall_ms,oracle_calls,oracle_ms,"
    "blocking_clauses,conflicts,peak_frontier";

struct BenchTask {
  std::size_t size;
  int leak_pct;
  Method method;
  int key_index;
  std::uint64_t instance_seed;
};

std::string row_for(const BenchTask& task, const BenchConfig& config,
                    const RunOutcome& outcome) {
  std::ostringstream row;
  row << task.size << "," << task.leak_pct << "," << (config.with_d ? 1 : 0) << ","
      << method_name(task.method) << "," << task.instance_seed << ","
      << outcome.status << "," << outcome.stats.wall_ms << ","
      << outcome.stats.oracle_calls << "," << outcome.stats.oracle_us / 1000 << ","
      << outcome.stats.blocking_clauses << "," << outcome.stats.conflicts << ","
      << outcome.peak_frontier;
  return row.str();
}

}  // namespace

std::size_t bench(const BenchConfig& config, std::ostream& rows_out,
                  std::ostream& summary_out) {
  if (config.keys_per_cell < 1) {
    throw std::invalid_argument("bench: keys_per_cell must be >= 1");
  }
  std::vector<BenchTask> tasks;
  for (std::size_t size : config.sizes) {
    for (int pct : config.leak_pcts) {
      for (Method method : config.methods) {
        for (int key = 0; key < config.keys_per_cell; ++key) {
          // Key seeds depend on the cell and key only, never the method, so
          // every method sees the same instances.
          const std::uint64_t instance_seed = mix_seed(
              mix_seed(mix_seed(config.seed, size), static_cast<std::uint64_t>(pct)),
              static_cast<std::uint64_t>(key) | (config.with_d ? 1ull << 63 : 0));
          tasks.push_back({size, pct, method, key, instance_seed});
        }
      }
    }
  }

  rows_out << kRowsHeader << "\n";
  std::vector<std::optional<RunOutcome>> results(tasks.size());
  std::mutex mutex;
  std::condition_variable done_cv;
  std::atomic<std::size_t> next_task{0};

  auto worker = [&] {
    while (true) {
      const std::size_t index = next_task.fetch_add(1);
      if (index >= tasks.size()) return;
      const BenchTask& task = tasks[index];
      const GenResult generated =
          gen(task.size, task.leak_pct, config.with_d, task.instance_seed);
      SolveOptions options;
      options.method = task.method;
      options.theta = config.theta;
      options.timeout_s = config.timeout_s;
      RunOutcome outcome = run_method(generated.instance, options);
      {
        std::lock_guard<std::mutex> lock(mutex);
        results[index] = std::move(outcome);
      }
      done_cv.notify_all();
    }
  };

  const int worker_count = std::max(1, config.workers);
  std::vector<std::thread> pool;
  pool.reserve(worker_count);
  for (int i = 0; i < worker_count; ++i) pool.emplace_back(worker);

  // Rows are written in task order as soon as the prefix is complete, so an
  // interrupted run leaves a valid CSV behind.
  {
    std::unique_lock<std::mutex> lock(mutex);
    for (std::size_t index = 0; index < tasks.size(); ++index) {
      done_cv.wait(lock, [&] { return results[index].has_value(); });
      rows_out << row_for(tasks[index], config, *results[index]) << "\n";
      rows_out.flush();
    }
  }
  for (std::thread& t : pool) t.join();

  // Per-cell medians. Timeout-like outcomes sort as +infinity; the upper
  // median (index n/2) makes a cell with >= half timeouts report "timeout".
  summary_out << "n_bits,leak_pct,with_d,method,keys,median_wall_ms\n";
  std::size_t task_index = 0;
  for (std::size_t size : config.sizes) {
    for (int pct : config.leak_pcts) {
      for (Method method : config.methods) {
        std::vector<std::pair<bool, std::uint64_t>> walls;  // (finished, ms)
        for (int key = 0; key < config.keys_per_cell; ++key, ++task_index) {
          const RunOutcome& outcome = *results[task_index];
          walls.emplace_back(outcome.status == "ok", outcome.stats.wall_ms);
        }
        std::sort(walls.begin(), walls.end(), [](const auto& a, const auto& b) {
          if (a.first != b.first) return a.first;  // finished runs first
          return a.second < b.second;
        });
        const auto& median = walls[walls.size() / 2];
        summary_out << size << "," << pct << "," << (config.with_d ? 1 : 0) << ","
                    << method_name(method) << "," << config.keys_per_cell << ",";
        if (median.first) {
          summary_out << median.second;
        } else {
          summary_out << "timeout";
        }
        summary_out << "\n";
      }
    }
  }
  summary_out.flush();
  return tasks.size();
}

// ---- report -----------------------------------------------------------

namespace {

struct CellKey {
  std::string method;
  int with_d;
  std::size_t n_bits;
  int leak_pct;
  auto operator<=>(const CellKey&) const = default;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

std::string report(std::istream& rows_csv, const std::filesystem::path& out_dir) {
  std::string line;
  if (!std::getline(rows_csv, line)) return "";  // empty input: empty report
  if (line != kRowsHeader) {
    throw SchemaError("bench csv: unexpected header '" + line + "'");
  }

  std::map<CellKey, std::vector<std::pair<bool, std::uint64_t>>> cells;
  while (std::getline(rows_csv, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() < 12) {
      throw SchemaError("bench csv: short row '" + line + "'");
    }
    CellKey key{fields[3], std::stoi(fields[2]),
                static_cast<std::size_t>(std::stoull(fields[0])), std::stoi(fields[1])};
    cells[key].emplace_back(fields[5] == "ok", std::stoull(fields[6]));
  }

  // Upper-median per cell; timeouts dominate when >= half.
  std::map<CellKey, std::optional<std::uint64_t>> medians;
  for (auto& [key, walls] : cells) {
    std::sort(walls.begin(), walls.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first;
      return a.second < b.second;
    });
    const auto& median = walls[walls.size() / 2];
    medians[key] = median.first ? std::optional<std::uint64_t>(median.second)
                                : std::nullopt;
  }

  std::filesystem::create_directories(out_dir);
  auto log2_of = [](std::uint64_t v) { return std::log2(static_cast<double>(std::max<std::uint64_t>(v, 1))); };

  // median vs size, one file per (method, with_d, leak_pct)
  std::map<std::tuple<std::string, int, int>, std::vector<CellKey>> by_leak;
  std::map<std::tuple<std::string, int, std::size_t>, std::vector<CellKey>> by_size;
  for (const auto& [key, median] : medians) {
    by_leak[{key.method, key.with_d, key.leak_pct}].push_back(key);
    by_size[{key.method, key.with_d, key.n_bits}].push_back(key);
  }

  for (auto& [group, keys] : by_leak) {
    const auto& [method, with_d, leak_pct] = group;
    std::ostringstream name;
    name << "median_vs_size_" << method << (with_d ? "_d" : "") << "_leak" << leak_pct
         << ".tsv";
    std::ofstream out(out_dir / name.str());
    out << "n_bits\tlog2_n_bits\tmedian_wall_ms\tlog2_median_wall_ms\n";
    std::sort(keys.begin(), keys.end());
    for (const CellKey& key : keys) {
      const auto& median = medians[key];
      if (!median.has_value()) continue;  // timeout cell: no point
      out << key.n_bits << "\t" << log2_of(key.n_bits) << "\t" << *median << "\t"
          << log2_of(*median) << "\n";
    }
  }
  for (auto& [group, keys] : by_size) {
    const auto& [method, with_d, n_bits] = group;
    std::ostringstream name;
    name << "median_vs_leak_" << method << (with_d ? "_d" : "") << "_n" << n_bits
         << ".tsv";
    std::ofstream out(out_dir / name.str());
    out << "leak_pct\tmedian_wall_ms\tlog2_median_wall_ms\n";
    std::sort(keys.begin(), keys.end(), [](const CellKey& a, const CellKey& b) {
      return a.leak_pct < b.leak_pct;
    });
    for (const CellKey& key : keys) {
      const auto& median = medians[key];
      if (!median.has_value()) continue;
      out << key.leak_pct << "\t" << *median << "\t" << log2_of(*median) << "\n";
    }
  }

  std::ostringstream table;
  table << "method\twith_d\tn_bits\tleak_pct\tmedian_wall_ms\n";
  for (const auto& [key, median] : medians) {
    table << key.method << "\t" << key.with_d << "\t" << key.n_bits << "\t"
          << key.leak_pct << "\t";
    if (median.has_value()) {
      table << *median;
    } else {
      table << "timeout";
    }
    table << "\n";
  }
  return table.str();
}

int verify_result(const Instance& instance, const Truth& truth,
                  const std::string& result_json) {
  json doc = json::parse(result_json, nullptr, false);
  if (doc.is_discarded()) return 1;
  if (!doc.contains("p_hex") || !doc.contains("q_hex")) return 1;
  if (doc["p_hex"].is_null() || doc["q_hex"].is_null()) return 1;
  Int p, q;
  try {
    p = from_hex(doc["p_hex"].get<std::string>());
    q = from_hex(doc["q_hex"].get<std::string>());
  } catch (const std::exception&) {
    return 1;
  }
  if (p > q) std::swap(p, q);
  if (!pipeline::verify_factors(instance.n, p, q)) return 1;
  const Int tp = std::min(truth.p, truth.q);
  const Int tq = std::max(truth.p, truth.q);
  return (p == tp && q == tq) ? 0 : 1;
}

}  // namespace copperbolt::harness
