#pragma once

#include <atomic>
#include <cstdio>
#include <functional>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "splitclust/generator.hpp"
#include "splitclust/pipeline.hpp"
#include "splitclust/rng.hpp"
#include "splitclust/solver.hpp"

namespace splitclust {

struct SweepAxis {
  std::string name;  // one of: b, K_min, tau, p0
  std::vector<double> values;
};

struct SweepSpec {
  int n = 0;
  SweepAxis x;
  SweepAxis y;
  int trials = 1;
  GeneratorParams base;           // template; axes override fields per cell
  std::vector<double> eta_grid;   // empty selects recommendation + line search
  SolverConfig solver;
  double validity_tol = kTol.validity;
  std::uint64_t master_seed = 0;
  int jobs = 1;
};

struct SweepGrid {
  SweepAxis x;
  SweepAxis y;
  int trials = 0;
  Matrix success;  // success(iy, ix) = recovery rate in [0,1]
};

inline bool is_sweep_axis_name(const std::string& name) {
  return name == "b" || name == "K_min" || name == "tau" || name == "p0";
}

namespace detail {

inline void apply_axis(GeneratorParams& params, int n, const std::string& name, double value) {
  if (name == "b") {
    params.mode = NoiseMode::FixedPerNode;
    params.disagreements_per_node = static_cast<int>(value);
  } else if (name == "K_min") {
    const int k = static_cast<int>(value);
    if (k < 1 || n % k != 0)
      throw std::invalid_argument("sweep: K_min axis value " + std::to_string(k) +
                                  " must divide n = " + std::to_string(n));
    params.cluster_sizes.assign(static_cast<std::size_t>(n / k), k);
  } else if (name == "tau") {
    params.tau = value;
  } else if (name == "p0") {
    params.p0 = value;
  } else {
    throw std::invalid_argument("sweep: unknown axis field '" + name + "'");
  }
}

}  // namespace detail

using SweepObserver =
    std::function<void(int ix, int iy, int trial, const Instance&, const ClusterOutcome&)>;

// Runs trials seeded instances per grid cell through the clustering pipeline
// and records the fraction that recover the planted partition exactly.
// Per-task seeds derive from (master_seed, ix, iy, trial), so results do not
// depend on scheduling; cells and trials run on up to `jobs` threads.
inline SweepGrid run_sweep(const SweepSpec& spec, const SweepObserver& observer = nullptr) {
  if (spec.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (!is_sweep_axis_name(spec.x.name) || !is_sweep_axis_name(spec.y.name))
    throw std::invalid_argument("sweep: axis names must be one of b, K_min, tau, p0");
  if (spec.x.values.empty() || spec.y.values.empty())
    throw std::invalid_argument("sweep: empty axis values");
  if (spec.n < 2) throw std::invalid_argument("sweep: n must be >= 2");

  const int nx = static_cast<int>(spec.x.values.size());
  const int ny = static_cast<int>(spec.y.values.size());
  const long total_tasks = static_cast<long>(nx) * ny * spec.trials;
  std::vector<char> wins(static_cast<std::size_t>(total_tasks), 0);

  const auto run_task = [&](long task, std::mutex* observer_mutex) {
    const int trial = static_cast<int>(task % spec.trials);
    const int ix = static_cast<int>((task / spec.trials) % nx);
    const int iy = static_cast<int>(task / (static_cast<long>(spec.trials) * nx));

    GeneratorParams params = spec.base;
    if (params.cluster_sizes.empty()) params.cluster_sizes = {spec.n};
    detail::apply_axis(params, spec.n, spec.x.name, spec.x.values[static_cast<std::size_t>(ix)]);
    detail::apply_axis(params, spec.n, spec.y.name, spec.y.values[static_cast<std::size_t>(iy)]);
    if (params.n() != spec.n)
      throw std::invalid_argument("sweep: cluster sizes do not sum to n");
    params.seed = derive_seed(spec.master_seed, static_cast<std::uint64_t>(ix),
                              static_cast<std::uint64_t>(iy), static_cast<std::uint64_t>(trial));

    const Instance inst = generate_instance(params);
    const std::vector<double> grid =
        spec.eta_grid.empty() ? eta_grid_with_recommendation(spec.n, params.p0) : spec.eta_grid;
    const ClusterOutcome outcome =
        optimal_cluster(inst.graph, grid, spec.solver, spec.validity_tol);

    const bool recovered = outcome.success() && *outcome.clustering == inst.planted;
    wins[static_cast<std::size_t>(task)] = recovered ? 1 : 0;
    if (observer) {
      if (observer_mutex) {
        std::lock_guard<std::mutex> lock(*observer_mutex);
        observer(ix, iy, trial, inst, outcome);
      } else {
        observer(ix, iy, trial, inst, outcome);
      }
    }
  };

  if (spec.jobs <= 1) {
    for (long task = 0; task < total_tasks; ++task) run_task(task, nullptr);
  } else {
    std::mutex observer_mutex;
    std::atomic<long> next{0};
    std::vector<std::thread> workers;
    std::exception_ptr error;
    std::mutex error_mutex;
    const int threads = std::min<long>(spec.jobs, total_tasks);
    for (int w = 0; w < threads; ++w) {
      workers.emplace_back([&]() {
        while (true) {
          const long task = next.fetch_add(1);
          if (task >= total_tasks) return;
          try {
            run_task(task, &observer_mutex);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& t : workers) t.join();
    if (error) std::rethrow_exception(error);
  }

  SweepGrid grid;
  grid.x = spec.x;
  grid.y = spec.y;
  grid.trials = spec.trials;
  grid.success = Matrix::Zero(ny, nx);
  for (long task = 0; task < total_tasks; ++task) {
    const int ix = static_cast<int>((task / spec.trials) % nx);
    const int iy = static_cast<int>(task / (static_cast<long>(spec.trials) * nx));
    grid.success(iy, ix) += wins[static_cast<std::size_t>(task)];
  }
  grid.success /= static_cast<double>(spec.trials);
  return grid;
}

// ---------------------------------------------------------------------------
// Sweep spec file: "key = value" lines, '#' comments.
// ---------------------------------------------------------------------------
//
//   n = 200
//   x_axis = b              x_values = 2, 6, 10, 14
//   y_axis = K_min          y_values = 25, 50, 100
//   trials = 10
//   mode = fixed_per_node   # or bernoulli_flips
//   tau = 0.0               p0 = 1.0            b = 0
//   sizes = 100,100         # template sizes when K_min is not an axis
//   seed = 1
//   eta_grid = 0.04, 0.66   # or: auto
//   solver_tol = 1e-7       solver_max_iters = 1000
//   validity_tol = 1e-3

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_number_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("sweep spec: bad number '" + item + "' in " + key);
    }
  }
  if (out.empty()) throw std::invalid_argument("sweep spec: empty list for " + key);
  return out;
}

}  // namespace detail

inline SweepSpec parse_sweep_spec(std::istream& in) {
  SweepSpec spec;
  std::vector<int> sizes;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("sweep spec line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));

    if (key == "n") spec.n = std::stoi(value);
    else if (key == "x_axis") spec.x.name = value;
    else if (key == "y_axis") spec.y.name = value;
    else if (key == "x_values") spec.x.values = detail::parse_number_list(value, key);
    else if (key == "y_values") spec.y.values = detail::parse_number_list(value, key);
    else if (key == "trials") spec.trials = std::stoi(value);
    else if (key == "tau") spec.base.tau = std::stod(value);
    else if (key == "p0") spec.base.p0 = std::stod(value);
    else if (key == "b") spec.base.disagreements_per_node = std::stoi(value);
    else if (key == "seed") spec.master_seed = std::stoull(value);
    else if (key == "validity_tol") spec.validity_tol = std::stod(value);
    else if (key == "solver_tol") spec.solver.tol_rel = std::stod(value);
    else if (key == "solver_max_iters") spec.solver.max_iters = std::stoi(value);
    else if (key == "jobs") spec.jobs = std::stoi(value);
    else if (key == "mode") {
      if (value == "bernoulli_flips") spec.base.mode = NoiseMode::BernoulliFlips;
      else if (value == "fixed_per_node") spec.base.mode = NoiseMode::FixedPerNode;
      else throw std::invalid_argument("sweep spec: unknown mode '" + value + "'");
    } else if (key == "sizes") {
      sizes.clear();
      for (double v : detail::parse_number_list(value, key)) sizes.push_back(static_cast<int>(v));
    } else if (key == "eta_grid") {
      if (value == "auto") spec.eta_grid.clear();
      else spec.eta_grid = detail::parse_number_list(value, key);
    } else {
      throw std::invalid_argument("sweep spec line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    }
  }
  if (spec.n < 2) throw std::invalid_argument("sweep spec: missing or invalid n");
  if (!is_sweep_axis_name(spec.x.name) || !is_sweep_axis_name(spec.y.name))
    throw std::invalid_argument("sweep spec: axes must be one of b, K_min, tau, p0");
  spec.base.cluster_sizes = sizes.empty() ? std::vector<int>{spec.n} : sizes;
  return spec;
}

inline void write_sweep_csv(std::ostream& out, const SweepGrid& grid) {
  char buf[64];
  out << grid.y.name << "\\" << grid.x.name;
  for (double x : grid.x.values) {
    std::snprintf(buf, sizeof(buf), ",%g", x);
    out << buf;
  }
  out << "\n";
  for (int iy = 0; iy < static_cast<int>(grid.y.values.size()); ++iy) {
    std::snprintf(buf, sizeof(buf), "%g", grid.y.values[static_cast<std::size_t>(iy)]);
    out << buf;
    for (int ix = 0; ix < static_cast<int>(grid.x.values.size()); ++ix) {
      std::snprintf(buf, sizeof(buf), ",%g", grid.success(iy, ix));
      out << buf;
    }
    out << "\n";
  }
}

inline void write_sweep_metadata(std::ostream& out, const SweepSpec& spec,
                                 const std::string& artifact_version) {
  nlohmann::json meta;
  meta["artifact"] = "splitclust";
  meta["version"] = artifact_version;
  meta["n"] = spec.n;
  meta["x_axis"] = spec.x.name;
  meta["x_values"] = spec.x.values;
  meta["y_axis"] = spec.y.name;
  meta["y_values"] = spec.y.values;
  meta["trials"] = spec.trials;
  meta["master_seed"] = spec.master_seed;
  meta["mode"] = spec.base.mode == NoiseMode::BernoulliFlips ? "bernoulli_flips" : "fixed_per_node";
  meta["tau"] = spec.base.tau;
  meta["p0"] = spec.base.p0;
  meta["b"] = spec.base.disagreements_per_node;
  meta["template_sizes"] = spec.base.cluster_sizes;
  meta["eta_grid"] = spec.eta_grid;
  meta["eta_grid_auto"] = spec.eta_grid.empty();
  meta["solver_tol"] = spec.solver.tol_rel;
  meta["solver_max_iters"] = spec.solver.max_iters;
  meta["validity_tol"] = spec.validity_tol;
  out << meta.dump(2) << "\n";
}

}  // namespace splitclust
