// perzyna: run scenarios, sweep eps, run the kernel self-test battery.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "perzyna/csv.hpp"
#include "perzyna/diagnostics.hpp"
#include "perzyna/driver.hpp"
#include "perzyna/errors.hpp"
#include "perzyna/scenario.hpp"
#include "perzyna/selftest.hpp"

namespace fs = std::filesystem;
using namespace perzyna;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kNonConvergence = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Scenario load_checked(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError("config file not found: " + path);
  try {
    return load_scenario(path);
  } catch (const ScenarioError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const MeshInvalid& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw UsageError("bad --eps entry '" + item + "'");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

void print_diagnostics(const DiagnosticsReport& rep) {
  struct Agg {
    int count = 0, failed = 0;
    double worst = 0.0, tol = 0.0;
  };
  std::map<std::string, Agg> by_check;
  std::vector<std::string> order;
  for (const auto& e : rep.entries) {
    auto [it, fresh] = by_check.try_emplace(e.check);
    if (fresh) order.push_back(e.check);
    Agg& a = it->second;
    if (a.count == 0 || e.value > a.worst) a.worst = e.value;
    a.tol = e.tolerance;
    ++a.count;
    if (!e.pass) ++a.failed;
  }
  for (const auto& name : order) {
    const Agg& a = by_check[name];
    std::printf("  %-24s entries %4d  worst %-24s tol %-10s %s\n", name.c_str(), a.count,
                csv::number(a.worst).c_str(), csv::number(a.tol).c_str(), a.failed ? "FAIL" : "ok");
  }
}

int cmd_run(const std::string& config, const std::string& out) {
  Scenario sc = load_checked(config);
  if (!out.empty()) sc.out_dir = out;
  const Problem problem(sc);
  if (problem.params().regularity_warning())
    std::cerr << "warning: alpha = 1/sqrt(2); regularity diagnostics are not meaningful\n";

  const Trajectory traj = problem.run();
  csv::write_run(sc.out_dir, problem.mesh(), traj, sc.dump_fields);
  const DiagnosticsReport rep = run_diagnostics(problem, traj);
  csv::write_diagnostics(sc.out_dir / "diagnostics.csv", rep);

  const auto& fin = traj.final();
  std::printf("run: %d steps, %d elements, eps %s, outputs in %s\n", fin.step, problem.mesh().num_triangles(),
              csv::number(traj.eps).c_str(), sc.out_dir.string().c_str());
  std::printf("  final energy %s  dissipation %s  max yield gap %s\n", csv::number(fin.mon.energy_elastic).c_str(),
              csv::number(fin.mon.dissipation_cum).c_str(), csv::number(fin.mon.max_yield_gap).c_str());
  print_diagnostics(rep);
  if (!rep.all_pass()) {
    for (const auto& name : rep.failed_checks()) std::cerr << "check failed: " << name << '\n';
    return kCheckFailed;
  }
  return kOk;
}

int cmd_sweep(const std::string& config, const std::string& eps_text, const std::string& out) {
  Scenario sc = load_checked(config);
  if (!out.empty()) sc.out_dir = out;
  const std::vector<double> eps = parse_eps_list(eps_text);
  SweepReport rep;
  try {
    rep = sweep_epsilon(sc, eps);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  csv::write_sweep(sc.out_dir, rep);
  std::printf("sweep: %zu runs, outputs in %s\n", rep.entries.size(), sc.out_dir.string().c_str());
  for (const auto& e : rep.entries) {
    std::printf("  eps %-10s max gap+ %-24s distance to previous %s\n", csv::number(e.eps).c_str(),
                csv::number(e.max_gap_pos).c_str(),
                e.stress_distance_prev ? csv::number(*e.stress_distance_prev).c_str() : "-");
  }
  std::printf("  interior H1 max factor across eps: %s\n", csv::number(rep.h1_max_factor()).c_str());
  return kOk;
}

int cmd_selftest(std::uint64_t seed, long count) {
  if (count <= 0) throw UsageError("--count must be positive");
  const selftest::Options opts{seed, count};
  int failed = 0;
  for (auto suite : {&selftest::kernel_properties, &selftest::material_point_properties}) {
    for (const auto& r : suite(opts)) {
      std::printf("%s\n", r.summary().c_str());
      if (!r.pass()) {
        std::cerr << "property failed: " << r.name << '\n';
        ++failed;
      }
    }
  }
  return failed ? kCheckFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perzyna viscoplasticity solver"};
  app.require_subcommand(1);

  std::string config, out, eps_text;
  std::uint64_t seed = 42;
  long count = 1000;

  auto* run = app.add_subcommand("run", "run a scenario and its diagnostics");
  run->add_option("--config", config, "scenario file")->required();
  run->add_option("--out", out, "output directory (overrides the scenario)");

  auto* sweep = app.add_subcommand("sweep", "run a scenario for a decreasing list of eps");
  sweep->add_option("--config", config, "scenario file")->required();
  sweep->add_option("--eps", eps_text, "comma-separated eps values")->required();
  sweep->add_option("--out", out, "output directory (overrides the scenario)");

  auto* self = app.add_subcommand("selftest", "randomized property checks of the kernels");
  self->add_option("--seed", seed, "random seed");
  self->add_option("--count", count, "samples per property");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (run->parsed()) return cmd_run(config, out);
    if (sweep->parsed()) return cmd_sweep(config, eps_text, out);
    return cmd_selftest(seed, count);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NonConvergence& e) {
    std::cerr << "nonconvergence: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
}
