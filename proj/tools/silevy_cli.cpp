#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "silevy/config.hpp"
#include "silevy/batch.hpp"
#include "silevy/error.hpp"
#include "silevy/flows.hpp"
#include "silevy/jumps.hpp"
#include "silevy/markov.hpp"
#include "silevy/simulate.hpp"
#include "silevy/verify.hpp"

namespace fs = std::filesystem;
using silevy::ConfigError;
using ordered = nlohmann::ordered_json;

namespace {

struct Flags {
  std::string config;
  std::string spec;
  std::string regions;
  std::string flow;
  std::string suite;
  std::string out;
  std::string volumes;
  std::string epsilons;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<int> level;
  std::optional<std::size_t> mesh;
  std::optional<unsigned> threads;
  std::optional<double> tol;
};

// File path, or an inline JSON literal.
std::string load(const std::string& arg) {
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[') && !fs::exists(arg)) return arg;
  return silevy::config::read_file(arg);
}

std::vector<double> number_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(field, "expected comma-separated numbers, got '" + text + "'");
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Command {
 public:
  Command(std::string name, const Flags& f) : name_(std::move(name)), f_(f) {
    if (!f.config.empty()) cfg_ = silevy::config::parse_run_config(load(f.config));
    if (!f.spec.empty()) cfg_.spec = silevy::config::parse_spec(load(f.spec));
    if (!f.regions.empty()) cfg_.regions = silevy::config::parse_regions(load(f.regions));
    if (!f.flow.empty()) cfg_.flow = silevy::config::parse_flow(load(f.flow));
    if (!f.suite.empty()) cfg_.suite = f.suite;
    if (!f.out.empty()) cfg_.out = f.out;
    if (!f.volumes.empty()) cfg_.volumes = number_list(f.volumes, "volumes");
    if (!f.epsilons.empty()) cfg_.epsilons = number_list(f.epsilons, "epsilons");
    if (f.seed) cfg_.seed = f.seed;
    if (f.paths) cfg_.paths = f.paths;
    if (f.level) cfg_.level = f.level;
    if (f.mesh) cfg_.mesh = f.mesh;
    if (f.threads) cfg_.threads = f.threads;
    if (f.tol) {
      if (!(*f.tol > 0.0)) throw ConfigError("tol", "must be > 0");
      cfg_.tolerances.kernel_tol = *f.tol;
    }
    if (cfg_.threads && *cfg_.threads == 0) throw ConfigError("threads", "must be >= 1");
  }

  const silevy::config::RunConfig& cfg() const { return cfg_; }
  unsigned threads() const { return cfg_.threads.value_or(silevy::default_threads()); }

  std::uint64_t seed() const {
    if (!cfg_.seed) throw ConfigError("seed", "required for " + name_);
    return *cfg_.seed;
  }

  silevy::ProcessSpec spec(bool sampling) const {
    if (!cfg_.spec) throw ConfigError("spec", "required for " + name_);
    silevy::ProcessSpec s = *cfg_.spec;
    if (cfg_.level) s.level = *cfg_.level;
    if (sampling) s.seed = seed();
    try {
      s.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(e.field() == "level" || e.field() == "dimension" ? e.field() : "spec.triplet." + e.field(),
                        e.what());
    }
    return s;
  }

  // Effective settings; their hash identifies the run.
  ordered effective() const {
    ordered j;
    j["command"] = name_;
    j["config"] = nlohmann::json::parse(cfg_.canonical);
    if (cfg_.spec) j["spec"] = nlohmann::json::parse(silevy::config::spec_to_json(*cfg_.spec));
    for (const auto* key : {"regions", "flow"}) {
      const std::string& v = std::string(key) == "regions" ? f_.regions : f_.flow;
      if (!v.empty()) j[key] = load(v);
    }
    if (cfg_.suite) j["suite"] = *cfg_.suite;
    if (cfg_.seed) j["seed"] = *cfg_.seed;
    if (cfg_.paths) j["paths"] = *cfg_.paths;
    if (cfg_.level) j["level"] = *cfg_.level;
    if (cfg_.mesh) j["mesh"] = *cfg_.mesh;
    j["volumes"] = cfg_.volumes;
    j["epsilons"] = cfg_.epsilons;
    j["ecf_c"] = cfg_.tolerances.ecf_c;
    j["kernel_tol"] = cfg_.tolerances.kernel_tol;
    return j;
  }

  // Writes `text` to the --out target (or stdout) and a manifest beside it.
  void emit(const std::string& text, const std::string& default_name) const {
    if (!cfg_.out) {
      std::cout << text;
      return;
    }
    fs::path target(*cfg_.out);
    const auto ext = target.extension().string();
    if (ext != ".csv" && ext != ".json") target /= default_name;
    write(target, text);
    write_manifest(target.parent_path());
  }

  void emit_many(const std::vector<std::pair<std::string, std::string>>& files) const {
    if (!cfg_.out) {
      for (const auto& [name, text] : files) std::cout << text << "\n";
      return;
    }
    const fs::path dir(*cfg_.out);
    for (const auto& [name, text] : files) write(dir / name, text);
    write_manifest(dir);
  }

 private:
  static void write(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream o(p, std::ios::binary);
    if (!o) throw ConfigError("out", "cannot write " + p.string());
    o << text;
  }

  void write_manifest(const fs::path& dir) const {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(silevy::config::fnv1a(effective().dump())));
    ordered m;
    m["command"] = name_;
    m["config_hash"] = hash;
    m["version"] = SILEVY_VERSION;
    if (cfg_.seed) m["seed"] = *cfg_.seed;
    else m["seed"] = nullptr;
    write(dir / "manifest.json", m.dump(2) + "\n");
  }

  std::string name_;
  const Flags& f_;
  silevy::config::RunConfig cfg_;
};

int simulate(const Command& c) {
  const auto spec = c.spec(true);
  if (c.cfg().regions.empty()) throw ConfigError("regions", "required for simulate");
  const std::size_t paths = c.cfg().paths.value_or(1000);
  const auto rows = silevy::simulate_increments(spec, c.cfg().regions, paths, c.threads());
  std::string csv = "path_id,region_id,increment\n";
  for (std::size_t p = 0; p < rows.size(); ++p) {
    for (std::size_t r = 0; r < rows[p].size(); ++r) {
      csv += std::to_string(p) + "," + std::to_string(r) + "," + fmt(rows[p][r]) + "\n";
    }
  }
  c.emit(csv, "increments.csv");
  return 0;
}

int project(const Command& c) {
  const auto spec = c.spec(true);
  if (!c.cfg().flow) throw ConfigError("flow", "required for project");
  const auto& flow = *c.cfg().flow;
  if (flow.dim() != spec.dimension) throw ConfigError("flow", "dimension differs from spec.dimension");
  const auto mesh = silevy::uniform_mesh(flow, c.cfg().mesh.value_or(8));
  const std::size_t paths = c.cfg().paths.value_or(100);
  const auto traj = silevy::run_batch<silevy::ProjectedTrajectory>(paths, c.threads(), [&](std::size_t p) {
    return silevy::project(silevy::sample_path(spec, p), flow, mesh);
  });
  std::string csv = "path_id,s,value\n";
  double gap = 0.0;
  for (std::size_t p = 0; p < traj.size(); ++p) {
    gap = std::max(gap, traj[p].max_gap);
    for (std::size_t k = 0; k < traj[p].s.size(); ++k) {
      csv += std::to_string(p) + "," + fmt(traj[p].s[k]) + "," + fmt(traj[p].values[k]) + "\n";
    }
  }
  if (gap > 0.0) std::cerr << "project: non-aligned flow sets, max measure gap " << fmt(gap) << "\n";
  c.emit(csv, "projection.csv");
  return 0;
}

int kernel_check(const Command& c) {
  const auto spec = c.spec(false);
  auto volumes = c.cfg().volumes;
  if (volumes.empty()) volumes = {0.5, 0.5};
  if (volumes.size() != 2) throw ConfigError("volumes", "expected two volumes v1,v2");
  if (!(volumes[0] >= 0.0 && volumes[1] >= 0.0)) throw ConfigError("volumes", "must be >= 0");
  const double tol = c.cfg().tolerances.kernel_tol;
  const silevy::TransitionKernel kernel(spec.triplet);
  const auto ck = silevy::chapman_kolmogorov_check(kernel, volumes[0], volumes[1]);
  std::vector<silevy::stats::TestReport> reports = {
      {"chapman-kolmogorov", ck.max_error, tol, ck.max_error < tol}};
  if (!c.cfg().semilattice.empty()) {
    try {
      const auto law = silevy::semilattice_fdd(kernel, c.cfg().semilattice);
      const double tv = law.total_variation();
      reports.push_back({"semilattice-product", tv, tol, tv < tol});
    } catch (const silevy::ConsistencyError& e) {
      throw ConfigError("semilattice", e.what());
    }
  }
  bool pass = true;
  for (const auto& r : reports) pass = pass && r.pass;
  c.emit(silevy::stats::to_json(reports, 2) + "\n", "kernel-check.json");
  return pass ? 0 : 1;
}

int decompose(const Command& c) {
  const auto spec = c.spec(true);
  auto eps = c.cfg().epsilons;
  if (eps.empty()) eps = {0.1, 0.01, 0.001};
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] < eps[i - 1]))) {
      throw ConfigError("epsilons", "must be positive and strictly decreasing");
    }
  }
  silevy::LevyItoReport r;
  try {
    r = silevy::levy_ito_decompose(silevy::sample_path(spec, 0), eps);
  } catch (const silevy::UnsupportedError& e) {
    throw ConfigError("epsilons", e.what());
  }
  ordered j;
  j["epsilons"] = r.epsilons;
  j["reconstruction_error"] = r.reconstruction_error;
  j["tail_curve"] = r.tail_curve;
  j["jump_count"] = r.jump_count;
  c.emit(j.dump(2) + "\n", "decompose.json");
  return 0;
}

int verify(const Command& c) {
  silevy::verify::Options o;
  o.seed = c.seed();
  o.threads = c.threads();
  o.ecf_c = c.cfg().tolerances.ecf_c;
  o.kernel_tol = c.cfg().tolerances.kernel_tol;
  const auto results = silevy::verify::run(c.cfg().suite.value_or("all"), o);
  bool pass = true;
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& r : results) {
    pass = pass && r.passed();
    std::cerr << r.suite << ": " << (r.passed() ? "PASS" : "FAIL") << "\n";
    for (const auto& t : r.reports) {
      if (!t.pass) std::cerr << "  failed " << t.test << " statistic=" << fmt(t.statistic) << " threshold=" << fmt(t.threshold) << "\n";
    }
    files.emplace_back(r.suite + ".json", r.to_json() + "\n");
  }
  c.emit_many(files);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Set-indexed Levy processes on dyadic rectangles"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* s) {
    s->add_option("--config", f.config, "JSON run config");
    s->add_option("--seed", f.seed, "Root seed");
    s->add_option("--out", f.out, "Output directory, or a .csv/.json file");
    s->add_option("--threads", f.threads, "Worker threads (default SILEVY_THREADS or all cores)");
  };
  auto with_spec = [&](CLI::App* s) { s->add_option("--spec", f.spec, "Process spec JSON file"); };

  auto* sim = app.add_subcommand("simulate", "Sample region increments to CSV");
  common(sim);
  with_spec(sim);
  sim->add_option("--paths", f.paths, "Number of paths");
  sim->add_option("--level", f.level, "Dissection level");
  sim->add_option("--regions", f.regions, "Regions JSON file");

  auto* proj = app.add_subcommand("project", "Project paths along a flow to CSV");
  common(proj);
  with_spec(proj);
  proj->add_option("--flow", f.flow, "Flow JSON file");
  proj->add_option("--mesh", f.mesh, "Number of mesh steps");
  proj->add_option("--paths", f.paths, "Number of paths");
  proj->add_option("--level", f.level, "Dissection level");

  auto* kc = app.add_subcommand("kernel-check", "Chapman-Kolmogorov check of the transition kernel");
  common(kc);
  with_spec(kc);
  kc->add_option("--volumes", f.volumes, "v1,v2");
  kc->add_option("--tol", f.tol, "Tolerance");

  auto* dec = app.add_subcommand("decompose", "Levy-Ito decomposition report");
  common(dec);
  with_spec(dec);
  dec->add_option("--epsilons", f.epsilons, "Decreasing cutoffs, comma separated");
  dec->add_option("--level", f.level, "Dissection level");

  auto* ver = app.add_subcommand("verify", "Run verification suites");
  common(ver);
  ver->add_option("--suite", f.suite, "Suite name or 'all'");
  ver->add_option("--tol", f.tol, "Kernel tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    auto* sub = app.get_subcommands().front();
    const Command c(sub->get_name(), f);
    if (sub == sim) return simulate(c);
    if (sub == proj) return project(c);
    if (sub == kc) return kernel_check(c);
    if (sub == dec) return decompose(c);
    return verify(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
