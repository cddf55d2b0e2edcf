#include "silevy/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "silevy/error.hpp"

namespace silevy::config {
namespace {

using json = nlohmann::json;

json parse(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(what, std::string("invalid JSON: ") + e.what());
  }
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void require_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

double number_at(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(join(path, key), "missing");
  return number(j.at(key), join(path, key));
}

double number_or(const json& j, const std::string& key, const std::string& path, double fallback) {
  return j.contains(key) ? number(j.at(key), join(path, key)) : fallback;
}

std::uint64_t unsigned_value(const json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)) {
    throw ConfigError(path, "expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

std::vector<double> coords(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty() || j.size() > kMaxDim) throw ConfigError(path, "expected 1 to 3 coordinates");
  std::vector<double> c;
  for (std::size_t i = 0; i < j.size(); ++i) c.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return c;
}

RectSet rect(const json& j, const std::string& path) {
  const auto c = coords(j, path);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] >= 0.0 && c[i] <= 1.0)) throw ConfigError(path + "[" + std::to_string(i) + "]", "outside [0, 1]");
  }
  return RectSet(std::span<const double>(c.data(), c.size()));
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

MarkDistribution marks_from(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ConfigError(join(path, "type"), "expected a mark type");
  }
  const auto type = j.at("type").get<std::string>();
  if (type == "point") {
    require_object(j, path, {"type", "value"});
    return MarkDistribution::point(number_at(j, "value", path));
  }
  if (type == "uniform") {
    require_object(j, path, {"type", "low", "high"});
    return MarkDistribution::uniform(number_at(j, "low", path), number_at(j, "high", path));
  }
  if (type == "normal") {
    require_object(j, path, {"type", "mean", "sd"});
    return MarkDistribution::normal(number_or(j, "mean", path, 0.0), number_at(j, "sd", path));
  }
  if (type == "two_point") {
    require_object(j, path, {"type", "a", "b", "p"});
    return MarkDistribution::two_point(number_at(j, "a", path), number_at(j, "b", path), number_at(j, "p", path));
  }
  throw ConfigError(join(path, "type"), "unknown mark type '" + type + "'");
}

// Re-anchors a validation error under `prefix`.
[[noreturn]] void rethrow_under(const ConfigError& e, const std::string& prefix) {
  std::string msg = e.what();
  const std::string head = e.field() + ": ";
  if (msg.rfind(head, 0) == 0) msg = msg.substr(head.size());
  throw ConfigError(join(prefix, e.field()), msg);
}

LevyTriplet triplet_from(const json& j, const std::string& path) {
  require_object(j, path, {"sigma", "gamma", "nu"});
  const double sigma = number_or(j, "sigma", path, 0.0);
  const double gamma = number_or(j, "gamma", path, 0.0);
  LevyTriplet t{sigma, gamma, {}};
  if (j.contains("nu")) {
    const auto& nu = j.at("nu");
    const std::string np = join(path, "nu");
    if (!nu.is_object() || !nu.contains("type") || !nu.at("type").is_string()) {
      throw ConfigError(join(np, "type"), "expected none, compound or truncated_stable");
    }
    const auto type = nu.at("type").get<std::string>();
    if (type == "none") {
      require_object(nu, np, {"type"});
    } else if (type == "compound") {
      require_object(nu, np, {"type", "rate", "marks", "uncompensated"});
      if (!nu.contains("marks")) throw ConfigError(join(np, "marks"), "missing");
      const double rate = number_at(nu, "rate", np);
      const auto marks = marks_from(nu.at("marks"), join(np, "marks"));
      bool uncompensated = false;
      if (nu.contains("uncompensated")) {
        if (!nu.at("uncompensated").is_boolean()) throw ConfigError(join(np, "uncompensated"), "expected a boolean");
        uncompensated = nu.at("uncompensated").get<bool>();
      }
      if (rate <= 0.0 || !std::isfinite(rate)) throw ConfigError(join(np, "rate"), "must be finite and > 0");
      if (uncompensated) {
        t = LevyTriplet::compound_poisson(rate, marks, gamma, sigma);
      } else {
        t.nu = JumpSpec(FiniteActivity{rate, marks});
      }
    } else if (type == "truncated_stable") {
      require_object(nu, np, {"type", "alpha", "scale", "epsilon", "cutoff"});
      TruncatedStable ts;
      ts.alpha = number_at(nu, "alpha", np);
      ts.scale = number_or(nu, "scale", np, ts.scale);
      ts.epsilon = number_at(nu, "epsilon", np);
      ts.cutoff = number_or(nu, "cutoff", np, ts.cutoff);
      t.nu = JumpSpec(ts);
    } else {
      throw ConfigError(join(np, "type"), "unknown Levy measure type '" + type + "'");
    }
  }
  try {
    t.validate();
  } catch (const ConfigError& e) {
    rethrow_under(e, path);
  }
  return t;
}

ProcessSpec spec_from(const json& j, const std::string& path) {
  require_object(j, path, {"triplet", "dimension", "level", "seed"});
  if (!j.contains("triplet")) throw ConfigError(join(path, "triplet"), "missing");
  ProcessSpec spec;
  spec.triplet = triplet_from(j.at("triplet"), join(path, "triplet"));
  if (j.contains("dimension")) spec.dimension = unsigned_value(j.at("dimension"), join(path, "dimension"));
  if (j.contains("level")) spec.level = static_cast<int>(unsigned_value(j.at("level"), join(path, "level")));
  if (j.contains("seed")) spec.seed = unsigned_value(j.at("seed"), join(path, "seed"));
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    rethrow_under(e, e.field() == "dimension" || e.field() == "level" ? path : join(path, "triplet"));
  }
  return spec;
}

std::vector<IncrementRegion> regions_from(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of regions");
  std::vector<IncrementRegion> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    require_object(j[i], rp, {"u0", "sub"});
    if (!j[i].contains("u0")) throw ConfigError(join(rp, "u0"), "missing");
    const RectSet u0 = rect(j[i].at("u0"), join(rp, "u0"));
    std::vector<RectSet> sub;
    if (j[i].contains("sub")) {
      const auto& s = j[i].at("sub");
      if (!s.is_array()) throw ConfigError(join(rp, "sub"), "expected an array of corners");
      for (std::size_t k = 0; k < s.size(); ++k) {
        const RectSet r = rect(s[k], join(rp, "sub") + "[" + std::to_string(k) + "]");
        if (r.dim() != u0.dim()) throw ConfigError(join(rp, "sub"), "dimension differs from u0");
        sub.push_back(r);
      }
    }
    if (!out.empty() && out.front().dim() != u0.dim()) throw ConfigError(rp, "dimension differs from region 0");
    out.emplace_back(u0, std::move(sub));
  }
  return out;
}

ElementaryFlow elementary_from(const json& j, const std::string& path) {
  require_object(j, path, {"vertices", "knots"});
  if (!j.contains("vertices") || !j.at("vertices").is_array()) throw ConfigError(join(path, "vertices"), "missing");
  std::vector<Point> vertices;
  std::size_t dim = 0;
  const auto& vs = j.at("vertices");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const auto c = coords(vs[i], join(path, "vertices") + "[" + std::to_string(i) + "]");
    if (dim == 0) dim = c.size();
    if (c.size() != dim) throw ConfigError(join(path, "vertices"), "vertices differ in dimension");
    Point p{};
    std::copy(c.begin(), c.end(), p.begin());
    vertices.push_back(p);
  }
  try {
    if (j.contains("knots")) return ElementaryFlow(dim, vertices, numbers(j.at("knots"), join(path, "knots")));
    return ElementaryFlow::polyline(dim, vertices);
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError(path, e.what());
  }
}

SimpleFlow flow_from(const json& j, const std::string& path) {
  if (j.is_object() && j.contains("shipped")) {
    require_object(j, path, {"shipped"});
    const auto name = j.at("shipped").is_string() ? j.at("shipped").get<std::string>() : std::string();
    for (auto& f : shipped_flows()) {
      if (f.name == name) return f.flow;
    }
    throw ConfigError(join(path, "shipped"), "unknown shipped flow '" + name + "'");
  }
  if (j.is_object() && j.contains("segments")) {
    require_object(j, path, {"segments"});
    const auto& s = j.at("segments");
    if (!s.is_array() || s.empty()) throw ConfigError(join(path, "segments"), "expected a nonempty array");
    std::vector<ElementaryFlow> segs;
    for (std::size_t i = 0; i < s.size(); ++i) {
      segs.push_back(elementary_from(s[i], join(path, "segments") + "[" + std::to_string(i) + "]"));
    }
    try {
      return SimpleFlow(std::move(segs));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(join(path, "segments"), e.what());
    }
  }
  return SimpleFlow(elementary_from(j, path));
}

std::vector<RectSet> semilattice_from(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of corners");
  std::vector<RectSet> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rect(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json marks_to(const MarkDistribution& m) {
  switch (m.kind()) {
    case MarkDistribution::Kind::point:
      return {{"type", "point"}, {"value", m.a()}};
    case MarkDistribution::Kind::uniform:
      return {{"type", "uniform"}, {"low", m.a()}, {"high", m.b()}};
    case MarkDistribution::Kind::normal:
      return {{"type", "normal"}, {"mean", m.a()}, {"sd", m.b()}};
    case MarkDistribution::Kind::two_point:
      return {{"type", "two_point"}, {"a", m.a()}, {"b", m.b()}, {"p", m.p()}};
  }
  return {};
}

json triplet_to(const LevyTriplet& t) {
  json j{{"sigma", t.sigma}, {"gamma", t.gamma}};
  if (const auto* f = std::get_if<FiniteActivity>(&t.nu.variant())) {
    j["nu"] = {{"type", "compound"}, {"rate", f->rate}, {"marks", marks_to(f->marks)}};
  } else if (const auto* s = std::get_if<TruncatedStable>(&t.nu.variant())) {
    j["nu"] = {{"type", "truncated_stable"},
               {"alpha", s->alpha},
               {"scale", s->scale},
               {"epsilon", s->epsilon},
               {"cutoff", s->cutoff}};
  } else {
    j["nu"] = {{"type", "none"}};
  }
  return j;
}

}  // namespace

LevyTriplet parse_triplet(std::string_view text) { return triplet_from(parse(text, "triplet"), ""); }

ProcessSpec parse_spec(std::string_view text) { return spec_from(parse(text, "spec"), ""); }

std::vector<IncrementRegion> parse_regions(std::string_view text) {
  return regions_from(parse(text, "regions"), "regions");
}

SimpleFlow parse_flow(std::string_view text) { return flow_from(parse(text, "flow"), "flow"); }

std::vector<RectSet> parse_semilattice(std::string_view text) {
  return semilattice_from(parse(text, "semilattice"), "semilattice");
}

std::string triplet_to_json(const LevyTriplet& triplet) { return triplet_to(triplet).dump(); }

std::string spec_to_json(const ProcessSpec& spec) {
  json j{{"triplet", triplet_to(spec.triplet)},
         {"dimension", spec.dimension},
         {"level", spec.level},
         {"seed", spec.seed}};
  return j.dump();
}

RunConfig parse_run_config(std::string_view text) {
  const json j = parse(text, "config");
  require_object(j, "", {"spec", "regions", "flow", "semilattice", "suite", "seed", "out", "paths", "level", "mesh",
                         "volumes", "epsilons", "threads", "tolerances"});
  RunConfig c;
  c.canonical = j.dump();
  if (j.contains("spec")) c.spec = spec_from(j.at("spec"), "spec");
  if (j.contains("regions")) c.regions = regions_from(j.at("regions"), "regions");
  if (j.contains("flow")) c.flow = flow_from(j.at("flow"), "flow");
  if (j.contains("semilattice")) c.semilattice = semilattice_from(j.at("semilattice"), "semilattice");
  if (j.contains("suite")) {
    if (!j.at("suite").is_string()) throw ConfigError("suite", "expected a string");
    c.suite = j.at("suite").get<std::string>();
  }
  if (j.contains("seed")) c.seed = unsigned_value(j.at("seed"), "seed");
  if (j.contains("out")) {
    if (!j.at("out").is_string()) throw ConfigError("out", "expected a path");
    c.out = j.at("out").get<std::string>();
  }
  if (j.contains("paths")) c.paths = unsigned_value(j.at("paths"), "paths");
  if (j.contains("level")) c.level = static_cast<int>(unsigned_value(j.at("level"), "level"));
  if (j.contains("mesh")) c.mesh = unsigned_value(j.at("mesh"), "mesh");
  if (j.contains("volumes")) c.volumes = numbers(j.at("volumes"), "volumes");
  if (j.contains("epsilons")) c.epsilons = numbers(j.at("epsilons"), "epsilons");
  if (j.contains("threads")) c.threads = static_cast<unsigned>(unsigned_value(j.at("threads"), "threads"));
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    require_object(t, "tolerances", {"ecf_c", "kernel_tol"});
    c.tolerances.ecf_c = number_or(t, "ecf_c", "tolerances", c.tolerances.ecf_c);
    c.tolerances.kernel_tol = number_or(t, "kernel_tol", "tolerances", c.tolerances.kernel_tol);
    if (!(c.tolerances.ecf_c > 0.0)) throw ConfigError("tolerances.ecf_c", "must be > 0");
    if (!(c.tolerances.kernel_tol > 0.0)) throw ConfigError("tolerances.kernel_tol", "must be > 0");
  }
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace silevy::config
