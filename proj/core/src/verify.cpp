#include "silevy/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "silevy/config.hpp"
#include "silevy/error.hpp"
#include "silevy/flows.hpp"
#include "silevy/jumps.hpp"
#include "silevy/markov.hpp"
#include "silevy/batch.hpp"

namespace silevy::verify {
namespace {

using stats::TestReport;
using Rows = std::vector<std::vector<double>>;

constexpr std::size_t kPaths = 10000;

const std::vector<double>& zgrid() {
  static const std::vector<double> z = [] {
    std::vector<double> v;
    for (int k = 1; k <= 16; ++k) v.push_back(0.25 * k);
    return v;
  }();
  return z;
}

const std::vector<std::vector<double>>& lambda_tuples() {
  static const std::vector<std::vector<double>> l = {
      {0.5, 0.5, 0.5},   {1.0, -1.0, 0.3}, {-0.7, 0.3, 1.1}, {1.0, 1.0, -0.5},
      {0.25, 1.5, 0.0}, {-1.2, -0.4, 0.6}, {2.0, 0.5, -1.0}, {0.8, -1.6, 0.2},
  };
  return l;
}

std::uint64_t seed_for(const Options& o, std::string_view tag) { return rng::combine(o.seed, config::fnv1a(tag)); }

ProcessSpec make_spec(const LevyTriplet& t, std::size_t dim, int level, std::uint64_t seed) {
  ProcessSpec s;
  s.triplet = t;
  s.dimension = dim;
  s.level = level;
  s.seed = seed;
  return s;
}

TestReport below(std::string name, double stat, double thr) { return {std::move(name), stat, thr, stat < thr}; }
TestReport at_most(std::string name, double stat, double thr) { return {std::move(name), stat, thr, stat <= thr}; }
TestReport at_least(std::string name, double stat, double thr) { return {std::move(name), stat, thr, stat >= thr}; }

RectSet R(double x, double y) { return RectSet{x, y}; }
IncrementRegion region(RectSet u, std::vector<RectSet> v = {}) { return IncrementRegion(u, std::move(v)); }

double cf_deviation(std::span<const double> sample, double volume, const LevyTriplet& t, double c) {
  const auto e = stats::ecf(sample, zgrid(), c);
  return e.max_deviation([&](double z) { return std::exp(volume * char_exponent(t, z)); });
}

double radius(const Options& o, std::size_t n) { return o.ecf_c / std::sqrt(static_cast<double>(n)); }

// Max disagreement between raw, canonical and inclusion-exclusion evaluation,
// and the additivity defect of random splits, over `count` random regions.
std::pair<double, double> representation_gaps(const SamplePath& path, rng::Philox& gen, int count) {
  double rep = 0.0;
  double add = 0.0;
  const int level = path.level();
  const std::size_t dim = path.dim();
  for (int i = 0; i < count; ++i) {
    const IncrementRegion c = random_region(gen, level, dim);
    const double raw = evaluate(path, c);
    rep = std::max({rep, std::abs(raw - evaluate(path, canonical_form(c))),
                    std::abs(raw - evaluate_inclusion_exclusion(path, c)),
                    std::abs(raw - evaluate_inclusion_exclusion(path, canonical_form(c)))});
    const RectSet w = random_region(gen, level, dim).u0();
    const RectSet top = c.u0().intersect(w);
    std::vector<RectSet> inner;
    for (const auto& s : c.subtracted()) inner.push_back(s.intersect(top));
    std::vector<RectSet> outer = c.subtracted();
    outer.push_back(top);
    const double parts = evaluate(path, IncrementRegion(top, inner)) + evaluate(path, IncrementRegion(c.u0(), outer));
    add = std::max(add, std::abs(raw - parts));
  }
  return {rep, add};
}

// ---------------------------------------------------------------------------

SuiteResult brownian_core(const Options& o) {
  SuiteResult out{"brownian-core", {}, {}};
  const auto spec = make_spec(LevyTriplet::gaussian(1.0), 2, 3, seed_for(o, "brownian-core"));
  const std::vector<IncrementRegion> regions = {
      region(R(1, 0.5)),                      // 0 U
      region(R(0.5, 1)),                      // 1 V
      region(R(0.75, 0.75)),                  // 2 W
      region(R(1, 1), {R(0.5, 0.5)}),         // 3 C
      region(R(0.5, 0.5)),                    // 4 D1
      region(R(1, 1), {R(0.5, 1)}),           // 5 D2
      region(R(1, 1)),                        // 6 F0
  };
  const Rows rows = simulate_increments(spec, regions, kPaths, o.threads);
  const double n = static_cast<double>(kPaths);

  const std::vector<std::tuple<std::size_t, std::size_t, double>> pairs = {{0, 1, 0.25}, {0, 2, 0.375}, {1, 1, 0.5}};
  double worst = 0.0;
  for (const auto& [a, b, target] : pairs) {
    std::vector<double> prod;
    for (const auto& r : rows) prod.push_back(r[a] * r[b]);
    const double se = std::sqrt(stats::variance(prod) / n);
    worst = std::max(worst, std::abs(stats::mean(prod) - target) / se);
  }
  out.reports.push_back(at_most("brownian-core/covariance-standard-errors", worst, 3.0));

  const auto col3 = stats::column(rows, 3);
  out.reports.push_back(below("brownian-core/ecf", cf_deviation(col3, 0.75, spec.triplet, o.ecf_c), radius(o, kPaths)));

  const Rows second = simulate_increments(spec, std::vector<IncrementRegion>{regions[1]}, kPaths, o.threads, kPaths);
  const auto ks = stats::ks_two_sample(stats::column(rows, 0), stats::column(second, 0));
  out.reports.push_back(at_least("brownian-core/stationarity-ks-p", ks.p_value, 0.01));

  std::vector<std::pair<double, double>> zpairs;
  for (const auto& l : lambda_tuples()) zpairs.emplace_back(l[0], l[1]);
  const auto gap = stats::factorization_gap(stats::column(rows, 4), stats::column(rows, 5), zpairs, o.ecf_c);
  out.reports.push_back(below("brownian-core/independence", gap.gap, radius(o, kPaths)));

  rng::Philox gen(seed_for(o, "brownian-core/regions"), 0, 3);
  const auto [rep, add] = representation_gaps(sample_path(spec, 0), gen, 50);
  out.reports.push_back(at_most("brownian-core/representation", rep, 1e-12));
  out.reports.push_back(at_most("brownian-core/additivity", add, 1e-12));

  const std::vector<IncrementRegion> nested = {regions[6], regions[4]};
  double fdd = 0.0;
  for (const auto& l : lambda_tuples()) {
    Rows two;
    two.reserve(rows.size());
    for (const auto& r : rows) two.push_back({r[6], r[4]});
    const std::vector<double> lam = {l[0], l[1]};
    fdd = std::max(fdd, std::abs(stats::joint_ecf(two, lam) - fdd_char(spec, nested, lam)));
  }
  out.reports.push_back(below("brownian-core/fdd-nested", fdd, radius(o, kPaths)));

  // Continuity in probability along U_k = [0, 1/2 + 2^-k] shrinking to [0, 1/2].
  const int level = 12;
  const std::size_t paths = 4000;
  const auto line = make_spec(LevyTriplet::gaussian(1.0), 1, level, seed_for(o, "brownian-core/continuity"));
  std::vector<IncrementRegion> shrinking = {region(RectSet{0.5})};
  for (int k = 1; k <= level; ++k) shrinking.push_back(region(RectSet{0.5 + std::ldexp(1.0, -k)}));
  const Rows lrows = simulate_increments(line, shrinking, paths, o.threads);
  std::vector<double> prob;
  for (std::size_t k = 1; k < shrinking.size(); ++k) {
    std::size_t hits = 0;
    for (const auto& r : lrows) hits += std::abs(r[k] - r[0]) > 0.1 ? 1 : 0;
    prob.push_back(static_cast<double>(hits) / static_cast<double>(paths));
  }
  bool monotone = true;
  for (std::size_t k = 1; k < prob.size(); ++k) {
    const double se = std::sqrt((prob[k] * (1 - prob[k]) + prob[k - 1] * (1 - prob[k - 1])) / static_cast<double>(paths));
    if (prob[k] > prob[k - 1] + 2.0 * se) monotone = false;
  }
  out.reports.push_back({"brownian-core/continuity-in-probability", prob.back(), 0.05, monotone && prob.back() < 0.05});
  return out;
}

SuiteResult canonical(const Options& o) {
  SuiteResult out{"canonical", {}, {}};
  for (const char* name : {"brownian", "poisson", "compound-normal", "truncated-stable"}) {
    const auto spec = make_spec(shipped_triplet(name), 2, 3, seed_for(o, std::string("canonical/") + name));
    rng::Philox gen(spec.seed, 0, 3);
    std::vector<IncrementRegion> regions;
    for (int i = 0; i < 5; ++i) regions.push_back(random_region(gen, spec.level, spec.dimension));
    const Rows rows = simulate_increments(spec, regions, kPaths, o.threads);
    double worst = 0.0;
    for (std::size_t j = 0; j < regions.size(); ++j) {
      const double dev = cf_deviation(stats::column(rows, j), measure(regions[j]), spec.triplet, o.ecf_c);
      out.details.push_back({"canonical/" + std::string(name) + "/region-" + std::to_string(j), dev,
                             radius(o, kPaths), dev < radius(o, kPaths)});
      worst = std::max(worst, dev);
    }
    out.reports.push_back(below("canonical/" + std::string(name), worst, radius(o, kPaths)));
  }
  return out;
}

SuiteResult fdd(const Options& o) {
  SuiteResult out{"fdd", {}, {}};
  const std::vector<std::pair<std::string, std::vector<IncrementRegion>>> families = {
      {"nested", {region(R(1, 1)), region(R(0.5, 0.5))}},
      {"crossing", {region(R(1, 0.5)), region(R(0.5, 1))}},
      {"triple", {region(R(0.75, 0.5)), region(R(0.5, 0.75)), region(R(1, 1), {R(0.25, 0.25)})}},
  };
  for (const char* name : {"brownian", "jump-diffusion"}) {
    for (const auto& [fam, regions] : families) {
      const std::string tag = "fdd/" + std::string(name) + "/" + fam;
      const auto spec = make_spec(shipped_triplet(name), 2, 3, seed_for(o, tag));
      const Rows rows = simulate_increments(spec, regions, kPaths, o.threads);
      double worst = 0.0;
      for (const auto& l : lambda_tuples()) {
        const std::span<const double> lam(l.data(), regions.size());
        worst = std::max(worst, std::abs(stats::joint_ecf(rows, lam) - fdd_char(spec, regions, lam)));
      }
      out.reports.push_back(below(tag, worst, radius(o, kPaths)));
    }
  }
  const std::vector<IncrementRegion> disjoint = {region(R(0.5, 1)), region(R(1, 1), {R(0.5, 1)})};
  double worst = 0.0;
  for (const auto& nt : shipped_triplets()) {
    const auto spec = make_spec(nt.triplet, 2, 3, 0);
    for (const auto& l : lambda_tuples()) {
      const std::vector<double> lam = {l[0], l[1]};
      const auto joint = fdd_char(spec, disjoint, lam);
      const auto a = fdd_char(spec, std::span(disjoint.data(), 1), std::span(lam.data(), 1));
      const auto b = fdd_char(spec, std::span(disjoint.data() + 1, 1), std::span(lam.data() + 1, 1));
      worst = std::max(worst, std::abs(joint - a * b));
    }
  }
  out.reports.push_back(at_most("fdd/disjoint-factorization", worst, 1e-12));
  return out;
}

SuiteResult stationarity(const Options& o) {
  SuiteResult out{"stationarity", {}, {}};
  const std::vector<std::pair<IncrementRegion, IncrementRegion>> pairs = {
      {region(R(1, 0.5)), region(R(0.5, 1))},
      {region(R(0.25, 1)), region(R(1, 0.25))},
      {region(R(1, 1), {R(0.5, 1)}), region(R(0.5, 1))},
      {region(R(1, 1), {R(0.75, 1)}), region(R(0.5, 0.5))},
      {region(R(0.75, 0.75), {R(0.25, 0.75)}), region(R(0.5, 0.75))},
      {region(R(1, 1), {R(0.5, 1), R(1, 0.5)}), region(R(0.5, 0.5))},
      {region(R(0.125, 1)), region(R(1, 0.125))},
      {region(R(0.5, 0.25)), region(R(1, 1), {R(1, 0.875)})},
      {region(R(1, 0.75), {R(0.5, 0.75)}), region(R(0.75, 0.5))},
      {region(R(0.875, 0.5)), region(R(0.875, 1), {R(0.875, 0.5)})},
  };
  const auto spec = make_spec(shipped_triplet("jump-diffusion"), 2, 3, seed_for(o, "stationarity"));
  std::vector<IncrementRegion> first;
  std::vector<IncrementRegion> second;
  for (const auto& [a, b] : pairs) {
    first.push_back(a);
    second.push_back(b);
  }
  // Independent batches for the two members of each pair.
  const Rows ra = simulate_increments(spec, first, kPaths, o.threads, 0);
  const Rows rb = simulate_increments(spec, second, kPaths, o.threads, kPaths);
  const double alpha = 0.01 / static_cast<double>(pairs.size());
  std::size_t rejections = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto ks = stats::ks_two_sample(stats::column(ra, i), stats::column(rb, i));
    const bool ok = ks.p_value >= alpha;
    rejections += ok ? 0 : 1;
    out.details.push_back({"stationarity/pair-" + std::to_string(i) + "-ks-p", ks.p_value, alpha, ok});
  }
  out.reports.push_back(below("stationarity/rejections", static_cast<double>(rejections), 2.0));
  return out;
}

SuiteResult representation(const Options& o) {
  SuiteResult out{"representation", {}, {}};
  double rep = 0.0;
  double add = 0.0;
  for (const char* name : {"brownian", "jump-diffusion", "truncated-stable"}) {
    const auto spec = make_spec(shipped_triplet(name), 2, 4, seed_for(o, std::string("representation/") + name));
    rng::Philox gen(spec.seed, 0, 3);
    for (std::uint64_t p = 0; p < 4; ++p) {
      const auto [r, a] = representation_gaps(sample_path(spec, p), gen, 50);
      rep = std::max(rep, r);
      add = std::max(add, a);
    }
  }
  out.reports.push_back(at_most("representation/dual-forms", rep, 1e-12));
  out.reports.push_back(at_most("representation/additivity", add, 1e-12));
  return out;
}

SuiteResult flows(const Options& o) {
  SuiteResult out{"flows", {}, {}};
  const auto triplet = shipped_triplet("jump-diffusion");
  struct Run {
    std::string name;
    std::vector<double> mesh;
    Rows inc;
  };
  std::vector<Run> runs;
  std::size_t ks_tests = 0;
  for (const auto& f : shipped_flows()) {
    const auto spec = make_spec(triplet, 2, 3, seed_for(o, "flows/" + f.name));
    runs.push_back({f.name, f.mesh, projected_increments(spec, f.flow, f.mesh, kPaths, o.threads)});
    for (std::size_t k = 1; k + 1 < f.mesh.size(); ++k) {
      if (std::abs((f.mesh[k + 1] - f.mesh[k]) - (f.mesh[k] - f.mesh[k - 1])) < 1e-12) ++ks_tests;
    }
  }
  const double alpha = 0.01 / static_cast<double>(std::max<std::size_t>(ks_tests, 1));
  std::vector<std::pair<double, double>> zpairs;
  for (const auto& l : lambda_tuples()) zpairs.emplace_back(l[0], l[1]);
  for (const auto& run : runs) {
    double cf = 0.0;
    double min_p = 1.0;
    double gap = 0.0;
    const std::size_t steps = run.mesh.size() - 1;
    for (std::size_t k = 0; k < steps; ++k) {
      cf = std::max(cf, cf_deviation(stats::column(run.inc, k), run.mesh[k + 1] - run.mesh[k], triplet, o.ecf_c));
      if (k + 1 < steps) {
        const auto a = stats::column(run.inc, k);
        const auto b = stats::column(run.inc, k + 1);
        gap = std::max(gap, stats::factorization_gap(a, b, zpairs, o.ecf_c).gap);
        const double d0 = run.mesh[k + 1] - run.mesh[k];
        const double d1 = run.mesh[k + 2] - run.mesh[k + 1];
        if (std::abs(d1 - d0) < 1e-12) min_p = std::min(min_p, stats::ks_two_sample(a, b).p_value);
      }
    }
    out.reports.push_back(below("flows/" + run.name + "/ecf", cf, radius(o, kPaths)));
    out.reports.push_back(at_least("flows/" + run.name + "/stationarity-ks-p", min_p, alpha));
    out.reports.push_back(below("flows/" + run.name + "/independence", gap, radius(o, kPaths)));
  }
  return out;
}

SuiteResult chapman_kolmogorov(const Options& o) {
  SuiteResult out{"chapman-kolmogorov", {}, {}};
  const std::vector<std::pair<std::string, LevyTriplet>> kernels = {
      {"gaussian", LevyTriplet::gaussian(1.0)},
      {"compound-poisson", LevyTriplet::compound_poisson(1.0, MarkDistribution::point(1.0))},
  };
  const std::vector<std::pair<double, double>> volumes = {{0.0, 1.0}, {0.5, 0.5}, {0.3, 0.7}};
  const std::vector<RectSet> crossing = {RectSet::minimal(2), R(0.5, 0.5), R(1, 0.5), R(0.5, 1)};
  for (const auto& [name, t] : kernels) {
    const TransitionKernel kernel(t);
    for (const auto& [v1, v2] : volumes) {
      const auto r = chapman_kolmogorov_check(kernel, v1, v2);
      std::ostringstream tag;
      tag << "chapman-kolmogorov/" << name << "/" << v1 << "+" << v2;
      out.reports.push_back(below(tag.str(), r.max_error, o.kernel_tol));
    }
    const auto law = semilattice_fdd(kernel, crossing);
    out.reports.push_back(below("chapman-kolmogorov/" + name + "/semilattice-product", law.total_variation(),
                                o.kernel_tol));
  }
  return out;
}

SuiteResult semigroup(const Options& o) {
  SuiteResult out{"semigroup", {}, {}};
  for (const auto& nt : shipped_triplets()) {
    const GridLaw half = mu_power_t(nt.triplet, 0.5);
    const GridLaw one = mu_power_t(nt.triplet, 1.0);
    out.reports.push_back(below("semigroup/" + nt.name, total_variation(convolve(half, half), one), o.kernel_tol));
  }
  return out;
}

SuiteResult jumps(const Options& o) {
  SuiteResult out{"jumps", {}, {}};
  const double kInf = std::numeric_limits<double>::infinity();
  const auto triplet = shipped_triplet("jump-diffusion");
  const auto& nu = triplet.nu;
  const auto spec = make_spec(triplet, 2, 1, seed_for(o, "jumps/means"));
  const MarkSet up = {Interval::open(1.0, kInf)};
  const MarkSet down = {Interval::open(-kInf, -1.0)};
  const MarkSet both = {up[0], down[0]};
  const std::vector<std::tuple<std::string, RectSet, MarkSet>> cases = {
      {"quarter-up", R(0.5, 0.5), up}, {"half-down", R(1, 0.5), down}, {"full-both", R(1, 1), both}};
  std::vector<std::vector<double>> counts(cases.size());
  std::vector<double> n_up;
  std::vector<double> n_down;
  for (std::size_t p = 0; p < kPaths; ++p) {
    const SamplePath path = sample_path(spec, p);
    for (std::size_t c = 0; c < cases.size(); ++c) {
      counts[c].push_back(static_cast<double>(count_jumps(path, std::get<1>(cases[c]), std::get<2>(cases[c]))));
    }
    n_up.push_back(static_cast<double>(count_jumps(path, R(1, 1), up)));
    n_down.push_back(static_cast<double>(count_jumps(path, R(1, 1), down)));
  }
  double worst = 0.0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const double target = std::get<1>(cases[c]).measure() * nu.mass(std::get<2>(cases[c]));
    const double se = std::sqrt(stats::variance(counts[c]) / static_cast<double>(kPaths));
    const double z = std::abs(stats::mean(counts[c]) - target) / se;
    out.details.push_back({"jumps/mean-count/" + std::get<0>(cases[c]), z, 3.0, z <= 3.0});
    worst = std::max(worst, z);
  }
  out.reports.push_back(at_most("jumps/mean-count-standard-errors", worst, 3.0));
  out.reports.push_back(at_most("jumps/disjoint-correlation", std::abs(stats::correlation(n_up, n_down)),
                                3.0 / std::sqrt(static_cast<double>(kPaths))));

  const int level = 8;
  for (const char* name : {"jump-diffusion", "compound-two-point"}) {
    const LevyTriplet t = std::string(name) == "jump-diffusion"
                              ? triplet
                              : LevyTriplet::compound_poisson(5.0, MarkDistribution::two_point(-1.5, 2.0, 0.4));
    const auto rspec = make_spec(t, 2, level, seed_for(o, std::string("jumps/recovery/") + name));
    const DissectionLevel grid(level, 2);
    const double threshold = 0.5 * t.nu.min_abs_jump();
    const double tol = std::max(4.0 * t.sigma * std::ldexp(1.0, -level), 1e-12);
    std::size_t failures = 0;
    std::size_t skipped = 0;
    for (std::size_t p = 0; p < 100; ++p) {
      const SamplePath path = sample_path(rspec, p);
      std::map<std::size_t, double> planted;
      bool separated = true;
      for (const auto& j : path.jumps()) separated = planted.emplace(grid.cell_index(j.location), j.mark).second && separated;
      if (!separated) {
        ++skipped;
        continue;
      }
      const auto found = extract_jumps(path, level, threshold);
      bool ok = found.size() == planted.size();
      for (const auto& r : found) {
        const auto it = planted.find(grid.cell_index(r.location));
        ok = ok && it != planted.end() && std::abs(it->second - r.mark) <= tol;
      }
      failures += ok ? 0 : 1;
    }
    out.details.push_back({"jumps/recovery/" + std::string(name) + "/unseparated-paths", static_cast<double>(skipped),
                           100.0, true});
    out.reports.push_back(at_most("jumps/recovery/" + std::string(name) + "/failed-paths",
                                  static_cast<double>(failures), 0.0));
  }
  return out;
}

SuiteResult levy_ito(const Options& o) {
  SuiteResult out{"levy-ito", {}, {}};
  double worst = 0.0;
  for (const char* name : {"poisson", "compound-normal", "jump-diffusion"}) {
    const auto spec = make_spec(shipped_triplet(name), 2, 4, seed_for(o, std::string("levy-ito/") + name));
    for (std::uint64_t p = 0; p < 20; ++p) {
      worst = std::max(worst, levy_ito_decompose(sample_path(spec, p), {0.1, 0.01, 0.001}).reconstruction_error);
    }
  }
  out.reports.push_back(at_most("levy-ito/reconstruction", worst, 1e-12));

  TruncatedStable ts;
  ts.alpha = 1.5;
  ts.scale = 0.1;
  ts.epsilon = 1e-3;
  ts.cutoff = 10.0;
  const auto spec = make_spec(LevyTriplet::truncated_stable(ts), 2, 4, seed_for(o, "levy-ito/tail"));
  const std::vector<double> eps = {0.1, 0.01, 0.001};
  std::vector<double> curve(eps.size(), 0.0);
  const std::size_t paths = 32;
  for (std::uint64_t p = 0; p < paths; ++p) {
    const auto r = levy_ito_decompose(sample_path(spec, p), eps);
    for (std::size_t i = 0; i < eps.size(); ++i) curve[i] += r.tail_curve[i] / static_cast<double>(paths);
  }
  double ratio = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    out.details.push_back({"levy-ito/tail-curve/eps=" + std::to_string(eps[i]), curve[i], 0.0, true});
    if (i > 0) ratio = std::max(ratio, curve[i - 1] > 0.0 ? curve[i] / curve[i - 1] : std::numeric_limits<double>::infinity());
  }
  out.reports.push_back(below("levy-ito/tail-curve-max-ratio", ratio, 1.0));
  return out;
}

SuiteResult continuity(const Options& o) {
  SuiteResult out{"continuity", {}, {}};
  const auto spec = make_spec(LevyTriplet::gaussian(1.0), 2, 8, seed_for(o, "continuity/sup"));
  const std::vector<int> levels = {3, 4, 5, 6, 7, 8};
  const std::size_t paths = 200;
  const auto sups = run_batch<std::vector<double>>(paths, o.threads, [&](std::size_t p) {
    return gaussian_sup_diagnostic(sample_path(spec, p), levels);
  });
  std::size_t decreasing = 0;
  for (const auto& s : sups) {
    bool ok = true;
    for (std::size_t k = 1; k < s.size(); ++k) ok = ok && s[k] < s[k - 1];
    decreasing += ok ? 1 : 0;
  }
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double med = stats::median(stats::column(sups, k));
    out.details.push_back({"continuity/median-S" + std::to_string(levels[k]), med, 0.0, true});
  }
  out.reports.push_back(at_least("continuity/paths-with-decreasing-S", static_cast<double>(decreasing) / paths, 0.95));

  const int level = 3;
  const double cell_sd = std::ldexp(1.0, -level);  // 2^{-nN/2} with N = 2
  const std::size_t many = 1000;
  const auto brown = make_spec(LevyTriplet::gaussian(1.0), 2, level, seed_for(o, "continuity/dichotomy"));
  const auto quiet = run_batch<int>(many, o.threads, [&](std::size_t p) {
    return extract_jumps(sample_path(brown, p), level, 4.0 * cell_sd * brown.triplet.sigma).empty() ? 1 : 0;
  });
  const double frac = static_cast<double>(std::accumulate(quiet.begin(), quiet.end(), 0)) / many;
  out.reports.push_back(at_least("continuity/brownian-paths-without-jumps", frac, 0.99));

  for (const char* name : {"poisson", "jump-diffusion"}) {
    const auto t = shipped_triplet(name);
    const auto s = make_spec(t, 2, level, seed_for(o, std::string("continuity/dichotomy/") + name));
    const double threshold = t.sigma > 0.0 ? 4.0 * cell_sd * t.sigma : 0.5 * t.nu.min_abs_jump();
    const auto hit = run_batch<int>(many, o.threads, [&](std::size_t p) {
      return extract_jumps(sample_path(s, p), level, threshold).empty() ? 0 : 1;
    });
    const double rate = static_cast<double>(std::accumulate(hit.begin(), hit.end(), 0)) / many;
    const double target = 1.0 - std::exp(-t.nu.total_mass());
    const double se = std::sqrt(target * (1.0 - target) / many);
    out.reports.push_back(at_most("continuity/" + std::string(name) + "-jump-detection-standard-errors",
                                  std::abs(rate - target) / se, 3.0));
  }
  return out;
}

SuiteResult determinism(const Options& o) {
  SuiteResult out{"determinism", {}, {}};
  for (const char* name : {"fdd", "representation", "semigroup"}) {
    Options a = o;
    a.threads = 1;
    Options b = o;
    b.threads = 2;
    const std::string first = run_suite(name, a).to_json();
    const std::string again = run_suite(name, a).to_json();
    const std::string threaded = run_suite(name, b).to_json();
    const double differing = (first == again ? 0.0 : 1.0) + (first == threaded ? 0.0 : 1.0);
    out.reports.push_back(at_most(std::string("determinism/") + name, differing, 0.0));
  }
  return out;
}

const std::map<std::string, std::function<SuiteResult(const Options&)>>& registry() {
  static const std::map<std::string, std::function<SuiteResult(const Options&)>> r = {
      {"brownian-core", brownian_core},
      {"canonical", canonical},
      {"fdd", fdd},
      {"stationarity", stationarity},
      {"representation", representation},
      {"flows", flows},
      {"chapman-kolmogorov", chapman_kolmogorov},
      {"semigroup", semigroup},
      {"jumps", jumps},
      {"levy-ito", levy_ito},
      {"continuity", continuity},
      {"determinism", determinism},
  };
  return r;
}

}  // namespace

bool SuiteResult::passed() const {
  return std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.pass; });
}

std::string SuiteResult::to_json() const {
  auto encode = [](const std::vector<TestReport>& list) { return nlohmann::ordered_json::parse(stats::to_json(list)); };
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["pass"] = passed();
  j["reports"] = encode(reports);
  j["details"] = encode(details);
  return j.dump(2);
}

std::vector<NamedTriplet> shipped_triplets() {
  TruncatedStable ts;
  ts.alpha = 1.5;
  ts.scale = 0.2;
  ts.epsilon = 0.05;
  ts.cutoff = 10.0;
  return {
      {"brownian", LevyTriplet::gaussian(1.0)},
      {"poisson", LevyTriplet::compound_poisson(2.0, MarkDistribution::point(1.0))},
      {"compound-normal", LevyTriplet::compound_poisson(1.0, MarkDistribution::normal(0.0, 1.0))},
      {"truncated-stable", LevyTriplet::truncated_stable(ts)},
      {"jump-diffusion", LevyTriplet::compound_poisson(5.0, MarkDistribution::two_point(-1.5, 2.0, 0.4), 0.0, 0.5)},
      {"deterministic", LevyTriplet::deterministic(1.0)},
  };
}

LevyTriplet shipped_triplet(const std::string& name) {
  for (auto& nt : shipped_triplets()) {
    if (nt.name == name) return nt.triplet;
  }
  throw ConfigError("triplet", "no shipped triplet named '" + name + "'");
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "brownian-core", "canonical", "fdd",      "stationarity", "representation", "flows",
      "chapman-kolmogorov", "semigroup", "jumps", "levy-ito",   "continuity",     "determinism",
  };
  return names;
}

SuiteResult run_suite(const std::string& name, const Options& options) {
  const auto& r = registry();
  const auto it = r.find(name);
  if (it == r.end()) throw ConfigError("suite", "unknown suite '" + name + "'");
  return it->second(options);
}

std::vector<SuiteResult> run(const std::string& name, const Options& options) {
  std::vector<SuiteResult> out;
  if (name == "all") {
    for (const auto& n : suite_names()) out.push_back(run_suite(n, options));
  } else {
    out.push_back(run_suite(name, options));
  }
  return out;
}

IncrementRegion random_region(rng::Philox& gen, int level, std::size_t dim) {
  const std::uint64_t side = std::uint64_t{1} << level;
  const double width = std::ldexp(1.0, -level);
  for (;;) {
    std::array<double, kMaxDim> c{};
    for (std::size_t d = 0; d < dim; ++d) c[d] = static_cast<double>(1 + gen() % side) * width;
    const RectSet u0(std::span<const double>(c.data(), dim));
    std::vector<RectSet> sub;
    const std::uint64_t k = gen() % 4;
    for (std::uint64_t i = 0; i < k; ++i) {
      for (std::size_t d = 0; d < dim; ++d) c[d] = static_cast<double>(gen() % (side + 1)) * width;
      sub.emplace_back(std::span<const double>(c.data(), dim));
    }
    IncrementRegion r(u0, std::move(sub));
    if (measure(r) > 0.0) return r;
  }
}

}  // namespace silevy::verify
