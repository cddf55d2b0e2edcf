#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "silevy/flows.hpp"
#include "silevy/indexing.hpp"
#include "silevy/laws.hpp"
#include "silevy/simulate.hpp"

namespace silevy::config {

/// Parsers for the JSON literals accepted on the command line. Unknown keys
/// and malformed values throw ConfigError naming the field path.

LevyTriplet parse_triplet(std::string_view json);
/// {"triplet": {...}, "dimension": 2, "level": 4, "seed": 7}
ProcessSpec parse_spec(std::string_view json);
/// [{"u0": [1, 1], "sub": [[0.5, 1]]}, ...]
std::vector<IncrementRegion> parse_regions(std::string_view json);
/// {"vertices": [[0, 1], [1, 1]], "knots": [0, 1]} or {"segments": [...]}
/// or {"shipped": "diagonal"} for the dimension-2 flows of the verify suites.
SimpleFlow parse_flow(std::string_view json);
/// [[0, 0], [0.5, 1], ...]
std::vector<RectSet> parse_semilattice(std::string_view json);

std::string triplet_to_json(const LevyTriplet& triplet);
std::string spec_to_json(const ProcessSpec& spec);

struct Tolerances {
  double ecf_c = 5.0;
  double kernel_tol = 1e-5;
};

struct RunConfig {
  std::optional<ProcessSpec> spec;
  std::vector<IncrementRegion> regions;
  std::optional<SimpleFlow> flow;
  std::vector<RectSet> semilattice;
  std::optional<std::string> suite;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> paths;
  std::optional<int> level;
  std::optional<std::size_t> mesh;
  std::vector<double> volumes;
  std::vector<double> epsilons;
  std::optional<unsigned> threads;
  Tolerances tolerances;
  /// Key-sorted JSON text of the input, the basis of the manifest hash.
  std::string canonical = "{}";
};

RunConfig parse_run_config(std::string_view json);

std::string read_file(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

}  // namespace silevy::config
