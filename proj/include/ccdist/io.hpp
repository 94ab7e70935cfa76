// ccdist -- group-spec JSON, point parsing, and the run manifest.
#pragma once

#include <cstdint>
#include <string>

#include "ccdist/group.hpp"

namespace ccdist {

// Group-spec JSON: {"q": int, "m": int, "U": [[[row],...], ...]}.
StepTwoGroup parse_group_json(const std::string& text);
std::string group_to_json(const StepTwoGroup& G);

// Accepts a builtin fixture name or a path to a JSON spec file.
StepTwoGroup load_group(const std::string& name_or_path);

// Point syntax "x1,...,xq;t1,...,tm".
GroupPoint parse_point(const std::string& text, const StepTwoGroup& G);

// Full-roundtrip decimal formatting (17 significant digits).
std::string format_double(double v);

struct RunManifest {
  std::string command;
  std::string group_digest;
  std::string config_echo;
  std::uint64_t seed = 0;
  std::string version;
  double wall_time_s = 0.0;
};

// FNV-1a digest of the canonical group JSON.
std::string group_digest(const StepTwoGroup& G);

}  // namespace ccdist
