#pragma once

// File I/O, logging and worker-pool helpers shared by the artic subcommands.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include "artic/geometry.hpp"
#include "json.hpp"

namespace artic::cli {

using nlohmann::json;

/// Flags accepted by every subcommand.
struct CommonOptions {
  int jobs = 1;
  std::uint64_t seed = 0;
  bool strict = false;
  bool quiet = false;
};

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so readers never see a partial file.
void write_file(const std::filesystem::path& path, std::string_view data);

/// Pretty-printed JSON with sorted keys and a trailing newline.
std::string dump(const json& j);
/// Writes `j` to `path`, or to standard output when `path` is empty.
void emit_json(const json& j, const std::filesystem::path& path);

json vec3_json(const Vec3& v);

void log_info(const CommonOptions& common, const std::string& message);
void log_warning(const std::string& message);
void log_error(const std::string& message);

/// Runs task(i) for i in [0, count) on up to `jobs` threads. Every task runs; the
/// first exception (lowest index) is rethrown after all have finished.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task);

}  // namespace artic::cli
