#include "cli_support.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "artic/error.hpp"
#include "artic/text_format.hpp"

namespace artic::cli {

namespace {

std::mutex log_mutex;

void log_line(std::string_view level, const std::string& message) {
  const std::lock_guard lock(log_mutex);
  std::cerr << "artic: " << level << message << '\n';
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error("cannot read " + path.string());
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("cannot write " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void emit_json(const json& j, const std::filesystem::path& path) {
  if (path.empty()) {
    std::cout << dump(j) << std::flush;
  } else {
    write_file(path, dump(j));
  }
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

void log_info(const CommonOptions& common, const std::string& message) {
  if (!common.quiet) log_line("", message);
}

void log_warning(const std::string& message) { log_line("warning: ", message); }

void log_error(const std::string& message) { log_line("error: ", message); }

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace artic::cli
