#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testutil {

inline std::string env_or_fail(const char* name) {
  const char* v = std::getenv(name);
  if (!v) throw std::runtime_error(std::string("missing env var ") + name);
  return v;
}

inline std::string fixtures_dir() { return env_or_fail("VAGNN_FIXTURES"); }
inline std::string cli_path() { return env_or_fail("VAGNN_CLI"); }

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    std::random_device rd;
    std::ostringstream name;
    name << "vagnn_test_" << std::hex << rd() << rd();
    path = std::filesystem::temp_directory_path() / name.str();
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path.string(); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << f.rdbuf();
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing " + path);
  f << content;
}

// Runs a shell command with stdout+stderr captured; returns the exit code.
inline int run_cmd(const std::string& cmd, std::string* output = nullptr) {
  const TempDir dir;
  const std::string out_path = dir / "out.txt";
  const std::string full = cmd + " >" + out_path + " 2>&1";
  const int status = std::system(full.c_str());
  if (output) *output = read_file(out_path);
  if (status < 0) throw std::runtime_error("failed to launch: " + cmd);
  return WEXITSTATUS(status);
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace testutil
