#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "propshift/evalkit.hpp"

namespace testing_support {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(PROPSHIFT_DATA_DIR) / name;
}

inline const std::vector<propshift::QueryPairRecord>& fixtures() {
  static const auto records = propshift::load_fixtures(data_path("appendix_queries.csv"));
  return records;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("propshift-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
