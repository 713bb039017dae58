#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "narrex/bundle_io.hpp"
#include "narrex/reasoner.hpp"
#include "narrex/space.hpp"

namespace narrex::testing {

inline std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(NARREX_DATA_DIR) / name; }

inline std::filesystem::path test_data_path(const std::string& name) {
  return std::filesystem::path(NARREX_TEST_DATA_DIR) / name;
}

inline std::filesystem::path golden_path(const std::string& name) {
  return std::filesystem::path(NARREX_GOLDEN_DIR) / name;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline const ExplanandumBundle& gdpr_bundle() {
  static const ExplanandumBundle bundle = load_bundle(data_path("gdpr_case.json"));
  return bundle;
}

inline std::shared_ptr<const ExplanatorySpace> make_space(const ExplanandumBundle& bundle,
                                                          HeuristicOrder order = kDefaultHeuristicOrder) {
  auto shared = std::make_shared<const ExplanandumBundle>(bundle);
  return std::make_shared<const ExplanatorySpace>(shared, derive(*shared), order);
}

inline Literal lit(std::string_view text) { return parse_literal(text); }

/// Unique scratch directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("narrex-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace narrex::testing
