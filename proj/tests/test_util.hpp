#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "scalesift/json_io.hpp"

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("scalesift-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

#include <memory>

#include "scalesift/distill.hpp"
#include "scalesift/pipeline.hpp"
#include "scalesift/world.hpp"

// Default world, its (0.5, 0.2, 0.3) split, and a KD model trained with the
// default config. Built once per test binary.
struct DefaultSetup {
  std::shared_ptr<const scalesift::World> world;
  scalesift::Split split;
  scalesift::TrainResult trained;
  std::shared_ptr<const scalesift::KDModel> model;
  scalesift::Providers providers;
  std::vector<std::string> seen;
  std::vector<std::string> all_concepts;
};

const DefaultSetup& default_setup();
