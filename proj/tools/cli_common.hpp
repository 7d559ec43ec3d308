// Copyright 2026 The Panofuse Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PANOFUSE_TOOLS_CLI_COMMON_HPP_
#define PANOFUSE_TOOLS_CLI_COMMON_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace panofuse::cli {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

/// Bad flag combinations or unusable configuration; exits with kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string Sha256Hex(const std::filesystem::path& path);

/// Digest over the sorted (relative path, file digest) pairs of `files`.
std::string Sha256OfFiles(const std::filesystem::path& root,
                          const std::vector<std::filesystem::path>& files);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  /// Microseconds since construction or the previous lap.
  double lap_us() {
    const auto now = std::chrono::steady_clock::now();
    const double us =
        std::chrono::duration<double, std::micro>(now - start_).count();
    start_ = now;
    return us;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Worker count: PANOFUSE_THREADS if set and positive, else the hardware
/// concurrency, never more than `jobs`.
unsigned WorkerCount(std::size_t jobs);

/// Runs fn(i) for i in [0, n) on WorkerCount(n) threads. The first
/// exception (lowest index) is rethrown after all workers finish.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

struct Manifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::array();
  nlohmann::json timings_us = nlohmann::json::object();

  void add_input(const std::string& name, const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// Sorted relative paths of every *.png below `root`.
std::vector<std::filesystem::path> ListPngs(const std::filesystem::path& root);

}  // namespace panofuse::cli

#endif  // PANOFUSE_TOOLS_CLI_COMMON_HPP_
