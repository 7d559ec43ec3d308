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

#include "cli_common.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>

#include "panofuse/io.hpp"

namespace panofuse::cli {

namespace {

std::string Hex(const unsigned char* data, unsigned len) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += kDigits[data[i] >> 4];
    out += kDigits[data[i] & 0xf];
  }
  return out;
}

std::string Sha256Bytes(const void* data, std::size_t size) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (EVP_Digest(data, size, md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  return Hex(md, len);
}

}  // namespace

std::string Sha256Hex(const std::filesystem::path& path) {
  const auto bytes = ReadBinaryFile(path);
  return Sha256Bytes(bytes.data(), bytes.size());
}

std::string Sha256OfFiles(const std::filesystem::path& root,
                          const std::vector<std::filesystem::path>& files) {
  std::vector<std::filesystem::path> sorted = files;
  std::sort(sorted.begin(), sorted.end());
  std::string listing;
  for (const auto& f : sorted) {
    listing += f.generic_string() + '\t' + Sha256Hex(root / f) + '\n';
  }
  return Sha256Bytes(listing.data(), listing.size());
}

unsigned WorkerCount(std::size_t jobs) {
  unsigned n = 0;
  if (const char* env = std::getenv("PANOFUSE_THREADS")) {
    n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = WorkerCount(n);
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void Manifest::add_input(const std::string& name, const std::filesystem::path& path) {
  inputs[name] = {{"path", path.string()}, {"sha256", Sha256Hex(path)}};
}

nlohmann::json Manifest::to_json() const {
  return {{"tool", "panofuse"},   {"version", kVersion}, {"command", command},
          {"config", config},     {"inputs", inputs},    {"outputs", outputs},
          {"timings_us", timings_us}};
}

std::vector<std::filesystem::path> ListPngs(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) {
    throw Error(ErrorCode::kIo, root.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      out.push_back(std::filesystem::relative(entry.path(), root));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace panofuse::cli
