// Copyright 2026 The epirl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// Provenance record written by every command before its outputs.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "epirl/config.hpp"
#include "epirl/errors.hpp"
#include "epirl/random.hpp"

namespace epirl {

inline constexpr const char* kVersion = "0.1.0";

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string file_hash(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return "fnv1a64:" + hex64(fnv1a64(bytes));
}

struct ManifestInput {
  std::string role;
  std::string path;
  std::string hash;
};

struct RunManifest {
  std::string command;
  json config;
  std::vector<std::uint64_t> seeds;
  std::vector<ManifestInput> inputs;
  std::string out_dir;
  json arguments = json::object();

  void add_input(const std::string& role, const std::string& path) {
    inputs.push_back({role, path, file_hash(path)});
  }

  json to_json() const {
    json in = json::array();
    for (const auto& i : inputs) in.push_back({{"role", i.role}, {"path", i.path}, {"hash", i.hash}});
    return {{"tool", "epirl"},
            {"version", kVersion},
            {"command", command},
            {"seeds", seeds},
            {"arguments", arguments},
            {"inputs", in},
            {"out_dir", out_dir},
            {"config", config}};
  }

  void write(const std::filesystem::path& dir) const {
    std::ofstream os(dir / "manifest.json");
    if (!os) throw Error("cannot write " + (dir / "manifest.json").string());
    os << to_json().dump(2) << '\n';
  }
};

}  // namespace epirl
