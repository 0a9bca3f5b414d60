// Copyright 2026 The qvotes Authors. All Rights Reserved.
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

#ifndef QVOTES_TOOLS_MANIFEST_H_
#define QVOTES_TOOLS_MANIFEST_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qvotes::cli {

struct RunManifest {
  std::string tool_version;
  std::vector<std::string> invocation;
  std::optional<std::uint64_t> master_seed;
  // (path, "sha256:<hex>") in the order the inputs were named.
  std::vector<std::pair<std::string, std::string>> input_digests;
  std::string timestamp;
};

// Hex SHA-256 of the file's bytes. Throws InputError if it cannot be read.
std::string Sha256File(const std::string& path);

// Current time as 2026-01-02T03:04:05Z.
std::string UtcTimestamp();

std::string ManifestToJson(const RunManifest& manifest);

// "out/curves.csv" -> "out/curves.manifest.json".
std::string ManifestPathFor(const std::string& output_path);

}  // namespace qvotes::cli

#endif  // QVOTES_TOOLS_MANIFEST_H_
