/*
 * Copyright 2026 The occpred Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OCCPRED_CONFIG_MANIFEST_H_
#define OCCPRED_CONFIG_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace occpred {

inline constexpr const char* kManifestFile = "run_manifest.json";
inline constexpr const char* kConfigFile = "config.json";

struct ManifestFile {
  std::string path;  // relative to the output directory, '/' separated
  std::string sha256;
};

// Provenance of one command's output directory. Contains no timestamps, so
// identical inputs give byte-identical manifests.
struct Manifest {
  std::string command;
  std::string code_version;
  std::string config_sha256;  // of config.json, byte for byte
  std::map<std::string, std::uint64_t> seeds;
  std::vector<ManifestFile> files;  // sorted by path
  std::vector<std::string> unhashed;  // outputs that vary between runs (timings)
};

nlohmann::json ToJson(const Manifest& manifest);
Manifest ManifestFromJson(const nlohmann::json& json);

// Writes config.json (the canonical config text), hashes every regular file
// under `dir` except the manifest itself and the `unhashed` ones, and writes
// run_manifest.json. Returns the manifest.
Manifest WriteManifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config,
                       const std::map<std::string, std::uint64_t>& seeds,
                       const std::vector<std::string>& unhashed = {});

// Reads run_manifest.json and checks the config hash and every file hash
// against the directory contents; returns the list of mismatching paths
// (empty when consistent).
std::vector<std::string> VerifyManifest(const std::filesystem::path& dir);

// sha256 of the manifest file itself (the reproducibility fingerprint).
std::string ManifestHash(const std::filesystem::path& dir);

}  // namespace occpred

#endif  // OCCPRED_CONFIG_MANIFEST_H_
