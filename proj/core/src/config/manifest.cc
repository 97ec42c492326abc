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

#include "occpred/config/manifest.h"

#include <algorithm>

#include "occpred/common/binary_io.h"
#include "occpred/common/error.h"
#include "occpred/common/hash.h"
#include "occpred/common/version.h"

namespace occpred {

nlohmann::json ToJson(const Manifest& m) {
  nlohmann::json files = nlohmann::json::array();
  for (const ManifestFile& f : m.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return {{"command", m.command},
          {"code_version", m.code_version},
          {"config_sha256", m.config_sha256},
          {"seeds", m.seeds},
          {"files", files},
          {"unhashed", m.unhashed}};
}

Manifest ManifestFromJson(const nlohmann::json& json) {
  Manifest m;
  try {
    m.command = json.at("command").get<std::string>();
    m.code_version = json.at("code_version").get<std::string>();
    m.config_sha256 = json.at("config_sha256").get<std::string>();
    m.seeds = json.at("seeds").get<std::map<std::string, std::uint64_t>>();
    for (const auto& f : json.at("files")) {
      m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
    }
    m.unhashed = json.value("unhashed", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kIoError, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

Manifest WriteManifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config,
                       const std::map<std::string, std::uint64_t>& seeds, const std::vector<std::string>& unhashed) {
  const std::string config_text = config.dump(2) + "\n";
  WriteFileText(dir / kConfigFile, config_text);
  Manifest m;
  m.command = command;
  m.code_version = std::string(CodeVersion());
  m.config_sha256 = Sha256Hex(config_text);
  m.seeds = seeds;
  m.unhashed = unhashed;
  std::sort(m.unhashed.begin(), m.unhashed.end());
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = std::filesystem::relative(entry.path(), dir).generic_string();
    if (rel == kManifestFile || std::binary_search(m.unhashed.begin(), m.unhashed.end(), rel)) continue;
    m.files.push_back({rel, Sha256File(entry.path())});
  }
  std::sort(m.files.begin(), m.files.end(), [](const ManifestFile& a, const ManifestFile& b) { return a.path < b.path; });
  WriteFileText(dir / kManifestFile, ToJson(m).dump(2) + "\n");
  return m;
}

std::vector<std::string> VerifyManifest(const std::filesystem::path& dir) {
  const nlohmann::json json = nlohmann::json::parse(ReadFileText(dir / kManifestFile), nullptr, false);
  Require(!json.is_discarded(), ErrorCode::kIoError, "manifest in " + dir.string() + " is not valid JSON");
  const Manifest m = ManifestFromJson(json);
  std::vector<std::string> bad;
  if (!std::filesystem::exists(dir / kConfigFile) || Sha256File(dir / kConfigFile) != m.config_sha256) {
    bad.push_back(kConfigFile);
  }
  for (const ManifestFile& f : m.files) {
    if (!std::filesystem::exists(dir / f.path) || Sha256File(dir / f.path) != f.sha256) bad.push_back(f.path);
  }
  return bad;
}

std::string ManifestHash(const std::filesystem::path& dir) { return Sha256File(dir / kManifestFile); }

}  // namespace occpred
