#pragma once

#include <string>
#include <vector>

namespace carleman {

/// SHA-256 of a file's contents, lowercase hex.
std::string sha256_file(const std::string& path);

/// Collects every artifact written during an experiment and serializes a
/// manifest JSON with per-file content hashes.
class ManifestWriter {
 public:
  explicit ManifestWriter(std::string out_dir) : out_dir_(std::move(out_dir)) {}

  /// Registers a file (path relative to the output directory).
  void add(const std::string& relative_path);

  /// Writes manifest.json into the output directory and returns its path.
  std::string finalize(const std::string& config_digest, uint64_t seed);

  const std::vector<std::string>& files() const { return files_; }

 private:
  std::string out_dir_;
  std::vector<std::string> files_;
};

}  // namespace carleman
