#include "carleman/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "json.hpp"  // vendored nlohmann/json

namespace carleman {

std::string sha256_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("sha256: cannot open " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (is) {
    is.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<size_t>(is.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

void ManifestWriter::add(const std::string& relative_path) {
  files_.push_back(relative_path);
}

std::string ManifestWriter::finalize(const std::string& config_digest,
                                     uint64_t seed) {
  std::sort(files_.begin(), files_.end());
  nlohmann::ordered_json j;
  j["config_sha256"] = config_digest;
  j["seed"] = seed;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const std::string& rel : files_) {
    nlohmann::ordered_json f;
    f["path"] = rel;
    f["sha256"] = sha256_file(out_dir_ + "/" + rel);
    files.push_back(f);
  }
  j["files"] = files;
  const std::string path = out_dir_ + "/manifest.json";
  std::ofstream os(path);
  os << j.dump(2) << "\n";
  return path;
}

}  // namespace carleman
