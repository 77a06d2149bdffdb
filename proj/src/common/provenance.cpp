#include "crowdsmell/common/provenance.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "crowdsmell/error.hpp"

namespace crowdsmell {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::vector<std::string> Provenance::comment_lines() const {
  std::vector<std::string> lines;
  lines.push_back("tool=" + std::string(kToolName) + " " + std::string(kToolVersion));
  if (seed) lines.push_back("seed=" + std::to_string(*seed));
  for (const auto& input : inputs) lines.push_back("input=" + input);
  return lines;
}

}  // namespace crowdsmell
