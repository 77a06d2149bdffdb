#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crowdsmell {

inline constexpr std::string_view kToolName = "crowdsmell";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 42;

std::string sha256_hex(std::string_view data);
std::string file_digest(const std::string& path);

/// Reproducibility header carried by every CLI output artifact.
struct Provenance {
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;  // "path=sha256:<hex>"

  /// "# key=value" comment lines for CSV artifacts (without the "# ").
  [[nodiscard]] std::vector<std::string> comment_lines() const;
};

}  // namespace crowdsmell
