#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crowdsmell::cli {

/// Exit codes: 0 success, 1 data error, 2 usage error. Errors are written to
/// `err` as one JSON object: {"error": {"code": ..., "message": ...}}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace crowdsmell::cli
