#pragma once

#include <string>
#include <string_view>

#include "crowdsmell/java/ast.hpp"

namespace crowdsmell::java {

/// Parses one Java 8 compilation unit. Throws Error(ParseError) with the
/// offending line on syntax it cannot handle.
CompilationUnit parse_compilation_unit(std::string_view source, std::string path = {});

}  // namespace crowdsmell::java
