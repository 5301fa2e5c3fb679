#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ctxmine/method.hpp"

namespace ctxmine::code {

// Extracts every method declaration with a body from a compilation unit,
// including methods of nested and anonymous classes (attributed to their
// lexically enclosing named class). Comments are blanked before parsing so
// byte offsets and line numbers still match the original file.
// Throws ParseError when the file's brace structure cannot be parsed.
std::vector<MethodRecord> extract_methods(std::string_view source, std::string_view file_path);

}  // namespace ctxmine::code
