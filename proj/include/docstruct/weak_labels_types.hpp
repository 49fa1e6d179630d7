#pragma once

#include <optional>
#include <string>
#include <vector>

#include "docstruct/geometry.hpp"

namespace docstruct {

enum class TokenKind {
  text_token,
  environment_begin,
  environment_end,
  command,
};

std::string_view to_string(TokenKind k);
std::optional<TokenKind> token_kind_from_string(std::string_view name);

// One unit of a rendered source stream: a text token's box, an environment
// boundary, or a command with the box of its rendered argument.
struct RenderRecord {
  BBox bbox;
  int page = 0;
  TokenKind kind = TokenKind::text_token;
  std::optional<std::string> env_name;      // environment_begin / _end
  std::optional<std::string> command_name;  // command
  std::vector<std::string> nesting_stack;   // open environments at emission

  bool operator==(const RenderRecord&) const = default;
};

}  // namespace docstruct
