#pragma once

#include <string>
#include <string_view>

namespace salient::utf8 {

/// Decodes UTF-8; throws std::invalid_argument on malformed input.
std::u32string decode(std::string_view text);
std::string encode(char32_t cp);
std::string encode(std::u32string_view text);

}  // namespace salient::utf8
