#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

namespace respdisp::text {

/// Decodes UTF-8 into Unicode scalar values. Malformed sequences, surrogates
/// and overlong forms each decode to U+FFFD, one per offending byte, so every
/// input has a defined decoding.
std::u32string decode_utf8(std::string_view utf8);

std::string encode_utf8(std::u32string_view scalars);

/// Strips leading and trailing Unicode whitespace (ASCII whitespace, NBSP,
/// U+2000..U+200A, U+2028/2029, U+3000, ...).
std::string trim(std::string_view utf8);

/// Strips leading and trailing code points that are neither letters nor digits.
std::string trim_non_alnum(std::string_view utf8);

/// Full Unicode lowercase mapping (root locale).
std::string lowercase(std::string_view utf8);

/// Substitutes `{name}` placeholders in one left-to-right pass; substituted
/// values are never rescanned. Unknown placeholders are left untouched.
std::string fill_template(std::string_view tmpl,
                          std::initializer_list<std::pair<std::string_view, std::string_view>> values);

/// Lowercase (full Unicode case mapping), drop every code point that is not
/// a letter, digit or whitespace, collapse whitespace runs to a single space,
/// and trim.
std::string normalize_for_grading(std::string_view utf8);

}  // namespace respdisp::text
