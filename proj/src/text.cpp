#include "respdisp/text.hpp"

#include <unicode/uchar.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>

namespace respdisp::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

std::u32string decode_utf8(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  const std::size_t n = utf8.size();
  while (i < n) {
    const auto lead = static_cast<unsigned char>(utf8[i]);
    if (lead < 0x80) {
      out.push_back(lead);
      ++i;
      continue;
    }
    int extra = 0;
    char32_t cp = 0;
    char32_t min_cp = 0;
    if ((lead & 0xE0) == 0xC0) {
      extra = 1, cp = lead & 0x1F, min_cp = 0x80;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2, cp = lead & 0x0F, min_cp = 0x800;
    } else if ((lead & 0xF8) == 0xF0) {
      extra = 3, cp = lead & 0x07, min_cp = 0x10000;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + static_cast<std::size_t>(extra) >= n) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      const auto c = static_cast<unsigned char>(utf8[i + k]);
      if (!is_continuation(c)) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (c & 0x3F);
    }
    if (!ok || cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

std::string encode_utf8(std::u32string_view scalars) {
  std::string out;
  out.reserve(scalars.size());
  for (char32_t cp : scalars) {
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = kReplacement;
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::string trim(std::string_view utf8) {
  const std::u32string cps = decode_utf8(utf8);
  std::size_t first = 0;
  std::size_t last = cps.size();
  while (first < last && u_isUWhiteSpace(static_cast<UChar32>(cps[first]))) ++first;
  while (last > first && u_isUWhiteSpace(static_cast<UChar32>(cps[last - 1]))) --last;
  if (first == 0 && last == cps.size()) return std::string(utf8);
  return encode_utf8(std::u32string_view(cps).substr(first, last - first));
}

std::string trim_non_alnum(std::string_view utf8) {
  const std::u32string cps = decode_utf8(utf8);
  std::size_t first = 0;
  std::size_t last = cps.size();
  while (first < last && !u_isalnum(static_cast<UChar32>(cps[first]))) ++first;
  while (last > first && !u_isalnum(static_cast<UChar32>(cps[last - 1]))) --last;
  return encode_utf8(std::u32string_view(cps).substr(first, last - first));
}

std::string lowercase(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(encode_utf8(decode_utf8(utf8)));
  s.toLower(icu::Locale::getRoot());
  std::string out;
  s.toUTF8String(out);
  return out;
}

std::string fill_template(std::string_view tmpl,
                          std::initializer_list<std::pair<std::string_view, std::string_view>> values) {
  std::string out;
  out.reserve(tmpl.size() + 64);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const std::size_t close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const std::string_view name = tmpl.substr(i + 1, close - i - 1);
        bool matched = false;
        for (const auto& [key, value] : values) {
          if (key == name) {
            out.append(value);
            matched = true;
            break;
          }
        }
        if (matched) {
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i]);
    ++i;
  }
  return out;
}

std::string normalize_for_grading(std::string_view utf8) {
  // Re-encode through our decoder first so malformed input maps to U+FFFD
  // exactly as everywhere else (ICU would substitute differently).
  const std::string clean = encode_utf8(decode_utf8(utf8));
  icu::UnicodeString lowered = icu::UnicodeString::fromUTF8(clean);
  lowered.toLower(icu::Locale::getRoot());

  std::u32string kept;
  kept.reserve(static_cast<std::size_t>(lowered.length()));
  bool pending_space = false;
  for (int32_t i = 0; i < lowered.length(); i = lowered.moveIndex32(i, 1)) {
    const UChar32 cp = lowered.char32At(i);
    if (u_isUWhiteSpace(cp)) {
      pending_space = true;
    } else if (u_isalnum(cp)) {
      if (pending_space && !kept.empty()) kept.push_back(U' ');
      pending_space = false;
      kept.push_back(static_cast<char32_t>(cp));
    }
  }
  return encode_utf8(kept);
}

}  // namespace respdisp::text
