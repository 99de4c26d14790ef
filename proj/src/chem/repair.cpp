#include <optional>
#include <regex>
#include <string>

#include "ocsrbench/chem/prediction.hpp"

namespace ocsrbench::chem {
namespace {

std::string_view trim(std::string_view s) {
  const auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

std::string normalize_quotes(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    // U+2018, U+2019, U+201C, U+201D are E2 80 {98,99,9C,9D} in UTF-8.
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 && static_cast<unsigned char>(s[i + 1]) == 0x80) {
      const auto c = static_cast<unsigned char>(s[i + 2]);
      if (c == 0x98 || c == 0x99) {
        out += '\'';
        i += 2;
        continue;
      }
      if (c == 0x9C || c == 0x9D) {
        out += '"';
        i += 2;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

// Body of the first ``` fence (language tag dropped), or the input when unfenced.
std::string strip_fences(const std::string& s) {
  const auto open = s.find("```");
  if (open == std::string::npos) return s;
  auto body = s.find('\n', open + 3);
  if (body == std::string::npos) return s;
  ++body;
  const auto close = s.find("```", body);
  return s.substr(body, close == std::string::npos ? std::string::npos : close - body);
}

// First balanced {...} span, honouring JSON strings and escapes.
std::optional<std::string> first_object(const std::string& s) {
  const std::size_t start = s.find('{');
  if (start == std::string::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{' || c == '[') {
      ++depth;
    } else if (c == '}' || c == ']') {
      if (--depth == 0) return s.substr(start, i - start + 1);
      if (depth < 0) break;
    }
  }
  // An unbalanced opening is never closed speculatively.
  return std::nullopt;
}

std::string drop_trailing_commas(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < s.size()) {
        out += s[++i];
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') in_string = true;
    if (c == ',') {
      std::size_t j = i + 1;
      while (j < s.size() && (s[j] == ' ' || s[j] == '\t' || s[j] == '\n' || s[j] == '\r')) ++j;
      if (j < s.size() && (s[j] == '}' || s[j] == ']')) continue;
    }
    out += c;
  }
  return out;
}

}  // namespace

std::string repair_model_text(std::string_view raw) {
  const std::string text = strip_fences(normalize_quotes(raw));
  std::string candidate;
  if (auto obj = first_object(text)) {
    candidate = drop_trailing_commas(*obj);
  } else {
    static const std::regex smiles_value(R"re("smiles"\s*:\s*"((?:[^"\\]|\\.)*)")re");
    std::smatch m;
    if (!std::regex_search(text, m, smiles_value)) return std::string(raw);
    candidate = "{\"smiles\": \"" + m[1].str() + "\"}";
  }
  if (candidate == trim(raw)) return std::string(raw);
  return candidate;
}

}  // namespace ocsrbench::chem
