// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Filename signature matching. Each known editor filename shape is a token
// grammar (literal / datetime / original-name / counter / extension) compiled
// to an anchored regex. Grammars are data: they ship as a structured text
// format with the built-in set embedded, so field updates don't need a
// rebuild. Matching is case-sensitive and deterministic.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "imgtrace/errors.hpp"

namespace imgtrace::fname {

// ---------------------------------------------------------------------------
// Timestamps with per-field presence (a grammar may capture only a subset)

struct Timestamp {
  int year = -1;
  int month = -1;
  int day = -1;
  int hour = -1;
  int minute = -1;
  int second = -1;
  int millisecond = -1;

  bool operator==(const Timestamp&) const = default;

  std::string to_string() const {
    auto f = [](int v, int width) {
      if (v < 0) return std::string(width, '?');
      std::string s = std::to_string(v);
      return std::string(width - std::min<int>(width, s.size()), '0') + s;
    };
    std::string out = f(year, 4) + "-" + f(month, 2) + "-" + f(day, 2) + " " +
                      f(hour, 2) + ":" + f(minute, 2) + ":" + f(second, 2);
    if (millisecond >= 0) out += "." + f(millisecond, 3);
    return out;
  }
};

inline std::optional<std::int64_t> timestamp_to_epoch_ms(const Timestamp& ts) {
  using namespace std::chrono;
  if (ts.year < 0 || ts.month < 1 || ts.day < 1 || ts.hour < 0 ||
      ts.minute < 0 || ts.second < 0)
    return std::nullopt;
  const year_month_day ymd{year{ts.year}, month{static_cast<unsigned>(ts.month)},
                           day{static_cast<unsigned>(ts.day)}};
  if (!ymd.ok()) return std::nullopt;
  const auto tp = sys_days{ymd} + hours{ts.hour} + minutes{ts.minute} +
                  seconds{ts.second} +
                  milliseconds{ts.millisecond < 0 ? 0 : ts.millisecond};
  return duration_cast<milliseconds>(tp.time_since_epoch()).count();
}

inline std::optional<Timestamp> timestamp_from_epoch_ms(std::int64_t ms) {
  using namespace std::chrono;
  if (ms < 0) return std::nullopt;
  const sys_time<milliseconds> tp{milliseconds{ms}};
  const auto dp = floor<days>(tp);
  const year_month_day ymd{dp};
  const hh_mm_ss hms{tp - dp};
  Timestamp ts;
  ts.year = static_cast<int>(ymd.year());
  ts.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
  ts.day = static_cast<int>(static_cast<unsigned>(ymd.day()));
  ts.hour = static_cast<int>(hms.hours().count());
  ts.minute = static_cast<int>(hms.minutes().count());
  ts.second = static_cast<int>(hms.seconds().count());
  ts.millisecond = static_cast<int>(hms.subseconds().count());
  return ts;
}

// ---------------------------------------------------------------------------
// Datetime format specs
//
// Directives: %Y (4-digit year) %m %d %H %M %S (2 digits each) and
// %E (13-digit epoch milliseconds). Any other character is a literal.

namespace detail {

struct Directive {
  char letter;  // Y m d H M S E
  int digits;
};

inline int directive_digits(char c) {
  switch (c) {
    case 'Y': return 4;
    case 'm': case 'd': case 'H': case 'M': case 'S': return 2;
    case 'E': return 13;
    default: return 0;
  }
}

inline std::string regex_escape(const std::string& s) {
  static const std::string special = R"(\^$.|?*+()[]{})";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

// Validates a format spec; throws InvalidPattern on an unknown directive.
inline std::vector<char> datetime_directives(const std::string& fmt) {
  std::vector<char> out;
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '%') continue;
    if (i + 1 >= fmt.size() || detail::directive_digits(fmt[i + 1]) == 0)
      raise(Errc::InvalidPattern, "unknown datetime directive in '" + fmt + "'");
    out.push_back(fmt[++i]);
  }
  return out;
}

// Renders a full timestamp through a format spec (fixture/instantiation side).
inline std::string format_datetime(const std::string& fmt, const Timestamp& ts) {
  std::string out;
  auto pad = [](long v, int width) {
    std::string s = std::to_string(v);
    if (static_cast<int>(s.size()) < width)
      s.insert(0, std::string(width - s.size(), '0'));
    return s;
  };
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '%') {
      out.push_back(fmt[i]);
      continue;
    }
    const char c = fmt[++i];
    int v = -1;
    switch (c) {
      case 'Y': v = ts.year; break;
      case 'm': v = ts.month; break;
      case 'd': v = ts.day; break;
      case 'H': v = ts.hour; break;
      case 'M': v = ts.minute; break;
      case 'S': v = ts.second; break;
      case 'E': {
        auto ms = timestamp_to_epoch_ms(ts);
        if (!ms) raise(Errc::InvalidArgument, "epoch format needs a full timestamp");
        out += pad(*ms, 13);
        continue;
      }
      default: raise(Errc::InvalidPattern, "unknown datetime directive");
    }
    if (v < 0) raise(Errc::InvalidArgument, "timestamp field required by format is unset");
    out += pad(v, detail::directive_digits(c));
  }
  return out;
}

// Restricts a full timestamp to the fields a format spec captures; this is
// what a parse of the formatted string can recover.
inline Timestamp project_timestamp(const std::string& fmt, const Timestamp& ts) {
  Timestamp out;
  for (char c : datetime_directives(fmt)) {
    switch (c) {
      case 'Y': out.year = ts.year; break;
      case 'm': out.month = ts.month; break;
      case 'd': out.day = ts.day; break;
      case 'H': out.hour = ts.hour; break;
      case 'M': out.minute = ts.minute; break;
      case 'S': out.second = ts.second; break;
      case 'E': {
        out = ts;
        if (out.millisecond < 0) out.millisecond = 0;
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Patterns

struct Token {
  enum class Kind { Literal, Datetime, OriginalName, RandomNumber, Extension };
  Kind kind = Kind::Literal;
  std::string text;                     // Literal text or Datetime format spec
  std::vector<std::string> extensions;  // Extension only
};

struct FilenamePattern {
  std::string editor_name;
  std::string pattern_name;
  std::vector<Token> grammar;
  // A literal that alone is strong evidence ("PSFix"); its presence makes a
  // match signature-strength and is what gets recorded in the reference DB.
  std::optional<std::string> signature_token;
  // A literal the filename carries that is too generic to be strong evidence
  // on its own ("edited"); recorded in the DB, but matches stay structural.
  std::optional<std::string> weak_signature;
};

enum class MatchStrength { Signature, Structural };

struct FilenameMatch {
  std::string editor_name;
  std::string pattern_name;
  MatchStrength strength = MatchStrength::Structural;
  std::optional<Timestamp> extracted_datetime;
  std::optional<std::string> extracted_original_name;
  // String for an Editor_Signature row, when this pattern defines one.
  std::optional<std::string> db_signature;
};

class FilenameMatcher {
 public:
  struct Compiled {
    FilenamePattern pattern;
    std::regex regex;
    // capture group i (1-based) -> (token index, directive letter or 0)
    std::vector<std::pair<std::size_t, char>> captures;
  };

  const std::vector<Compiled>& patterns() const { return compiled_; }
  void add(Compiled c) { compiled_.push_back(std::move(c)); }

 private:
  std::vector<Compiled> compiled_;
};

inline FilenameMatcher compile_patterns(const std::vector<FilenamePattern>& defs) {
  FilenameMatcher matcher;
  for (const auto& def : defs) {
    if (def.grammar.empty())
      raise(Errc::InvalidPattern, def.pattern_name + ": empty grammar");
    std::string re;
    std::vector<std::pair<std::size_t, char>> captures;
    for (std::size_t t = 0; t < def.grammar.size(); ++t) {
      const Token& tok = def.grammar[t];
      switch (tok.kind) {
        case Token::Kind::Literal:
          if (tok.text.empty())
            raise(Errc::InvalidPattern, def.pattern_name + ": empty literal");
          re += detail::regex_escape(tok.text);
          break;
        case Token::Kind::Datetime:
          for (std::size_t i = 0; i < tok.text.size(); ++i) {
            if (tok.text[i] == '%') {
              const char c = i + 1 < tok.text.size() ? tok.text[i + 1] : '\0';
              const int digits = detail::directive_digits(c);
              if (digits == 0)
                raise(Errc::InvalidPattern,
                      def.pattern_name + ": unknown datetime directive");
              re += "(\\d{" + std::to_string(digits) + "})";
              captures.emplace_back(t, c);
              ++i;
            } else {
              re += detail::regex_escape(std::string(1, tok.text[i]));
            }
          }
          break;
        case Token::Kind::OriginalName:
          re += "(.+)";
          captures.emplace_back(t, '\0');
          break;
        case Token::Kind::RandomNumber:
          re += "(\\d+)";
          captures.emplace_back(t, '\0');
          break;
        case Token::Kind::Extension: {
          if (tok.extensions.empty())
            raise(Errc::InvalidPattern, def.pattern_name + ": empty extension set");
          if (t + 1 != def.grammar.size())
            raise(Errc::InvalidPattern,
                  def.pattern_name + ": extension token must come last");
          std::string alt;
          for (const auto& e : tok.extensions) {
            if (e.empty())
              raise(Errc::InvalidPattern, def.pattern_name + ": empty extension");
            if (!alt.empty()) alt += "|";
            alt += detail::regex_escape(e);
          }
          re += "\\.(?:" + alt + ")";
          break;
        }
      }
    }
    FilenameMatcher::Compiled c;
    c.pattern = def;
    c.regex = std::regex(re);
    c.captures = std::move(captures);
    matcher.add(std::move(c));
  }
  return matcher;
}

namespace detail {

inline bool timestamp_fields_valid(const Timestamp& ts) {
  if (ts.month != -1 && (ts.month < 1 || ts.month > 12)) return false;
  if (ts.day != -1 && (ts.day < 1 || ts.day > 31)) return false;
  if (ts.hour != -1 && ts.hour > 23) return false;
  if (ts.minute != -1 && ts.minute > 59) return false;
  if (ts.second != -1 && ts.second > 59) return false;
  return true;
}

}  // namespace detail

// All candidate editors for a bare filename; an unmatched name yields an
// empty list (absence of a signature is never evidence of anything).
inline std::vector<FilenameMatch> match_filename(const std::string& name,
                                                 const FilenameMatcher& matcher) {
  std::vector<FilenameMatch> out;
  for (const auto& c : matcher.patterns()) {
    std::smatch m;
    if (!std::regex_match(name, m, c.regex)) continue;

    FilenameMatch match;
    match.editor_name = c.pattern.editor_name;
    match.pattern_name = c.pattern.pattern_name;
    match.strength = c.pattern.signature_token ? MatchStrength::Signature
                                               : MatchStrength::Structural;
    if (c.pattern.signature_token)
      match.db_signature = c.pattern.signature_token;
    else if (c.pattern.weak_signature)
      match.db_signature = c.pattern.weak_signature;

    Timestamp ts;
    bool have_dt = false;
    bool epoch_ok = true;
    for (std::size_t g = 0; g < c.captures.size(); ++g) {
      const auto& [token_index, directive] = c.captures[g];
      const std::string text = m[g + 1].str();
      const Token& tok = c.pattern.grammar[token_index];
      if (tok.kind == Token::Kind::OriginalName) {
        match.extracted_original_name = text;
      } else if (tok.kind == Token::Kind::Datetime) {
        have_dt = true;
        if (directive == 'E') {
          auto parsed = timestamp_from_epoch_ms(std::stoll(text));
          if (parsed)
            ts = *parsed;
          else
            epoch_ok = false;
        } else {
          const int v = std::stoi(text);
          switch (directive) {
            case 'Y': ts.year = v; break;
            case 'm': ts.month = v; break;
            case 'd': ts.day = v; break;
            case 'H': ts.hour = v; break;
            case 'M': ts.minute = v; break;
            case 'S': ts.second = v; break;
          }
        }
      }
    }
    if (have_dt && epoch_ok && detail::timestamp_fields_valid(ts))
      match.extracted_datetime = ts;
    out.push_back(std::move(match));
  }
  return out;
}

// Renders a pattern into a concrete filename (fixture generation and the
// generate-then-parse property).
inline std::string instantiate_pattern(const FilenamePattern& pattern,
                                       const Timestamp& ts,
                                       const std::string& original_name = "IMG_0001",
                                       const std::string& random_number = "1234") {
  std::string out;
  for (const Token& tok : pattern.grammar) {
    switch (tok.kind) {
      case Token::Kind::Literal: out += tok.text; break;
      case Token::Kind::Datetime: out += format_datetime(tok.text, ts); break;
      case Token::Kind::OriginalName: out += original_name; break;
      case Token::Kind::RandomNumber: out += random_number; break;
      case Token::Kind::Extension: out += "." + tok.extensions.front(); break;
    }
  }
  return out;
}

// What a match of an instantiated name can recover of the timestamp.
inline Timestamp expected_extraction(const FilenamePattern& pattern,
                                     const Timestamp& ts) {
  Timestamp out;
  for (const Token& tok : pattern.grammar)
    if (tok.kind == Token::Kind::Datetime) {
      const Timestamp p = project_timestamp(tok.text, ts);
      if (p.year != -1) out.year = p.year;
      if (p.month != -1) out.month = p.month;
      if (p.day != -1) out.day = p.day;
      if (p.hour != -1) out.hour = p.hour;
      if (p.minute != -1) out.minute = p.minute;
      if (p.second != -1) out.second = p.second;
      if (p.millisecond != -1) out.millisecond = p.millisecond;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Pattern definition file format
//
// Line-oriented, '#' comments, header "imgtrace-patterns 1". One record per
// line, '|'-separated fields:
//   editor=<name>|pattern=<id>|tokens=<tok> <tok> ...[|signature=<lit>][|weaksig=<lit>]
// Token specs: lit:<text>  dt:<format>  orig  num  ext:<e1,e2,...>

inline std::vector<FilenamePattern> parse_pattern_file(const std::string& text) {
  std::vector<FilenamePattern> out;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != "imgtrace-patterns 1")
        raise(Errc::InvalidPattern, "pattern file header missing or unsupported");
      saw_header = true;
      continue;
    }
    FilenamePattern p;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, '|')) {
      const auto eq = field.find('=');
      if (eq == std::string::npos)
        raise(Errc::InvalidPattern, "field without '=' in: " + line);
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      if (key == "editor") {
        p.editor_name = value;
      } else if (key == "pattern") {
        p.pattern_name = value;
      } else if (key == "signature") {
        p.signature_token = value;
      } else if (key == "weaksig") {
        p.weak_signature = value;
      } else if (key == "tokens") {
        std::istringstream toks(value);
        std::string spec;
        while (toks >> spec) {
          Token t;
          if (spec == "orig") {
            t.kind = Token::Kind::OriginalName;
          } else if (spec == "num") {
            t.kind = Token::Kind::RandomNumber;
          } else if (spec.rfind("lit:", 0) == 0) {
            t.kind = Token::Kind::Literal;
            t.text = spec.substr(4);
          } else if (spec.rfind("dt:", 0) == 0) {
            t.kind = Token::Kind::Datetime;
            t.text = spec.substr(3);
            datetime_directives(t.text);  // validate
          } else if (spec.rfind("ext:", 0) == 0) {
            t.kind = Token::Kind::Extension;
            std::istringstream exts(spec.substr(4));
            std::string e;
            while (std::getline(exts, e, ',')) t.extensions.push_back(e);
          } else {
            raise(Errc::InvalidPattern, "unknown token kind: " + spec);
          }
          p.grammar.push_back(std::move(t));
        }
      } else {
        raise(Errc::InvalidPattern, "unknown field: " + key);
      }
    }
    if (p.editor_name.empty() || p.pattern_name.empty())
      raise(Errc::InvalidPattern, "record missing editor or pattern name");
    out.push_back(std::move(p));
  }
  if (!saw_header)
    raise(Errc::InvalidPattern, "pattern file header missing or unsupported");
  return out;
}

// Built-in definitions: one record per distinct filename shape observed for
// the 11 supported editors. The two Samsung save options share one shape.
inline const std::string& builtin_pattern_text() {
  static const std::string text = R"(imgtrace-patterns 1
editor=Snapseed|pattern=snapseed_save|tokens=orig lit:- num ext:jpeg
editor=Snapseed|pattern=snapseed_export|tokens=orig lit:_edited ext:jpeg,png|weaksig=edited
editor=Meitu|pattern=meitu_save|tokens=lit:MTXX_MH dt:%Y%m%d%H%M%S ext:jpg|signature=MTXX
editor=Meitu|pattern=meitu_quick_save|tokens=lit:MTXX_formula dt:%Y%m%d%H%M%S ext:jpg|signature=MTXX
editor=Remove Unwanted Object|pattern=wipeout_save|tokens=lit:WipeOut dt:%M_%d_%Y_%H%M%S ext:jpg|signature=WipeOut
editor=SnapEdit|pattern=snapedit_save|tokens=dt:%E ext:png
editor=Adobe Photoshop Fix|pattern=psfix_save|tokens=lit:PSFix_ dt:%Y%m%d_%H%M%S ext:jpeg|signature=PSFix
editor=Photoshop Express|pattern=psx_save|tokens=lit:PSX_ dt:%Y%m%d_%H%M%S ext:jpg|signature=PSX
editor=removebg|pattern=removebg_download|tokens=lit:ei_ dt:%E lit:-removebg-preview ext:png|signature=removebg
editor=Background Eraser (Inshot)|pattern=inshot_save|tokens=lit:BackgroundEraser_ dt:%Y%m%d_%H%M%S ext:jpg|signature=BackgroundEraser
editor=Background Eraser (handy)|pattern=handy_save|tokens=dt:%E ext:png
editor=Photo Studio|pattern=photostudio_save|tokens=lit:photostudio_ dt:%Y%m%d ext:jpg,png|signature=photostudio
editor=Samsung Photo Editor|pattern=samsung_save|tokens=dt:%Y%m%d_%H%M%S ext:jpg
)";
  return text;
}

inline std::vector<FilenamePattern> builtin_patterns() {
  return parse_pattern_file(builtin_pattern_text());
}

inline const FilenameMatcher& builtin_matcher() {
  static const FilenameMatcher matcher = compile_patterns(builtin_patterns());
  return matcher;
}

}  // namespace imgtrace::fname
