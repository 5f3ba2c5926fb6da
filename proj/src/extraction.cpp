#include "thinkbench/extraction.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

namespace thinkbench {
namespace {

// ---------------------------------------------------------------------------
// Text cleanup

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  if (from.empty()) return;
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Index of the '}' matching the '{' at `open`, or npos.
std::size_t match_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size() && (s[i + 1] == '{' || s[i + 1] == '}')) {
      ++i;  // escaped brace
      continue;
    }
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth == 0) return i;
  }
  return std::string_view::npos;
}

// Replaces `\cmd{content}` with `content` for wrapper commands.
void unwrap_commands(std::string& s) {
  static const std::array<std::string_view, 10> kWrappers = {
      "\\boxed", "\\fbox", "\\textbf", "\\textit", "\\text", "\\mathrm",
      "\\mathbf", "\\mbox", "\\operatorname", "\\emph"};
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto cmd : kWrappers) {
      for (std::size_t pos = s.find(cmd); pos != std::string::npos; pos = s.find(cmd, pos)) {
        std::size_t open = pos + cmd.size();
        if (open < s.size() && is_alpha(s[open])) {  // prefix of a longer command
          ++pos;
          continue;
        }
        while (open < s.size() && s[open] == ' ') ++open;
        if (open >= s.size() || s[open] != '{') {
          ++pos;
          continue;
        }
        const std::size_t close = match_brace(s, open);
        if (close == std::string::npos) {
          ++pos;
          continue;
        }
        s = s.substr(0, pos) + s.substr(open + 1, close - open - 1) + s.substr(close + 1);
        changed = true;
      }
    }
  }
}

// Normalizes LaTeX, markdown and Unicode noise around answers.
std::string latex_clean(std::string_view in) {
  std::string s(in);
  // Unicode
  replace_all(s, "\xE2\x88\x92", "-");          // minus sign
  replace_all(s, "\xE2\x80\x93", "-");          // en dash
  replace_all(s, "\xC3\x97", " \\times ");      // multiplication sign
  replace_all(s, "\xC2\xB7", " \\times ");      // middle dot
  replace_all(s, "\xE2\x89\x88", "=");          // almost equal
  replace_all(s, "\xC2\xA0", " ");              // no-break space
  replace_all(s, "\xE2\x80\x89", " ");          // thin space
  replace_all(s, "\xE2\x80\xAF", " ");          // narrow no-break space

  unwrap_commands(s);
  replace_all(s, "\\dfrac", "\\frac");
  replace_all(s, "\\tfrac", "\\frac");
  replace_all(s, "\\cdot", "\\times");
  replace_all(s, "\\approx", "=");
  replace_all(s, "\\gt", ">");
  replace_all(s, "\\lt", "<");
  replace_all(s, "{,}", ",");
  static const std::array<std::string_view, 14> kDrop = {
      "\\left", "\\right", "\\displaystyle", "\\quad", "\\!", "\\,", "\\;", "\\:",
      "\\(", "\\)", "\\[", "\\]", "$", "\\ "};
  for (auto d : kDrop) replace_all(s, d, " ");
  replace_all(s, "\\{", "{");
  replace_all(s, "\\}", "}");
  replace_all(s, "\\%", "%");
  replace_all(s, "**", "");
  replace_all(s, "__", "");
  replace_all(s, "`", "");
  return s;
}

// Strips whitespace, quotes, emphasis and sentence punctuation at both ends.
std::string_view strip_outer(std::string_view s) {
  auto junk_front = [](char c) { return is_space(c) || c == '"' || c == '\'' || c == '*' || c == ':' || c == '='; };
  auto junk_back = [](char c) {
    return is_space(c) || c == '"' || c == '\'' || c == '*' || c == '.' || c == ',' ||
           c == ';' || c == ':' || c == '!' || c == '?';
  };
  while (!s.empty() && junk_front(s.front())) s.remove_prefix(1);
  while (!s.empty() && junk_back(s.back())) s.remove_suffix(1);
  return s;
}

// ---------------------------------------------------------------------------
// Numbers

constexpr int kMaxExponent = 400;
constexpr std::size_t kMaxNumericSpan = 256;

BigInt pow10(int e) { return boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(e)); }

// Integer/decimal literal with optional comma grouping, no exponent.
std::optional<Rational> parse_plain(std::string_view t, bool& has_fraction) {
  static const std::regex kPlain(R"(^([+-])?(\d{1,3}(?:,\d{3})+|\d+)?(?:\.(\d+))?$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(t.begin(), t.end(), m, kPlain)) return std::nullopt;
  if (!m[2].matched && !m[3].matched) return std::nullopt;
  std::string int_part = m[2].matched ? m[2].str() : "0";
  int_part.erase(std::remove(int_part.begin(), int_part.end(), ','), int_part.end());
  const std::string frac = m[3].matched ? m[3].str() : "";
  has_fraction = m[3].matched;
  if (int_part.size() + frac.size() > 2000) return std::nullopt;
  Rational v(parse_bigint(int_part + frac), pow10(static_cast<int>(frac.size())));
  if (m[1].matched && m[1].str() == "-") v = -v;
  return v;
}

std::optional<int> parse_exponent(std::string_view t) {
  static const std::regex kExp(R"(^[+-]?\d{1,6}$)");
  if (!std::regex_match(t.begin(), t.end(), kExp)) return std::nullopt;
  const int e = std::stoi(std::string(t));
  if (e > kMaxExponent || e < -kMaxExponent) return std::nullopt;
  return e;
}

Rational scale10(const Rational& v, int e) {
  return e >= 0 ? Rational(v * pow10(e)) : Rational(v / pow10(-e));
}

Numeric make_numeric(const Rational& v, bool force_decimal) {
  if (!force_decimal && boost::multiprecision::denominator(v) == 1) {
    return BigInt(boost::multiprecision::numerator(v));
  }
  return Decimal{v};
}

std::optional<Numeric> normalize_cleaned(std::string_view raw) {
  std::string_view s = strip_outer(raw);
  while (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = strip_outer(s.substr(1, s.size() - 2));
  if (s.empty() || s.size() > kMaxNumericSpan) return std::nullopt;
  std::string t;
  t.reserve(s.size());
  for (char c : s) t += c;

  std::smatch m;
  // \frac{a}{b}, optionally signed outside.
  static const std::regex kFrac(R"(^([+-])?\s*\\frac\s*\{\s*([^{}]+?)\s*\}\s*\{\s*([^{}]+?)\s*\}$)");
  if (std::regex_match(t, m, kFrac)) {
    bool f1 = false, f2 = false;
    auto a = parse_plain(m[2].str(), f1);
    auto b = parse_plain(m[3].str(), f2);
    if (!a || !b || *b == 0) return std::nullopt;
    Rational v = *a / *b;
    if (m[1].matched && m[1].str() == "-") v = -v;
    return Decimal{v};
  }
  // a/b with integer operands.
  static const std::regex kSlash(R"(^([+-]?\d+)\s*/\s*([+-]?\d+)$)");
  if (std::regex_match(t, m, kSlash)) {
    bool f = false;
    auto a = parse_plain(m[1].str(), f);
    auto b = parse_plain(m[2].str(), f);
    if (!a || !b || *b == 0) return std::nullopt;
    return Decimal{*a / *b};
  }
  // mantissa \times 10^{k}
  static const std::regex kSciLatex(R"(^([+-]?[\d.,]+)\s*(?:\\times|x|\*)\s*10\s*\^\s*\{?\s*([+-]?\d+)\s*\}?$)");
  if (std::regex_match(t, m, kSciLatex)) {
    bool frac = false;
    auto mant = parse_plain(m[1].str(), frac);
    auto e = parse_exponent(m[2].str());
    if (!mant || !e) return std::nullopt;
    return make_numeric(scale10(*mant, *e), false);
  }
  // plain literal with optional e-exponent
  static const std::regex kSci(R"(^([+-]?[\d.,]+)[eE]([+-]?\d+)$)");
  if (std::regex_match(t, m, kSci)) {
    bool frac = false;
    auto mant = parse_plain(m[1].str(), frac);
    auto e = parse_exponent(m[2].str());
    if (!mant || !e) return std::nullopt;
    return make_numeric(scale10(*mant, *e), false);
  }
  bool frac = false;
  auto v = parse_plain(t, frac);
  if (!v) return std::nullopt;
  return make_numeric(*v, frac);
}

struct NumToken {
  std::size_t pos = 0;
  std::string text;
  Numeric value;
};

// Scans numeric literals in already-cleaned text, left to right.
std::vector<NumToken> scan_numbers(std::string_view s) {
  std::vector<NumToken> out;
  std::size_t i = 0;
  while (i < s.size()) {
    // \frac{a}{b}
    if (s.compare(i, 5, "\\frac") == 0) {
      std::size_t j = i + 5;
      while (j < s.size() && s[j] == ' ') ++j;
      const std::size_t c1 = (j < s.size() && s[j] == '{') ? match_brace(s, j) : std::string_view::npos;
      std::size_t k = c1 == std::string_view::npos ? c1 : c1 + 1;
      while (k != std::string_view::npos && k < s.size() && s[k] == ' ') ++k;
      const std::size_t c2 =
          (k != std::string_view::npos && k < s.size() && s[k] == '{') ? match_brace(s, k) : std::string_view::npos;
      if (c2 != std::string_view::npos) {
        std::size_t start = i;
        if (start > 0 && s[start - 1] == '-') --start;
        std::string text(s.substr(start, c2 + 1 - start));
        if (auto v = normalize_cleaned(text)) out.push_back({start, text, *v});
        i = c2 + 1;
        continue;
      }
      i += 5;
      continue;
    }
    const char c = s[i];
    const char prev = i > 0 ? s[i - 1] : ' ';
    bool starts = false;
    std::size_t start = i;
    if (is_digit(c)) {
      starts = true;
    } else if (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]) && !is_digit(prev)) {
      starts = true;
    } else if ((c == '-' || c == '+') && i + 1 < s.size() &&
               (is_digit(s[i + 1]) || (s[i + 1] == '.' && i + 2 < s.size() && is_digit(s[i + 2])))) {
      // A sign only when not used as a binary operator.
      starts = !(is_digit(prev) || is_alpha(prev) || prev == ')' || prev == ']' || prev == '}');
    }
    if (!starts) {
      ++i;
      continue;
    }
    const char before = start > 0 ? s[start - 1] : ' ';
    std::size_t j = i;
    if (s[j] == '-' || s[j] == '+') ++j;
    const std::size_t digits_start = j;
    while (j < s.size() && is_digit(s[j])) ++j;
    // Comma grouping: only exact groups of three not followed by another digit.
    if (j - digits_start >= 1 && j - digits_start <= 3) {
      while (j + 3 < s.size() + 0 && s[j] == ',' && is_digit(s[j + 1]) && is_digit(s[j + 2]) &&
             is_digit(s[j + 3]) && (j + 4 >= s.size() || !is_digit(s[j + 4]))) {
        j += 4;
      }
    }
    if (j + 1 < s.size() && s[j] == '.' && is_digit(s[j + 1])) {
      ++j;
      while (j < s.size() && is_digit(s[j])) ++j;
    }
    if (j + 1 < s.size() && (s[j] == 'e' || s[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < s.size() && (s[k] == '-' || s[k] == '+')) ++k;
      if (k < s.size() && is_digit(s[k])) {
        while (k < s.size() && is_digit(s[k])) ++k;
        if (k >= s.size() || !is_alpha(s[k])) j = k;
      }
    }
    // mantissa \times 10^{k}
    {
      static const std::regex kTail(R"(^\s*\\times\s*10\s*\^\s*(\{\s*[+-]?\d+\s*\}|[+-]?\d+))");
      std::match_results<std::string_view::const_iterator> m;
      if (std::regex_search(s.begin() + static_cast<std::ptrdiff_t>(j), s.end(), m, kTail)) {
        j += static_cast<std::size_t>(m.length(0));
      }
    }
    const char after = j < s.size() ? s[j] : ' ';
    const bool glued = is_alpha(before) || before == '^' || before == '_' || is_alpha(after);
    if (!glued) {
      std::string text(s.substr(start, j - start));
      if (auto v = normalize_cleaned(text)) out.push_back({start, text, *v});
    }
    i = j;
  }
  return out;
}

std::optional<Numeric> parse_numeric_span(std::string_view span) {
  if (auto v = normalize_numeric(span)) return v;
  const std::string cleaned = latex_clean(span);
  std::string_view tail = cleaned;
  std::size_t cut = tail.rfind('=');
  if (cut == std::string_view::npos) cut = tail.rfind(':');
  if (cut != std::string_view::npos) {
    tail = tail.substr(cut + 1);
    if (auto v = normalize_cleaned(tail)) return v;
  }
  auto tokens = scan_numbers(tail);
  if (tokens.empty()) return std::nullopt;
  return tokens.front().value;
}

// ---------------------------------------------------------------------------
// Lists and sets

std::optional<std::int64_t> parse_int64(std::string_view t) {
  t = trim(t);
  if (t.empty() || t.size() > 20) return std::nullopt;
  std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
  if (i == t.size()) return std::nullopt;
  for (std::size_t j = i; j < t.size(); ++j) {
    if (!is_digit(t[j])) return std::nullopt;
  }
  try {
    return std::stoll(std::string(t));
  } catch (...) {
    return std::nullopt;
  }
}

// "a, b, c" / "a; b" / "a b c" / "a, b and c" with integer elements only.
std::optional<std::vector<std::int64_t>> parse_int_sequence(std::string_view body) {
  std::string s(strip_outer(body));
  if (s.empty()) return std::nullopt;
  replace_all(s, " and ", ", ");
  char sep = ' ';
  if (s.find(',') != std::string::npos) {
    sep = ',';
  } else if (s.find(';') != std::string::npos) {
    sep = ';';
  }
  std::vector<std::int64_t> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(sep, start);
    if (end == std::string::npos) end = s.size();
    std::string_view piece = trim(std::string_view(s).substr(start, end - start));
    if (!piece.empty() || sep != ' ') {
      auto v = parse_int64(piece);
      if (!v) return std::nullopt;
      out.push_back(*v);
    }
    start = end + 1;
  }
  if (out.empty()) return std::nullopt;
  return out;
}

struct ListHit {
  std::size_t pos;
  std::vector<std::int64_t> values;
};

// Every [...] / (...) / {...} group whose content is an integer sequence.
std::vector<ListHit> bracketed_lists(std::string_view s) {
  std::vector<ListHit> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char open = s[i];
    char close = 0;
    if (open == '[') close = ']';
    if (open == '(') close = ')';
    if (open == '{') close = '}';
    if (!close) continue;
    const std::size_t end = s.find(close, i + 1);
    if (end == std::string_view::npos) continue;
    std::string_view inner = s.substr(i + 1, end - i - 1);
    if (inner.find_first_of("[({") != std::string_view::npos) continue;
    if (auto v = parse_int_sequence(inner)) out.push_back({i, std::move(*v)});
  }
  return out;
}

std::optional<IntList> parse_list(std::string_view span) {
  const std::string cleaned = latex_clean(span);
  auto hits = bracketed_lists(cleaned);
  if (!hits.empty()) return IntList{hits.back().values};
  if (auto v = parse_int_sequence(cleaned)) return IntList{std::move(*v)};
  return std::nullopt;
}

struct RunHit {
  std::size_t pos;
  std::vector<std::int64_t> values;
};

// Maximal runs "a, b and c" of integers in cleaned text.
std::vector<RunHit> integer_runs(std::string_view in) {
  std::string s(in);
  for (char& c : s) {
    if (c == '[' || c == ']' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
  }
  struct Tok {
    enum Kind { kInt, kSep, kOther } kind;
    std::size_t pos;
    std::int64_t value = 0;
  };
  std::vector<Tok> toks;
  std::size_t i = 0;
  while (i < s.size()) {
    if (is_space(s[i])) {
      ++i;
      continue;
    }
    if (s[i] == ',' || s[i] == ';' || s[i] == '&') {
      toks.push_back({Tok::kSep, i});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j]) && s[j] != ',' && s[j] != ';' && s[j] != '&') ++j;
    std::string_view word = std::string_view(s).substr(i, j - i);
    std::string_view core = word;
    while (!core.empty() && (core.back() == '.' || core.back() == ':' || core.back() == '!' || core.back() == '?')) {
      core.remove_suffix(1);
    }
    if (auto v = parse_int64(core)) {
      toks.push_back({Tok::kInt, i, *v});
      if (core.size() != word.size()) toks.push_back({Tok::kOther, j});  // sentence end
    } else if (lower_ascii(word) == "and") {
      toks.push_back({Tok::kSep, i});
    } else {
      toks.push_back({Tok::kOther, i});
    }
    i = j;
  }
  std::vector<RunHit> out;
  std::size_t k = 0;
  while (k < toks.size()) {
    if (toks[k].kind != Tok::kInt) {
      ++k;
      continue;
    }
    RunHit run{toks[k].pos, {toks[k].value}};
    std::size_t m = k + 1;
    while (m < toks.size()) {
      std::size_t n = m;
      while (n < toks.size() && toks[n].kind == Tok::kSep) ++n;
      if (n == m || n >= toks.size() || toks[n].kind != Tok::kInt) break;
      run.values.push_back(toks[n].value);
      m = n + 1;
    }
    out.push_back(std::move(run));
    k = m;
  }
  return out;
}

std::optional<IntSet> parse_set(std::string_view span) {
  const std::string cleaned = latex_clean(span);
  auto runs = integer_runs(cleaned);
  if (runs.empty()) return std::nullopt;
  return IntSet::from(runs.front().values);
}

// ---------------------------------------------------------------------------
// Relations

struct RelationWord {
  std::string_view text;
  Relation relation;
};

// Synonym table. Longer phrases first so "greater than" wins over "greater".
constexpr std::array<RelationWord, 17> kRelationWords = {{
    {"greater than", Relation::kGreater}, {"greater", Relation::kGreater},
    {"bigger", Relation::kGreater},       {"larger", Relation::kGreater},
    {"more than", Relation::kGreater},    {"higher", Relation::kGreater},
    {"less than", Relation::kLess},       {"less", Relation::kLess},
    {"smaller", Relation::kLess},         {"fewer", Relation::kLess},
    {"lower", Relation::kLess},           {"equal to", Relation::kEqual},
    {"equals", Relation::kEqual},         {"equal", Relation::kEqual},
    {"the same", Relation::kEqual},       {"same", Relation::kEqual},
    {"identical", Relation::kEqual},
}};

bool word_boundary(std::string_view s, std::size_t pos, std::size_t len) {
  const bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(s[pos - 1]));
  const bool right = pos + len >= s.size() || !std::isalnum(static_cast<unsigned char>(s[pos + len]));
  return left && right;
}

bool negated(std::string_view s, std::size_t pos) {
  std::string_view before = s.substr(0, pos);
  while (!before.empty() && before.back() == ' ') before.remove_suffix(1);
  auto ends_with = [&](std::string_view w) {
    return before.size() >= w.size() && before.substr(before.size() - w.size()) == w &&
           (before.size() == w.size() || !std::isalnum(static_cast<unsigned char>(before[before.size() - w.size() - 1])));
  };
  return ends_with("not") || ends_with("isn't") || ends_with("no");
}

std::optional<Relation> parse_relation(std::string_view span, bool allow_symbols) {
  const std::string s = lower_ascii(latex_clean(span));
  std::set<Relation> found;
  std::vector<bool> used(s.size(), false);
  struct Hit {
    std::size_t pos, len;
    Relation relation;
  };
  std::vector<Hit> hits;
  for (const auto& w : kRelationWords) {
    for (std::size_t pos = s.find(w.text); pos != std::string::npos; pos = s.find(w.text, pos + 1)) {
      if (used[pos] || !word_boundary(s, pos, w.text.size())) continue;
      for (std::size_t k = pos; k < pos + w.text.size(); ++k) used[k] = true;
      hits.push_back({pos, w.text.size(), w.relation});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.pos < b.pos; });
  // A negation carries over "not greater or less" style lists.
  std::size_t negation_end = std::string::npos;
  for (const auto& h : hits) {
    bool neg = negated(s, h.pos);
    if (!neg && negation_end != std::string::npos) {
      std::string gap(trim(std::string_view(s).substr(negation_end, h.pos - negation_end)));
      neg = gap == "or" || gap == "nor" || gap == "," || gap == ", or" || gap == ", nor";
    }
    negation_end = neg ? h.pos + h.len : std::string::npos;
    if (!neg) found.insert(h.relation);
  }
  if (allow_symbols) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char c = s[i];
      const char prev = i > 0 ? s[i - 1] : ' ';
      const char next = i + 1 < s.size() ? s[i + 1] : ' ';
      if (c == '>' && prev != '-' && prev != '=' && next != '=') found.insert(Relation::kGreater);
      if (c == '<' && next != '=' && next != '-') found.insert(Relation::kLess);
      if (c == '=' && prev != '<' && prev != '>' && prev != '=' && prev != '!' && next != '=' &&
          next != '>') {
        found.insert(Relation::kEqual);
      }
    }
  }
  if (found.size() != 1) return std::nullopt;
  return *found.begin();
}

// ---------------------------------------------------------------------------
// Candidate generation

struct Candidate {
  std::size_t pos;
  std::string span;
};

bool is_placeholder(std::string_view span) {
  static const std::set<std::string> kPlaceholders = {
      "answer", "{answer}", "relation", "minimum", "maximum", "mean value", "median value",
      "mode(s)", "{mode(s)}", "modes", "mode", "result", "final answer", "your answer",
      "your final answer", "value", "number", "x", "...", ""};
  const std::string cleaned(trim(latex_clean(span)));
  if (cleaned == "=" || cleaned == "<" || cleaned == ">") return false;
  return kPlaceholders.count(lower_ascii(strip_outer(cleaned))) != 0;
}

// Text from `from` to the end of the sentence on the same line; if that is
// blank, the next non-empty line.
std::string capture_sentence(std::string_view text, std::size_t from) {
  std::size_t end = from;
  while (end < text.size()) {
    const char c = text[end];
    if (c == '\n' || c == '!' || c == '?' || c == ';') break;
    if (c == '.' && (end + 1 >= text.size() || is_space(text[end + 1]))) break;
    ++end;
  }
  std::string_view cap = trim(text.substr(from, end - from));
  if (!strip_outer(cap).empty()) return std::string(cap);
  std::size_t nl = text.find('\n', from);
  while (nl != std::string_view::npos) {
    std::size_t next = text.find('\n', nl + 1);
    std::string_view line = trim(text.substr(nl + 1, next == std::string_view::npos ? std::string_view::npos : next - nl - 1));
    if (!line.empty()) return std::string(line);
    nl = next;
  }
  return {};
}

struct Line {
  std::size_t pos;
  std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back({start, text.substr(start, end - start)});
    start = end + 1;
  }
  return out;
}

using SvMatch = std::match_results<std::string_view::const_iterator>;

template <typename Fn>
void for_each_match(std::string_view s, const std::regex& re, Fn&& fn) {
  auto it = std::regex_iterator<std::string_view::const_iterator>(s.begin(), s.end(), re);
  for (; it != std::regex_iterator<std::string_view::const_iterator>(); ++it) fn(*it);
}

std::vector<Candidate> explicit_candidates(std::string_view text, TaskKind task) {
  static const auto kFlags = std::regex::ECMAScript | std::regex::icase;
  static const std::regex kAnswer(
      R"(\b(?:(?:final|correct|exact)\s+)?(?:answer|result|solution|output)\b\s*(?:\([^)]*\)\s*)?(?:is|are|was|would\s+be|will\s+be|equals|=|:)\s*:?)",
      kFlags);
  static const std::regex kQuantity(
      R"(\b(?:sum|total|product|absolute\s+difference|difference|quotient|mean|average|median|modes?|maximum|minimum|largest\s+number|smallest\s+number|count|number\s+of\s+(?:odd|even)\s+numbers|(?:odd|even)\s+count|sorted\s+(?:list|order|array|sequence)|relationship|relation)\b(?:\s+(?:of|in|for)\b[^.:=\n]{0,60}?)?\s*(?:is|are|was|would\s+be|will\s+be|equals|=|:)\s*:?)",
      kFlags);
  static const std::regex kThereAre(R"(\bthere\s+(?:are|is)\s+(?=\S+\s+(?:odd|even)\b))", kFlags);
  static const std::regex kNumberOne(R"(\bnumber\s*1\b[^.\n]*?\b(?:is|are)\s+)", kFlags);

  std::vector<Candidate> out;
  for (const auto& line : split_lines(text)) {
    auto add = [&](const SvMatch& m) {
      const std::size_t end = line.pos + static_cast<std::size_t>(m.position(0) + m.length(0));
      out.push_back({line.pos + static_cast<std::size_t>(m.position(0)), capture_sentence(text, end)});
    };
    for_each_match(line.text, kAnswer, add);
    for_each_match(line.text, kQuantity, add);
    if (task == TaskKind::kOddCount || task == TaskKind::kEvenCount) {
      for_each_match(line.text, kThereAre, add);
    }
    if (task == TaskKind::kComparison) for_each_match(line.text, kNumberOne, add);
  }
  return out;
}

std::vector<Candidate> contextual_candidates(std::string_view text) {
  static const auto kFlags = std::regex::ECMAScript | std::regex::icase;
  static const std::regex kBold(R"(\*\*([^*\n]+?)\*\*|__([^_\n]+?)__)");
  static const std::regex kItalic(R"((?:^|[^*\w])\*([^*\n]+?)\*(?!\*))");
  static const std::regex kInlineCode(R"(`([^`\n]+)`)");
  static const std::regex kLabeled(
      R"(^\s*(?:[#>*-]+\s*)?(?:final|result|output|solution|conclusion|therefore|thus|hence|so)\b[^:=\n]{0,40}?[:=,-]\s*(.+)$)",
      kFlags);
  static const std::regex kArrow(R"((?:=>|->|\xE2\x86\x92|\xE2\x87\x92)\s*(.+)$)");
  static const std::regex kHeading(R"(^\s*#{1,6}\s+(.+)$)");

  std::vector<Candidate> out;
  auto add_group = [&](std::size_t base, const SvMatch& m) {
    for (std::size_t g = 1; g < m.size(); ++g) {
      if (m[g].matched) {
        out.push_back({base + static_cast<std::size_t>(m.position(static_cast<int>(g))), m[g].str()});
        return;
      }
    }
  };
  for (const auto& line : split_lines(text)) {
    auto add = [&](const SvMatch& m) { add_group(line.pos, m); };
    for_each_match(line.text, kBold, add);
    for_each_match(line.text, kItalic, add);
    for_each_match(line.text, kInlineCode, add);
    for_each_match(line.text, kLabeled, add);
    for_each_match(line.text, kArrow, add);
    for_each_match(line.text, kHeading, add);
  }
  // Multi-line blocks: fenced code, $$...$$ and \[...\]; the last non-empty
  // line of the block is the candidate.
  auto add_block = [&](std::string_view open, std::string_view close) {
    std::size_t pos = 0;
    while ((pos = text.find(open, pos)) != std::string_view::npos) {
      std::size_t body = pos + open.size();
      std::size_t end = text.find(close, body);
      if (end == std::string_view::npos) break;
      std::string_view inner = text.substr(body, end - body);
      if (open == "```") {
        const std::size_t nl = inner.find('\n');  // drop the info string
        inner = nl == std::string_view::npos ? inner : inner.substr(nl + 1);
      }
      std::string_view last;
      for (const auto& l : split_lines(inner)) {
        if (!trim(l.text).empty()) last = l.text;
      }
      if (!trim(last).empty()) out.push_back({body + static_cast<std::size_t>(last.data() - inner.data()), std::string(last)});
      pos = end + close.size();
    }
  };
  add_block("```", "```");
  add_block("$$", "$$");
  add_block("\\[", "\\]");
  return out;
}

void sort_last_first(std::vector<Candidate>& c) {
  std::stable_sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) { return a.pos > b.pos; });
}

std::vector<std::int64_t> payload_numbers(const Payload& payload) {
  if (const auto* list = std::get_if<IntList>(&payload)) return list->values;
  const auto& p = std::get<IntPair>(payload);
  return {p.a, p.b};
}

Rational numeric_value(const AnswerValue& v) {
  if (const auto* i = std::get_if<BigInt>(&v)) return Rational(*i);
  return std::get<Decimal>(v).value;
}

}  // namespace

std::string_view tier_name(Tier t) {
  switch (t) {
    case Tier::kBoxed: return "boxed";
    case Tier::kExplicit: return "explicit";
    case Tier::kContextual: return "contextual";
    case Tier::kFallback: return "fallback";
  }
  return "fallback";
}

std::optional<Tier> parse_tier(std::string_view s) {
  for (Tier t : {Tier::kBoxed, Tier::kExplicit, Tier::kContextual, Tier::kFallback}) {
    if (tier_name(t) == s) return t;
  }
  return std::nullopt;
}

std::string_view reason_name(InvalidReason r) {
  switch (r) {
    case InvalidReason::kNone: return "none";
    case InvalidReason::kInputEcho: return "input-echo";
    case InvalidReason::kElementMismatch: return "element-mismatch";
    case InvalidReason::kShapeMismatch: return "shape-mismatch";
  }
  return "none";
}

std::vector<std::string> extract_boxed(std::string_view text) {
  std::vector<std::string> out;
  constexpr std::string_view kBoxed = "\\boxed";
  for (std::size_t pos = text.find(kBoxed); pos != std::string_view::npos;
       pos = text.find(kBoxed, pos + 1)) {
    std::size_t open = pos + kBoxed.size();
    while (open < text.size() && text[open] == ' ') ++open;
    if (open >= text.size() || text[open] != '{') continue;
    const std::size_t close = match_brace(text, open);
    if (close == std::string_view::npos) continue;
    out.emplace_back(text.substr(open + 1, close - open - 1));
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::optional<Numeric> normalize_numeric(std::string_view span) {
  try {
    if (span.size() > 4 * kMaxNumericSpan) return std::nullopt;
    return normalize_cleaned(latex_clean(span));
  } catch (...) {
    return std::nullopt;
  }
}

std::optional<AnswerValue> parse_span(TaskKind task, std::string_view span) {
  try {
    switch (answer_shape(task)) {
      case AnswerShape::kInteger:
      case AnswerShape::kNumber: {
        auto v = parse_numeric_span(span);
        if (!v) return std::nullopt;
        return std::visit([](auto&& x) -> AnswerValue { return x; }, *v);
      }
      case AnswerShape::kList:
        if (auto l = parse_list(span)) return *l;
        return std::nullopt;
      case AnswerShape::kRelation:
        if (auto r = parse_relation(span, true)) return *r;
        return std::nullopt;
      case AnswerShape::kSet:
        if (auto s = parse_set(span)) return *s;
        return std::nullopt;
    }
  } catch (...) {
  }
  return std::nullopt;
}

ValidationResult validate_answer(TaskKind task, const AnswerValue& parsed, const Payload& payload,
                                 Tier tier) {
  switch (answer_shape(task)) {
    case AnswerShape::kInteger:
    case AnswerShape::kNumber: {
      if (!std::holds_alternative<BigInt>(parsed) && !std::holds_alternative<Decimal>(parsed)) {
        return ValidationResult::fail(InvalidReason::kShapeMismatch);
      }
      if (tier == Tier::kFallback && filters_input_echo(task)) {
        const Rational v = numeric_value(parsed);
        for (auto x : payload_numbers(payload)) {
          if (v == Rational(BigInt(x))) return ValidationResult::fail(InvalidReason::kInputEcho);
        }
      }
      return ValidationResult::ok();
    }
    case AnswerShape::kList: {
      const auto* list = std::get_if<IntList>(&parsed);
      const auto* input = std::get_if<IntList>(&payload);
      if (list == nullptr || input == nullptr) return ValidationResult::fail(InvalidReason::kShapeMismatch);
      if (list->values.size() != input->values.size()) {
        return ValidationResult::fail(InvalidReason::kShapeMismatch);
      }
      auto a = list->values;
      auto b = input->values;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) return ValidationResult::fail(InvalidReason::kElementMismatch);
      return ValidationResult::ok();
    }
    case AnswerShape::kRelation:
      if (!std::holds_alternative<Relation>(parsed)) return ValidationResult::fail(InvalidReason::kShapeMismatch);
      return ValidationResult::ok();
    case AnswerShape::kSet: {
      const auto* set = std::get_if<IntSet>(&parsed);
      if (set == nullptr || set->values.empty()) return ValidationResult::fail(InvalidReason::kShapeMismatch);
      return ValidationResult::ok();
    }
  }
  return ValidationResult::fail(InvalidReason::kShapeMismatch);
}

Extraction extract(std::string_view text, TaskKind task, const Payload& payload) {
  Extraction result;
  auto attempt = [&](Tier tier, const std::string& span, std::optional<AnswerValue> value) -> bool {
    if (!value) return false;
    const auto check = validate_answer(task, *value, payload, tier);
    if (!check.valid) {
      result.rejected.emplace_back(tier, check.reason);
      return false;
    }
    result.answer = ParsedAnswer{std::move(*value), tier, span};
    return true;
  };

  try {
    // Boxed
    for (const auto& box : extract_boxed(text)) {
      if (is_placeholder(box)) continue;
      auto v = parse_span(task, box);
      if (!v) continue;
      result.boxed_present = true;
      if (attempt(Tier::kBoxed, box, std::move(v))) return result;
    }

    // Explicit statements
    auto explicit_c = explicit_candidates(text, task);
    sort_last_first(explicit_c);
    for (const auto& c : explicit_c) {
      if (attempt(Tier::kExplicit, c.span, parse_span(task, c.span))) return result;
    }

    // Markdown / labeled context
    auto ctx = contextual_candidates(text);
    sort_last_first(ctx);
    for (const auto& c : ctx) {
      if (is_placeholder(c.span)) continue;
      if (attempt(Tier::kContextual, c.span, parse_span(task, c.span))) return result;
    }

    // Last well-formed value of the expected shape
    const std::string cleaned = latex_clean(text);
    switch (answer_shape(task)) {
      case AnswerShape::kInteger:
      case AnswerShape::kNumber: {
        auto tokens = scan_numbers(cleaned);
        for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
          AnswerValue v = std::visit([](auto&& x) -> AnswerValue { return x; }, it->value);
          if (attempt(Tier::kFallback, it->text, std::move(v))) return result;
        }
        break;
      }
      case AnswerShape::kList: {
        std::vector<ListHit> hits = bracketed_lists(cleaned);
        for (const auto& line : split_lines(cleaned)) {
          if (line.text.find_first_of("[]({})") != std::string_view::npos) continue;
          if (auto seq = parse_int_sequence(line.text); seq && seq->size() >= 2) {
            hits.push_back({line.pos, std::move(*seq)});
          }
        }
        std::stable_sort(hits.begin(), hits.end(), [](const ListHit& a, const ListHit& b) { return a.pos > b.pos; });
        for (auto& h : hits) {
          if (attempt(Tier::kFallback, render_int_list(h.values), IntList{h.values})) return result;
        }
        break;
      }
      case AnswerShape::kRelation: {
        std::vector<Candidate> sentences;
        for (const auto& line : split_lines(cleaned)) {
          std::size_t start = 0;
          while (start < line.text.size()) {
            std::size_t end = line.text.find(". ", start);
            if (end == std::string_view::npos) end = line.text.size();
            sentences.push_back({line.pos + start, std::string(line.text.substr(start, end - start))});
            start = end + 1;
          }
        }
        sort_last_first(sentences);
        for (const auto& s : sentences) {
          auto r = parse_relation(s.span, false);
          if (r && attempt(Tier::kFallback, s.span, *r)) return result;
        }
        break;
      }
      case AnswerShape::kSet: {
        auto runs = integer_runs(cleaned);
        for (auto it = runs.rbegin(); it != runs.rend(); ++it) {
          if (attempt(Tier::kFallback, render_int_list(it->values), IntSet::from(it->values))) return result;
        }
        break;
      }
    }
  } catch (...) {
    // Extraction is total: any internal failure means no answer.
  }
  return result;
}

nlohmann::ordered_json answer_to_json(const AnswerValue& value) {
  nlohmann::ordered_json j;
  std::visit(
      [&j](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BigInt>) {
          j["kind"] = "integer";
          j["value"] = v.str();
        } else if constexpr (std::is_same_v<T, Decimal>) {
          j["kind"] = "decimal";
          j["value"] = rational_to_string(v.value);
        } else if constexpr (std::is_same_v<T, IntList>) {
          j["kind"] = "list";
          j["values"] = v.values;
        } else if constexpr (std::is_same_v<T, Relation>) {
          j["kind"] = "relation";
          j["value"] = relation_name(v);
        } else {
          j["kind"] = "set";
          j["values"] = v.values;
        }
      },
      value);
  return j;
}

std::optional<AnswerValue> answer_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "integer") return parse_bigint(j.at("value").get<std::string>());
    if (kind == "decimal") return Decimal{parse_rational(j.at("value").get<std::string>())};
    if (kind == "list") return IntList{j.at("values").get<std::vector<std::int64_t>>()};
    if (kind == "relation") {
      if (auto r = parse_relation_name(j.at("value").get<std::string>())) return *r;
      return std::nullopt;
    }
    if (kind == "set") return IntSet::from(j.at("values").get<std::vector<std::int64_t>>());
  } catch (...) {
  }
  return std::nullopt;
}

std::string answer_to_text(const AnswerValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BigInt>) {
          return v.str();
        } else if constexpr (std::is_same_v<T, Decimal>) {
          return rational_to_decimal(v.value, 10);
        } else if constexpr (std::is_same_v<T, IntList>) {
          return render_int_list(v.values);
        } else if constexpr (std::is_same_v<T, Relation>) {
          return std::string(relation_name(v));
        } else {
          std::string s;
          for (std::size_t i = 0; i < v.values.size(); ++i) {
            if (i) s += ", ";
            s += std::to_string(v.values[i]);
          }
          return s;
        }
      },
      value);
}

}  // namespace thinkbench
