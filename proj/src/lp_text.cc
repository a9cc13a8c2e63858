#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "vneap/lp.h"

namespace vneap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kTermsPerLine = 6;
constexpr const char* kEmptyRowMarker = "\\ empty ";

std::string Num(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* SenseText(Sense s) {
  switch (s) {
    case Sense::kLessEqual: return "<=";
    case Sense::kEqual: return "=";
    case Sense::kGreaterEqual: return ">=";
  }
  return "?";
}

void WriteTerms(std::ostringstream& out,
                const std::vector<std::pair<int, double>>& terms,
                const LinearProgram& lp) {
  int on_line = 0;
  for (auto [j, a] : terms) {
    if (on_line == kTermsPerLine) {
      out << "\n   ";
      on_line = 0;
    }
    out << (a < 0 ? " - " : " + ") << Num(std::fabs(a)) << ' '
        << lp.variables[j].name;
    ++on_line;
  }
}

}  // namespace

std::string export_lp_text(const LinearProgram& lp) {
  std::ostringstream out;
  out << "\\ vneap linear program: " << lp.variables.size() << " variables, "
      << lp.constraints.size() << " constraints\n";
  out << "Minimize\n obj:";
  std::vector<std::pair<int, double>> obj;
  for (size_t j = 0; j < lp.objective.size(); ++j) {
    if (lp.objective[j] != 0) obj.push_back({static_cast<int>(j), lp.objective[j]});
  }
  WriteTerms(out, obj, lp);
  if (lp.objective_offset != 0 || obj.empty()) {
    out << (lp.objective_offset < 0 ? " - " : " + ")
        << Num(std::fabs(lp.objective_offset));
  }
  out << "\nSubject To\n";
  for (const Constraint& c : lp.constraints) {
    if (c.terms.empty()) {
      // The format has no empty rows; keep them as annotated comments.
      out << kEmptyRowMarker << c.name << ' ' << SenseText(c.sense) << ' '
          << Num(c.rhs) << "\n";
      continue;
    }
    out << ' ' << c.name << ':';
    WriteTerms(out, c.terms, lp);
    out << ' ' << SenseText(c.sense) << ' ' << Num(c.rhs) << "\n";
  }
  out << "Bounds\n";
  for (const Variable& v : lp.variables) {
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out << ' ' << v.name << " free\n";
    } else {
      out << ' ' << Num(v.lower) << " <= " << v.name << " <= " << Num(v.upper)
          << "\n";
    }
  }
  bool any_binary = false;
  for (const Variable& v : lp.variables) any_binary = any_binary || v.binary;
  if (any_binary) {
    out << "Binaries\n";
    for (const Variable& v : lp.variables) {
      if (v.binary) out << ' ' << v.name << "\n";
    }
  }
  out << "End\n";
  return out.str();
}

namespace {

enum class TokKind { kName, kNumber, kSense, kSign, kColon, kEmptyRow, kEnd };

struct Token {
  TokKind kind;
  std::string text;
  double number = 0;
  int line = 0;
};

bool NameStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
         std::string_view("!\"#$%&()/,;?@'{}|~").find(c) != std::string_view::npos;
}

bool NameChar(char c) {
  return NameStart(c) || std::isdigit(static_cast<unsigned char>(c)) ||
         c == '.' || c == '[' || c == ']';
}

std::vector<Token> Lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1;
  size_t i = 0;
  const std::string marker = kEmptyRowMarker;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '\\') {
      size_t end = text.find('\n', i);
      if (end == std::string::npos) end = text.size();
      std::string comment = text.substr(i, end - i);
      if (comment.rfind(marker, 0) == 0) {
        out.push_back({TokKind::kEmptyRow, comment.substr(marker.size()), 0, line});
      }
      i = end;
      continue;
    }
    if (c == '<' || c == '>' || c == '=') {
      std::string s(1, c);
      ++i;
      if (i < text.size() && (text[i] == '=' || text[i] == '<' || text[i] == '>')) {
        s += text[i++];
      }
      std::string norm;
      if (s == "<" || s == "<=" || s == "=<") norm = "<=";
      else if (s == ">" || s == ">=" || s == "=>") norm = ">=";
      else if (s == "=") norm = "=";
      else throw ParseError(line, "bad operator '" + s + "'");
      out.push_back({TokKind::kSense, norm, 0, line});
      continue;
    }
    if (c == '+' || c == '-') {
      // Signed infinity is a number.
      std::string rest = text.substr(i + 1, 8);
      for (auto& ch : rest) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      size_t len = 0;
      if (rest.rfind("infinity", 0) == 0) len = 8;
      else if (rest.rfind("inf", 0) == 0) len = 3;
      if (len && (i + 1 + len >= text.size() || !NameChar(text[i + 1 + len]))) {
        out.push_back({TokKind::kNumber, "", c == '-' ? -kInf : kInf, line});
        i += 1 + len;
        continue;
      }
      out.push_back({TokKind::kSign, std::string(1, c), 0, line});
      ++i;
      continue;
    }
    if (c == ':') {
      out.push_back({TokKind::kColon, ":", 0, line});
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v;
      try {
        v = std::stod(text.substr(i, 64), &used);
      } catch (const std::exception&) {
        throw ParseError(line, "bad number");
      }
      out.push_back({TokKind::kNumber, text.substr(i, used), v, line});
      i += used;
      continue;
    }
    if (NameStart(c)) {
      size_t start = i;
      while (i < text.size() && NameChar(text[i])) ++i;
      out.push_back({TokKind::kName, text.substr(start, i - start), 0, line});
      continue;
    }
    throw ParseError(line, std::string("unexpected character '") + c + "'");
  }
  out.push_back({TokKind::kEnd, "", 0, line});
  return out;
}

std::string Lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

enum class Section { kNone, kObjective, kConstraints, kBounds, kBinaries, kEnd };

class LpParser {
 public:
  explicit LpParser(const std::string& text) : toks_(Lex(text)) {}

  LinearProgram Parse();

 private:
  const Token& Peek(size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& Next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  // Recognises a section keyword at the cursor and consumes it.
  std::optional<Section> SectionHeader();
  int Var(const std::string& name);
  // Reads a signed linear expression; stops at a sense, a section header or
  // a new labelled row. Constant terms accumulate in `constant`.
  std::vector<std::pair<int, double>> Expression(double& constant);
  bool AtRowLabel() const {
    return Peek().kind == TokKind::kName && Peek(1).kind == TokKind::kColon;
  }
  double SignedNumber();

  std::vector<Token> toks_;
  size_t pos_ = 0;
  LinearProgram lp_;
  std::unordered_map<std::string, int> index_;
  std::vector<char> bounded_;
  double objective_sign_ = 1;
};

std::optional<Section> LpParser::SectionHeader() {
  if (Peek().kind != TokKind::kName) return std::nullopt;
  std::string w = Lower(Peek().text);
  if (w == "minimize" || w == "minimise" || w == "minimum" || w == "min") {
    ++pos_;
    objective_sign_ = 1;
    return Section::kObjective;
  }
  if (w == "maximize" || w == "maximise" || w == "maximum" || w == "max") {
    ++pos_;
    objective_sign_ = -1;
    return Section::kObjective;
  }
  if (w == "subject" && Peek(1).kind == TokKind::kName && Lower(Peek(1).text) == "to") {
    pos_ += 2;
    return Section::kConstraints;
  }
  if (w == "such" && Peek(1).kind == TokKind::kName && Lower(Peek(1).text) == "that") {
    pos_ += 2;
    return Section::kConstraints;
  }
  if (w == "st" || w == "s.t.") {
    ++pos_;
    return Section::kConstraints;
  }
  if (w == "bounds" || w == "bound") {
    ++pos_;
    return Section::kBounds;
  }
  if (w == "binaries" || w == "binary" || w == "bin") {
    ++pos_;
    return Section::kBinaries;
  }
  if (w == "generals" || w == "general" || w == "gen" || w == "semi-continuous") {
    throw ParseError(Peek().line, "section '" + Peek().text + "' is not supported");
  }
  if (w == "end") {
    ++pos_;
    return Section::kEnd;
  }
  return std::nullopt;
}

int LpParser::Var(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  Variable v;
  v.name = name;
  v.lower = 0;
  v.upper = kInf;
  lp_.variables.push_back(v);
  lp_.objective.push_back(0);
  bounded_.push_back(0);
  int j = static_cast<int>(lp_.variables.size() - 1);
  index_[name] = j;
  return j;
}

std::vector<std::pair<int, double>> LpParser::Expression(double& constant) {
  std::vector<std::pair<int, double>> terms;
  while (true) {
    const Token& t = Peek();
    if (t.kind == TokKind::kEnd || t.kind == TokKind::kSense ||
        t.kind == TokKind::kEmptyRow || AtRowLabel()) {
      break;
    }
    size_t save = pos_;
    if (SectionHeader()) {
      pos_ = save;
      break;
    }
    double sign = 1;
    while (Peek().kind == TokKind::kSign) {
      if (Next().text == "-") sign = -sign;
    }
    double coef = 1;
    bool have_coef = false;
    if (Peek().kind == TokKind::kNumber) {
      coef = Next().number;
      have_coef = true;
    }
    if (Peek().kind == TokKind::kName && !AtRowLabel()) {
      size_t before = pos_;
      if (SectionHeader()) {
        pos_ = before;
        if (!have_coef) throw ParseError(Peek().line, "dangling sign");
        constant += sign * coef;
        break;
      }
      terms.push_back({Var(Next().text), sign * coef});
    } else if (have_coef) {
      constant += sign * coef;
    } else {
      throw ParseError(Peek().line, "expected a term");
    }
  }
  return terms;
}

double LpParser::SignedNumber() {
  double sign = 1;
  while (Peek().kind == TokKind::kSign) {
    if (Next().text == "-") sign = -sign;
  }
  if (Peek().kind != TokKind::kNumber) {
    throw ParseError(Peek().line, "expected a number");
  }
  return sign * Next().number;
}

Sense ParseSense(const std::string& s) {
  if (s == "<=") return Sense::kLessEqual;
  if (s == ">=") return Sense::kGreaterEqual;
  return Sense::kEqual;
}

LinearProgram LpParser::Parse() {
  Section section = Section::kNone;
  std::vector<int> bound_order;
  while (Peek().kind != TokKind::kEnd) {
    if (auto s = SectionHeader()) {
      section = *s;
      if (section == Section::kEnd) break;
      continue;
    }
    const int line = Peek().line;
    switch (section) {
      case Section::kNone:
      case Section::kEnd:
        throw ParseError(line, "content outside a section");
      case Section::kObjective: {
        if (AtRowLabel()) pos_ += 2;
        double constant = 0;
        for (auto [j, a] : Expression(constant)) {
          lp_.objective[j] += objective_sign_ * a;
        }
        lp_.objective_offset += objective_sign_ * constant;
        if (Peek().kind == TokKind::kSense) {
          throw ParseError(Peek().line, "relation in objective");
        }
        break;
      }
      case Section::kConstraints: {
        Constraint c;
        if (Peek().kind == TokKind::kEmptyRow) {
          std::istringstream in(Next().text);
          std::string sense;
          std::string rhs;
          if (!(in >> c.name >> sense >> rhs)) {
            throw ParseError(line, "malformed empty-row annotation");
          }
          c.sense = ParseSense(sense);
          try {
            c.rhs = std::stod(rhs);
          } catch (const std::exception&) {
            throw ParseError(line, "bad right-hand side");
          }
          lp_.constraints.push_back(std::move(c));
          break;
        }
        if (AtRowLabel()) {
          c.name = Next().text;
          ++pos_;
        } else {
          c.name = "R" + std::to_string(lp_.constraints.size() + 1);
        }
        double constant = 0;
        c.terms = Expression(constant);
        if (Peek().kind != TokKind::kSense) {
          throw ParseError(Peek().line, "expected <=, >= or = in row " + c.name);
        }
        c.sense = ParseSense(Next().text);
        c.rhs = SignedNumber() - constant;
        lp_.constraints.push_back(std::move(c));
        break;
      }
      case Section::kBounds: {
        // Forms: l <= x <= u | x <= u | x >= l | x = v | x free | l <= x
        double lower = 0, upper = kInf;
        int j;
        if (Peek().kind == TokKind::kName) {
          j = Var(Next().text);
          lower = lp_.variables[j].lower;
          upper = lp_.variables[j].upper;
          if (Peek().kind == TokKind::kName && Lower(Peek().text) == "free") {
            ++pos_;
            lower = -kInf;
            upper = kInf;
          } else {
            if (Peek().kind != TokKind::kSense) throw ParseError(line, "bad bound");
            std::string s = Next().text;
            double v = SignedNumber();
            if (s == "<=") upper = v;
            else if (s == ">=") lower = v;
            else lower = upper = v;
          }
        } else {
          double v = SignedNumber();
          if (Peek().kind != TokKind::kSense) throw ParseError(line, "bad bound");
          std::string s = Next().text;
          if (Peek().kind != TokKind::kName) throw ParseError(line, "bad bound");
          j = Var(Next().text);
          lower = lp_.variables[j].lower;
          upper = lp_.variables[j].upper;
          if (s == "<=") lower = v;
          else if (s == ">=") upper = v;
          else lower = upper = v;
          if (Peek().kind == TokKind::kSense) {
            std::string s2 = Next().text;
            double w = SignedNumber();
            if (s2 == "<=") upper = w;
            else if (s2 == ">=") lower = w;
            else throw ParseError(line, "bad bound");
          }
        }
        lp_.variables[j].lower = lower;
        lp_.variables[j].upper = upper;
        if (!bounded_[j]) bound_order.push_back(j);
        bounded_[j] = 1;
        break;
      }
      case Section::kBinaries: {
        if (Peek().kind != TokKind::kName) throw ParseError(line, "expected a name");
        int j = Var(Next().text);
        lp_.variables[j].binary = true;
        if (!bounded_[j]) {
          lp_.variables[j].lower = 0;
          lp_.variables[j].upper = 1;
        }
        break;
      }
    }
  }
  if (section != Section::kEnd) {
    throw ParseError(Peek().line, "missing End");
  }

  // Variables are ordered as listed in Bounds, then by first appearance.
  std::vector<int> order = bound_order;
  for (size_t j = 0; j < lp_.variables.size(); ++j) {
    if (!bounded_[j]) order.push_back(static_cast<int>(j));
  }
  std::vector<int> remap(order.size());
  LinearProgram out;
  out.objective_offset = lp_.objective_offset;
  for (size_t k = 0; k < order.size(); ++k) {
    remap[order[k]] = static_cast<int>(k);
    out.variables.push_back(lp_.variables[order[k]]);
    out.objective.push_back(lp_.objective[order[k]]);
  }
  for (Constraint c : lp_.constraints) {
    for (auto& term : c.terms) term.first = remap[term.first];
    out.constraints.push_back(std::move(c));
  }
  return out;
}

}  // namespace

LinearProgram import_lp_text(const std::string& text) {
  return LpParser(text).Parse();
}

std::string export_solution_text(const LinearProgram& lp,
                                 const std::vector<double>& values) {
  std::ostringstream out;
  for (size_t j = 0; j < lp.variables.size(); ++j) {
    out << lp.variables[j].name << " = " << Num(values.at(j)) << "\n";
  }
  return out.str();
}

std::map<std::string, double> import_solution_text(const std::string& text) {
  std::map<std::string, double> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto eq = line.find('=');
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (eq == std::string::npos) throw ParseError(number, "expected name = value");
    std::string name = line.substr(0, eq);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    std::string value = line.substr(eq + 1);
    if (name.empty()) throw ParseError(number, "missing variable name");
    size_t used = 0;
    double v;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      throw ParseError(number, "bad value for " + name);
    }
    if (value.find_first_not_of(" \t\r", used) != std::string::npos) {
      throw ParseError(number, "trailing text after value of " + name);
    }
    if (!out.emplace(name, v).second) {
      throw ParseError(number, "duplicate variable " + name);
    }
  }
  return out;
}

std::vector<double> values_for(const LinearProgram& lp,
                               const std::map<std::string, double>& named) {
  std::vector<double> out(lp.variables.size(), 0);
  for (size_t j = 0; j < lp.variables.size(); ++j) {
    auto it = named.find(lp.variables[j].name);
    if (it != named.end()) out[j] = it->second;
  }
  return out;
}

}  // namespace vneap
