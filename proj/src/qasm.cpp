#include "qdist/qasm.hpp"

#include "qdist/errors.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

namespace qdist::qasm {

namespace {

struct Statement {
  std::string text;
  std::size_t line;
};

/// Splits on ';' after stripping // comments, remembering the line each
/// statement starts on.
std::vector<Statement> splitStatements(std::string_view text) {
  std::vector<Statement> out;
  std::string current;
  std::size_t line = 1;
  std::size_t startLine = 1;
  bool inComment = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '\n') {
      inComment = false;
      ++line;
      current.push_back(' ');
      continue;
    }
    if (inComment) {
      continue;
    }
    if (ch == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      inComment = true;
      continue;
    }
    if (ch == ';') {
      out.push_back({current, startLine});
      current.clear();
      continue;
    }
    if (current.find_first_not_of(" \t\r") == std::string::npos &&
        !std::isspace(static_cast<unsigned char>(ch))) {
      startLine = line;
    }
    current.push_back(ch);
  }
  if (current.find_first_not_of(" \t\r") != std::string::npos) {
    throw ParseError(startLine, "missing ';' at end of statement");
  }
  return out;
}

class Cursor {
public:
  Cursor(std::string_view s, std::size_t line) : s_(s), line_(line) {}

  void skipSpace() {
    while (pos_ < s_.size() &&
           std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
  }
  [[nodiscard]] bool atEnd() {
    skipSpace();
    return pos_ >= s_.size();
  }
  [[nodiscard]] char peek() {
    skipSpace();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) {
      fail(std::string("expected '") + c + "'");
    }
  }
  std::string identifier() {
    skipSpace();
    const auto start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
            s_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_ || std::isdigit(static_cast<unsigned char>(s_[start]))) {
      fail("expected identifier");
    }
    return std::string(s_.substr(start, pos_ - start));
  }
  std::size_t integer() {
    skipSpace();
    std::size_t value = 0;
    const auto* first = s_.data() + pos_;
    const auto* last = s_.data() + s_.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr == first) {
      fail("expected integer");
    }
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }
  double number() {
    skipSpace();
    const auto* first = s_.data() + pos_;
    const auto* last = s_.data() + s_.size();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr == first) {
      fail("expected number");
    }
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  // expr := term (('+'|'-') term)*
  double expression() {
    double v = term();
    for (;;) {
      if (accept('+')) {
        v += term();
      } else if (accept('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(line_, what + " in '" + std::string(trimmed()) + "'");
  }

private:
  double term() {
    double v = factor();
    for (;;) {
      if (accept('*')) {
        v *= factor();
      } else if (accept('/')) {
        v /= factor();
      } else {
        return v;
      }
    }
  }
  double factor() {
    if (accept('-')) {
      return -factor();
    }
    if (accept('+')) {
      return factor();
    }
    if (accept('(')) {
      const double v = expression();
      expect(')');
      return v;
    }
    const char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c)) != 0) {
      const auto id = identifier();
      if (id == "pi") {
        return std::numbers::pi;
      }
      fail("unknown symbol '" + id + "' in parameter");
    }
    return number();
  }
  std::string_view trimmed() const {
    const auto b = s_.find_first_not_of(" \t\r");
    const auto e = s_.find_last_not_of(" \t\r");
    return b == std::string_view::npos ? std::string_view{}
                                       : s_.substr(b, e - b + 1);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

std::string formatDouble(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

} // namespace

Circuit parse(std::string_view text) {
  std::optional<Circuit> circuit;
  std::string regName;
  bool sawHeader = false;
  bool first = true;

  for (const auto& st : splitStatements(text)) {
    Cursor cur(st.text, st.line);
    if (cur.atEnd()) {
      continue;
    }
    const auto keyword = cur.identifier();

    if (keyword == "OPENQASM") {
      if (!first || sawHeader) {
        cur.fail("OPENQASM header must be the first statement");
      }
      const double version = cur.number();
      if (version != 2.0 || !cur.atEnd()) {
        cur.fail("only OPENQASM 2.0 is supported");
      }
      sawHeader = true;
      first = false;
      continue;
    }
    first = false;
    if (keyword == "include") {
      continue;
    }
    if (keyword == "qreg") {
      if (circuit) {
        cur.fail("only one qreg is supported");
      }
      regName = cur.identifier();
      cur.expect('[');
      const auto size = cur.integer();
      cur.expect(']');
      if (!cur.atEnd()) {
        cur.fail("trailing tokens");
      }
      if (size > 64) {
        cur.fail("register wider than 64 qubits");
      }
      circuit.emplace(static_cast<int>(size));
      continue;
    }
    if (keyword == "measure" || keyword == "reset" || keyword == "creg" ||
        keyword == "if" || keyword == "gate" || keyword == "opaque") {
      cur.fail("unsupported statement '" + keyword + "'");
    }
    if (!circuit) {
      cur.fail("gate before qreg declaration");
    }
    if (keyword == "barrier") {
      continue;
    }

    std::size_t nControls = 0;
    while (nControls < keyword.size() && keyword[nControls] == 'c') {
      ++nControls;
    }
    auto kind = gateKindFromName(std::string_view(keyword).substr(nControls));
    if (!kind) {
      cur.fail("unsupported gate '" + keyword + "'");
    }

    std::vector<double> params;
    if (cur.accept('(')) {
      if (!cur.accept(')')) {
        do {
          params.push_back(cur.expression());
        } while (cur.accept(','));
        cur.expect(')');
      }
    }

    std::vector<Qubit> args;
    do {
      const auto reg = cur.identifier();
      if (reg != regName) {
        cur.fail("unknown register '" + reg + "'");
      }
      cur.expect('[');
      args.push_back(static_cast<Qubit>(cur.integer()));
      cur.expect(']');
    } while (cur.accept(','));
    if (!cur.atEnd()) {
      cur.fail("trailing tokens");
    }

    if (args.size() != nControls + targetCount(*kind)) {
      cur.fail("wrong number of qubit arguments for '" + keyword + "'");
    }
    Gate g;
    g.kind = *kind;
    g.params = std::move(params);
    g.controls.assign(args.begin(),
                      args.begin() + static_cast<std::ptrdiff_t>(nControls));
    g.targets.assign(args.begin() + static_cast<std::ptrdiff_t>(nControls),
                     args.end());
    try {
      circuit->append(std::move(g));
    } catch (const ArgumentError& e) {
      throw ParseError(st.line, e.what());
    }
  }
  if (!circuit) {
    throw ParseError(1, "no qreg declared");
  }
  return std::move(*circuit);
}

Circuit parseFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ArgumentError("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void print(const Circuit& circuit, std::ostream& out) {
  out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  out << "qreg q[" << circuit.nQubits() << "];\n";
  for (const auto& g : circuit.gates()) {
    out << std::string(g.controls.size(), 'c') << gateName(g.kind);
    if (!g.params.empty()) {
      out << '(';
      for (std::size_t i = 0; i < g.params.size(); ++i) {
        out << (i == 0 ? "" : ",") << formatDouble(g.params[i]);
      }
      out << ')';
    }
    bool firstArg = true;
    for (const auto q : g.controls) {
      out << (firstArg ? " " : ",") << "q[" << q << ']';
      firstArg = false;
    }
    for (const auto q : g.targets) {
      out << (firstArg ? " " : ",") << "q[" << q << ']';
      firstArg = false;
    }
    out << ";\n";
  }
}

std::string print(const Circuit& circuit) {
  std::ostringstream ss;
  print(circuit, ss);
  return ss.str();
}

} // namespace qdist::qasm
