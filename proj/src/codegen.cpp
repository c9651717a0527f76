#include "gg/codegen.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "gg/error.hpp"

namespace gg {

std::string_view to_string(EmitDialect d) noexcept {
  switch (d) {
    case EmitDialect::PseudoCode: return "pseudo";
    case EmitDialect::CStyle: return "c";
    case EmitDialect::PythonStyle: return "python";
  }
  return "pseudo";
}

std::optional<EmitDialect> parse_dialect(std::string_view text) noexcept {
  if (text == "pseudo" || text == "pseudocode") return EmitDialect::PseudoCode;
  if (text == "c" || text == "cstyle") return EmitDialect::CStyle;
  if (text == "python" || text == "py") return EmitDialect::PythonStyle;
  return std::nullopt;
}

namespace {

const std::set<std::string_view>& keywords(EmitDialect d) {
  static const std::set<std::string_view> pseudo{"function", "if", "then", "else", "end", "return"};
  static const std::set<std::string_view> c{
      "auto",   "break",  "case",     "char",   "const",    "continue", "default",  "do",     "double",
      "else",   "enum",   "extern",   "float",  "for",      "goto",     "if",       "inline", "int",
      "long",   "register", "restrict", "return", "short",  "signed",   "sizeof",   "static", "struct",
      "switch", "typedef", "union",   "unsigned", "void",   "volatile", "while",    "bool",   "strcmp"};
  static const std::set<std::string_view> py{
      "False", "None",   "True",  "and",   "as",     "assert", "async",  "await",    "break",
      "class", "continue", "def", "del",   "elif",   "else",   "except", "finally",  "for",
      "from",  "global", "if",    "import", "in",    "is",     "lambda", "nonlocal", "not",
      "or",    "pass",   "raise", "return", "try",   "while",  "with",   "yield"};
  switch (d) {
    case EmitDialect::PseudoCode: return pseudo;
    case EmitDialect::CStyle: return c;
    case EmitDialect::PythonStyle: return py;
  }
  return pseudo;
}

void require_identifier(std::string_view id, EmitDialect d) {
  const bool shape = !id.empty() && (std::isalpha(static_cast<unsigned char>(id[0])) || id[0] == '_') &&
                     std::all_of(id.begin(), id.end(), [](char c) {
                       return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
                     });
  if (!shape || keywords(d).count(id))
    throw Error(Errc::InvalidIdentifier,
                "'" + std::string(id) + "' is not a valid identifier for the " + std::string(to_string(d)) + " dialect");
}

std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + '"';
}

std::string number(double v) {
  auto text = format_number(v);
  // keep a decimal point so every dialect reads it as floating point
  if (text.find_first_of(".eE") == std::string::npos && text.find("inf") == std::string::npos) text += ".0";
  return text;
}

// Branch order for emission: most training rows first, ties keep stored order.
std::vector<const Branch*> ordered_branches(const TreeNode& node) {
  std::vector<const Branch*> out;
  for (const auto& b : node.branches) out.push_back(&b);
  if (std::holds_alternative<CategoricalSplit>(*node.test))
    std::stable_sort(out.begin(), out.end(), [](const Branch* a, const Branch* b) {
      return a->child.distribution.total() > b->child.distribution.total();
    });
  return out;
}

bool covers_domain(const TrainedModel& model, const TreeNode& node) {
  const auto idx = model.schema.find(attribute_of(*node.test));
  if (!idx || !model.schema[*idx].is_categorical()) return false;
  const auto& domain = model.schema[*idx].domain();
  std::set<std::string_view> keys;
  for (const auto& b : node.branches) keys.insert(b.key);
  return keys.size() == domain.size() &&
         std::all_of(domain.begin(), domain.end(), [&](const std::string& v) { return keys.count(v) > 0; });
}

void collect_parameters(const TreeNode& node, std::vector<std::string>& out) {
  if (node.is_leaf()) return;
  const auto& attr = attribute_of(*node.test);
  if (std::find(out.begin(), out.end(), attr) == out.end()) out.push_back(attr);
  for (const auto* b : ordered_branches(node)) collect_parameters(b->child, out);
}

class Emitter {
 public:
  Emitter(const TrainedModel& model, EmitDialect dialect) : model_(model), dialect_(dialect) {}

  std::string run(const std::string& name, const std::vector<std::string>& params) {
    switch (dialect_) {
      case EmitDialect::PseudoCode: {
        line(0, "function " + name + "(" + join(params) + ")");
        node(model_.root, 1);
        line(0, "end");
        break;
      }
      case EmitDialect::CStyle: {
        std::vector<std::string> typed;
        for (const auto& p : params) typed.push_back((is_continuous(p) ? "double " : "const char *") + p);
        line(0, "#include <string.h>");
        line(0, "");
        line(0, "const char *" + name + "(" + join(typed) + ") {");
        node(model_.root, 1);
        line(0, "}");
        break;
      }
      case EmitDialect::PythonStyle: {
        line(0, "def " + name + "(" + join(params) + "):");
        node(model_.root, 1);
        break;
      }
    }
    return std::move(out_);
  }

 private:
  bool is_continuous(const std::string& attr) const {
    const auto idx = model_.schema.find(attr);
    return idx && model_.schema[*idx].is_continuous();
  }

  static std::string join(const std::vector<std::string>& items) {
    std::string s;
    for (const auto& i : items) s += (s.empty() ? "" : ", ") + i;
    return s;
  }

  void line(int indent, const std::string& text) {
    if (!text.empty()) out_.append(static_cast<std::size_t>(indent) * (dialect_ == EmitDialect::PythonStyle ? 4 : 2), ' ');
    out_ += text;
    out_ += '\n';
  }

  std::string condition(const SplitTest& test, const std::string& key) const {
    const auto& attr = attribute_of(test);
    if (const auto* cont = std::get_if<ContinuousSplit>(&test)) return attr + " <= " + number(cont->threshold);
    if (dialect_ == EmitDialect::CStyle) return "strcmp(" + attr + ", " + quoted(key) + ") == 0";
    return attr + " == " + quoted(key);
  }

  void ret(const std::string& label, int indent) {
    line(indent, dialect_ == EmitDialect::CStyle ? "return " + quoted(label) + ";" : "return " + quoted(label));
  }

  void open_if(bool first, const std::string& cond, int indent) {
    switch (dialect_) {
      case EmitDialect::PseudoCode: line(indent, (first ? "if " : "else if ") + cond + " then"); break;
      case EmitDialect::CStyle: line(indent, (first ? "if (" : "} else if (") + cond + ") {"); break;
      case EmitDialect::PythonStyle: line(indent, (first ? "if " : "elif ") + cond + ":"); break;
    }
  }

  void open_else(int indent) {
    switch (dialect_) {
      case EmitDialect::PseudoCode: line(indent, "else"); break;
      case EmitDialect::CStyle: line(indent, "} else {"); break;
      case EmitDialect::PythonStyle: line(indent, "else:"); break;
    }
  }

  void close(int indent) {
    if (dialect_ == EmitDialect::PseudoCode) line(indent, "end");
    if (dialect_ == EmitDialect::CStyle) line(indent, "}");
  }

  void node(const TreeNode& n, int indent) {
    if (n.is_leaf()) {
      ret(n.label, indent);
      return;
    }
    const auto& test = *n.test;
    if (const auto* cont = std::get_if<ContinuousSplit>(&test)) {
      const auto* le = n.child(kLessEqual);
      const auto* gt = n.child(kGreater);
      if (le == nullptr || gt == nullptr) {
        // degenerate continuous node: fall back to whichever side exists
        node(le ? *le : gt ? *gt : TreeNode::make_leaf(n.label, {}), indent);
        return;
      }
      open_if(true, condition(*cont, {}), indent);
      node(*le, indent + 1);
      open_else(indent);
      node(*gt, indent + 1);
      close(indent);
      return;
    }

    const auto branches = ordered_branches(n);
    const bool full = covers_domain(model_, n);
    const std::size_t tested = full ? branches.size() - 1 : branches.size();
    if (tested == 0) {
      node(branches.empty() ? TreeNode::make_leaf(n.label, {}) : branches.front()->child, indent);
      return;
    }
    for (std::size_t i = 0; i < tested; ++i) {
      open_if(i == 0, condition(test, branches[i]->key), indent);
      node(branches[i]->child, indent + 1);
    }
    open_else(indent);
    if (full)
      node(branches.back()->child, indent + 1);
    else
      ret(n.label, indent + 1);
    close(indent);
  }

  const TrainedModel& model_;
  EmitDialect dialect_;
  std::string out_;
};

}  // namespace

std::vector<std::string> emitted_parameters(const TrainedModel& model, bool keep_unused) {
  std::vector<std::string> params;
  collect_parameters(model.root, params);
  if (keep_unused)
    for (const auto& f : model.features)
      if (std::find(params.begin(), params.end(), f) == params.end()) params.push_back(f);
  return params;
}

std::string emit(const TrainedModel& model, const EmitOptions& options) {
  require_identifier(options.function_name, options.dialect);
  const auto params = emitted_parameters(model, options.keep_unused_parameters);
  for (const auto& p : params) {
    require_identifier(p, options.dialect);
    if (p == options.function_name)
      throw Error(Errc::InvalidIdentifier, "parameter '" + p + "' shadows the function name");
  }
  return Emitter(model, options.dialect).run(options.function_name, params);
}

std::string interpret(const TrainedModel& model, const Row& record) {
  return classify(model.root, model.schema, record).label;
}

std::string interpret(const TrainedModel& model, const Record& record) { return classify(model.root, record).label; }

// ---- PseudoCode reference evaluator ----------------------------------------

struct PseudoProgram::Node {
  enum class Kind { Return, If, Block } kind = Kind::Block;
  // Return
  std::string label;
  // If
  std::string variable;
  bool numeric = false;
  std::string text_operand;
  double number_operand = 0.0;
  std::shared_ptr<const Node> then_branch;
  std::shared_ptr<const Node> else_branch;  // may be null
  // Block
  std::vector<std::shared_ptr<const Node>> statements;
};

namespace {

struct Token {
  enum class Type { Identifier, String, Number, Symbol, End } type = Type::End;
  std::string text;
  std::size_t line = 0;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(Errc::SyntaxError, "pseudocode line " + std::to_string(line) + ": " + msg);
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Token::Type::Identifier, std::string(src.substr(i, j - i)), line});
      i = j;
    } else if (c == '"') {
      std::string s;
      ++i;
      while (true) {
        if (i >= src.size()) fail("unterminated string");
        if (src[i] == '"') break;
        if (src[i] == '\\') {
          if (++i >= src.size()) fail("dangling escape");
          s += src[i] == 'n' ? '\n' : src[i];
        } else {
          s += src[i];
        }
        ++i;
      }
      ++i;
      out.push_back({Token::Type::String, std::move(s), line});
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
      std::size_t j = i + 1;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '.' || src[j] == '-' ||
                                src[j] == '+'))
        ++j;
      out.push_back({Token::Type::Number, std::string(src.substr(i, j - i)), line});
      i = j;
    } else if (src.substr(i, 2) == "==" || src.substr(i, 2) == "<=") {
      out.push_back({Token::Type::Symbol, std::string(src.substr(i, 2)), line});
      i += 2;
    } else if (c == '(' || c == ')' || c == ',') {
      out.push_back({Token::Type::Symbol, std::string(1, c), line});
      ++i;
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Token::Type::End, {}, line});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  void header(std::string& name, std::vector<std::string>& params) {
    keyword("function");
    name = identifier();
    symbol("(");
    if (!peek_symbol(")")) {
      params.push_back(identifier());
      while (peek_symbol(",")) {
        ++pos_;
        params.push_back(identifier());
      }
    }
    symbol(")");
  }

  // block := statement* terminated by `else` or `end` (not consumed)
  std::shared_ptr<const PseudoProgram::Node> block() {
    auto b = std::make_shared<PseudoProgram::Node>();
    b->kind = PseudoProgram::Node::Kind::Block;
    while (!peek_keyword("else") && !peek_keyword("end")) {
      if (tokens_[pos_].type == Token::Type::End) fail("unexpected end of input");
      b->statements.push_back(statement());
    }
    return b;
  }

  void finish() {
    keyword("end");
    if (tokens_[pos_].type != Token::Type::End) fail("trailing tokens after function");
  }

 private:
  std::shared_ptr<const PseudoProgram::Node> statement() {
    if (peek_keyword("return")) {
      ++pos_;
      auto n = std::make_shared<PseudoProgram::Node>();
      n->kind = PseudoProgram::Node::Kind::Return;
      n->label = string_literal();
      return n;
    }
    if (peek_keyword("if")) {
      ++pos_;
      return if_chain();
    }
    fail("expected 'if' or 'return'");
    return nullptr;
  }

  // after `if`: cond then block (else if ... | else block)? end
  std::shared_ptr<const PseudoProgram::Node> if_chain() {
    auto n = std::make_shared<PseudoProgram::Node>();
    n->kind = PseudoProgram::Node::Kind::If;
    n->variable = identifier();
    if (peek_symbol("==")) {
      ++pos_;
      n->text_operand = string_literal();
    } else if (peek_symbol("<=")) {
      ++pos_;
      n->numeric = true;
      n->number_operand = number_literal();
    } else {
      fail("expected '==' or '<='");
    }
    keyword("then");
    n->then_branch = block();
    if (peek_keyword("else")) {
      const auto else_line = tokens_[pos_].line;
      ++pos_;
      // `else if` chains only on one line; an `if` below a bare `else` is nested
      if (peek_keyword("if") && tokens_[pos_].line == else_line) {
        ++pos_;
        n->else_branch = if_chain();  // consumes the shared `end`
        return n;
      }
      n->else_branch = block();
    }
    keyword("end");
    return n;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::SyntaxError, "pseudocode line " + std::to_string(tokens_[pos_].line) + ": " + msg);
  }
  bool peek_keyword(std::string_view k) const {
    return tokens_[pos_].type == Token::Type::Identifier && tokens_[pos_].text == k;
  }
  bool peek_symbol(std::string_view s) const {
    return tokens_[pos_].type == Token::Type::Symbol && tokens_[pos_].text == s;
  }
  void keyword(std::string_view k) {
    if (!peek_keyword(k)) fail("expected '" + std::string(k) + "'");
    ++pos_;
  }
  void symbol(std::string_view s) {
    if (!peek_symbol(s)) fail("expected '" + std::string(s) + "'");
    ++pos_;
  }
  std::string identifier() {
    if (tokens_[pos_].type != Token::Type::Identifier) fail("expected identifier");
    return tokens_[pos_++].text;
  }
  std::string string_literal() {
    if (tokens_[pos_].type != Token::Type::String) fail("expected string literal");
    return tokens_[pos_++].text;
  }
  double number_literal() {
    if (tokens_[pos_].type != Token::Type::Number) fail("expected number");
    const auto& t = tokens_[pos_++].text;
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size()) fail("bad number '" + t + "'");
    return v;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

const std::string* run_node(const PseudoProgram::Node& n, const Record& args) {
  using Kind = PseudoProgram::Node::Kind;
  switch (n.kind) {
    case Kind::Return: return &n.label;
    case Kind::Block:
      for (const auto& s : n.statements)
        if (const auto* r = run_node(*s, args)) return r;
      return nullptr;
    case Kind::If: {
      auto it = args.find(n.variable);
      if (it == args.end()) throw Error(Errc::MissingFeature, "no argument '" + n.variable + "'");
      bool taken = false;
      if (n.numeric) {
        const auto* v = std::get_if<double>(&it->second);
        if (v == nullptr) throw Error(Errc::MissingFeature, "argument '" + n.variable + "' is not numeric");
        taken = *v <= n.number_operand;
      } else {
        const auto* s = std::get_if<std::string>(&it->second);
        taken = s != nullptr && *s == n.text_operand;
      }
      if (taken) return run_node(*n.then_branch, args);
      return n.else_branch ? run_node(*n.else_branch, args) : nullptr;
    }
  }
  return nullptr;
}

std::size_t count_returns(const PseudoProgram::Node& n) {
  using Kind = PseudoProgram::Node::Kind;
  switch (n.kind) {
    case Kind::Return: return 1;
    case Kind::Block: {
      std::size_t c = 0;
      for (const auto& s : n.statements) c += count_returns(*s);
      return c;
    }
    case Kind::If:
      return count_returns(*n.then_branch) + (n.else_branch ? count_returns(*n.else_branch) : 0);
  }
  return 0;
}

}  // namespace

PseudoProgram PseudoProgram::parse(std::string_view source) {
  Parser parser(tokenize(source));
  PseudoProgram p;
  parser.header(p.name_, p.params_);
  p.body_ = parser.block();
  parser.finish();
  return p;
}

std::string PseudoProgram::evaluate(const Record& arguments) const {
  for (const auto& p : params_)
    if (arguments.find(p) == arguments.end()) throw Error(Errc::MissingFeature, "no argument '" + p + "'");
  Record visible;
  for (const auto& p : params_) visible.emplace(p, arguments.find(p)->second);
  const auto* label = run_node(*body_, visible);
  if (label == nullptr) throw Error(Errc::MissingFeature, "function fell through without returning");
  return *label;
}

std::size_t PseudoProgram::return_count() const noexcept { return count_returns(*body_); }

}  // namespace gg
