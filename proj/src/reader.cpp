#include "flounder/reader.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace flounder {

SyntaxError::SyntaxError(const std::string& message, SourceLocation where)
    : std::runtime_error(where.file + ":" + std::to_string(where.line) + ":" + std::to_string(where.column) +
                         ": " + message),
      where_(std::move(where)),
      detail_(message) {}

void Program::add(Clause clause) {
  std::string key = predicate_key(clause.head);
  auto [it, inserted] = index_.try_emplace(key);
  if (inserted) order_.push_back(key);
  it->second.push_back(clauses_.size());
  clauses_.push_back(std::move(clause));
}

const std::vector<std::size_t>* Program::lookup(const std::string& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &it->second;
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Atom, Var, Int, Punct, Symbol, End, Eof };

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int column = 1;
  bool quoted = false;
  bool layout_before = false;  // whitespace precedes the token
};

bool symbol_char(char c) {
  static constexpr std::string_view chars = "+-*/\\^<>=~:.?@#&";
  return chars.find(c) != std::string_view::npos;
}

bool alnum_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  Lexer(std::string_view text, const ParseOptions& options) : text_(text), options_(options) {}

  Token next() {
    bool layout = skip_layout();
    Token t;
    t.line = line_;
    t.column = column_;
    t.layout_before = layout;
    if (pos_ >= text_.size()) {
      t.kind = Tok::Eof;
      return t;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) digits += advance();
      t.kind = Tok::Int;
      t.text = digits;
      try {
        t.value = std::stoll(digits);
      } catch (const std::out_of_range&) {
        throw error("integer out of range", t);
      }
      return t;
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() && alnum_char(text_[pos_])) t.text += advance();
      t.kind = Tok::Var;
      return t;
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() && alnum_char(text_[pos_])) t.text += advance();
      t.kind = Tok::Atom;
      return t;
    }
    if (c == '$') {
      t.text += advance();
      while (pos_ < text_.size() && (alnum_char(text_[pos_]) || text_[pos_] == '$')) t.text += advance();
      t.kind = Tok::Atom;
      return t;
    }
    if (c == '\'') {
      advance();
      t.kind = Tok::Atom;
      t.quoted = true;
      for (;;) {
        if (pos_ >= text_.size()) throw error("unterminated quoted atom", t);
        char q = advance();
        if (q == '\'') {
          if (pos_ < text_.size() && text_[pos_] == '\'') {
            t.text += advance();
            continue;
          }
          break;
        }
        if (q == '\\' && pos_ < text_.size()) {
          char e = advance();
          switch (e) {
            case 'n': t.text += '\n'; break;
            case 't': t.text += '\t'; break;
            case '\\': t.text += '\\'; break;
            case '\'': t.text += '\''; break;
            default: t.text += e;
          }
          continue;
        }
        t.text += q;
      }
      return t;
    }
    if (c == '(' || c == ')' || c == '[' || c == ']' || c == ',' || c == '|' || c == '{' || c == '}') {
      t.kind = Tok::Punct;
      t.text = std::string(1, advance());
      return t;
    }
    if (c == '!' || c == ';') {
      t.kind = Tok::Symbol;
      t.text = std::string(1, advance());
      return t;
    }
    if (c == '.') {
      char after = pos_ + 1 < text_.size() ? text_[pos_ + 1] : ' ';
      if (std::isspace(static_cast<unsigned char>(after)) || after == '%') {
        advance();
        t.kind = Tok::End;
        t.text = ".";
        return t;
      }
    }
    if (symbol_char(c)) {
      while (pos_ < text_.size() && symbol_char(text_[pos_])) {
        // A terminating full stop ends the symbol sequence.
        if (text_[pos_] == '.' && !t.text.empty()) {
          char after = pos_ + 1 < text_.size() ? text_[pos_ + 1] : ' ';
          if (std::isspace(static_cast<unsigned char>(after)) || after == '%') break;
        }
        t.text += advance();
      }
      t.kind = Tok::Symbol;
      return t;
    }
    throw error(std::string("unexpected character '") + c + "'", t);
  }

  SyntaxError error(const std::string& message, const Token& at) const {
    return SyntaxError(message, SourceLocation{options_.file, at.line, at.column});
  }

 private:
  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  bool skip_layout() {
    bool any = false;
    for (;;) {
      if (pos_ >= text_.size()) return any;
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        any = true;
      } else if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
        any = true;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        advance();
        advance();
        while (pos_ < text_.size() && !(text_[pos_] == '*' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/'))
          advance();
        if (pos_ < text_.size()) {
          advance();
          advance();
        }
        any = true;
      } else {
        return any;
      }
    }
  }

  std::string_view text_;
  const ParseOptions& options_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

// Goals the interpreter does not provide. Rejected at parse time so the user
// sees a clear message instead of an unknown-predicate error mid-run.
const std::set<std::string>& unsupported_builtins() {
  static const std::set<std::string> names = {
      "!/0",        "is/2",       "=/2",       "\\=/2",    "==/2",     "\\==/2",  "\\+/1",     "->/2",
      "*->/2",      "not/1",      "call/1",    "call/2",   "call/3",   "call/4",  "var/1",     "nonvar/1",
      "ground/1",   "atom/1",     "number/1",  "integer/1", "atomic/1", "compound/1", "callable/1",
      "functor/3",  "arg/3",      "=../2",     "copy_term/2", "findall/3", "bagof/3", "setof/3",
      "forall/2",   "assert/1",   "asserta/1", "assertz/1", "retract/1", "write/1", "writeln/1",
      "print/1",    "nl/0",       "fail/0",    "false/0",  "freeze/2", "dif/2",   "</2",       ">/2",
      "=</2",       ">=/2",       "=:=/2",     "=\\=/2",   "@</2",     "@>/2",    "format/1",  "format/2",
      "succ_or_fail/0"};
  return names;
}

struct OpInfo {
  int priority;
  bool right_assoc;  // xfy
};

std::optional<OpInfo> infix_op(const Token& t) {
  if (t.kind == Tok::Symbol && t.text == ":-") return OpInfo{1200, false};
  if (t.kind == Tok::Symbol && t.text == ";") return OpInfo{1100, true};
  if (t.kind == Tok::Punct && t.text == ",") return OpInfo{1000, true};
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options) : lexer_(text, options), options_(options) {
    tok_ = lexer_.next();
  }

  bool at_eof() const { return tok_.kind == Tok::Eof; }

  // Parses one full-stop terminated term. `need_end` false lets the final
  // term omit the full stop.
  Term read_clause_term(bool need_end) {
    vars_.clear();
    Term t = parse(1200);
    if (tok_.kind == Tok::End) {
      tok_ = lexer_.next();
    } else if (need_end || tok_.kind != Tok::Eof) {
      unexpected("expected '.'");
    }
    return t;
  }

  void skip_query_prefix() {
    if (tok_.kind == Tok::Symbol && tok_.text == "?-") tok_ = lexer_.next();
  }

  VarId var_count() const { return next_var_; }
  const std::vector<GoalVariable>& named_vars() const { return named_; }
  void reset_vars() {
    vars_.clear();
    named_.clear();
    next_var_ = 0;
  }

  [[noreturn]] void fail(const std::string& message, const Token& at) const { throw lexer_.error(message, at); }
  const Token& current() const { return tok_; }
  const Token& clause_start() const { return start_; }
  void mark_clause_start() { start_ = tok_; }

 private:
  [[noreturn]] void unexpected(const std::string& expectation) {
    if (tok_.kind == Tok::Eof) fail(expectation + ", found end of input", tok_);
    if (tok_.kind == Tok::Symbol || tok_.kind == Tok::Atom) {
      // Infix builtins such as `X is Y` or `X = Y` land here.
      for (int arity : {2, 0, 1})
        if (unsupported_builtins().count(tok_.text + "/" + std::to_string(arity)))
          fail("unsupported builtin " + tok_.text + "/" + std::to_string(arity), tok_);
    }
    fail(expectation + ", found '" + tok_.text + "'", tok_);
  }

  void expect_punct(const char* p) {
    if (tok_.kind != Tok::Punct || tok_.text != p) unexpected(std::string("expected '") + p + "'");
    tok_ = lexer_.next();
  }

  Term parse(int max_priority) {
    auto [left, left_priority] = parse_primary(max_priority);
    for (;;) {
      auto op = infix_op(tok_);
      if (!op || op->priority > max_priority) return left;
      if (left_priority > (op->right_assoc ? op->priority - 1 : op->priority - 1)) return left;
      std::string name = tok_.text;
      tok_ = lexer_.next();
      Term right = parse(op->right_assoc ? op->priority : op->priority - 1);
      left = Term::compound(name, {std::move(left), std::move(right)});
      left_priority = op->priority;
    }
  }

  std::pair<Term, int> parse_primary(int max_priority) {
    Token t = tok_;
    switch (t.kind) {
      case Tok::Int:
        tok_ = lexer_.next();
        return {Term::integer(t.value), 0};
      case Tok::Var:
        tok_ = lexer_.next();
        return {variable(t.text), 0};
      case Tok::Atom: {
        tok_ = lexer_.next();
        if (!t.text.empty() && t.text[0] == '$' && !options_.allow_reserved)
          fail("names starting with '$' are reserved: " + t.text, t);
        if (tok_.kind == Tok::Punct && tok_.text == "(" && !tok_.layout_before) {
          tok_ = lexer_.next();
          std::vector<Term> args;
          args.push_back(parse(999));
          while (tok_.kind == Tok::Punct && tok_.text == ",") {
            tok_ = lexer_.next();
            args.push_back(parse(999));
          }
          expect_punct(")");
          return {Term::compound(t.text, std::move(args)), 0};
        }
        return {Term::constant(t.text), 0};
      }
      case Tok::Punct:
        if (t.text == "(") {
          tok_ = lexer_.next();
          Term inner = parse(1200);
          expect_punct(")");
          return {inner, 0};
        }
        if (t.text == "[") {
          tok_ = lexer_.next();
          if (tok_.kind == Tok::Punct && tok_.text == "]") {
            tok_ = lexer_.next();
            return {Term::nil(), 0};
          }
          std::vector<Term> items;
          items.push_back(parse(999));
          while (tok_.kind == Tok::Punct && tok_.text == ",") {
            tok_ = lexer_.next();
            items.push_back(parse(999));
          }
          Term tail = Term::nil();
          if (tok_.kind == Tok::Punct && tok_.text == "|") {
            tok_ = lexer_.next();
            tail = parse(999);
          }
          expect_punct("]");
          return {Term::list(std::move(items), std::move(tail)), 0};
        }
        break;
      case Tok::Symbol:
        if (t.text == "-") {
          tok_ = lexer_.next();
          if (tok_.kind == Tok::Int && !tok_.layout_before) {
            Token n = tok_;
            tok_ = lexer_.next();
            return {Term::integer(-n.value), 0};
          }
          fail("unsupported operator '-'", t);
        }
        if (t.text == ":-" && max_priority >= 1200) fail("directives are not supported", t);
        if (unsupported_builtins().count(t.text + "/0") || unsupported_builtins().count(t.text + "/2") ||
            unsupported_builtins().count(t.text + "/1"))
          fail("unsupported builtin " + t.text, t);
        fail("unsupported operator '" + t.text + "'", t);
      default: break;
    }
    unexpected("expected a term");
  }

  Term variable(const std::string& name) {
    if (name == "_") return Term::var(next_var_++);
    auto it = vars_.find(name);
    if (it != vars_.end()) return it->second;
    Term v = Term::var(next_var_++, name);
    vars_.emplace(name, v);
    named_.push_back({name, v});
    return v;
  }

  Lexer lexer_;
  const ParseOptions& options_;
  Token tok_;
  Token start_;
  std::unordered_map<std::string, Term> vars_;
  std::vector<GoalVariable> named_;
  VarId next_var_ = 0;
};

void flatten_conjunction(const Term& t, std::vector<Term>& out) {
  if (t.is_compound() && t.arity() == 2 && t.name() == ",") {
    flatten_conjunction(t.arg(0), out);
    flatten_conjunction(t.arg(1), out);
  } else {
    out.push_back(t);
  }
}

void check_goal_atom(const Term& g, const Parser& p, const Token& at) {
  if (g.is_var()) p.fail("variable goals are not supported", at);
  if (!g.is_callable()) p.fail("goal is not callable: " + format_term(g), at);
  if (g.name() == ";" && g.arity() == 2) p.fail("disjunction in clause bodies is not supported", at);
  if (g.name() == ":-") p.fail("unexpected ':-' in goal", at);
  std::string key = predicate_key(g);
  if (unsupported_builtins().count(key)) p.fail("unsupported builtin " + key, at);
  if (key == "when/2") p.fail("when/2 may not be nested", at);
}

std::vector<AnnotatedAtom> body_atoms(const Term& body, const Parser& p, const Token& at) {
  std::vector<Term> goals;
  flatten_conjunction(body, goals);
  std::vector<AnnotatedAtom> out;
  for (const Term& g : goals) {
    if (g.is_constant() && g.name() == "true") continue;
    if (g.is_compound() && g.name() == "when" && g.arity() == 2) {
      auto cond = WhenCondition::from_term(g.arg(0));
      if (!cond) p.fail("unsupported when/2 condition " + format_term(g.arg(0)) +
                            " (expected nonvar/1, ground/1, ',' and ';')",
                        at);
      check_goal_atom(g.arg(1), p, at);
      out.push_back({g.arg(1), cond});
      continue;
    }
    check_goal_atom(g, p, at);
    out.push_back({g, std::nullopt});
  }
  return out;
}

}  // namespace

Program parse_program(std::string_view text, const ParseOptions& options) {
  Program program;
  Parser p(text, options);
  while (!p.at_eof()) {
    p.reset_vars();
    p.mark_clause_start();
    Token at = p.clause_start();
    Term t = p.read_clause_term(true);
    Clause c;
    c.location = {options.file, at.line, at.column};
    Term body;
    if (t.is_compound() && t.name() == ":-" && t.arity() == 2) {
      c.head = t.arg(0);
      body = t.arg(1);
    } else {
      c.head = t;
    }
    if (c.head.is_var()) p.fail("clause head is a variable", at);
    if (!c.head.is_callable()) p.fail("clause head is not callable: " + format_term(c.head), at);
    std::string key = predicate_key(c.head);
    if (key == "when/2" || key == "true/0" || key == ",/2" || key == ";/2" || unsupported_builtins().count(key))
      p.fail("cannot redefine builtin " + key, at);
    if (!body.is_null()) c.body = body_atoms(body, p, at);
    c.var_count = p.var_count();
    program.add(std::move(c));
  }
  return program;
}

Program load_program(const std::string& path, bool allow_reserved) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open program file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  ParseOptions options;
  options.file = path;
  options.allow_reserved = allow_reserved;
  return parse_program(ss.str(), options);
}

Goal parse_goal(std::string_view text, const ParseOptions& options) {
  Parser p(text, options);
  p.skip_query_prefix();
  p.mark_clause_start();
  Token at = p.clause_start();
  if (p.at_eof()) p.fail("empty goal", at);
  Term t = p.read_clause_term(false);
  if (!p.at_eof()) p.fail("unexpected text after goal", p.current());
  Goal g;
  g.atoms = body_atoms(t, p, at);
  if (g.atoms.empty()) p.fail("empty goal", at);
  g.variables = p.named_vars();
  g.var_count = p.var_count();
  return g;
}

Term parse_term(std::string_view text, const ParseOptions& options) {
  Parser p(text, options);
  if (p.at_eof()) p.fail("empty term", p.current());
  Term t = p.read_clause_term(false);
  if (!p.at_eof()) p.fail("unexpected text after term", p.current());
  return t;
}

// ---------------------------------------------------------------------------
// Printing

std::string letter_name(std::size_t index) {
  std::string s(1, static_cast<char>('A' + index % 26));
  if (index >= 26) s += std::to_string(index / 26);
  return s;
}

VarNames VarNames::letters(const std::vector<Term>& terms, bool anonymous_singletons) {
  return letters(terms, terms, anonymous_singletons);
}

namespace {

void count_occurrences(const Term& t, std::map<VarId, int>& counts) {
  if (t.is_var()) {
    ++counts[t.var_id()];
    return;
  }
  for (const Term& a : t.args()) count_occurrences(a, counts);
}

}  // namespace

VarNames VarNames::letters(const std::vector<Term>& order, const std::vector<Term>& scope,
                           bool anonymous_singletons) {
  std::map<VarId, int> counts;
  if (anonymous_singletons)
    for (const Term& t : scope) count_occurrences(t, counts);
  std::vector<Term> vars;
  for (const Term& t : order) collect_variables(t, vars);
  VarNames names;
  std::size_t next = 0;
  for (const Term& v : vars) {
    if (anonymous_singletons && counts[v.var_id()] == 1)
      names.set(v.var_id(), "_");
    else
      names.set(v.var_id(), letter_name(next++));
  }
  return names;
}

const std::string* VarNames::find(VarId id) const {
  auto it = names_.find(id);
  return it == names_.end() ? nullptr : &it->second;
}

namespace {

bool plain_atom_text(const std::string& s) {
  if (s.empty()) return false;
  if (s == "[]" || s == "!" || s == ";" || s == "{}") return true;
  if (std::islower(static_cast<unsigned char>(s[0]))) return std::all_of(s.begin(), s.end(), alnum_char);
  if (s[0] == '$')
    return std::all_of(s.begin() + 1, s.end(), [](char c) { return alnum_char(c) || c == '$'; });
  return std::all_of(s.begin(), s.end(), symbol_char);
}

std::string atom_text(const std::string& s) {
  if (plain_atom_text(s)) return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "''";
    else if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  return out + "'";
}

void write_term(std::string& out, const Term& t, const VarNames& names, int max_priority) {
  switch (t.kind()) {
    case TermKind::None: out += "<null>"; return;
    case TermKind::Var:
      if (const std::string* n = names.find(t.var_id())) out += *n;
      else out += "_G" + std::to_string(t.var_id());
      return;
    case TermKind::Integer: out += std::to_string(t.int_value()); return;
    case TermKind::Constant: out += atom_text(t.name()); return;
    case TermKind::Compound: break;
  }
  if (t.is_cons()) {
    out += '[';
    Term cur = t;
    bool first = true;
    while (cur.is_cons()) {
      if (!first) out += ", ";
      first = false;
      write_term(out, cur.arg(0), names, 999);
      cur = cur.arg(1);
    }
    if (!cur.is_nil()) {
      out += '|';
      write_term(out, cur, names, 999);
    }
    out += ']';
    return;
  }
  if (t.arity() == 2 && (t.name() == ";" || t.name() == "," || t.name() == ":-")) {
    int priority = t.name() == ";" ? 1100 : t.name() == "," ? 1000 : 1200;
    bool xfy = t.name() != ":-";
    bool parens = priority > max_priority;
    if (parens) out += '(';
    write_term(out, t.arg(0), names, priority - 1);
    out += t.name();
    write_term(out, t.arg(1), names, xfy ? priority : priority - 1);
    if (parens) out += ')';
    return;
  }
  out += atom_text(t.name());
  out += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ", ";
    write_term(out, t.arg(i), names, 999);
  }
  out += ')';
}

}  // namespace

std::string format_term(const Term& t, const VarNames& names) {
  std::string out;
  write_term(out, t, names, 1200);
  return out;
}

std::string format_term(const Term& t) { return format_term(t, VarNames{}); }

std::string format_condition(const WhenCondition& c, const VarNames& names) {
  std::string out;
  write_term(out, c.term(), names, 999);
  return out;
}

std::string format_annotated(const AnnotatedAtom& a, const VarNames& names) { return format_term(a.as_term(), names); }

std::string format_atom(const Term& atom) { return format_term(atom, VarNames::letters({atom})); }

std::string format_annotated(const AnnotatedAtom& a) {
  Term t = a.as_term();
  return format_term(t, VarNames::letters({t}));
}

std::string format_clause_instance(const Term& head, const std::vector<AnnotatedAtom>& body) {
  std::vector<Term> order;
  for (const AnnotatedAtom& b : body) order.push_back(b.atom);
  order.push_back(head);
  for (const AnnotatedAtom& b : body)
    if (b.condition) order.push_back(b.condition->term());
  std::vector<Term> scope{head};
  for (const AnnotatedAtom& b : body) scope.push_back(b.as_term());
  VarNames names = VarNames::letters(order, scope, true);

  std::string out = format_term(head, names);
  if (body.empty()) return out + ".";
  out += " :-";
  for (std::size_t i = 0; i < body.size(); ++i) {
    out += "\n        ";
    out += format_annotated(body[i], names);
    out += i + 1 < body.size() ? "," : ".";
  }
  return out;
}

std::string format_clause(const Clause& clause) {
  std::vector<Term> terms{clause.head};
  for (const AnnotatedAtom& b : clause.body) terms.push_back(b.as_term());
  VarNames names = VarNames::letters(terms, true);
  std::string out = format_term(clause.head, names);
  if (clause.body.empty()) return out + ".";
  out += " :-";
  for (std::size_t i = 0; i < clause.body.size(); ++i) {
    out += "\n    ";
    out += format_annotated(clause.body[i], names);
    out += i + 1 < clause.body.size() ? "," : ".";
  }
  return out;
}

std::string format_program(const Program& program) {
  std::string out;
  std::string last;
  for (const Clause& c : program.clauses()) {
    std::string key = predicate_key(c.head);
    if (!out.empty() && key != last) out += "\n";
    last = key;
    out += format_clause(c);
    out += "\n";
  }
  return out;
}

}  // namespace flounder
