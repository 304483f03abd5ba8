#include "flounder/intent.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "flounder/engine.hpp"

namespace flounder {

char verdict_char(Verdict v) {
  switch (v) {
    case Verdict::Valid: return 'v';
    case Verdict::Erroneous: return 'e';
    case Verdict::Inadmissible: return 'i';
  }
  return '?';
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  if (text == "v" || text == "valid") return Verdict::Valid;
  if (text == "e" || text == "erroneous") return Verdict::Erroneous;
  if (text == "i" || text == "inadmissible") return Verdict::Inadmissible;
  return std::nullopt;
}

const char* to_string(TruthValue t) {
  switch (t) {
    case TruthValue::Correct: return "correct";
    case TruthValue::Erroneous: return "erroneous";
    case TruthValue::Inadmissible: return "inadmissible";
  }
  return "?";
}

TruthValue truth_value(Verdict verdict, NodeStatus status) {
  if (verdict == Verdict::Inadmissible) return TruthValue::Inadmissible;
  if (verdict == Verdict::Valid && status == NodeStatus::Succeeded) return TruthValue::Correct;
  return TruthValue::Erroneous;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(std::string("cannot open ") + what + " " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_test_expression(const Term& e) {
  if (e.is_constant()) return e.name() == "true" || e.name() == "false" || e.name() == "fail";
  if (!e.is_compound()) return false;
  if (e.arity() == 2 && (e.name() == "," || e.name() == ";"))
    return is_test_expression(e.arg(0)) && is_test_expression(e.arg(1));
  if (e.arity() != 1) return false;
  return e.name() == "list" || e.name() == "ground" || e.name() == "nonvar" || e.name() == "var";
}

// Extraneous constants stand for variables in every test.
bool holds(const Term& e) {
  if (e.is_constant()) return e.name() == "true";
  const std::string& f = e.name();
  if (f == ",") return holds(e.arg(0)) && holds(e.arg(1));
  if (f == ";") return holds(e.arg(0)) || holds(e.arg(1));
  const Term& x = e.arg(0);
  if (f == "list") {
    Term cur = x;
    while (cur.is_cons()) cur = cur.arg(1);
    return cur.is_nil();
  }
  if (f == "ground") return x.ground() && !contains_extraneous(x);
  if (f == "nonvar") return !x.is_var() && !x.is_extraneous();
  return x.is_var() || x.is_extraneous();  // var/1
}

}  // namespace

Interpretation Interpretation::parse(std::string_view text, const std::string& file, const std::string& base_dir) {
  Interpretation interp;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string pending;
  int line_no = 0;
  int start_line = 0;
  auto fail = [&](const std::string& msg) -> IntentError {
    return IntentError(file + ":" + std::to_string(start_line) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    if (pending.empty()) start_line = line_no;
    pending += (pending.empty() ? "" : " ") + t;
    if (pending.back() != '.') continue;
    std::string stmt = pending.substr(0, pending.size() - 1);
    pending.clear();

    std::size_t sp = stmt.find_first_of(" \t");
    std::string keyword = stmt.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : trim(stmt.substr(sp));
    ParseOptions po;
    po.file = file;
    try {
      if (keyword == "admissible") {
        Term t = parse_term(rest, po);
        Rule rule;
        if (t.is_compound() && t.name() == ":-" && t.arity() == 2) {
          rule.head = t.arg(0);
          rule.condition = t.arg(1);
        } else {
          rule.head = t;
          rule.condition = Term::constant("true");
        }
        if (!rule.head.is_callable()) throw fail("rule head is not an atom");
        std::vector<Term> seen;
        for (const Term& a : rule.head.args()) {
          if (!a.is_var() || std::find(seen.begin(), seen.end(), a) != seen.end())
            throw fail("rule head arguments must be distinct variables");
          seen.push_back(a);
        }
        if (!is_test_expression(rule.condition))
          throw fail("unsupported admissibility test " + format_term(rule.condition) +
                     " (use list/1, ground/1, nonvar/1, var/1, ',' and ';')");
        std::string key = predicate_key(rule.head);
        if (!interp.rules_.emplace(key, std::move(rule)).second) throw fail("duplicate rule for " + key);
      } else if (keyword == "valid_by_reference") {
        if (rest.empty()) throw fail("missing reference program path");
        std::filesystem::path p(rest);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        interp.reference_path_ = p.lexically_normal().string();
        interp.reference_ = std::make_shared<const Program>(load_program(interp.reference_path_));
      } else if (keyword == "valid") {
        interp.valid_atoms_.push_back(parse_term(rest, po));
      } else if (keyword == "depth_bound") {
        std::size_t used = 0;
        unsigned long long n = std::stoull(rest, &used);
        if (used != rest.size() || n == 0) throw fail("depth_bound needs a positive integer");
        interp.depth_bound_ = n;
      } else {
        throw fail("unknown statement '" + keyword + "'");
      }
    } catch (const SyntaxError& e) {
      throw fail(e.detail());
    } catch (const std::invalid_argument&) {
      throw fail("depth_bound needs a positive integer");
    }
  }
  if (!pending.empty()) {
    start_line = line_no;
    throw fail("statement is missing its final '.'");
  }
  return interp;
}

Interpretation Interpretation::load(const std::string& path) {
  std::string base = std::filesystem::path(path).parent_path().string();
  return parse(read_file(path, "intent file"), path, base.empty() ? "." : base);
}

bool Interpretation::covers(const Term& atom) const { return rules_.count(predicate_key(atom)) > 0; }

bool Interpretation::admissible(const Term& atom) const {
  auto it = rules_.find(predicate_key(atom));
  if (it == rules_.end()) throw IntentError("no admissibility rule for " + predicate_key(atom));
  std::unordered_map<VarId, Term> subst;
  for (std::size_t i = 0; i < atom.arity(); ++i) subst.emplace(it->second.head.arg(i).var_id(), atom.arg(i));
  return holds(substitute(it->second.condition, subst));
}

std::optional<bool> Interpretation::valid(const Term& atom) const {
  for (const Term& v : valid_atoms_)
    if (is_instance(v, atom)) return true;
  if (!reference_) {
    if (valid_atoms_.empty()) throw IntentError("intent has no validity source");
    return false;
  }
  Goal goal;
  goal.atoms.push_back({encode_variables(atom), std::nullopt});
  EngineOptions options;
  options.limits.max_steps = depth_bound_;
  try {
    Engine engine(*reference_, goal, options);
    while (auto o = engine.next()) {
      if (o->kind == OutcomeKind::Success) return true;
      if (o->kind == OutcomeKind::StepLimit) return std::nullopt;
    }
  } catch (const EngineError& e) {
    throw IntentError(std::string("reference program: ") + e.what());
  }
  return false;
}

std::optional<Verdict> Interpretation::classify(const Term& atom) const {
  if (!admissible(atom)) return Verdict::Inadmissible;
  auto v = valid(atom);
  if (!v) return std::nullopt;
  return *v ? Verdict::Valid : Verdict::Erroneous;
}

Term encode_variables(const Term& t) {
  std::unordered_map<VarId, Term> subst;
  std::size_t next = 0;
  for (const Term& v : variables_of(t)) subst.emplace(v.var_id(), Term::constant("$" + std::to_string(++next)));
  return substitute(t, subst);
}

// ---------------------------------------------------------------------------
// Closure checking

namespace {

VarId max_var(const Term& t) {
  VarId m = 0;
  for (const Term& v : variables_of(t)) m = std::max(m, v.var_id() + 1);
  return m;
}

class Instantiator {
 public:
  Instantiator(std::uint64_t seed) : rng_(seed) {}

  Term instance(const Term& atom) {
    next_var_ = max_var(atom);
    std::unordered_map<VarId, Term> subst;
    std::vector<Term> vars = variables_of(atom);
    std::bernoulli_distribution pick(0.6);
    for (const Term& v : vars)
      if (pick(rng_)) subst.emplace(v.var_id(), random_term(2));
    if (subst.empty() && !vars.empty()) subst.emplace(vars.front().var_id(), random_term(2));
    return substitute(atom, subst);
  }

 private:
  Term fresh() { return Term::var(next_var_++); }

  Term random_term(int depth) {
    int choices = depth > 0 ? 9 : 5;
    switch (std::uniform_int_distribution<int>(0, choices - 1)(rng_)) {
      case 0: return Term::integer(std::uniform_int_distribution<int>(1, 3)(rng_));
      case 1: return Term::constant("a");
      case 2: return Term::nil();
      case 3: return fresh();
      case 4: return Term::cons(fresh(), fresh());
      case 5: return Term::cons(random_term(depth - 1), random_term(depth - 1));
      case 6: return Term::list({random_term(depth - 1)});
      case 7: return Term::compound("f", {random_term(depth - 1)});
      default: return Term::list({random_term(depth - 1), random_term(depth - 1)});
    }
  }

  std::mt19937_64 rng_;
  VarId next_var_ = 0;
};

}  // namespace

ClosureReport check_closure(const Interpretation& interp, const std::vector<Term>& samples, std::size_t instances,
                            std::uint64_t seed) {
  ClosureReport report;
  report.samples = samples.size();
  if (samples.empty()) return report;
  struct Known {
    bool admissible;
    std::optional<bool> valid;
  };
  std::vector<Known> known;
  known.reserve(samples.size());
  for (const Term& s : samples) {
    bool adm = interp.admissible(s);
    known.push_back({adm, adm ? interp.valid(s) : std::optional<bool>(false)});
  }
  // Only admissible samples have instances worth checking.
  std::vector<std::size_t> admissible;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (known[i].admissible) admissible.push_back(i);
  if (admissible.empty()) return report;
  Instantiator gen(seed);
  for (std::size_t k = 0; k < instances; ++k) {
    std::size_t i = admissible[k % admissible.size()];
    Term inst = gen.instance(samples[i]);
    ++report.instances;
    if (!interp.admissible(inst)) {
      report.violations.push_back("admissible " + format_atom(samples[i]) + " has inadmissible instance " +
                                  format_atom(inst));
      continue;
    }
    if (known[i].valid == true) {
      auto v = interp.valid(inst);
      if (!v) {
        ++report.unknown;
      } else if (!*v) {
        report.violations.push_back("valid " + format_atom(samples[i]) + " has non-valid instance " +
                                    format_atom(inst));
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Oracles

std::string question_prompt(NodeStatus status, const std::string& atom_text) {
  return std::string(status == NodeStatus::Succeeded ? "(succeeded)  " : "(floundered) ") + atom_text + " ...? ";
}

std::string Question::prompt() const { return question_prompt(status, text); }

Verdict RuleOracle::ask(const Question& q) {
  auto v = interp_.classify(q.atom);
  if (v) return *v;
  if (fallback_) return fallback_->ask(q);
  throw OracleError("validity of " + q.text + " unknown within " + std::to_string(interp_.depth_bound()) +
                    " steps");
}

ScriptedOracle ScriptedOracle::parse(std::string_view text, const std::string& file) {
  static const std::string kArrow = "\xE2\x86\x92";  // U+2192
  ScriptedOracle oracle;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '%' || starts_with(t, "?-") || starts_with(t, "...")) continue;
    if (starts_with(t, "BUG")) break;
    std::string atom_text, verdict_text;
    if (starts_with(t, "(succeeded)") || starts_with(t, "(floundered)")) {
      std::size_t q = t.rfind("...?");
      if (q == std::string::npos) throw OracleError(file + ":" + std::to_string(line_no) + ": missing '...?'");
      atom_text = t.substr(t.find(')') + 1, q - t.find(')') - 1);
      verdict_text = t.substr(q + 4);
    } else {
      std::size_t a = t.rfind(kArrow);
      std::size_t width = kArrow.size();
      if (a == std::string::npos) {
        a = t.rfind("->");
        width = 2;
      }
      if (a == std::string::npos)
        throw OracleError(file + ":" + std::to_string(line_no) + ": expected 'atom -> v|e|i'");
      atom_text = t.substr(0, a);
      verdict_text = t.substr(a + width);
    }
    auto verdict = parse_verdict(trim(verdict_text));
    if (!verdict) throw OracleError(file + ":" + std::to_string(line_no) + ": bad verdict '" + trim(verdict_text) + "'");
    std::string key;
    try {
      key = format_atom(parse_term(trim(atom_text), ParseOptions{file, false}));
    } catch (const SyntaxError& e) {
      throw OracleError(file + ":" + std::to_string(line_no) + ": " + e.detail());
    }
    auto [it, inserted] = oracle.answers_.emplace(key, *verdict);
    if (!inserted && it->second != *verdict)
      throw OracleError(file + ":" + std::to_string(line_no) + ": inconsistent oracle, " + key + " answered both " +
                        verdict_char(it->second) + " and " + verdict_char(*verdict));
  }
  return oracle;
}

ScriptedOracle ScriptedOracle::load(const std::string& path) { return parse(read_file(path, "answer file"), path); }

std::optional<Verdict> ScriptedOracle::lookup(const std::string& atom_text) const {
  auto it = answers_.find(atom_text);
  if (it == answers_.end()) return std::nullopt;
  return it->second;
}

Verdict ScriptedOracle::ask(const Question& q) {
  if (auto v = lookup(q.text)) return *v;
  if (fallback_) return fallback_->ask(q);
  throw OracleError("no scripted answer for " + q.text);
}

Verdict InteractiveOracle::ask(const Question& q) {
  for (;;) {
    out_ << q.prompt() << std::flush;
    std::string line;
    if (!std::getline(in_, line)) {
      out_ << "\n";
      throw OracleAbort();
    }
    std::string t = trim(line);
    if (t == "q" || t == "quit") throw OracleAbort();
    if (auto v = parse_verdict(t)) {
      if (echo_) out_ << verdict_char(*v) << "\n";
      return *v;
    }
    if (echo_) out_ << t << "\n";
    out_ << "answer v (valid), e (erroneous), i (inadmissible) or q to quit\n";
  }
}

}  // namespace flounder
