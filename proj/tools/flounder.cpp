// flounder: run goals under the delay semantics, diagnose floundering and
// wrong answers, check intents and serve the session protocol.

#include <unistd.h>

#include <atomic>
#include <csignal>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "flounder/corpus.hpp"
#include "flounder/diagnoser.hpp"
#include "flounder/encoding.hpp"
#include "flounder/engine.hpp"
#include "flounder/intent.hpp"
#include "flounder/reader.hpp"
#include "flounder/server.hpp"

using namespace flounder;

namespace {

constexpr int kClean = 0;
constexpr int kDiagnosis = 1;
constexpr int kUsage = 2;
constexpr int kLimit = 3;

struct EngineFlags {
  std::size_t max_steps = Limits{}.max_steps;
  std::optional<std::size_t> answers;
  std::uint64_t seed = 0;
  std::string strategy = "default";
  bool occurs_check = false;

  void add(CLI::App* app, bool with_answers) {
    app->add_option("--max-steps", max_steps, "Resolution step limit")->capture_default_str();
    if (with_answers) app->add_option("--answers", answers, "Stop after this many answers");
    app->add_option("--seed", seed, "Seed for --strategy random");
    app->add_option("--strategy", strategy, "Selection of the next called goal")
        ->check(CLI::IsMember({"default", "random"}))
        ->capture_default_str();
    app->add_flag("--occurs-check", occurs_check, "Unify with the occurs check");
  }

  EngineOptions options() const {
    EngineOptions eo;
    eo.limits.max_steps = max_steps;
    if (answers) eo.limits.max_answers = *answers;
    if (strategy == "random") eo.strategy = SelectionStrategy::random(seed);
    eo.occurs_check = occurs_check;
    return eo;
  }
};

int run_command(const std::string& program, const std::string& goal, const EngineFlags& flags, bool tree) {
  Program p = load_program(program);
  Goal g = parse_goal(goal, {"<goal>", false});
  EngineOptions eo = flags.options();
  eo.build_tree = tree;
  Engine engine(p, g, eo);
  while (auto o = engine.next()) {
    switch (o->kind) {
      case OutcomeKind::Success:
      case OutcomeKind::Floundered:
        std::cout << (o->kind == OutcomeKind::Success ? "success:    " : "floundered: ") << o->bindings_text() << "\n";
        for (const AnnotatedAtom& r : o->residue) std::cout << "    delayed: " << format_annotated(r) << "\n";
        if (tree && o->tree) std::cout << o->tree->to_json().dump(2) << "\n";
        break;
      case OutcomeKind::Exhausted:
        std::cout << "no more answers (" << o->steps << " steps)\n";
        return kClean;
      case OutcomeKind::AnswerLimit:
        std::cout << "answer limit reached (" << o->steps << " steps)\n";
        return kClean;
      case OutcomeKind::StepLimit:
        std::cout << "step limit reached after " << o->steps << " steps (possible loop)\n";
        return kLimit;
    }
  }
  return kClean;
}

int diagnose_command(const std::string& program, const std::string& goal, const std::string& intent,
                     const std::string& oracle_spec, std::size_t answer, bool verbose, const EngineFlags& flags) {
  Program p = load_program(program);
  Goal g = parse_goal(goal, {"<goal>", false});
  std::optional<Interpretation> interp;
  if (!intent.empty()) interp = Interpretation::load(intent);

  std::unique_ptr<RuleOracle> rules;
  if (interp) rules = std::make_unique<RuleOracle>(*interp);
  std::unique_ptr<Oracle> owned;
  Oracle* oracle = nullptr;
  if (oracle_spec == "rules") {
    if (!rules) throw CLI::ValidationError("--oracle rules needs --intent");
    oracle = rules.get();
  } else if (oracle_spec == "interactive") {
    owned = std::make_unique<InteractiveOracle>(std::cin, std::cout, !::isatty(STDIN_FILENO));
    oracle = owned.get();
  } else if (oracle_spec.rfind("scripted:", 0) == 0) {
    auto scripted = std::make_unique<ScriptedOracle>(ScriptedOracle::load(oracle_spec.substr(9)));
    if (rules) scripted->set_fallback(rules.get());
    owned = std::move(scripted);
    oracle = owned.get();
  } else {
    throw CLI::ValidationError("--oracle must be interactive, rules or scripted:<file>");
  }

  DiagnosisSession session(*oracle, [](const std::string& line) { std::cout << line << "\n" << std::flush; });
  WrongOptions wo;
  wo.engine = flags.options();
  wo.first_answer = answer;
  WrongReport report = diagnose_wrong(p, g, session, wo);
  if (report.diagnosis) {
    if (verbose) std::cout << "\n" << render_details(*report.diagnosis);
    return kDiagnosis;
  }
  if (report.end == OutcomeKind::StepLimit) {
    std::cout << "step limit reached before a bug was found\n";
    return kLimit;
  }
  std::cout << "no bug found: no answer was judged erroneous\n";
  return kClean;
}

int check_intent_command(const std::string& intent, std::size_t samples, std::uint64_t seed) {
  Interpretation interp = Interpretation::load(intent);
  std::vector<Term> pool;
  for (const Term& t : corpus_atoms())
    if (interp.covers(t)) pool.push_back(t);
  ClosureReport r = check_closure(interp, pool, samples, seed);
  std::cout << "sample atoms: " << r.samples << "\ninstances checked: " << r.instances
            << "\nvalidity unknown within the step bound: " << r.unknown << "\nviolations: " << r.violations.size()
            << "\n";
  for (const std::string& v : r.violations) std::cout << "  " << v << "\n";
  return r.clean() ? kClean : kDiagnosis;
}

int encode_command(const std::string& program, bool guarded) {
  Program p = load_program(program);
  std::cout << format_program(encode_program(p, {guarded}));
  return kClean;
}

int equiv_command(const std::string& program, const std::string& goal, std::size_t max_steps) {
  Limits limits;
  limits.max_steps = max_steps;
  EquivalenceReport r = equivalence_check(load_program(program), parse_goal(goal, {"<goal>", false}), limits);
  std::cout << r.render();
  if (!r.conclusive) return kLimit;
  return r.agree() ? kClean : kDiagnosis;
}

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

int serve_command(std::uint16_t port, std::size_t max_steps) {
  ServerOptions options;
  options.limits.max_steps = max_steps;
  SessionServer server(options);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  serve_tcp(server, port, g_stop, [](std::uint16_t p) {
    std::cout << "listening on 127.0.0.1:" << p << "\n" << std::flush;
  });
  return kClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coroutining Prolog with a declarative debugger for floundering"};
  app.require_subcommand(1);

  std::string program, goal, intent, oracle = "interactive";
  EngineFlags flags;
  bool tree = false, verbose = false, guarded = false;
  std::size_t answer = 1, samples = 1000;
  std::uint64_t seed = 1;
  std::uint16_t port = 7777;
  std::size_t max_steps = Limits{}.max_steps;

  CLI::App* run = app.add_subcommand("run", "Print the answers of a goal");
  run->add_option("program", program, "Program file")->required();
  run->add_option("goal", goal, "Goal, e.g. \"perm(A,[1,2,3])\"")->required();
  flags.add(run, true);
  run->add_flag("--tree", tree, "Also print each partial proof tree as JSON");

  CLI::App* diag = app.add_subcommand("diagnose", "Diagnose the answers of an atomic goal");
  diag->add_option("program", program, "Program file")->required();
  diag->add_option("goal", goal, "Atomic goal")->required();
  diag->add_option("--intent", intent, "Intent file (admissible and valid atoms)");
  diag->add_option("--oracle", oracle, "interactive, rules or scripted:<file>")->capture_default_str();
  diag->add_option("--answer", answer, "Start with this answer (1-based)")->check(CLI::PositiveNumber);
  diag->add_flag("--verbose", verbose, "Print location and context of the bug");
  flags.add(diag, false);

  CLI::App* check = app.add_subcommand("check-intent", "Check that an intent is closed under instantiation");
  check->add_option("intent", intent, "Intent file")->required();
  check->add_option("--samples", samples, "Number of random instances")->capture_default_str();
  check->add_option("--seed", seed, "Random seed")->capture_default_str();

  CLI::App* enc = app.add_subcommand("encode", "Print the program with when/2 read as a disjunction");
  enc->add_option("program", program, "Program file")->required();
  enc->add_flag("--guarded", guarded, "Keep the delay in the first disjunct");

  CLI::App* equiv = app.add_subcommand("equiv", "Compare floundering with success of the encoded goal");
  equiv->add_option("program", program, "Program file")->required();
  equiv->add_option("goal", goal, "Goal")->required();
  equiv->add_option("--max-steps", max_steps, "Step limit for each run")->capture_default_str();

  CLI::App* serve = app.add_subcommand("serve", "Serve the session protocol on a local port");
  serve->add_option("--port", port, "TCP port on 127.0.0.1 (0 picks one)")->capture_default_str();
  serve->add_option("--max-steps", max_steps, "Step limit for each request")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kClean : kUsage;
  }

  try {
    if (*run) return run_command(program, goal, flags, tree);
    if (*diag) return diagnose_command(program, goal, intent, oracle, answer, verbose, flags);
    if (*check) return check_intent_command(intent, samples, seed);
    if (*enc) return encode_command(program, guarded);
    if (*equiv) return equiv_command(program, goal, max_steps);
    if (*serve) return serve_command(port, max_steps);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "flounder: " << e.what() << "\n";
    return kUsage;
  } catch (const SyntaxError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const OracleAbort& e) {
    std::cerr << "flounder: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "flounder: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
