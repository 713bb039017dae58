#include "cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "narrex/bundle_io.hpp"
#include "narrex/error.hpp"
#include "narrex/exploration.hpp"
#include "narrex/reasoner.hpp"
#include "narrex/service/http_service.hpp"
#include "narrex/validation.hpp"

namespace narrex::cli {

namespace {

struct Style {
  bool on = false;
  std::string bold(std::string_view s) const { return wrap("1", s); }
  std::string dim(std::string_view s) const { return wrap("2", s); }
  std::string stage(Stage st, std::string_view s) const {
    static constexpr const char* codes[] = {"36", "32", "33", "35", "34", "31"};
    return wrap(codes[static_cast<int>(st)], s);
  }
  std::string wrap(std::string_view code, std::string_view s) const {
    if (!on) return std::string(s);
    return "\033[" + std::string(code) + "m" + std::string(s) + "\033[0m";
  }
};

void print_error(std::ostream& err, const Error& e) {
  err << "error: " << e.code() << ": " << e.what();
  if (!e.detail().empty() && std::string_view(e.what()).find(e.detail()) == std::string_view::npos) {
    err << " (" << e.detail() << ")";
  }
  err << "\n";
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot read '" + path + "'", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string indent(std::string_view text, std::string_view prefix) {
  std::string out(prefix);
  for (char c : text) {
    out += c;
    if (c == '\n') out += prefix;
  }
  return out;
}

std::string status_tags(const ProofStatus& st) {
  return std::string(symbol(st.definite_tag())) + " " + std::string(symbol(st.defeasible_tag()));
}

// --- validate ---------------------------------------------------------------

int cmd_validate(const std::string& path, bool as_json, Streams& s) {
  ExplanandumBundle b;
  try {
    b = load_bundle(path);
  } catch (const Error& e) {
    print_error(s.err, e);
    return kInvalid;
  }
  std::vector<Violation> violations = validate_explainability(b);
  if (as_json) {
    s.out << nlohmann::json{{"bundle", b.overview.id}, {"violations", to_json(violations)}}.dump(2) << "\n";
  } else if (violations.empty()) {
    s.out << "ok: " << (b.overview.id.empty() ? path : b.overview.id) << " (" << b.process.function.rules.size()
          << " rules, " << b.process.inputs.size() << " premises, " << b.ontology.concepts.size() << " concepts, "
          << b.sources.size() << " sources)\n";
  } else {
    for (const Violation& v : violations) {
      s.out << "violation: " << v.kind << " " << v.element << ": " << v.message << "\n";
    }
    s.out << violations.size() << " violation" << (violations.size() == 1 ? "" : "s") << "\n";
  }
  return violations.empty() ? kOk : kInvalid;
}

// --- derive -----------------------------------------------------------------

void print_derivation(const ExplanandumBundle& b, const Derivation& d, Streams& s, const Style& style) {
  if (!d.conclusions.empty()) {
    s.out << style.bold("conclusions") << "\n";
    for (const auto& [lit, st] : d.conclusions) s.out << "  " << status_tags(st) << "  " << to_string(lit) << "\n";
  }
  if (!d.causal_chain.empty()) {
    s.out << style.bold("causal chain") << "\n";
    for (const FiringRecord& f : d.causal_chain) {
      std::vector<std::string> ants;
      for (const Literal& a : f.satisfied_antecedents) ants.push_back(to_string(a));
      std::string joined;
      for (std::size_t i = 0; i < ants.size(); ++i) joined += (i ? ", " : "") + ants[i];
      s.out << "  " << f.step << ". " << f.rule << ": " << joined << " => " << to_string(f.consequent) << "\n";
    }
  }
  if (!d.justifications.empty()) {
    s.out << style.bold("justifications") << "\n";
    for (const auto& [lit, j] : d.justifications) {
      s.out << "  " << to_string(lit) << ": ";
      s.out << (j.winning_rule ? "rule " + *j.winning_rule : std::string("fact"));
      for (const DefeatedRule& r : j.defeated_rules) s.out << "; defeated " << r.rule << " (" << to_string(r.reason) << ")";
      for (const Superiority& sup : j.superiority_used) {
        s.out << "; " << sup.winner << " > " << sup.loser;
        if (!sup.note.empty()) s.out << " \"" << sup.note << "\"";
      }
      s.out << "\n";
    }
  }
  if (b.overview.decision) {
    const DecisionSpec& spec = *b.overview.decision;
    ProofStatus st = d.status(spec.literal);
    s.out << style.bold("decision") << "\n";
    s.out << "  " << symbol(st.headline()) << " " << to_string(spec.literal);
    std::string outcome = st.defeasible ? spec.holds_label : spec.fails_label;
    if (!outcome.empty()) s.out << ": " << outcome;
    s.out << "\n";
    if (st.defeasible) {
      for (const std::string& rule : deciding_rules(d, spec.literal)) {
        s.out << "  deciding rule " << rule << " (" << b.label(rule) << ")";
        for (const auto& [lit, j] : d.justifications) {
          for (const Superiority& sup : j.superiority_used) {
            if (sup.winner != rule) continue;
            s.out << " over " << sup.loser << " (" << b.label(sup.loser) << ")";
            if (!sup.note.empty()) s.out << ": " << sup.note;
          }
        }
        s.out << "\n";
      }
    }
  }
}

int cmd_derive(const std::string& path, bool as_json, Streams& s, const Style& style) {
  ExplanandumBundle b;
  try {
    b = load_bundle(path);
  } catch (const Error& e) {
    print_error(s.err, e);
    return kInvalid;
  }
  Derivation d;
  try {
    d = derive(b);
  } catch (const ReasoningError& e) {
    print_error(s.err, e);
    return kReasoning;
  }
  if (as_json) {
    nlohmann::json j = to_json(d);
    if (b.overview.decision) {
      const Literal& lit = b.overview.decision->literal;
      ProofStatus st = d.status(lit);
      j["decision"] = {{"literal", to_string(lit)},
                       {"definite", std::string(to_string(st.definite_tag()))},
                       {"defeasible", std::string(to_string(st.defeasible_tag()))},
                       {"outcome", st.defeasible ? b.overview.decision->holds_label : b.overview.decision->fails_label},
                       {"deciding_rules", st.defeasible ? deciding_rules(d, lit) : std::vector<std::string>{}}};
    }
    s.out << j.dump(2) << "\n";
  } else {
    print_derivation(b, d, s, style);
  }
  return kOk;
}

// --- explain ----------------------------------------------------------------

void print_node(const InfoNode& n, std::string_view marker, Streams& s, const Style& style) {
  std::string head = std::string(to_string(n.stage)) + " " + std::string(to_string(n.subject.kind));
  s.out << marker << "[" << n.id << "] " << style.stage(n.stage, head) << " " << n.subject.id << "\n";
  s.out << indent(n.rendering, "    ") << "\n";
}

void print_candidates(const std::vector<CandidateAction>& candidates, Streams& s, const Style& style) {
  s.out << style.bold("actions") << "\n";
  if (candidates.empty()) s.out << "  (none: the explanans is saturated)\n";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const CandidateAction& c = candidates[i];
    s.out << "  " << i + 1 << ") " << to_script(c.interaction) << style.dim(" [relevance ")
          << style.dim(c.scores.relevance == kUnreachable ? std::string("inf") : std::to_string(c.scores.relevance))
          << style.dim(", abstraction " + std::to_string(c.scores.abstraction) + ", simplicity " +
                       std::to_string(c.scores.simplicity) + ", +" + std::to_string(c.appends.size()) + " node" +
                       (c.appends.size() == 1 ? "" : "s") + "]")
          << "\n";
  }
}

void print_step(std::size_t number, const Interaction& i, const Exploration& before, const Exploration& after,
                Streams& s, const Style& style) {
  s.out << "\n" << style.bold("== step " + std::to_string(number) + ": " + to_script(i) + " ==") << "\n";
  for (std::size_t k = before.explanans.nodes.size(); k < after.explanans.nodes.size(); ++k) {
    print_node(after.explanans.nodes[k], "+ ", s, style);
  }
  if (after.narrative.arguments.size() > before.narrative.arguments.size()) {
    const Argument& a = after.narrative.arguments.back();
    s.out << "argument " << a.id << " " << to_string(a.stance) << " "
          << (a.target ? "argument " + *a.target : std::string("the decision")) << " (evidence " << a.evidence
          << "): \"" << a.claim << "\"\n";
  }
}

struct ExplainOptions {
  std::string bundle;
  std::string script;
  bool interactive = false;
  std::string export_format;
  std::string out_file;
  std::string goal;
  std::string heuristic_order;
  bool verbose = false;
};

int finish_explain(const ExplainOptions& o, const Exploration& state, Streams& s, const Style& style) {
  if (o.export_format.empty()) return kOk;
  ExportFormat format = o.export_format == "json" ? ExportFormat::structured_data : ExportFormat::document_text;
  std::string doc = export_narrative(state.narrative, state.explanans, format);
  if (!o.out_file.empty()) {
    std::ofstream out(o.out_file, std::ios::binary);
    out << doc;
    if (!out) {
      s.err << "error: io-error: cannot write '" << o.out_file << "'\n";
      return kInvalid;
    }
  } else {
    s.out << "\n" << style.bold("== narrative ==") << "\n" << doc;
  }
  return kOk;
}

int cmd_explain(const ExplainOptions& o, Streams& s, const Style& style) {
  std::optional<ExplanatorySpace> space;
  try {
    auto bundle = std::make_shared<const ExplanandumBundle>(load_bundle(o.bundle));
    HeuristicOrder order = o.heuristic_order.empty() ? kDefaultHeuristicOrder : parse_heuristic_order(o.heuristic_order);
    Derivation d;
    try {
      d = derive(*bundle);
    } catch (const ReasoningError& e) {
      print_error(s.err, e);
      return kReasoning;
    }
    space.emplace(bundle, std::move(d), order);
  } catch (const Error& e) {
    print_error(s.err, e);
    return kInvalid;
  }

  Exploration state = begin_exploration(*space, o.goal);
  s.out << style.bold("== E_0 ==") << "\n";
  for (const InfoNode& n : state.explanans.nodes) print_node(n, "", s, style);

  if (!o.interactive) {
    std::vector<ScriptLine> lines;
    try {
      lines = parse_script(read_text(o.script));
    } catch (const InteractionError& e) {
      print_error(s.err, e);
      return kScript;
    } catch (const Error& e) {
      print_error(s.err, e);
      return kInvalid;
    }
    std::size_t number = 0;
    for (const ScriptLine& line : lines) {
      auto started = std::chrono::steady_clock::now();
      Exploration next;
      try {
        next = apply(*space, state, line.interaction);
      } catch (const Error& e) {
        s.err << "error: line " << line.line_number << ": " << e.code() << ": " << e.what();
        if (!e.detail().empty()) s.err << " (" << e.detail() << ")";
        s.err << "\n";
        return kScript;
      }
      print_step(++number, line.interaction, state, next, s, style);
      if (o.verbose) {
        auto us = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - started);
        s.out << style.dim("(" + std::to_string(us.count()) + " us)") << "\n";
        print_candidates(space->available_actions(next.explanans), s, style);
      }
      state = std::move(next);
    }
    return finish_explain(o, state, s, style);
  }

  std::size_t number = 0;
  for (;;) {
    std::vector<CandidateAction> candidates = space->available_actions(state.explanans);
    s.out << "\n";
    print_candidates(candidates, s, style);
    s.out << "choose a number, type an action (mark/whatif/...), or q to finish\n> " << std::flush;
    std::string line;
    if (!std::getline(s.in, line)) break;
    std::string_view trimmed = line;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.remove_suffix(1);
    if (trimmed.empty()) continue;
    if (trimmed == "q" || trimmed == "quit") break;
    try {
      Interaction interaction;
      if (std::all_of(trimmed.begin(), trimmed.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        std::size_t pick = std::stoul(std::string(trimmed));
        if (pick == 0 || pick > candidates.size()) {
          s.out << "no action " << pick << "\n";
          continue;
        }
        interaction = candidates[pick - 1].interaction;
      } else {
        interaction = parse_interaction(trimmed);
      }
      Exploration next = apply(*space, state, interaction);
      print_step(++number, interaction, state, next, s, style);
      state = std::move(next);
    } catch (const Error& e) {
      print_error(s.out, e);
    }
  }
  return finish_explain(o, state, s, style);
}

// --- serve ------------------------------------------------------------------

int cmd_serve(const std::string& listen, const std::string& storage, const std::string& order, Streams& s) {
  service::ServiceConfig config;
  try {
    service::parse_listen_address(listen, config);
    config.storage = storage;
    if (!order.empty()) config.heuristic_order = parse_heuristic_order(order);
  } catch (const Error& e) {
    print_error(s.err, e);
    return kUsage;
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    service::HttpService server(config);
    int port = server.bind();
    s.out << "listening on " << config.host << ":" << port << " (storage " << config.storage.string() << ")"
          << std::endl;
    std::thread worker([&] { server.serve(); });
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
    worker.join();
  } catch (const Error& e) {
    print_error(s.err, e);
    return kInvalid;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, Streams streams) {
  Style style{streams.color};
  CLI::App app{"narrex: interactive explanations of defeasible rule-based decisions", "narrex"};
  app.require_subcommand(1);

  std::string bundle;
  bool as_json = false;

  auto* validate = app.add_subcommand("validate", "Check a bundle for structural and explainability problems");
  validate->add_option("bundle", bundle, "Bundle JSON file")->required();
  validate->add_flag("--json", as_json, "Print the violations as JSON");

  auto* derive_cmd = app.add_subcommand("derive", "Run the reasoner and print conclusions and justifications");
  derive_cmd->add_option("bundle", bundle, "Bundle JSON file")->required();
  derive_cmd->add_flag("--json", as_json, "Print the derivation as JSON");

  ExplainOptions ex;
  auto* explain = app.add_subcommand("explain", "Explore the explanatory space of a bundle");
  explain->add_option("bundle", ex.bundle, "Bundle JSON file")->required();
  auto* script_opt = explain->add_option("--script", ex.script, "Interaction script, one action per line");
  auto* interactive_opt = explain->add_flag("--interactive", ex.interactive, "Choose actions at the terminal");
  script_opt->excludes(interactive_opt);
  explain->add_option("--export", ex.export_format, "Export the narrative at the end")
      ->check(CLI::IsMember({"md", "json"}));
  explain->add_option("--out", ex.out_file, "Write the exported narrative to a file");
  explain->add_option("--goal", ex.goal, "Explainee goal recorded in the narrative");
  explain->add_option("--heuristic-order", ex.heuristic_order, "Permutation of relevance,abstraction,simplicity");
  explain->add_flag("--verbose", ex.verbose, "Print timings and candidate actions after each step");

  std::string listen = "127.0.0.1:8080", storage = "narrex-sessions", order;
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--listen", listen, "host:port to listen on")->envname("NARREX_LISTEN")->capture_default_str();
  serve->add_option("--storage", storage, "Session storage directory")
      ->envname("NARREX_STORAGE")
      ->capture_default_str();
  serve->add_option("--heuristic-order", order, "Permutation of relevance,abstraction,simplicity")
      ->envname("NARREX_HEURISTIC_ORDER");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, streams.out, streams.err);
    return code == 0 ? kOk : kUsage;
  }

  if (validate->parsed()) return cmd_validate(bundle, as_json, streams);
  if (derive_cmd->parsed()) return cmd_derive(bundle, as_json, streams, style);
  if (explain->parsed()) {
    if (ex.script.empty() && !ex.interactive) {
      streams.err << "error: explain needs --script <file> or --interactive\n";
      return kUsage;
    }
    return cmd_explain(ex, streams, style);
  }
  if (serve->parsed()) return cmd_serve(listen, storage, order, streams);
  return kUsage;
}

}  // namespace narrex::cli
