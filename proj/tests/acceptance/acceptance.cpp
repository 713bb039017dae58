// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <httplib.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "cli.hpp"
#include "narrex/counterfactual.hpp"
#include "narrex/exploration.hpp"
#include "support/es_properties.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/random_theory.hpp"

namespace {

using namespace narrex;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Pinned limits.
constexpr double kDeriveBudgetSeconds = 1.0;
constexpr double kCounterfactualBudgetSeconds = 1.0;
constexpr double kOracleBudgetSeconds = 60.0;
constexpr int kOracleTheories = 1000;
constexpr int kEsSequences = 200;
constexpr int kEsMaxLength = 30;

const std::string kGoal = "Understand why the deletion request was rejected";

struct Check {
  std::vector<std::string> problems;

  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_seconds(double s) {
  std::ostringstream out;
  out.precision(3);
  out << std::fixed << s << "s";
  return out.str();
}

struct CliOutcome {
  int status;
  std::string out;
  std::string err;
};

CliOutcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "narrex");
  std::istringstream in;
  std::ostringstream out;
  std::ostringstream err;
  int status = cli::run(args, cli::Streams{in, out, err, false});
  return {status, out.str(), err.str()};
}

// --- criteria ---------------------------------------------------------------

Check gdpr_reproduction(std::string& summary) {
  Check c;
  auto start = Clock::now();
  CliOutcome r = run_cli({"derive", testing::data_path("gdpr_case.json").string()});
  double elapsed = seconds_since(start);
  c.expect(r.status == cli::kOk, "derive exited " + std::to_string(r.status));
  c.expect(r.out == testing::read_file(testing::golden_path("derive_gdpr.txt")), "output differs from golden");
  c.expect(elapsed < kDeriveBudgetSeconds, "took " + fmt_seconds(elapsed));

  const ExplanandumBundle& bundle = testing::gdpr_bundle();
  Derivation d = derive(bundle);
  Literal decision = bundle.overview.decision->literal;
  c.expect(d.status(decision).defeasible, "decision not +∂");
  const Justification& consent = justify(d, testing::lit("valid_consent(marco)"));
  c.expect(consent.winning_rule == "r_it", "valid_consent not concluded by r_it");
  bool gdpr_beaten = false;
  for (const DefeatedRule& dr : consent.defeated_rules) {
    gdpr_beaten = gdpr_beaten || (dr.rule == "r_gdpr" && dr.reason == DefeatReason::beaten_by_superiority);
  }
  c.expect(gdpr_beaten, "r_gdpr not defeated via superiority");
  bool maxim = false;
  for (const Superiority& s : consent.superiority_used) {
    maxim = maxim || (s.winner == "r_it" && s.loser == "r_gdpr" && s.note == "Lex specialis derogat generali");
  }
  c.expect(maxim, "superiority annotation missing");
  summary = "golden match, derive " + fmt_seconds(elapsed);
  return c;
}

Check counterfactual_flip(std::string& summary) {
  Check c;
  auto start = Clock::now();
  const ExplanandumBundle& bundle = testing::gdpr_bundle();
  Derivation d = derive(bundle);
  Literal decision = bundle.overview.decision->literal;

  auto flipped = [&](const std::string& mutation) {
    CounterfactualResult r = whatif(bundle, d, parse_mutations(mutation));
    return r.decision_changed && d.status(decision).defeasible && !r.new_derivation.status(decision).defeasible;
  };
  c.expect(flipped("age(marco)=13"), "age 13 does not flip the decision");
  c.expect(flipped("jurisdiction(marco)=france"), "jurisdiction france does not flip the decision");

  CounterfactualResult same = whatif(bundle, d, parse_mutations("age(marco)=14"));
  c.expect(same.diff.empty(), "identity mutation has a non-empty diff");
  c.expect(same.new_derivation.conclusions == d.conclusions, "identity mutation changed tags");
  double elapsed = seconds_since(start);
  c.expect(elapsed < kCounterfactualBudgetSeconds, "took " + fmt_seconds(elapsed));
  summary = "age and jurisdiction flip, identity empty, " + fmt_seconds(elapsed);
  return c;
}

Check oracle_equivalence(std::string& summary) {
  Check c;
  auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  int mismatches = 0;
  int literals = 0;
  for (int i = 0; i < kOracleTheories; ++i) {
    testing::RandomTheory rt = testing::random_theory(rng, {8, 12, 4, 3});
    Derivation d = derive(rt.theory, rt.facts);
    testing::ProofOracle oracle(rt.theory, rt.facts);
    for (const Literal& l : rt.literals) {
      ++literals;
      ProofStatus st = d.status(l);
      if (st.definite != oracle.plus_delta(l) || st.defeasible != oracle.plus_partial(l)) ++mismatches;
    }
  }
  double elapsed = seconds_since(start);
  c.expect(mismatches == 0, std::to_string(mismatches) + " mismatching literals");
  c.expect(elapsed < kOracleBudgetSeconds, "took " + fmt_seconds(elapsed));
  summary = std::to_string(kOracleTheories) + " theories, " + std::to_string(literals) + " literals, " +
            std::to_string(mismatches) + " mismatches, " + fmt_seconds(elapsed);
  return c;
}

Check es_invariants(std::string& summary) {
  Check c;
  auto space = testing::make_space(testing::gdpr_bundle());
  testing::PropertyReport report = testing::check_es_invariants(*space, 42, kEsSequences, kEsMaxLength);
  for (const std::string& f : report.failures) c.expect(false, f);
  c.expect(report.sequences >= kEsSequences, "only " + std::to_string(report.sequences) + " sequences");
  summary = std::to_string(report.sequences) + " sequences, " + std::to_string(report.steps) + " steps";
  return c;
}

Check walkthrough(std::string& summary) {
  Check c;
  std::vector<std::string> base = {"explain", testing::data_path("gdpr_case.json").string(), "--script",
                                   testing::golden_path("walkthrough.script").string(), "--goal", kGoal};
  CliOutcome r = run_cli(base);
  c.expect(r.status == cli::kOk, "explain exited " + std::to_string(r.status) + ": " + r.err);
  c.expect(r.out == testing::read_file(testing::golden_path("walkthrough_transcript.txt")),
           "transcript differs from golden");

  testing::TempDir dir;
  auto out = dir.path() / "narrative.json";
  std::vector<std::string> exported = base;
  for (const char* a : {"--export", "json", "--out"}) exported.emplace_back(a);
  exported.push_back(out.string());
  r = run_cli(exported);
  c.expect(r.status == cli::kOk, "export exited " + std::to_string(r.status));
  int justificatory = 0;
  int descriptive = 0;
  int causal = 0;
  try {
    json narrative = json::parse(testing::read_file(out));
    for (const json& section : narrative["sections"]) {
      std::string type = section["type"];
      justificatory += type == "justificatory";
      descriptive += type == "descriptive";
      causal += type == "causal";
    }
  } catch (const std::exception& e) {
    c.expect(false, std::string("narrative is not JSON: ") + e.what());
  }
  c.expect(justificatory == 1, std::to_string(justificatory) + " justificatory sections");
  c.expect(descriptive >= 1, "no descriptive section");
  c.expect(causal >= 1, "no causal section");
  summary = "transcript golden match, sections j=" + std::to_string(justificatory) +
            " d=" + std::to_string(descriptive) + " c=" + std::to_string(causal);
  return c;
}

// --- service ----------------------------------------------------------------

int free_port() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  int port = ntohs(addr.sin_port);
  ::close(fd);
  return port;
}

class ServerProcess {
 public:
  ServerProcess(int port, const std::filesystem::path& storage) {
    pid_ = ::fork();
    if (pid_ == 0) {
      std::string listen = "127.0.0.1:" + std::to_string(port);
      std::string dir = storage.string();
      int null = ::open("/dev/null", O_WRONLY);
      ::dup2(null, STDOUT_FILENO);
      ::execl(NARREX_CLI_PATH, "narrex", "serve", "--listen", listen.c_str(), "--storage", dir.c_str(),
              static_cast<char*>(nullptr));
      ::_exit(127);
    }
    httplib::Client client("127.0.0.1", port);
    for (int i = 0; i < 200; ++i) {
      if (auto res = client.Get("/sessions/0000000000000000")) {
        ready_ = true;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(25));
    }
  }
  ~ServerProcess() { kill(SIGTERM); }

  bool ready() const { return ready_; }

  void kill(int sig) {
    if (pid_ <= 0) return;
    ::kill(pid_, sig);
    ::waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }

 private:
  pid_t pid_ = -1;
  bool ready_ = false;
};

struct Api {
  httplib::Client client;

  explicit Api(int port) : client("127.0.0.1", port) {}

  std::pair<int, json> call(const std::string& method, const std::string& path, const json& body = nullptr) {
    httplib::Result res = method == "GET" ? client.Get(path) : client.Post(path, body.dump(), "application/json");
    if (!res) return {0, nullptr};
    json parsed = json::parse(res->body, nullptr, false);
    return {res->status, parsed.is_discarded() ? json(res->body) : parsed};
  }
};

Check service_replay(std::string& summary) {
  Check c;
  testing::TempDir storage;
  int port = free_port();
  json bundle = json::parse(testing::read_file(testing::data_path("gdpr_case.json")));

  std::string id;
  json before_session;
  json before_actions;
  json before_events;
  {
    ServerProcess server(port, storage.path());
    c.expect(server.ready(), "service did not start");
    if (!server.ready()) return c;
    Api api(port);

    auto [status, created] = api.call("POST", "/sessions", {{"bundle", bundle}, {"goal", kGoal}});
    c.expect(status == 201, "create returned " + std::to_string(status));
    if (status != 201) return c;
    id = created["id"];
    std::string base = "/sessions/" + id;

    for (const std::string line : {"expand n2", "expand rule:r_it",
                                   "mark rule:r_it supports \"the decree applies\"", "ground rule:r_it"}) {
      auto [s, body] = api.call("POST", base + "/actions", {{"script", line}});
      c.expect(s == 200, "'" + line + "' returned " + std::to_string(s));
    }
    auto [s1, structured] = api.call("POST", base + "/actions",
                                     {{"action", "whatif"}, {"mutations", {{{"premise", "f_age"}, {"value", 13}}}}});
    c.expect(s1 == 200, "structured whatif returned " + std::to_string(s1));

    // Error contract.
    c.expect(api.call("POST", base + "/actions", {{"script", "expand n2"}}).first == 409, "duplicate expand not 409");
    c.expect(api.call("POST", base + "/actions", {{"script", "source n0"}}).first == 422, "bad source not 422");
    c.expect(api.call("POST", base + "/actions", {{"action", "fly"}}).first == 400, "bad action not 400");
    c.expect(api.call("POST", "/sessions", {{"bundle", "{"}}).first == 400, "bad bundle not 400");
    c.expect(api.call("GET", "/sessions/ffffffffffffffff").first == 404, "unknown session not 404");
    c.expect(api.call("GET", base + "/narrative?format=pdf").first == 400, "bad format not 400");

    auto [s2, snap] = api.call("GET", base);
    auto [s3, actions] = api.call("GET", base + "/actions");
    auto [s4, events] = api.call("GET", base + "/events");
    auto [s5, md] = api.call("GET", base + "/narrative?format=markdown");
    auto [s6, nj] = api.call("GET", base + "/narrative?format=json");
    c.expect(s2 == 200 && s3 == 200 && s4 == 200 && s5 == 200 && s6 == 200, "read endpoint failed");
    c.expect(events["events"].size() == 5, "expected 5 events, got " + std::to_string(events["events"].size()));
    before_session = snap;
    before_actions = actions;
    before_events = events;

    server.kill(SIGKILL);
  }

  ServerProcess restarted(port, storage.path());
  c.expect(restarted.ready(), "service did not restart");
  if (!restarted.ready()) return c;
  Api api(port);
  std::string base = "/sessions/" + id;
  auto [s1, snap] = api.call("GET", base);
  auto [s2, actions] = api.call("GET", base + "/actions");
  auto [s3, events] = api.call("GET", base + "/events");
  c.expect(s1 == 200, "snapshot after restart returned " + std::to_string(s1));
  c.expect(snap == before_session, "replayed session differs");
  c.expect(actions == before_actions, "replayed candidate actions differ");
  c.expect(events == before_events, "replayed event log differs");
  c.expect(api.call("POST", base + "/actions", {{"script", "source rule:r_it"}}).first == 200,
           "session not usable after restart");

  summary = "session " + id + " replayed " + std::to_string(before_session["explanans"]["nodes"].size()) +
            " nodes after SIGKILL";
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Check(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"gdpr-scenario-reproduction", gdpr_reproduction},
      {"counterfactual-flip", counterfactual_flip},
      {"reasoner-oracle-equivalence", oracle_equivalence},
      {"es-invariants", es_invariants},
      {"walkthrough-golden-transcript", walkthrough},
      {"service-replay", service_replay},
  };
  int failed = 0;
  for (const Criterion& criterion : criteria) {
    std::string summary;
    Check c;
    try {
      c = criterion.run(summary);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    if (c.problems.empty()) {
      std::cout << "PASS " << criterion.name << ": " << summary << "\n";
    } else {
      ++failed;
      std::cout << "FAIL " << criterion.name << ":";
      for (const std::string& p : c.problems) std::cout << " " << p << ";";
      std::cout << "\n";
    }
  }
  return failed == 0 ? 0 : 1;
}
