// dagbft: run scenarios, check traces, export DOT, print message censuses.
// Exit codes: 0 ok, 1 check violations, 2 usage or config error, 3 IO error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dagbft/errors.hpp"
#include "dagbft/sim/checkers.hpp"
#include "dagbft/sim/fixtures.hpp"
#include "dagbft/sim/simulator.hpp"

namespace {

using namespace dagbft;
using namespace dagbft::sim;

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kUsage = 2;
constexpr int kIo = 3;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<Step> parse_steps(const std::string& s) {
  std::vector<Step> out;
  for (const auto& item : split(s)) {
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw ConfigError("not a step number: " + item);
    }
  }
  return out;
}

int cmd_run(const std::string& scenario_path, const std::string& out, const std::optional<std::uint64_t>& seed,
            const std::string& snapshots) {
  Scenario sc = load_scenario_file(scenario_path);
  if (seed) sc.seed = *seed;
  const auto steps = parse_steps(snapshots);
  Simulator sim(sc);
  const Trace& t = sim.run();
  write_file(out, write_trace(t));
  for (Step step : steps) {
    for (std::uint32_t i = 0; i < sc.size.n; ++i) {
      if (!sc.correct(ServerId{i})) continue;
      write_file(out + ".snap-" + std::to_string(step) + "-s" + std::to_string(i) + ".dot",
                 to_dot(dag_at(t, ServerId{i}, step)));
    }
  }
  const Census c = message_census(t);
  std::size_t surfaced = 0;
  for (const auto& e : t.events) {
    if (e.kind == EventKind::kIndicate && e.surfaced && t.header.correct(e.server)) ++surfaced;
  }
  std::cout << "steps: " << sim.stats().final_step + 1 << (sim.stats().drain_incomplete ? " (drain incomplete)" : "")
            << '\n'
            << "blocks: " << c.distinct_blocks << '\n'
            << "envelopes: " << sim.stats().envelopes << '\n'
            << "indications: " << surfaced << '\n';
  return kOk;
}

int cmd_check(const std::string& trace_path, const std::string& props, const std::string& snapshots) {
  const Trace t = read_trace_file(trace_path);
  if (t.header.n == 0) {
    std::cout << "vacuous: empty trace\n";
    return kOk;
  }
  const std::set<std::string> known{"ppl", "brb", "conv", "digest", "a6", "net"};
  auto selected = split(props);
  if (selected.empty()) selected.assign(known.begin(), known.end());
  bool ok = true;
  for (const auto& p : selected) {
    if (!known.contains(p)) throw ConfigError("unknown property set " + p);
  }
  for (const auto& p : selected) {
    Report r;
    if (p == "ppl") r = check_point_to_point(t);
    if (p == "brb") r = check_brb(t);
    if (p == "conv") r = check_convergence(t, parse_steps(snapshots));
    if (p == "digest") r = check_digest_agreement(t);
    if (p == "a6") r = check_single_reference(t);
    if (p == "net") r = check_network(t);
    std::cout << format_report(r);
    ok = ok && r.ok();
  }
  return ok ? kOk : kViolations;
}

int cmd_export_dot(const std::string& trace_path, const std::string& out, const std::optional<std::uint32_t>& server) {
  const Trace t = read_trace_file(trace_path);
  if (t.header.n == 0) throw ConfigError("trace has no header");
  if (server && *server >= t.header.n) throw ConfigError("server id out of range");
  const DagView v = server ? dag_at(t, ServerId{*server}) : union_view(t);
  write_file(out, to_dot(v));
  return kOk;
}

int cmd_census(const std::string& trace_path) {
  const Trace t = read_trace_file(trace_path);
  std::cout << format_census(message_census(t));
  return kOk;
}

int cmd_fixture(const std::string& name, bool extended, const std::string& out) {
  Fixture fx;
  if (name == "fig2") {
    fx = fig2();
  } else if (name == "fig3") {
    fx = fig3();
  } else if (name == "fig4") {
    fx = fig4(extended);
  } else {
    throw ConfigError("unknown fixture " + name);
  }
  write_file(out, write_trace(fixture_trace(fx)));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block DAG protocol embedding: simulator, checkers and tooling"};
  app.require_subcommand(1);

  std::string scenario, out, trace, props, snapshots, fixture;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> server;
  bool extended = false;

  auto* run = app.add_subcommand("run", "Run a scenario and write its trace");
  run->add_option("--scenario", scenario, "Scenario JSON")->required();
  run->add_option("--out", out, "Trace output (JSON lines)")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--snapshots", snapshots, "Comma-separated steps; writes <out>.snap-<step>-s<id>.dot");

  auto* check = app.add_subcommand("check", "Run trace checkers");
  check->add_option("--trace", trace, "Trace file")->required();
  check->add_option("--props", props, "Comma-separated subset of ppl,brb,conv,digest,a6,net (default all)");
  check->add_option("--snapshots", snapshots, "Snapshot steps for conv (default quarter points)");

  auto* dot = app.add_subcommand("export-dot", "Write the dag recorded in a trace as DOT");
  dot->add_option("--trace", trace, "Trace file")->required();
  dot->add_option("--out", out, "DOT output")->required();
  dot->add_option("--server", server, "Only this server's dag (default: union of all)");

  auto* census = app.add_subcommand("census", "Count envelopes and materialized messages");
  census->add_option("--trace", trace, "Trace file")->required();

  auto* fix = app.add_subcommand("fixture", "Write the trace of a hand-built figure dag");
  fix->add_option("name", fixture, "fig2, fig3 or fig4")->required();
  fix->add_option("--out", out, "Trace output")->required();
  fix->add_flag("--extended", extended, "fig4 only: add the delivering round");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(scenario, out, seed, snapshots);
    if (*check) return cmd_check(trace, props, snapshots);
    if (*dot) return cmd_export_dot(trace, out, server);
    if (*census) return cmd_census(trace);
    if (*fix) return cmd_fixture(fixture, extended, out);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DecodeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
