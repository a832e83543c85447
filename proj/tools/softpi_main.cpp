// softpi: check, measure, run, embed, explore and simulate processes from
// the command line. Results are printed as JSON on stdout.
//
// Exit status: 0 on success, 1 when the input is rejected (ill-formed,
// failed verification, failed simulation, unparseable input file), 2 on
// command line usage errors.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include <softpi/json_io.hpp>

namespace {

using namespace softpi;

struct CommonOpts {
  std::string file;
  std::string calculus = "auto";
  std::string ic_list;
  std::string out;
};

std::set<std::string> parse_ic(const std::string& list) {
  std::set<std::string> ic;
  std::string cur;
  for (char c : list + ",") {
    if (c == ',') {
      if (!cur.empty()) ic.insert(cur);
      cur.clear();
    } else if (!isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  return ic;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_calculus = true) {
  cmd->add_option("file", o.file, "process source file")->required();
  if (with_calculus)
    cmd->add_option("--calculus", o.calculus, "hopi, lhopi, shopi, eshopi or auto")
        ->check(CLI::IsMember({"hopi", "lhopi", "shopi", "eshopi", "auto"}));
  cmd->add_option("--ic", o.ic_list, "comma-separated input channels");
  cmd->add_option("--out", o.out, "write JSON here instead of stdout");
}

int emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream f(out);
    if (!f) {
      std::cerr << "cannot write " << out << "\n";
      return 1;
    }
    f << j.dump(2) << "\n";
  }
  return 0;
}

Calculus calculus_from_name(const std::string& name) {
  if (name == "hopi") return Calculus::Hopi;
  if (name == "lhopi") return Calculus::Lhopi;
  if (name == "shopi") return Calculus::Shopi;
  return Calculus::Eshopi;
}

// Most restrictive first: a soft process enjoys every guarantee, the
// channelled and linear calculi progressively fewer, and plain processes
// promise nothing.
const std::vector<Calculus> kAutoOrder = {Calculus::Shopi, Calculus::Eshopi, Calculus::Lhopi,
                                          Calculus::Hopi};

// Returns the accepted report, or all rejections when nothing fits.
std::pair<std::optional<WfReport>, std::vector<WfReport>> resolve(
    const ProcessPtr& p, const std::string& calculus, const std::set<std::string>& ic) {
  if (calculus != "auto") {
    auto rep = check(p, calculus_from_name(calculus), ic);
    if (rep.ok) return {rep, {}};
    return {std::nullopt, {rep}};
  }
  std::vector<WfReport> tried;
  for (Calculus c : kAutoOrder) {
    auto rep = check(p, c, ic);
    if (rep.ok) return {rep, {}};
    tried.push_back(rep);
  }
  return {std::nullopt, tried};
}

int cmd_check(const CommonOpts& o) {
  auto p = parse_file(o.file);
  auto ic = parse_ic(o.ic_list);
  auto [ok, tried] = resolve(p, o.calculus, ic);
  if (ok) return emit(json(*ok), o.out);
  json j;
  if (tried.size() == 1) {
    j = tried[0];
  } else {
    j["ok"] = false;
    j["attempted"] = tried;
  }
  int rc = emit(j, o.out);
  return rc ? rc : 1;
}

int cmd_metrics(const CommonOpts& o) {
  auto p = parse_file(o.file);
  auto ic = parse_ic(o.ic_list);
  std::optional<std::set<std::string>> icopt;
  if (!o.ic_list.empty()) icopt = ic;
  return emit(json(measure(p, icopt)), o.out);
}

int cmd_run(const CommonOpts& o, const std::string& strategy, uint64_t seed, uint64_t max_steps,
            bool verify) {
  auto p = parse_file(o.file);
  auto ic = parse_ic(o.ic_list);
  auto [ok, tried] = resolve(p, o.calculus, ic);
  if (!ok) {
    json j{{"ok", false}, {"error", "process fits no requested calculus"}, {"attempted", tried}};
    emit(j, o.out);
    return 1;
  }
  auto tr = run(p, strategy == "random" ? Strategy::Random : Strategy::First, max_steps, seed);
  json j{{"calculus", to_string(ok->calculus)}, {"trace", tr}};
  int rc = 0;
  if (verify) {
    auto rep = verify_trace(tr, ok->calculus, ic);
    j["verification"] = rep;
    if (!rep.ok) rc = 1;
  }
  int erc = emit(j, o.out);
  return erc ? erc : rc;
}

int cmd_embed(const CommonOpts& o) {
  auto p = parse_file(o.file);
  auto hopi = check_hopi(p);
  if (!hopi.ok) {
    json j{{"ok", false}, {"error", "input is not a plain process"}, {"failure", *hopi.failure}};
    emit(j, o.out);
    return 1;
  }
  auto e = embed_process(p);
  json j{{"ok", true},
         {"process", print_process(e)},
         {"linear", check_lhopi(e).ok},
         {"metrics", measure(e)}};
  return emit(j, o.out);
}

int cmd_explore(const CommonOpts& o, size_t budget, const std::string& dot) {
  auto p = parse_file(o.file);
  auto g = explore(p, budget);
  int rc = 0;
  if (!dot.empty()) {
    std::ofstream f(dot);
    if (f)
      f << to_dot(g);
    else {
      std::cerr << "cannot write " << dot << "\n";
      rc = 1;
    }
  }
  int erc = emit(json(g), o.out);
  return erc ? erc : rc;
}

int cmd_simulate(const CommonOpts& o, int depth) {
  auto p = parse_file(o.file);
  auto hopi = check_hopi(p);
  if (!hopi.ok) {
    json j{{"ok", false}, {"error", "input is not a plain process"}, {"failure", *hopi.failure}};
    emit(j, o.out);
    return 1;
  }
  auto rep = check_simulation(p, depth);
  int erc = emit(json(rep), o.out);
  return erc ? erc : (rep.ok ? 0 : 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for higher-order message passing with boxed resources"};
  app.require_subcommand(1);

  CommonOpts check_o, metrics_o, run_o, embed_o, explore_o, sim_o;
  std::string strategy = "first";
  uint64_t seed = 0, max_steps = 100;
  bool verify = false;
  size_t budget = 10000;
  std::string dot;
  int depth = 5;

  add_common(app.add_subcommand("check", "well-formation report"), check_o);
  add_common(app.add_subcommand("metrics", "size, weight and bounds"), metrics_o, false);

  auto* runc = app.add_subcommand("run", "reduce a process");
  add_common(runc, run_o);
  runc->add_option("--strategy", strategy, "first or random")
      ->check(CLI::IsMember({"first", "random"}));
  runc->add_option("--seed", seed, "random strategy seed");
  runc->add_option("--max-steps", max_steps, "step limit");
  runc->add_flag("--verify", verify, "check invariants along the trace");

  add_common(app.add_subcommand("embed", "translate a plain process into the linear calculus"),
             embed_o, false);

  auto* expc = app.add_subcommand("explore", "breadth-first state space");
  add_common(expc, explore_o, false);
  expc->add_option("--budget", budget, "node limit");
  expc->add_option("--dot", dot, "also write a graphviz file");

  auto* simc = app.add_subcommand("simulate", "check the linear image tracks the original");
  add_common(simc, sim_o, false);
  simc->add_option("--depth", depth, "steps to follow");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("check")) return cmd_check(check_o);
    if (app.got_subcommand("metrics")) return cmd_metrics(metrics_o);
    if (app.got_subcommand("run")) return cmd_run(run_o, strategy, seed, max_steps, verify);
    if (app.got_subcommand("embed")) return cmd_embed(embed_o);
    if (app.got_subcommand("explore")) return cmd_explore(explore_o, budget, dot);
    if (app.got_subcommand("simulate")) return cmd_simulate(sim_o, depth);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
