// Copyright 2026 The qcomb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcomb/discrimination.hpp"
#include "qcomb/io.hpp"
#include "qcomb/link.hpp"

namespace qcomb::cli {
namespace {

using io::json;
namespace fs = std::filesystem;

struct Globals {
  double tol = kCombTol;
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "table";

  bool json_out() const { return format == "json"; }
};

/// A well-formed object that fails its contract; exit code 1.
class CheckFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

std::string level_message(const DeterministicReport& rep, const Operator& op) {
  if (rep.not_psd) {
    return "NotPSD min_eigenvalue=" + fmt(linalg::min_eigenvalue(op.matrix()));
  }
  return "LevelViolation j=" + std::to_string(rep.level) + " residual=" + fmt(rep.residual);
}

/// Writes `artifact` to --output when given, otherwise to stdout.
void emit_artifact(const Globals& g, std::ostream& out, const json& artifact) {
  if (g.output.empty()) {
    out << artifact.dump(2) << '\n';
  } else {
    io::save(g.output, artifact);
  }
}

void emit(const Globals& g, std::ostream& out, const json& result,
          const std::function<void(std::ostream&)>& table) {
  if (g.json_out()) {
    out << result.dump(2) << '\n';
  } else {
    table(out);
  }
}

std::string detect_type(const json& j) {
  if (j.contains("type")) return j.at("type").get<std::string>();
  if (j.contains("nodes")) return "graph";
  if (j.contains("outcomes")) return "multitime-measurement";
  if (j.contains("psi0")) return "multitime-state";
  if (j.contains("elements")) {
    if (!j.contains("teeth")) return "tester";
    const auto teeth = io::teeth_from_json(j.at("teeth"));
    const bool closed = !teeth.empty() && teeth.front().in.empty() && teeth.back().out.empty();
    return closed ? "tester" : "instrument";
  }
  if (j.contains("operator")) return "comb";
  if (j.contains("matrix")) return "operator";
  throw ParseError("cannot tell what kind of object the file holds");
}

Operator load_operator(const std::string& path) {
  const json j = io::load(path);
  if (j.contains("operator")) return io::comb_from_json(j).op();
  return io::operator_from_json(j);
}

std::string describe(const std::vector<Tooth>& teeth) {
  std::string s;
  for (std::size_t k = 0; k < teeth.size(); ++k) {
    if (k) s += ", ";
    s += "(";
    for (std::size_t i = 0; i < teeth[k].in.size(); ++i) {
      s += (i ? " " : "") + teeth[k].in[i].label;
    }
    s += " -> ";
    for (std::size_t i = 0; i < teeth[k].out.size(); ++i) {
      s += (i ? " " : "") + teeth[k].out[i].label;
    }
    s += ")";
  }
  return s;
}

void check_instrument(const GeneralizedInstrument& ins, double tol) {
  for (std::size_t i = 0; i < ins.elements.size(); ++i) {
    if (!is_psd(ins.elements[i], tol)) {
      throw CheckFailed("NotPSD element=" + std::to_string(i));
    }
  }
  const Operator total = ins.total();
  const auto rep = validate_deterministic(total, ins.teeth, tol);
  if (!rep.ok) throw CheckFailed("SumNotDeterministic " + level_message(rep, total));
}

// ---------------------------------------------------------------- validate

int cmd_validate(const Globals& g, const std::string& path, std::ostream& out) {
  const json j = io::load(path);
  const std::string type = detect_type(j);
  json res = {{"file", path}, {"type", type}, {"valid", true}};
  std::string summary;

  if (type == "comb") {
    const Comb c = io::comb_from_json(j);
    if (c.kind() == CombKind::Deterministic) {
      const auto rep = validate_deterministic(c, g.tol);
      if (!rep.ok) throw CheckFailed(level_message(rep, c.op()));
      res["residual"] = rep.residual;
      summary = "deterministic " + std::to_string(c.size()) + "-comb " + describe(c.teeth());
    } else {
      if (!is_psd(c.op(), g.tol)) throw CheckFailed(level_message({.not_psd = true}, c.op()));
      const auto f = probabilistic_feasibility(c.op(), c.teeth());
      if (!f.feasible) {
        throw CheckFailed("InvalidComb no deterministic comb dominates residual=" + fmt(f.residual));
      }
      res["iterations"] = f.iterations;
      summary = "probabilistic " + std::to_string(c.size()) + "-comb " + describe(c.teeth());
    }
  } else if (type == "graph") {
    const NetworkGraph graph = io::graph_from_json(j, fs::path(path).parent_path());
    validate_graph(graph);
    const Comb c = compile(graph);
    bool deterministic = true;
    for (const auto& [id, node] : graph.nodes()) {
      deterministic = deterministic && node.kind() == CombKind::Deterministic;
    }
    if (deterministic) {
      const auto rep = validate_deterministic(c, g.tol);
      if (!rep.ok) throw CheckFailed("compiled comb: " + level_message(rep, c.op()));
    }
    res["nodes"] = graph.nodes().size();
    res["teeth"] = c.size();
    summary = std::to_string(graph.nodes().size()) + "-node network compiling to " +
              std::to_string(c.size()) + "-comb " + describe(c.teeth());
  } else if (type == "tester") {
    const Tester t = io::tester_from_json(j);
    const auto rep = validate_tester(t, g.tol);
    if (!rep.ok) {
      if (rep.bad_element) throw CheckFailed("NotPSD element=" + std::to_string(*rep.bad_element));
      throw CheckFailed("LevelViolation j=" + std::to_string(rep.level) +
                        " residual=" + fmt(rep.residual));
    }
    res["elements"] = t.elements.size();
    summary = std::to_string(t.elements.size()) + "-outcome tester " + describe(t.teeth);
  } else if (type == "instrument") {
    const auto ins = io::instrument_from_json(j);
    check_instrument(ins, g.tol);
    res["elements"] = ins.elements.size();
    summary = std::to_string(ins.elements.size()) + "-outcome instrument " + describe(ins.teeth);
  } else if (type == "multitime-measurement") {
    const auto m = io::multitime_measurement_from_json(j);
    GeneralizedInstrument ins{measurement_teeth(m.steps, m.dim), {}};
    for (std::size_t i = 0; i < m.kraus.size(); ++i) ins.elements.push_back(m.element(i));
    check_instrument(ins, g.tol);
    res["elements"] = ins.elements.size();
    summary = std::to_string(m.kraus.size()) + "-outcome " + std::to_string(m.steps) +
              "-time measurement";
  } else if (type == "multitime-state") {
    const Comb c = state_comb(io::multitime_state_from_json(j));
    summary = std::to_string(c.size() - 1) + "-time state";
  } else if (type == "operator") {
    const Operator op = io::operator_from_json(j);
    if (!is_psd(op, g.tol)) throw CheckFailed(level_message({.not_psd = true}, op));
    summary = "positive operator on " + std::to_string(op.spaces().size()) + " space(s)";
  } else {
    throw ParseError("unknown object type '" + type + "'");
  }
  emit(g, out, res, [&](std::ostream& o) { o << path << ": valid " << summary << '\n'; });
  return kOk;
}

// ---------------------------------------------------------------- link

int cmd_link(const Globals& g, const std::string& a, const std::string& b, std::ostream& out) {
  const Operator r = link(load_operator(a), load_operator(b));
  json artifact = io::to_json(r);
  artifact["type"] = "operator";
  emit_artifact(g, out, artifact);
  return kOk;
}

// ---------------------------------------------------------------- compile

int cmd_compile(const Globals& g, const std::string& path, std::ostream& out) {
  const NetworkGraph graph = io::graph_from_json(io::load(path), fs::path(path).parent_path());
  const Comb c = compile(graph);
  json artifact = io::to_json(c);
  artifact["type"] = "comb";
  emit_artifact(g, out, artifact);
  return kOk;
}

// ---------------------------------------------------------------- realize

int cmd_realize(const Globals& g, const std::string& path, std::ostream& out) {
  const Comb c = io::comb_from_json(io::load(path));
  const auto seq = realize_comb(c, g.tol);
  const auto cx = complexity(c, g.tol);
  const double err = max_abs_diff(recompose(seq), c.op());
  double iso = 0.0;
  for (const auto& v : seq.steps) {
    const Mat gram = v.adjoint() * v;
    iso = std::max(iso, linalg::max_abs(gram - Mat::Identity(gram.rows(), gram.cols())));
  }
  json res = {{"steps", seq.steps.size()},
              {"ancilla_dims", seq.ancilla_dims},
              {"d_max", cx.d_max},
              {"r", cx.r},
              {"recompose_error", err},
              {"isometry_error", iso}};
  if (g.output.empty()) {
    res["isometries"] = io::to_json(seq);
  } else {
    io::save(g.output, io::to_json(seq));
  }
  emit(g, out, res, [&](std::ostream& o) {
    o << "steps            " << seq.steps.size() << '\n' << "ancilla dims     ";
    for (auto d : seq.ancilla_dims) o << d << ' ';
    o << '\n'
      << "d_max            " << cx.d_max << '\n'
      << "r                " << cx.r << '\n'
      << "recompose error  " << fmt(err) << '\n'
      << "isometry error   " << fmt(iso) << '\n';
    if (g.output.empty()) o << io::to_json(seq).dump(2) << '\n';
  });
  return kOk;
}

// ---------------------------------------------------------------- born

void print_probabilities(std::ostream& o, const std::vector<std::string>& labels,
                         const std::vector<double>& p) {
  o << std::left << std::setw(12) << "outcome" << "probability\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    o << std::left << std::setw(12) << labels[i] << std::setprecision(12) << p[i] << '\n';
  }
}

std::vector<std::string> index_labels(std::size_t n) {
  std::vector<std::string> l;
  for (std::size_t i = 0; i < n; ++i) l.push_back(std::to_string(i));
  return l;
}

int cmd_born(const Globals& g, const std::string& tpath, const std::string& cpath,
             std::ostream& out) {
  const Tester t = io::tester_from_json(io::load(tpath));
  const Comb c = io::comb_from_json(io::load(cpath));
  validate_tester(t, g.tol).raise();
  if (c.kind() == CombKind::Deterministic) validate_deterministic(c, g.tol).raise();
  if (!t.spaces().same_labels(c.op().spaces())) {
    throw SpaceMismatch("tester and comb live on different spaces");
  }
  const auto p = born(t, c.op());
  emit(g, out, {{"probabilities", p}},
       [&](std::ostream& o) { print_probabilities(o, index_labels(p.size()), p); });
  return kOk;
}

// ---------------------------------------------------------------- distance

struct DistanceArgs {
  std::string r0, r1;
  std::string priors = "0.5,0.5";
  std::size_t restarts = 8;
  std::size_t max_iter = 300;
};

std::pair<double, double> parse_priors(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw InvalidArgument("priors must be 'a,b'");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::logic_error&) {
    throw InvalidArgument("priors must be two numbers 'a,b'");
  }
}

int cmd_distance(const Globals& g, const DistanceArgs& a, std::ostream& out,
                 std::ostream& err) {
  const Comb r0 = io::comb_from_json(io::load(a.r0));
  const Comb r1 = io::comb_from_json(io::load(a.r1));
  const auto priors = parse_priors(a.priors);
  DiscriminationConfig cfg;
  cfg.restarts = a.restarts;
  cfg.max_iter = a.max_iter;
  cfg.seed = g.seed;
  const auto res = comb_distance(r0, r1, priors, cfg);
  const json result = {{"distance", res.distance},
                       {"p_error", res.p_error},
                       {"iterations", res.iterations},
                       {"converged", res.converged},
                       {"seed", g.seed},
                       {"restarts", a.restarts},
                       {"priors", {priors.first, priors.second}}};
  if (!g.output.empty()) {
    json t = io::to_json(res.tester);
    t["type"] = "tester";
    io::save(g.output, t);
  }
  emit(g, out, result, [&](std::ostream& o) {
    o << std::setprecision(12) << "distance    " << res.distance << '\n'
      << "p_error     " << res.p_error << '\n'
      << "iterations  " << res.iterations << '\n'
      << "converged   " << (res.converged ? "yes" : "no") << '\n'
      << "seed        " << g.seed << '\n';
  });
  if (!res.converged) {
    err << "ConvergenceFailure seesaw stopped at max_iter=" << a.max_iter << '\n';
    return kNumericalFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------- multitime

int cmd_multitime(const Globals& g, const std::string& spath, const std::string& ipath,
                  std::ostream& out) {
  const auto s = io::multitime_state_from_json(io::load(spath));
  const auto m = io::multitime_measurement_from_json(io::load(ipath));
  const auto p = history_probabilities(m, s);
  json probs = json::object();
  for (std::size_t i = 0; i < p.size(); ++i) probs[m.labels[i]] = p[i];
  emit(g, out, {{"probabilities", probs}},
       [&](std::ostream& o) { print_probabilities(o, m.labels, p); });
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string graph;
  std::vector<std::string> states;  // label=file
  std::vector<std::string> povms;   // tester files on output labels
};

int cmd_simulate(const Globals& g, const SimulateArgs& a, std::ostream& out) {
  const NetworkGraph graph = io::graph_from_json(io::load(a.graph), fs::path(a.graph).parent_path());
  const Comb c = compile(graph);
  SpaceTuple inputs, outputs;
  for (const auto& t : c.teeth()) {
    inputs = concat(inputs, t.in);
    outputs = concat(outputs, t.out);
  }

  Operator rho = c.op();
  std::vector<std::string> closed;
  for (const auto& spec : a.states) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--state expects LABEL=FILE");
    const std::string label = spec.substr(0, eq);
    if (!inputs.contains(label)) throw UnknownLabel("'" + label + "' is not a free input");
    const Operator st = load_operator(spec.substr(eq + 1));
    if (st.spaces().size() != 1) throw InvalidArgument("a state must live on one space");
    rho = link(rho, relabel(st, {{st.spaces()[0].label, label}}));
    closed.push_back(label);
  }
  for (const auto& s : inputs) {
    if (std::find(closed.begin(), closed.end(), s.label) == closed.end()) {
      throw InvalidArgument("free input '" + s.label + "' is not closed by a state");
    }
  }

  std::vector<Tester> povms;
  SpaceTuple measured;
  for (const auto& p : a.povms) {
    povms.push_back(io::tester_from_json(io::load(p)));
    validate_tester(povms.back(), g.tol).raise();
    measured = concat(measured, povms.back().spaces());
  }
  for (const auto& s : measured) {
    if (!outputs.contains(s.label)) throw UnknownLabel("'" + s.label + "' is not a free output");
  }
  rho = partial_trace(rho, difference(outputs, measured));

  // joint outcomes in lexicographic order, first POVM most significant
  std::vector<Operator> joint{Operator::scalar(1.0)};
  std::vector<std::string> labels{""};
  for (const auto& t : povms) {
    std::vector<Operator> next;
    std::vector<std::string> next_labels;
    for (std::size_t k = 0; k < joint.size(); ++k) {
      for (std::size_t i = 0; i < t.elements.size(); ++i) {
        next.push_back(tensor(joint[k], t.elements[i]));
        next_labels.push_back(labels[k] + (labels[k].empty() ? "" : ",") + std::to_string(i));
      }
    }
    joint = std::move(next);
    labels = std::move(next_labels);
  }
  std::vector<double> p;
  for (const auto& e : joint) p.push_back(born(e, rho));
  if (labels.size() == 1 && labels[0].empty()) labels[0] = "-";
  emit(g, out, {{"outcomes", labels}, {"probabilities", p}},
       [&](std::ostream& o) { print_probabilities(o, labels, p); });
  return kOk;
}

int exit_code(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::Validation:
      return kValidationFailure;
    case ErrorCategory::Input:
      return kInputError;
    case ErrorCategory::Numerical:
      return kNumericalFailure;
  }
  return kNumericalFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum comb toolkit", "qcomb"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tol", g.tol, "Validation tolerance")->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("-o,--output", g.output, "Write the produced artifact to this file");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();

  std::string file, file2;
  auto* validate = app.add_subcommand("validate", "Check a comb, tester, instrument or graph file");
  validate->add_option("file", file)->required();

  auto* link_cmd = app.add_subcommand("link", "Link product of two operator files");
  link_cmd->add_option("a", file)->required();
  link_cmd->add_option("b", file2)->required();

  auto* compile_cmd = app.add_subcommand("compile", "Compile a network graph into one comb");
  compile_cmd->add_option("graph", file)->required();

  auto* realize = app.add_subcommand("realize", "Isometry sequence realizing a deterministic comb");
  realize->add_option("comb", file)->required();

  auto* born_cmd = app.add_subcommand("born", "Outcome probabilities of a tester on a comb");
  born_cmd->add_option("tester", file)->required();
  born_cmd->add_option("comb", file2)->required();

  DistanceArgs da;
  auto* distance = app.add_subcommand("distance", "Minimum-error discrimination of two combs");
  distance->add_option("--r0", da.r0)->required();
  distance->add_option("--r1", da.r1)->required();
  distance->add_option("--priors", da.priors)->capture_default_str();
  distance->add_option("--restarts", da.restarts)->capture_default_str();
  distance->add_option("--max-iter", da.max_iter)->capture_default_str();

  std::string mstate, minst;
  auto* multitime = app.add_subcommand("multitime", "Outcome probabilities of a multi-time measurement");
  multitime->add_option("--state", mstate)->required();
  multitime->add_option("--instrument", minst)->required();

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Close a network with states and POVMs");
  simulate->add_option("graph", sa.graph)->required();
  simulate->add_option("--state", sa.states, "LABEL=FILE preparing a free input");
  simulate->add_option("--povm", sa.povms, "Tester file on free outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*validate) return cmd_validate(g, file, out);
    if (*link_cmd) return cmd_link(g, file, file2, out);
    if (*compile_cmd) return cmd_compile(g, file, out);
    if (*realize) return cmd_realize(g, file, out);
    if (*born_cmd) return cmd_born(g, file, file2, out);
    if (*distance) return cmd_distance(g, da, out, err);
    if (*multitime) return cmd_multitime(g, mstate, minst, out);
    if (*simulate) return cmd_simulate(g, sa, out);
  } catch (const CheckFailed& e) {
    err << e.what() << '\n';
    return kValidationFailure;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code(e);
  } catch (const json::exception& e) {
    err << "ParseError: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kInputError;
}

}  // namespace qcomb::cli
