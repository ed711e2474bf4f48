#include "laue/cli.hpp"

#include "laue/common.hpp"
#include "laue/suites.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>

namespace laue::cli {

namespace {

struct OutputFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kVerifyTargets{"algebra", "poincare", "identities", "geometric", "conservation"};
const std::vector<std::string> kLaueTargets{"classical", "fake", "gauss"};
const std::vector<std::string> kPhysicsTargets{"all", "tolman", "virial", "trouton-noble", "pair-energy", "kinetic"};

bool contains(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) throw UsageError(fmt::format("{}: '{}' is not a number", what, s));
  return v;
}

long long to_int(const std::string& s, const std::string& what) {
  const double v = to_double(s, what);
  if (v != std::floor(v)) throw UsageError(fmt::format("{}: '{}' is not an integer", what, s));
  return static_cast<long long>(v);
}

bool to_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw UsageError(fmt::format("{}: '{}' is not a boolean", what, s));
}

double* param_slot(scenarios::ScenarioParams& p, const std::string& key) {
  static const std::map<std::string, double scenarios::ScenarioParams::*> slots{
      {"q", &scenarios::ScenarioParams::q},
      {"R", &scenarios::ScenarioParams::R},
      {"R_out", &scenarios::ScenarioParams::R_out},
      {"rho0", &scenarios::ScenarioParams::rho0},
      {"sigma", &scenarios::ScenarioParams::sigma},
      {"E0", &scenarios::ScenarioParams::E0},
      {"tilt_deg", &scenarios::ScenarioParams::tilt_deg},
      {"box_half", &scenarios::ScenarioParams::box_half},
      {"beta", &scenarios::ScenarioParams::beta},
      {"mollify", &scenarios::ScenarioParams::mollify},
  };
  const auto it = slots.find(key);
  if (it == slots.end()) throw UsageError("unknown scenario parameter '" + key + "'");
  return &(p.*(it->second));
}

std::pair<std::string, std::string> split_assignment(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

// Raw flag values, kept as strings until both sources are merged.
struct Raw {
  std::string command, target, scenario, format = "csv", out, config;
  std::vector<std::string> betas, axes, params;
  std::string grid_n, box_l, fd_h, tol, seed;
  bool strict = false;
};

const char* kDescription =
    "laue-lab: stress-integral and four-momentum checks for static energy-momentum tensors.\n\n"
    "commands:\n"
    "  verify algebra|poincare|identities|geometric|conservation\n"
    "  laue classical|fake|gauss      (classical and fake need --scenario; gauss defaults to a smooth conserved field)\n"
    "  equivariance                   (bare and completed charged shell)\n"
    "  scenario [name]                (integrals and pointwise checks for one scenario)\n"
    "  physics [all|tolman|virial|trouton-noble|pair-energy|kinetic]\n\n"
    "defaults for --grid-n: laue classical 64, fake 32, gauss 64, geometric 64, conservation 64,\n"
    "equivariance 48, scenario 32, physics 64.  Default --tol: classical 1e-3, fake and gauss 1e-6,\n"
    "equivariance 1e-2, physics 1e-3.  Exit codes: 0 pass, 1 a verdict failed, 2 usage or domain\n"
    "error, 3 numeric fault or unwritable output.  LAUE_LAB_THREADS caps worker threads.\n\n"
    "config file (--config): flat INI.  Top-level keys mirror the long flags (grid_n or grid-n).\n"
    "Sections [scenario.<name>] or [<name>] set scenario parameters (q, R, R_out, rho0, sigma, E0,\n"
    "tilt_deg, box_half, beta, mollify).  Flags win over file values.";

void apply_config(const std::string& path, Raw& raw, CLI::App& app, std::ostream& log,
                  std::vector<std::pair<std::string, std::string>>& section_params, std::vector<std::string>& sections) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }

  auto from_file = [&](const std::string& flag, auto&& assign) {
    if (app.get_option(flag)->count() > 0) {
      log << fmt::format("note: {} given on the command line overrides the config file value\n", flag);
      return;
    }
    assign();
  };

  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const std::string value = item.inputs.empty() ? std::string() : item.inputs.front();
    if (!item.parents.empty()) {
      std::vector<std::string> parents = item.parents;
      if (parents.size() == 2 && parents[0] == "scenario") parents.erase(parents.begin());
      if (parents.size() != 1 || !contains(scenarios::names(), parents[0]))
        throw UsageError("config file: unknown section '" + join(item.parents) + "'");
      if (item.inputs.size() != 1) throw UsageError("config file: '" + item.name + "' needs one value");
      scenarios::ScenarioParams probe;
      param_slot(probe, item.name);
      section_params.emplace_back(parents[0] + "." + item.name, value);
      sections.push_back(parents[0]);
      continue;
    }
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "scenario")
      from_file("--scenario", [&] { raw.scenario = value; });
    else if (key == "beta")
      from_file("--beta", [&] { raw.betas = item.inputs; });
    else if (key == "axis")
      from_file("--axis", [&] { raw.axes = item.inputs; });
    else if (key == "grid-n")
      from_file("--grid-n", [&] { raw.grid_n = value; });
    else if (key == "box-l")
      from_file("--box-l", [&] { raw.box_l = value; });
    else if (key == "fd-h")
      from_file("--fd-h", [&] { raw.fd_h = value; });
    else if (key == "tol")
      from_file("--tol", [&] { raw.tol = value; });
    else if (key == "seed")
      from_file("--seed", [&] { raw.seed = value; });
    else if (key == "format")
      from_file("--format", [&] { raw.format = value; });
    else if (key == "out")
      from_file("--out", [&] { raw.out = value; });
    else if (key == "strict")
      from_file("--strict", [&] { raw.strict = to_bool(value, "strict"); });
    else
      throw UsageError("config file: unknown key '" + item.name + "'");
  }
}

}  // namespace

RunConfig parse(const std::vector<std::string>& args, std::ostream& log) {
  Raw raw;
  CLI::App app{kDescription, "laue-lab"};
  app.add_option("command", raw.command, "verify, laue, equivariance, scenario or physics")->required();
  app.add_option("target", raw.target, "suite, report kind, scenario name or physics check");
  app.add_option("--scenario", raw.scenario, "gaussian_dust, coulomb_shell, completed_shell, uniform_field_box, moving_dust");
  app.add_option("--beta", raw.betas, "boost speed, repeatable (default 0.3 0.6 0.9)")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--axis", raw.axes, "boost axis 1..3, repeatable (default 1)")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--param", raw.params, "scenario parameter key=value, repeatable")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--grid-n", raw.grid_n, "quadrature points per direction");
  app.add_option("--box-l", raw.box_l, "half width of the Gauss box (default: from the scenario)");
  app.add_option("--fd-h", raw.fd_h, "finite-difference step (default 1e-3)");
  app.add_option("--tol", raw.tol, "verdict tolerance");
  app.add_option("--seed", raw.seed, "seed for property suites and group elements (default 7)");
  app.add_option("--format", raw.format, "csv (default), json or md");
  app.add_option("--out", raw.out, "write the report here instead of stdout");
  app.add_option("--config", raw.config, "flat INI config file");
  app.add_flag("--strict", raw.strict, "re-run at twice the grid and check the refinement ratio");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  std::vector<std::pair<std::string, std::string>> section_params;
  std::vector<std::string> sections;
  if (!raw.config.empty()) apply_config(raw.config, raw, app, log, section_params, sections);

  RunConfig c;
  c.command = raw.command;
  c.target = raw.target;
  c.scenario = raw.scenario;
  c.strict = raw.strict;
  c.out = raw.out;
  c.format = report::parse_format(raw.format);

  if (c.command == "verify") {
    if (!contains(kVerifyTargets, c.target)) throw UsageError("verify needs one of: " + join(kVerifyTargets));
  } else if (c.command == "laue") {
    if (!contains(kLaueTargets, c.target)) throw UsageError("laue needs one of: " + join(kLaueTargets));
  } else if (c.command == "equivariance") {
    if (!c.target.empty()) throw UsageError("equivariance takes no target");
  } else if (c.command == "scenario") {
    if (!c.target.empty()) {
      if (!c.scenario.empty() && c.scenario != c.target) throw UsageError("scenario name given twice with different values");
      c.scenario = c.target;
    }
    if (c.scenario.empty()) throw UsageError("scenario needs a name (" + join(scenarios::names()) + ")");
  } else if (c.command == "physics") {
    if (c.target.empty()) c.target = "all";
    if (!contains(kPhysicsTargets, c.target)) throw UsageError("physics needs one of: " + join(kPhysicsTargets));
  } else {
    throw UsageError("unknown command '" + c.command + "'");
  }
  if (!c.scenario.empty() && !contains(scenarios::names(), c.scenario))
    throw UsageError("unknown scenario '" + c.scenario + "' (expected " + join(scenarios::names()) + ")");
  if (c.command == "laue" && c.target != "gauss" && c.scenario.empty()) throw UsageError("laue " + c.target + " needs --scenario");

  for (const auto& [key, value] : section_params) {
    const auto dot = key.find('.');
    if (key.substr(0, dot) != c.scenario) continue;
    *param_slot(c.params, key.substr(dot + 1)) = to_double(value, key);
  }
  for (const auto& s : raw.params) {
    const auto [key, value] = split_assignment(s);
    double* slot = param_slot(c.params, key);
    for (const auto& [k, v] : section_params)
      if (k == c.scenario + "." + key) log << fmt::format("note: --param {} overrides the config file value {}\n", key, v);
    *slot = to_double(value, "--param " + key);
  }

  if (!raw.grid_n.empty()) {
    const long long n = to_int(raw.grid_n, "--grid-n");
    if (n < 2 || n > 4096) throw UsageError("--grid-n must be between 2 and 4096");
    c.grid_n = static_cast<int>(n);
  }
  if (!raw.box_l.empty()) {
    c.box_l = to_double(raw.box_l, "--box-l");
    if (!(c.box_l > 0.0)) throw UsageError("--box-l must be positive");
  }
  if (!raw.fd_h.empty()) {
    c.fd_h = to_double(raw.fd_h, "--fd-h");
    if (!(c.fd_h > 0.0) || c.fd_h > 0.1) throw UsageError("--fd-h must lie in (0, 0.1]");
  }
  if (!raw.tol.empty()) {
    c.tol = to_double(raw.tol, "--tol");
    if (!(*c.tol > 0.0)) throw UsageError("--tol must be positive");
  }
  if (!raw.seed.empty()) {
    const long long s = to_int(raw.seed, "--seed");
    if (s < 0) throw UsageError("--seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (!raw.betas.empty()) {
    c.betas.clear();
    for (const auto& b : raw.betas) {
      const double v = to_double(b, "--beta");
      if (!(std::abs(v) < 1.0)) throw UsageError("--beta must satisfy |beta| < 1");
      c.betas.push_back(v);
    }
  }
  if (!raw.axes.empty()) {
    c.axes.clear();
    for (const auto& a : raw.axes) {
      const long long v = to_int(a, "--axis");
      if (v < 1 || v > 3) throw UsageError("--axis must be 1, 2 or 3");
      c.axes.push_back(static_cast<int>(v));
    }
  }
  return c;
}

report::Report execute(const RunConfig& c) {
  auto scenario = [&] { return scenarios::build(c.scenario, c.params); };
  auto N = [&](int fallback) { return c.grid_n.value_or(fallback); };

  if (c.command == "verify") {
    if (c.target == "algebra") return suites::algebra(c.seed);
    if (c.target == "poincare") return suites::poincare(c.seed);
    if (c.target == "identities") return suites::identities(c.fd_h);
    if (c.target == "geometric") return suites::geometric(N(64), c.fd_h);
    return suites::conservation(N(64), c.fd_h);
  }
  if (c.command == "laue") {
    if (c.target == "classical") {
      suites::LaueSettings s;
      s.betas = c.betas;
      s.axes = c.axes;
      s.grid_n = N(64);
      s.tol = c.tol.value_or(1e-3);
      s.strict = c.strict;
      return suites::laue_classical(scenario(), s);
    }
    if (c.target == "fake") return suites::laue_fake(scenario(), N(32), c.seed, c.tol.value_or(1e-6));
    std::optional<scenarios::Scenario> s;
    if (!c.scenario.empty()) s = scenario();
    return suites::laue_gauss(s, N(64), c.box_l, c.fd_h, c.tol.value_or(1e-6));
  }
  if (c.command == "equivariance") {
    suites::EquivarianceSettings s;
    s.grid_n = N(48);
    s.tol = c.tol.value_or(1e-2);
    s.seed = c.seed;
    return suites::equivariance(c.params, s);
  }
  if (c.command == "scenario") return suites::scenario_summary(scenario(), N(32), c.fd_h);
  return suites::physics(c.target, c.params, N(64), c.tol.value_or(1e-3));
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const report::Report rep = execute(cfg);
  const std::string text = report::emit(rep, cfg.format);
  if (cfg.out.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.out, std::ios::binary | std::ios::trunc);
    if (!f) throw OutputFault("cannot open '" + cfg.out + "' for writing");
    f << text;
    f.flush();
    if (!f) throw OutputFault("write to '" + cfg.out + "' failed");
  }
  const bool ok = rep.passed();
  if (!ok) log << rep.title << ": at least one verdict failed\n";
  return ok ? 0 : 1;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
  RunConfig cfg;
  try {
    cfg = parse(args, log);
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const UsageError& e) {
    log << "usage error: " << e.what() << "\nrun with --help for the command list\n";
    return 2;
  }
  try {
    return run(cfg, out, log);
  } catch (const UsageError& e) {
    log << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    log << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const NumericFault& e) {
    log << "numeric fault: " << e.what() << "\n";
    return 3;
  } catch (const OutputFault& e) {
    log << "output error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace laue::cli
