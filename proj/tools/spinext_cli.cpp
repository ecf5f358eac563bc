// Command-line front end: builds closed-shell states, re-expresses them in an
// extraction-mode basis, and emits census / reduced-state / entanglement
// artifacts as text or JSON.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinext/census.hpp"
#include "spinext/closed_shell.hpp"
#include "spinext/collective.hpp"
#include "spinext/entanglement.hpp"
#include "spinext/errors.hpp"
#include "spinext/json_io.hpp"
#include "spinext/nbrdm.hpp"
#include "spinext/rdo.hpp"
#include "spinext/sco.hpp"
#include "spinext/unitary.hpp"
#include "spinext/verify.hpp"

namespace {

constexpr int kExitConfig = 64;
constexpr int kExitCapacity = 65;

struct RunConfig {
  int m = 4;
  int shells = 2;
  std::string unitary = "qft";
  std::vector<int> modes;
  bool raw = false;
  bool json = false;
  std::uint64_t seed = 1000;
  double tol = spinext::tol::structural;
  std::string dump_unitary;
  std::string config_path;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config file: bad boolean '" + v + "'");
}

// Flat key=value file mirroring the flags; explicit command-line flags win.
void apply_config_file(CLI::App* sub, RunConfig& cfg) {
  std::ifstream in(cfg.config_path);
  if (!in) throw std::invalid_argument("config file: cannot open '" + cfg.config_path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config file line " + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto explicit_flag = [sub](const char* name) {
      const CLI::Option* opt = sub->get_option_no_throw(name);
      return opt != nullptr && opt->count() > 0;
    };
    if (key == "m") {
      if (!explicit_flag("--m")) cfg.m = std::stoi(value);
    } else if (key == "shells") {
      if (!explicit_flag("--shells")) cfg.shells = std::stoi(value);
    } else if (key == "unitary") {
      if (!explicit_flag("--unitary")) cfg.unitary = value;
    } else if (key == "modes") {
      if (!explicit_flag("--modes")) {
        cfg.modes.clear();
        std::string item;
        std::istringstream is(value);
        while (std::getline(is, item, ',')) cfg.modes.push_back(std::stoi(trim(item)));
      }
    } else if (key == "raw") {
      if (!explicit_flag("--raw")) cfg.raw = parse_bool(value);
    } else if (key == "json") {
      if (!explicit_flag("--json")) cfg.json = parse_bool(value);
    } else if (key == "seed") {
      if (!explicit_flag("--seed")) cfg.seed = std::stoull(value);
    } else if (key == "tol") {
      if (!explicit_flag("--tol")) cfg.tol = std::stod(value);
    } else if (key == "dump-unitary") {
      if (!explicit_flag("--dump-unitary")) cfg.dump_unitary = value;
    } else {
      throw std::invalid_argument("config file: unknown key '" + key + "'");
    }
  }
}

spinext::FockAmplitudeState make_state(const RunConfig& cfg) {
  const spinext::ModeUnitary u = spinext::resolve_unitary(cfg.unitary, cfg.m);
  if (!cfg.dump_unitary.empty()) spinext::save_unitary_file(u, cfg.dump_unitary);
  return spinext::transform_to_extraction_basis(spinext::build_closed_shell(cfg.shells, cfg.m), u);
}

std::vector<int> effective_modes(const RunConfig& cfg) {
  if (!cfg.modes.empty()) return cfg.modes;
  std::vector<int> all(static_cast<std::size_t>(cfg.m));
  for (int i = 0; i < cfg.m; ++i) all[static_cast<std::size_t>(i)] = i;
  return all;
}

int cmd_build(const RunConfig& cfg) {
  const spinext::FockAmplitudeState psi = make_state(cfg);
  int n_e = 0, m2 = 0;
  if (!psi.amplitudes().empty()) {
    n_e = psi.amplitudes().begin()->first.particle_count();
    m2 = psi.amplitudes().begin()->first.spin_projection_x2();
  }
  const double s2 = spinext::s_squared_expectation(psi);
  if (cfg.json) {
    spinext::Json j;
    j["M"] = cfg.m;
    j["shells"] = cfg.shells;
    j["unitary"] = cfg.unitary;
    j["norm"] = psi.norm();
    j["Ne"] = n_e;
    j["2Mz"] = m2;
    j["S2_expectation"] = s2;
    j["stored_amplitudes"] = psi.term_count();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "state: M=" << cfg.m << " shells=" << cfg.shells << " unitary=" << cfg.unitary
              << "\n";
    std::cout << std::setprecision(12) << "  norm                = " << psi.norm() << "\n"
              << "  Ne                  = " << n_e << "\n"
              << "  2Mz                 = " << m2 << "\n"
              << "  <S^2>               = " << s2 << "\n"
              << "  stored amplitudes   = " << psi.term_count() << "\n";
  }
  return 0;
}

int cmd_census(const RunConfig& cfg) {
  const spinext::Census c = spinext::census(cfg.m);
  if (cfg.json) {
    std::cout << spinext::to_json(c).dump(2) << "\n";
    return 0;
  }
  std::cout << "subspace census for " << c.n_modes << " modes\n";
  std::int64_t subspace = 1;
  std::vector<int> last_occ;
  for (const auto& row : c.rows) {
    if (row.occ_class != last_occ) {
      std::cout << "occupations (";
      for (std::size_t i = 0; i < row.occ_class.size(); ++i)
        std::cout << (i ? "," : "") << row.occ_class[i];
      std::cout << ")   z = " << row.z << "\n";
      std::cout << "  subspaces | 2S | d_S | example\n";
      last_occ = row.occ_class;
    }
    const std::int64_t lo = subspace;
    const std::int64_t hi = subspace + row.z - 1;
    subspace = hi + 1;
    std::cout << "  " << std::setw(4) << lo;
    if (hi != lo)
      std::cout << "-" << std::left << std::setw(4) << hi << std::right;
    else
      std::cout << "     ";
    std::cout << " | " << std::setw(2) << row.s2 << " | " << std::setw(3) << row.d << " | "
              << spinext::census_example_label(row) << "\n";
  }
  std::cout << "A = " << c.total_rdo_subspaces << " (reduced-operator subspaces)\n";
  std::cout << "B = " << c.total_spin_subspaces << " (spin-state subspaces)\n";
  return 0;
}

int cmd_rdm(const RunConfig& cfg) {
  const spinext::FockAmplitudeState psi = make_state(cfg);
  const std::vector<int> modes = effective_modes(cfg);
  const spinext::Matrix rho = spinext::partial_trace(psi, modes);
  const spinext::RdoBlockSet blocks = spinext::block_decompose(rho, modes);
  spinext::SpinDensityMatrix gamma = spinext::compute_nbrdm_direct(psi, modes);
  const spinext::SpinDensityMatrix mapped = spinext::nbrdm_from_rdo(blocks);
  const double route_gap = (gamma.matrix - mapped.matrix).max_abs();
  if (!cfg.raw) gamma = gamma.normalized_copy();
  const spinext::SpinBlockDecomposition spin_blocks =
      spinext::block_decompose_spin(gamma.normalized ? gamma : gamma.normalized_copy(), cfg.tol);

  spinext::Json j;
  j["config"] = {{"M", cfg.m},
                 {"shells", cfg.shells},
                 {"unitary", cfg.unitary},
                 {"modes", modes},
                 {"raw", cfg.raw}};
  j["gamma"] = spinext::to_json(gamma);
  j["route_difference"] = route_gap;
  j["spin_blocks"] = spinext::to_json(spin_blocks);
  if (gamma.n == 3 || gamma.n == 4)
    j["projector_decomposition"] = spinext::to_json(
        spinext::projector_decomposition(gamma.normalized ? gamma : gamma.normalized_copy(), cfg.tol));
  j["rdo"] = spinext::to_json(blocks);
  if (cfg.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "extracted " << gamma.n << "-spin state over modes";
    for (int m : modes) std::cout << " " << m;
    std::cout << (cfg.raw ? " (raw)" : " (normalized)") << "\n";
    std::cout << std::setprecision(12) << "  raw trace         = " << gamma.raw_trace << "\n"
              << "  route difference  = " << route_gap << "\n"
              << "  spin blocks       = " << spin_blocks.blocks.size()
              << " (off-block residual " << spin_blocks.off_block_residual << ")\n";
    for (const auto& [key, block] : spin_blocks.blocks) {
      spinext::Complex tr = block.trace();
      std::cout << "    2S=" << key.s2 << " 2M=" << std::setw(2) << key.m2 << "  dim "
                << block.rows() << "  weight " << tr.real() << "\n";
    }
  }
  return 0;
}

int cmd_entangle(const RunConfig& cfg) {
  const spinext::FockAmplitudeState psi = make_state(cfg);
  const std::vector<int> modes = effective_modes(cfg);
  const spinext::SpinDensityMatrix gamma =
      spinext::compute_nbrdm_direct(psi, modes).normalized_copy();
  const spinext::SqueezingReport report = spinext::evaluate_inequalities(gamma, cfg.tol);
  const spinext::SeparabilityBound bound = spinext::separability_bound(psi, modes);

  if (cfg.json) {
    spinext::Json j;
    j["config"] = {{"M", cfg.m}, {"shells", cfg.shells}, {"unitary", cfg.unitary}, {"modes", modes}};
    j["squeezing"] = spinext::to_json(report);
    j["separability"] = spinext::to_json(bound);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "spin-squeezing report (" << gamma.n << " spins)\n" << std::setprecision(10);
    std::cout << "  <S^2> = " << report.moments.s_total_sq << "\n";
    std::cout << "  id | axis |          lhs |          rhs |       margin | status\n";
    for (const auto& q : report.inequalities)
      std::cout << "   " << q.id << " |   " << q.gamma_axis << "  | " << std::setw(12) << q.lhs
                << " | " << std::setw(12) << q.rhs << " | " << std::setw(12) << q.margin << " | "
                << spinext::to_string(q.status) << "\n";
    std::cout << "  verdict: " << spinext::to_string(report.verdict) << "\n";
    std::cout << "  separability: p = " << bound.p << ", partition " << bound.partition
              << (bound.gme_excluded ? " (genuine multipartite entanglement excluded)" : "")
              << "\n";
  }
  switch (report.verdict) {
    case spinext::SqueezingVerdict::separable_compatible:
      return 0;
    case spinext::SqueezingVerdict::entanglement_detected:
      return 1;
    case spinext::SqueezingVerdict::inconclusive:
      return 2;
  }
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  spinext::VerificationOptions opt;
  opt.base_seed = cfg.seed;
  opt.tolerance = cfg.tol;
  const spinext::VerificationOutcome outcome = spinext::run_verification(opt);
  if (cfg.json) {
    spinext::Json j;
    spinext::Json checks = spinext::Json::array();
    for (const auto& c : outcome.checks)
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = std::move(checks);
    j["all_pass"] = outcome.all_pass;
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& c : outcome.checks)
      std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " - " << c.detail << "\n";
    std::cout << (outcome.all_pass ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
  }
  return outcome.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact closed-shell spin extraction toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_common = [&cfg](CLI::App* sub, bool with_state) {
    sub->add_option("--config", cfg.config_path,
                    "flat key=value config file mirroring the flags");
    sub->add_option("--m", cfg.m, "number of modes M");
    sub->add_flag("--json", cfg.json, "emit JSON");
    sub->add_option("--tol", cfg.tol, "tolerance override");
    sub->add_option("--seed", cfg.seed, "base seed for seeded corpora");
    if (with_state) {
      sub->add_option("--shells", cfg.shells, "number of doubly-occupied shells P");
      sub->add_option("--unitary", cfg.unitary,
                      "identity | qft | random:<seed> | file:<path>");
      sub->add_option("--modes", cfg.modes, "extraction mode subset (comma separated)")
          ->delimiter(',');
      sub->add_flag("--raw", cfg.raw, "report the unnormalized extracted state");
      sub->add_option("--dump-unitary", cfg.dump_unitary, "write the resolved unitary to a file");
    }
  };

  CLI::App* build = app.add_subcommand("build", "construct and summarize the source state");
  add_common(build, true);
  CLI::App* censusc = app.add_subcommand("census", "closed-form subspace census for --m modes");
  add_common(censusc, false);
  CLI::App* rdm = app.add_subcommand("rdm", "extracted spin state, blocks and decompositions");
  add_common(rdm, true);
  CLI::App* entangle = app.add_subcommand("entangle", "spin-squeezing separability report");
  add_common(entangle, true);
  CLI::App* verify = app.add_subcommand("verify", "run the built-in invariant suite");
  add_common(verify, false);

  try {
    app.parse(argc, argv);
    CLI::App* active = build->parsed()      ? build
                       : censusc->parsed()  ? censusc
                       : rdm->parsed()      ? rdm
                       : entangle->parsed() ? entangle
                                            : verify;
    if (!cfg.config_path.empty()) apply_config_file(active, cfg);
    if (build->parsed()) return cmd_build(cfg);
    if (censusc->parsed()) return cmd_census(cfg);
    if (rdm->parsed()) return cmd_rdm(cfg);
    if (entangle->parsed()) return cmd_entangle(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const spinext::capacity_error& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 70;
  }
  return 0;
}
