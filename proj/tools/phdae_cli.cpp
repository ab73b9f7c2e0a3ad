// Command-line front end: load a system document, run verification, index
// analysis, reduction/regularization, or simulation, and emit both a human
// table and a machine-readable report.
//
// Exit codes: 0 success, 1 mathematical failure (structure, consistency or
// rank assumptions), 2 input/usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "phdae/io.hpp"
#include "phdae/models.hpp"
#include "phdae/reduce.hpp"
#include "phdae/sim.hpp"

namespace fs = std::filesystem;
using namespace phdae;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMath = 1;
constexpr int kExitUsage = 2;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%10.3e", v);
  return buf;
}

void print_structure(const StructureReport& rep) {
  const auto line = [](const char* label, double value, bool ok) {
    std::cout << "  " << label << sci(value) << (ok ? "   ok" : "   FAIL") << "\n";
  };
  std::cout << "structure verification (tol " << rep.tol << ", grid "
            << rep.grid_points << " points)\n";
  line("Q^T E symmetry residual       ", rep.skew_symmetry_residual, rep.symmetry_ok);
  line("derivative identity residual  ", rep.derivative_identity_residual,
       rep.derivative_identity_ok);
  line("min eig sym(Q^T E)            ", rep.min_eig_QTE, rep.qte_psd_ok);
  line("min eig sym(W)                ", rep.min_eig_W, rep.w_psd_ok);
  std::cout << "  => " << (rep.passed ? "PASSED" : "FAILED") << "\n";
}

void print_index(const char* label, const IndexData& ix) {
  std::cout << "  " << label << ": ";
  if (!ix.hypothesis_satisfied) {
    std::cout << "rank conditions not satisfied up to the requested level\n";
    return;
  }
  std::cout << "mu=" << ix.mu << " r=" << ix.r << " a=" << ix.a << " d=" << ix.d
            << " nu=" << ix.nu << "; hidden constraints: " << ix.A3.rows()
            << ", input-coupled: " << ix.A2.rows() << "\n";
}

Vector parse_vector(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    vals.push_back(std::stod(item));
  }
  Vector v(static_cast<Index>(vals.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = vals[static_cast<std::size_t>(i)];
  return v;
}

std::string default_out(const std::string& path, const char* suffix) {
  return path + suffix;
}

struct ReducePipeline {
  PHDAESystem working;       // after optional regularization
  ReducedSystem reduced;
  CanonicalIndexOne canonical;
  Index pinned = 0;
};

ReducePipeline run_reduction(const PHDAESystem& sys, double tol) {
  ReducePipeline out;
  out.working = sys;
  if (sys.is_constant() && !check_index_le_one(sys, tol)) {
    const IndexData idx =
        strangeness_analysis(BehaviorPencil::from_system(sys, /*zero_input=*/true));
    if (!idx.hypothesis_satisfied) {
      throw NumericalError("analysis could not certify the strangeness index; "
                           "cannot regularize");
    }
    const RegularizedSystem reg = regularize_high_index(sys, idx, tol);
    out.working = reg.subsystem;
    out.pinned = reg.pinned;
  }
  out.canonical = index_one_canonical(out.working, tol);
  out.reduced = reduce_index_one(out.canonical);
  return out;
}

int cmd_verify(const std::string& path, double tol, Index grid,
               const std::string& out) {
  const SystemDocument doc = load_system_document(path);
  const StructureReport rep = verify_structure(doc.system, grid, tol);
  print_structure(rep);

  ReportDocument report;
  report.version = tool_version();
  report.tol = tol;
  report.grid_points = grid;
  report.structure = rep;
  save_report_document(report, out.empty() ? default_out(path, ".report.json") : out);
  return rep.passed ? kExitOk : kExitMath;
}

int cmd_analyze(const std::string& path, Index mu_max, double tol,
                const std::string& out) {
  const SystemDocument doc = load_system_document(path);
  const PHDAESystem& sys = doc.system;
  std::cout << "strangeness analysis (mu_max " << mu_max << ", rank tol " << tol
            << ")\n";
  const IndexData with_u =
      strangeness_analysis(BehaviorPencil::from_system(sys, false), mu_max, tol);
  print_index(sys.m > 0 ? "with input columns" : "pencil", with_u);
  std::optional<IndexData> zero_u;
  if (sys.m > 0) {
    zero_u = strangeness_analysis(BehaviorPencil::from_system(sys, true), mu_max, tol);
    print_index("with u = 0        ", *zero_u);
  }

  ReportDocument report;
  report.version = tool_version();
  report.tol = tol;
  report.grid_points = 0;
  report.index = with_u;
  report.index_zero_input = zero_u;
  save_report_document(report, out.empty() ? default_out(path, ".report.json") : out);

  const bool ok = with_u.hypothesis_satisfied &&
                  (!zero_u || zero_u->hypothesis_satisfied);
  return ok ? kExitOk : kExitMath;
}

int cmd_reduce(const std::string& path, double tol, const std::string& out,
               const std::string& report_path) {
  const SystemDocument doc = load_system_document(path);
  const StructureReport structure = verify_structure(doc.system);
  if (!structure.passed) {
    print_structure(structure);
    std::cerr << "error: input fails structure verification; refusing to reduce\n";
    return kExitMath;
  }

  const ReducePipeline pipe = run_reduction(doc.system, tol);
  const ReducedSystem& red = pipe.reduced;
  std::cout << "reduction: differential block " << red.n1 << ", algebraic block "
            << red.n2 << ", pinned " << pipe.pinned << "\n";
  std::cout << "  structural zero residual " << sci(pipe.canonical.structural_zero_residual)
            << ", Q off-diagonal " << sci(pipe.canonical.q_offdiag_residual) << "\n";

  SystemDocument reduced_doc{red.ode};
  if (doc.input) reduced_doc.input = doc.input;
  const std::string out_path = out.empty() ? default_out(path, ".reduced.json") : out;
  save_system_document(reduced_doc, out_path);
  std::cout << "  reduced system written to " << out_path << "\n";

  ReportDocument report;
  report.version = tool_version();
  report.tol = tol;
  report.grid_points = 33;
  report.structure = structure;
  ReportDocument::Reduction rd;
  rd.n1 = red.n1;
  rd.n2 = red.n2;
  rd.pinned = pipe.pinned;
  rd.structural_zero_residual = pipe.canonical.structural_zero_residual;
  rd.q_offdiag_residual = pipe.canonical.q_offdiag_residual;
  rd.cond_U = condition_number(pipe.canonical.U(doc.system.t0));
  rd.cond_V = condition_number(pipe.canonical.V(doc.system.t0));
  rd.x2_from_x1 = red.x2_from_x1(doc.system.t0);
  rd.x2_from_u = red.x2_from_u(doc.system.t0);
  if (doc.initial_state && pipe.pinned == 0) {
    const Vector u0 = doc.input ? (*doc.input)(doc.system.t0)
                                : Vector(Vector::Zero(doc.system.m));
    rd.consistency_residual_t0 =
        red.consistency_residual(*doc.initial_state, u0, doc.system.t0);
    std::cout << "  consistency residual at t0: " << sci(rd.consistency_residual_t0)
              << "\n";
  }
  report.reduction = rd;
  save_report_document(report, report_path.empty()
                                   ? default_out(path, ".report.json")
                                   : report_path);
  return kExitOk;
}

int cmd_simulate(const std::string& path, const std::string& x0_text,
                 const std::string& u_text, double h, const std::string& method,
                 const std::string& csv, bool project, const std::string& out) {
  const SystemDocument doc = load_system_document(path);
  const PHDAESystem& sys = doc.system;

  if (!check_index_le_one(sys)) {
    std::cerr << "error: system is not of differentiation-index <= 1; run 'reduce' "
                 "first\n";
    return kExitMath;
  }

  Vector x0;
  if (!x0_text.empty()) {
    x0 = parse_vector(x0_text);
  } else if (doc.initial_state) {
    x0 = *doc.initial_state;
  } else {
    std::cerr << "error: no initial state (--x0 or document initial_state)\n";
    return kExitUsage;
  }
  if (x0.size() != sys.n) {
    std::cerr << "error: initial state has dimension " << x0.size() << ", expected "
              << sys.n << "\n";
    return kExitUsage;
  }

  InputSignal u = InputSignal::zero(sys.m);
  if (!u_text.empty()) {
    const Vector uc = parse_vector(u_text);
    if (uc.size() != sys.m) {
      std::cerr << "error: input vector has dimension " << uc.size() << ", expected "
                << sys.m << "\n";
      return kExitUsage;
    }
    u = InputSignal::polynomial({uc});
  } else if (doc.input) {
    u = *doc.input;
  }

  IntegrateOptions opts;
  opts.project_initial_state = project;
  if (method == "euler") {
    opts.method = IntegrationMethod::ImplicitEuler;
  } else if (method != "midpoint") {
    std::cerr << "error: unknown method '" << method << "'\n";
    return kExitUsage;
  }
  const Index steps = std::max<Index>(1, static_cast<Index>(
      std::llround((sys.tf - sys.t0) / h)));

  const Trajectory traj = integrate(sys, u, x0, steps, opts);
  const EnergyReport energy = energy_audit(traj, sys, &u);
  std::cout << "simulated " << steps << " steps (" << method << ", h = "
            << (sys.tf - sys.t0) / static_cast<double>(steps) << ")\n";
  std::cout << "  H(t0) = " << traj.hamiltonian.front()
            << ", H(tf) = " << traj.hamiltonian.back() << "\n";
  std::cout << "  dissipation margin " << sci(energy.dissipation_margin)
            << (energy.violated ? "   VIOLATED" : "   ok") << "\n";

  const std::string csv_path = csv.empty() ? default_out(path, ".trajectory.csv") : csv;
  save_trajectory_csv(traj, sys.n, sys.m, csv_path);
  std::cout << "  trajectory written to " << csv_path << "\n";

  ReportDocument report;
  report.version = tool_version();
  report.tol = energy.tol;
  report.grid_points = steps + 1;
  report.energy = energy;
  save_report_document(report, out.empty() ? default_out(path, ".report.json") : out);
  return energy.violated ? kExitMath : kExitOk;
}

int cmd_demo(const std::string& name, const std::string& dir) {
  fs::create_directories(dir);
  const PHDAESystem sys = models::preset(name);
  const std::string base = (fs::path(dir) / name).string();

  SystemDocument doc{sys};
  save_system_document(doc, base + ".json");
  std::cout << "[demo " << name << "] system written to " << base << ".json\n";

  const StructureReport structure = verify_structure(sys);
  print_structure(structure);
  if (!structure.passed) return kExitMath;

  ReportDocument report;
  report.version = tool_version();
  report.tol = structure.tol;
  report.grid_points = structure.grid_points;
  report.structure = structure;

  PHDAESystem working = sys;
  Index pinned = 0;
  if (sys.is_constant()) {
    const IndexData with_u =
        strangeness_analysis(BehaviorPencil::from_system(sys, false));
    report.index = with_u;
    print_index(sys.m > 0 ? "with input columns" : "pencil", with_u);
    IndexData zero_u = with_u;
    if (sys.m > 0) {
      zero_u = strangeness_analysis(BehaviorPencil::from_system(sys, true));
      report.index_zero_input = zero_u;
      print_index("with u = 0        ", zero_u);
    }
    if (!check_index_le_one(sys)) {
      const RegularizedSystem reg = regularize_high_index(sys, zero_u);
      working = reg.subsystem;
      pinned = reg.pinned;
      std::cout << "  regularized: pinned " << pinned << " hidden coordinate(s), "
                << "subsystem dimension " << working.n << "\n";
    }
  }

  const CanonicalIndexOne canonical = index_one_canonical(working);
  const ReducedSystem red = reduce_index_one(canonical);
  std::cout << "  reduced implicit pH system of dimension " << red.n1 << "\n";
  ReportDocument::Reduction rd;
  rd.n1 = red.n1;
  rd.n2 = red.n2;
  rd.pinned = pinned;
  rd.structural_zero_residual = canonical.structural_zero_residual;
  rd.q_offdiag_residual = canonical.q_offdiag_residual;
  rd.cond_U = condition_number(canonical.U(sys.t0));
  rd.cond_V = condition_number(canonical.V(sys.t0));
  rd.x2_from_x1 = red.x2_from_x1(sys.t0);
  rd.x2_from_u = red.x2_from_u(sys.t0);
  report.reduction = rd;

  SystemDocument reduced_doc{red.ode};
  save_system_document(reduced_doc, base + ".reduced.json");

  const InputSignal u = InputSignal::zero(red.ode.m);
  const Vector x1_0 = Vector::LinSpaced(red.n1, 0.4, 1.0);
  const Trajectory traj = integrate(red.ode, u, x1_0, 1000);
  const EnergyReport energy = energy_audit(traj, red.ode, &u);
  report.energy = energy;
  std::cout << "  simulate: H(t0) = " << traj.hamiltonian.front() << " -> H(tf) = "
            << traj.hamiltonian.back() << ", dissipation margin "
            << sci(energy.dissipation_margin) << (energy.violated ? " VIOLATED" : " ok")
            << "\n";

  if (name == "gas") {
    const auto p = models::gas_preset();
    const GasSplit split = gas_reduction(sys, p.M1.rows(), p.M2.rows(), p.N.rows());
    std::cout << "  gas split: reduced ODE dimension " << split.reduced_ode.n
              << ", pinned flux coordinates " << split.n3 << "\n";
  }

  save_trajectory_csv(traj, red.ode.n, red.ode.m, base + ".trajectory.csv");
  save_report_document(report, base + ".report.json");
  std::cout << "[demo " << name << "] report written to " << base << ".report.json\n";
  return energy.violated ? kExitMath : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear port-Hamiltonian descriptor systems: verify, analyze, "
               "reduce, simulate"};
  app.require_subcommand(1);

  std::string path, out, report_path, csv, x0_text, u_text;
  std::string method = "midpoint";
  std::string demo_name, demo_dir = ".";
  double tol_verify = 1e-10, tol_rank = 1e-11, tol_reduce = 1e-9, h = 1e-3;
  Index grid = 33, mu_max = 3;
  bool project = false;

  auto* verify = app.add_subcommand("verify", "check the pHDAE structure conditions");
  verify->add_option("path", path, "system document")->required();
  verify->add_option("--tol", tol_verify, "residual tolerance");
  verify->add_option("--grid", grid, "verification grid points");
  verify->add_option("--out", out, "report output path");

  auto* analyze = app.add_subcommand("analyze", "strangeness-index analysis");
  analyze->add_option("path", path, "system document")->required();
  analyze->add_option("--mu-max", mu_max, "largest derivative-array level");
  analyze->add_option("--tol", tol_rank, "rank decision tolerance");
  analyze->add_option("--out", out, "report output path");

  auto* reduce = app.add_subcommand(
      "reduce", "index-one reduction (with regularization when needed)");
  reduce->add_option("path", path, "system document")->required();
  reduce->add_option("--tol", tol_reduce, "singularity/residual tolerance");
  reduce->add_option("--out", out, "reduced system output path");
  reduce->add_option("--report", report_path, "report output path");

  auto* simulate = app.add_subcommand("simulate", "implicit time integration");
  simulate->add_option("path", path, "system document")->required();
  simulate->add_option("--x0", x0_text, "initial state, comma separated");
  simulate->add_option("--u", u_text, "constant input vector, comma separated");
  simulate->add_option("--h", h, "step size");
  simulate->add_option("--method", method, "midpoint | euler");
  simulate->add_option("--csv", csv, "trajectory CSV path");
  simulate->add_option("--out", out, "report output path");
  simulate->add_flag("--project", project, "project x0 onto the constraint");

  auto* demo = app.add_subcommand("demo", "run a named preset end to end");
  demo->add_option("name", demo_name, "preset name")->required();
  demo->add_option("--dir", demo_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(path, tol_verify, grid, out);
    if (analyze->parsed()) return cmd_analyze(path, mu_max, tol_rank, out);
    if (reduce->parsed()) return cmd_reduce(path, tol_reduce, out, report_path);
    if (simulate->parsed()) {
      return cmd_simulate(path, x0_text, u_text, h, method, csv, project, out);
    }
    if (demo->parsed()) return cmd_demo(demo_name, demo_dir);
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMath;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMath;
  }
  return kExitUsage;
}
