#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "homog/config.hpp"
#include "homog/mc.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace homog;

namespace {

int run_validate_kernel(const StudyConfig& cfg, const fs::path& out) {
  const ValidationReport rep = validate_kernel(cfg.kernel, 4096, 1e-12);
  nlohmann::json j{{"kernel", cfg.kernel.name},
                   {"max_symmetry_defect", rep.max_symmetry_defect},
                   {"max_periodicity_defect", rep.max_periodicity_defect},
                   {"k_min", rep.k_min},
                   {"k_max", rep.k_max},
                   {"n_samples", rep.n_samples},
                   {"verdict", rep.pass ? "pass" : "fail"}};
  std::ofstream(out / "kernel_validation.json") << j.dump(2) << '\n';
  std::cout << (rep.pass ? "pass" : "fail") << " kernel '" << cfg.kernel.name
            << "': symmetry defect " << rep.max_symmetry_defect
            << ", periodicity defect " << rep.max_periodicity_defect
            << ", range [" << rep.k_min << ", " << rep.k_max << "]\n";
  return rep.pass ? 0 : 1;
}

int run_cell_problem(const StudyConfig& cfg, const fs::path& out) {
  TorusGrid grid(cfg.torus_n);
  const CellCorrectors c = compute_correctors(
      cfg.kernel, cfg.alpha, cfg.eps_list, grid, cfg.quadrature,
      cfg.image_cutoff);
  const double h = grid.spacing();

  std::ofstream csv(out / "correctors.csv", std::ios::binary);
  csv << "x,psi,phi_or_phi_eps\n";
  for (int i = 0; i < grid.n_points; ++i) {
    double second = 0.0;
    if (c.phi)
      second = (*c.phi)[i];
    else if (!c.phi_eps.empty())
      second = c.phi_eps.back().second[i];
    csv << format_sig12(grid.node(i)) << ',' << format_sig12(c.psi[i]) << ','
        << format_sig12(second) << '\n';
  }

  const double mean_psi = std::fabs(h * c.psi.sum());
  bool pass = mean_psi < 1e-10 && c.residual_psi < 1e-6;
  nlohmann::json j{{"kernel", cfg.kernel.name},
                   {"alpha", cfg.alpha},
                   {"k_bar", c.k_bar},
                   {"psi_mean_abs", mean_psi},
                   {"residual_psi", c.residual_psi},
                   {"residual_phi", c.residual_phi},
                   {"stability_constant", c.stability_constant},
                   {"psi_grad_norm", c.psi_grad_norm},
                   {"verdict", pass ? "pass" : "fail"}};
  std::ofstream(out / "cell_problem.json") << j.dump(2) << '\n';
  std::cout << (pass ? "pass" : "fail") << " cell problem: |mean psi| = "
            << mean_psi << ", residual = " << c.residual_psi << "\n";
  return pass ? 0 : 1;
}

int run_solve(const StudyConfig& cfg, const fs::path& out) {
  DomainGrid grid(cfg.domain, cfg.study_grid_size());
  DirichletProblem problem{
      ProblemConfig{cfg.alpha, 1, cfg.kernel, cfg.domain, cfg.quadrature},
      cfg.solve_eps, grid, sample_rhs(cfg, grid)};
  const DirichletSolution sol = solve_dirichlet(problem);
  std::ofstream csv(out / "solution.csv", std::ios::binary);
  csv << "x,u\n";
  for (int i = 0; i < grid.n_interior; ++i)
    csv << format_sig12(grid.node(i)) << ',' << format_sig12(sol.u[i]) << '\n';
  const bool pass =
      sol.residual < 1e-9 * problem.rhs.lpNorm<Eigen::Infinity>();
  std::cout << (pass ? "pass" : "fail") << " solve: residual " << sol.residual
            << ", condition estimate " << sol.condition_estimate << "\n";
  return pass ? 0 : 1;
}

int run_converge(const StudyConfig& cfg, const fs::path& out, bool interior) {
  const ConvergenceReport rep =
      interior ? run_theorem2_study(cfg) : run_theorem1_study(cfg);
  const std::string stem = interior ? "interior_converge" : "converge";
  write_convergence_csv(rep, (out / (stem + ".csv")).string());
  write_convergence_json(rep, (out / (stem + ".json")).string());
  std::cout << rep.verdict << " " << rep.study << " alpha=" << rep.alpha
            << " slope=" << rep.fitted_slope
            << " exponent=" << rep.theoretical_exponent
            << (rep.exact_match ? " (exact match)" : "") << "\n";
  if (!rep.failure_stage.empty())
    std::cout << "  failure stage: " << rep.failure_stage << "\n";
  return rep.verdict == "pass" ? 0 : 1;
}

int run_corrector_diag(const StudyConfig& cfg, const fs::path& out) {
  const CorrectorDiagnosticReport rep = run_corrector_diagnostic(cfg);
  std::ofstream csv(out / "corrector_diagnostic.csv", std::ios::binary);
  csv << "epsilon,err_v,err_ubar\n";
  for (const auto& row : rep.rows)
    csv << format_sig12(row.eps) << ',' << format_sig12(row.err_v) << ','
        << format_sig12(row.err_ubar) << '\n';
  // expansion addends at the smallest diagnosed eps
  std::ofstream addends(out / "expansion_addends.csv", std::ios::binary);
  addends << "x,truncated,gradient_term,zero_order_term,v\n";
  for (int i = 0; i < rep.nodes.size(); ++i)
    addends << format_sig12(rep.nodes[i]) << ','
            << format_sig12(rep.last_expansion.truncated[i]) << ','
            << format_sig12(rep.last_expansion.gradient_term[i]) << ','
            << format_sig12(rep.last_expansion.zero_order_term[i]) << ','
            << format_sig12(rep.last_expansion.v[i]) << '\n';
  nlohmann::json j{{"kernel", rep.kernel_name},
                   {"alpha", rep.alpha},
                   {"slope_v", rep.slope_v},
                   {"slope_ubar", rep.slope_ubar},
                   {"improved_at_smallest_eps", rep.improved_at_smallest_eps}};
  std::ofstream(out / "corrector_diagnostic.json") << j.dump(2) << '\n';
  std::cout << "info corrector diagnostic: slope_v = " << rep.slope_v
            << ", slope_ubar = " << rep.slope_ubar
            << ", improved at smallest eps: "
            << (rep.improved_at_smallest_eps ? "yes" : "no") << "\n";
  return 0; // informational subcommand
}

int run_mc_check(const StudyConfig& cfg, const fs::path& out) {
  const double eps = cfg.solve_eps.value_or(cfg.eps_list.front());
  const double h = eps / cfg.grid_ratio;
  const int n =
      std::max(8, static_cast<int>(std::lround(cfg.domain.length() / h)) - 1);
  DomainGrid grid(cfg.domain, n);
  const GeneratorMatrix A = assemble_domain_generator(
      cfg.kernel, eps, grid, cfg.alpha, cfg.quadrature);
  const Eigen::VectorXd rhs = sample_rhs(cfg, grid);
  Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd(-A.entries));
  const Eigen::VectorXd direct = llt.solve(rhs);

  bool pass = true;
  nlohmann::json nodes = nlohmann::json::array();
  const int spots = std::min(cfg.mc_spot_nodes, n);
  for (int k = 0; k < spots; ++k) {
    const int node = (k + 1) * n / (spots + 1);
    const McEstimate est =
        feynman_kac_estimate(A, rhs, node, cfg.mc_paths, cfg.seed + k);
    const double z =
        est.std_error > 0.0 ? (est.mean - direct[node]) / est.std_error : 0.0;
    pass = pass && std::fabs(z) <= 3.0;
    nodes.push_back({{"node", node},
                     {"x", grid.node(node)},
                     {"mc_mean", est.mean},
                     {"mc_std_error", est.std_error},
                     {"direct", direct[node]},
                     {"z_score", z}});
    std::cout << "  node " << node << ": mc " << est.mean << " +- "
              << est.std_error << ", direct " << direct[node] << ", z = " << z
              << "\n";
  }
  nlohmann::json j{{"kernel", cfg.kernel.name},
                   {"alpha", cfg.alpha},
                   {"eps", eps},
                   {"n_paths", cfg.mc_paths},
                   {"seed", cfg.seed},
                   {"nodes", nodes},
                   {"verdict", pass ? "pass" : "fail"}};
  std::ofstream(out / "mc_check.json") << j.dump(2) << '\n';
  std::cout << (pass ? "pass" : "fail") << " mc-check\n";
  return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Numerical laboratory for periodic homogenization of stable-like "
      "nonlocal operators in one dimension"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "path to the JSON config file")
        ->required();
    sub->add_option("--out", out_dir, "output directory for artifacts");
  };
  auto* sc_validate = app.add_subcommand(
      "validate-kernel", "check kernel symmetry/periodicity/ellipticity");
  auto* sc_cell = app.add_subcommand(
      "cell-problem", "solve the torus cell problems and export correctors");
  auto* sc_solve =
      app.add_subcommand("solve", "solve one Dirichlet problem and export u");
  auto* sc_converge = app.add_subcommand(
      "converge", "L1 convergence study of u_eps toward the homogenized u");
  auto* sc_interior = app.add_subcommand(
      "interior-converge", "interior L2 convergence study (smooth target)");
  auto* sc_diag = app.add_subcommand(
      "corrector-diagnostic", "two-scale expansion quality diagnostic");
  auto* sc_mc = app.add_subcommand(
      "mc-check", "Monte Carlo cross-validation of the direct solver");
  for (auto* sub : {sc_validate, sc_cell, sc_solve, sc_converge, sc_interior,
                    sc_diag, sc_mc})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    const StudyConfig cfg = load_config(config_path);
    fs::path out(out_dir);
    fs::create_directories(out);
    if (sc_validate->parsed()) return run_validate_kernel(cfg, out);
    if (sc_cell->parsed()) return run_cell_problem(cfg, out);
    if (sc_solve->parsed()) return run_solve(cfg, out);
    if (sc_converge->parsed()) return run_converge(cfg, out, false);
    if (sc_interior->parsed()) return run_converge(cfg, out, true);
    if (sc_diag->parsed()) return run_corrector_diag(cfg, out);
    if (sc_mc->parsed()) return run_mc_check(cfg, out);
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
}
