#include "sparsekin/timeint.hpp"

#include <algorithm>
#include <stdexcept>

namespace sparsekin
{
Eigen::VectorXd implicit_lb_solve(vplb_model const &model, adaptive_grid const &grid,
                                  kron_applier const &applier, fluid_fields const &fluid,
                                  double c, Eigen::VectorXd const &b,
                                  step_config const &config, step_report &report)
{
  separable_operator shifted = model.assemble_lb(fluid);
  // I - c A
  separable_operator ident(grid.degree(), grid.caps());
  ident.add_identity(1.0);
  shifted = add_scaled(ident, shifted, 1.0, -c);

  auto apply_a = [&](Eigen::VectorXd const &x) { return applier.apply(shifted, x); };

  block_jacobi jacobi;
  linear_map precond;
  if (config.precondition)
  {
    jacobi  = block_jacobi(applier.block_diagonal(shifted));
    precond = jacobi.as_map();
  }

  Eigen::VectorXd x = b;
  solve_report const sr = gmres(apply_a, b, x, config.gmres, precond);
  report.gmres_iterations += sr.iterations;
  report.converged = report.converged && sr.converged;
  report.worst_residual = std::max(report.worst_residual, sr.final_residual);
  return x;
}

namespace
{
//! -A_VP[E(f)] f
Eigen::VectorXd vlasov_rhs(vplb_model const &model, kron_applier const &applier,
                           Eigen::VectorXd const &f)
{
  fluid_fields const raw     = model.raw_moments(applier.grid(), f);
  electric_field const field = model.solve_poisson(raw.rho0);
  return -applier.apply(model.assemble_vlasov(field), f);
}
} // namespace

Eigen::VectorXd imex_step(vplb_model const &model, adaptive_grid const &grid,
                          Eigen::VectorXd const &f, step_config const &config,
                          step_report &report)
{
  if (model.config().geom != geometry::slab_1x3v)
    throw std::invalid_argument("imex_step: requires the 1x3v geometry");
  kron_applier const applier(grid);
  double const dt = config.dt;
  double const nu = model.config().nu;

  Eigen::VectorXd f1 = f + dt * vlasov_rhs(model, applier, f);
  if (nu != 0)
    f1 = implicit_lb_solve(model, grid, applier, model.compute_moments(grid, f1),
                           dt * nu, f1, config, report);

  Eigen::VectorXd f2 = 0.5 * f + 0.5 * (f1 + dt * vlasov_rhs(model, applier, f1));
  if (nu != 0)
    f2 = implicit_lb_solve(model, grid, applier, model.compute_moments(grid, f2),
                           0.5 * dt * nu, f2, config, report);
  return f2;
}

Eigen::VectorXd backward_euler_step(vplb_model const &model, adaptive_grid const &grid,
                                    Eigen::VectorXd const &f, step_config const &config,
                                    step_report &report)
{
  kron_applier const applier(grid);
  double const nu = model.config().nu;
  if (model.config().geom == geometry::slab_1x3v)
  {
    // collisions plus explicit streaming are not offered as a first order
    // scheme; use the IMEX step there
    throw std::invalid_argument("backward_euler_step: requires the 0x3v geometry");
  }
  return implicit_lb_solve(model, grid, applier, model.compute_moments(grid, f),
                           config.dt * nu, f, config, report);
}

Eigen::VectorXd advance(vplb_model const &model, adaptive_grid const &grid,
                        Eigen::VectorXd const &f, step_config const &config,
                        step_report &report)
{
  if (config.scheme == time_scheme::backward_euler)
    return backward_euler_step(model, grid, f, config, report);
  return imex_step(model, grid, f, config, report);
}

adapt_result adapt_advance(vplb_model const &model, adaptive_grid const &grid,
                           Eigen::VectorXd const &f, step_config const &config)
{
  adapt_result out;
  if (config.tau <= 0)
  {
    out.state = advance(model, grid, f, config, out.report);
    out.grid  = grid;
    out.refined_grid  = grid;
    out.refined_state = out.state;
    out.report.elements_after_refinement = grid.size();
    out.report.elements_after_coarsening = grid.size();
    return out;
  }

  adaptive_grid current = grid;
  Eigen::VectorXd start = f;
  Eigen::VectorXd result;
  while (true)
  {
    step_report attempt;
    result = advance(model, current, start, config, attempt);
    out.report.gmres_iterations += attempt.gmres_iterations;
    out.report.converged = out.report.converged && attempt.converged;
    out.report.worst_residual = std::max(out.report.worst_residual, attempt.worst_residual);

    auto refined = refine(current, block_norms(current, result), config.tau, config.norm);
    if (refined.added.empty())
      break;
    if (out.report.refine_passes >= config.max_refine_passes)
    {
      out.report.pass_cap_hit = true;
      break;
    }
    out.report.refine_passes++;
    start   = reindex(current, refined.grid, start);
    current = std::move(refined.grid);
  }

  out.refined_grid  = current;
  out.refined_state = result;
  out.report.elements_after_refinement = current.size();

  out.grid = coarsen(current, block_norms(current, result), config.tau, config.mu, config.norm);
  out.state = reindex(current, out.grid, result);
  out.report.elements_after_coarsening = out.grid.size();
  return out;
}

adapt_result adapt_initial(vplb_model const &model, adaptive_grid const &grid,
                           std::vector<separable_function> const &initial,
                           step_config const &config)
{
  adapt_result out;
  adaptive_grid current = grid;
  Eigen::VectorXd state = model.project_separable(current, initial);
  if (config.tau > 0)
  {
    int passes = 0;
    while (true)
    {
      auto refined = refine(current, block_norms(current, state), config.tau, config.norm);
      if (refined.added.empty())
        break;
      if (passes >= config.max_refine_passes)
      {
        out.report.pass_cap_hit = true;
        break;
      }
      passes++;
      current = std::move(refined.grid);
      state   = model.project_separable(current, initial);
    }
    out.report.refine_passes = passes;
  }
  out.refined_grid  = current;
  out.refined_state = state;
  out.report.elements_after_refinement = current.size();
  if (config.tau > 0)
  {
    out.grid  = coarsen(current, block_norms(current, state), config.tau, config.mu, config.norm);
    out.state = reindex(current, out.grid, state);
  }
  else
  {
    out.grid  = current;
    out.state = state;
  }
  out.report.elements_after_coarsening = out.grid.size();
  return out;
}

} // namespace sparsekin
