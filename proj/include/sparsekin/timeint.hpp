#pragma once

#include "sparsekin/hiergrid.hpp"
#include "sparsekin/krylov.hpp"
#include "sparsekin/vplb.hpp"

#include <Eigen/Dense>

namespace sparsekin
{
enum class time_scheme
{
  imex2,
  backward_euler
};

struct step_config
{
  double dt = 1e-3;
  time_scheme scheme = time_scheme::imex2;
  double tau = 0;   // adaptivity threshold, 0 disables adaptivity
  double mu  = 0.1; // coarsening factor
  int max_refine_passes = 10;
  norm_type norm = norm_type::linf;
  gmres_options gmres;
  bool precondition = true;
};

struct step_report
{
  int gmres_iterations = 0; // summed over the implicit stages
  bool converged       = true;
  double worst_residual = 0;
  int refine_passes    = 0;
  bool pass_cap_hit    = false;
  int elements_after_refinement = 0;
  int elements_after_coarsening = 0;
};

/*!
 * \brief Solves (I - c A_LB[fluid]) x = b with GMRES started from b.
 *
 * Block-Jacobi uses the element diagonal blocks of the shifted operator.
 */
Eigen::VectorXd implicit_lb_solve(vplb_model const &model, adaptive_grid const &grid,
                                  kron_applier const &applier, fluid_fields const &fluid,
                                  double c, Eigen::VectorXd const &b,
                                  step_config const &config, step_report &report);

//! IMEX-RK2: explicit Vlasov-Poisson, implicit Lenard-Bernstein
Eigen::VectorXd imex_step(vplb_model const &model, adaptive_grid const &grid,
                          Eigen::VectorXd const &f, step_config const &config,
                          step_report &report);

//! (I - dt nu A_LB[rho(f_n)]) f_{n+1} = f_n, collisions only
Eigen::VectorXd backward_euler_step(vplb_model const &model, adaptive_grid const &grid,
                                    Eigen::VectorXd const &f, step_config const &config,
                                    step_report &report);

//! one step on a fixed grid with the configured scheme
Eigen::VectorXd advance(vplb_model const &model, adaptive_grid const &grid,
                        Eigen::VectorXd const &f, step_config const &config,
                        step_report &report);

struct adapt_result
{
  Eigen::VectorXd state;
  adaptive_grid grid;
  //! grid and state of the accepted step before coarsening
  adaptive_grid refined_grid;
  Eigen::VectorXd refined_state;
  step_report report;
};

/*!
 * \brief Refine-and-redo step followed by coarsening.
 *
 * The step is repeated from t_n on the enlarged grid (new blocks zero) until
 * no element of the result passes the refinement criterion or the pass cap
 * is reached; the accepted result is then coarsened.
 */
adapt_result adapt_advance(vplb_model const &model, adaptive_grid const &grid,
                           Eigen::VectorXd const &f, step_config const &config);

/*!
 * \brief Initial-condition adaptivity: starting from `grid`, refine on the
 *        projected coefficients until nothing is added, then coarsen.
 */
adapt_result adapt_initial(vplb_model const &model, adaptive_grid const &grid,
                           std::vector<separable_function> const &initial,
                           step_config const &config);

} // namespace sparsekin
