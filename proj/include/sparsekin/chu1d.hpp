#pragma once

#include "sparsekin/basis1d.hpp"
#include "sparsekin/krylov.hpp"
#include "sparsekin/vplb.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <iosfwd>

namespace sparsekin
{
/*!
 * \brief Piecewise polynomial on the uniform (x, v_x) tensor mesh in per-cell
 *        orthonormal Legendre coordinates.
 *
 * coeffs(cx * (k+1) + i, cv * (k+1) + j) multiplies phi_i(x) psi_j(v).
 */
struct legendre_field_2d
{
  interval x_domain{0, 1};
  interval v_domain{0, 1};
  int x_level = 0;
  int v_level = 0;
  int degree  = 0;
  Eigen::MatrixXd coeffs;

  double eval(double x, double v) const;
  double norm() const { return coeffs.norm(); }
};

legendre_field_2d project_2d(std::function<double(double, double)> const &f,
                             interval x_domain, interval v_domain, int x_level,
                             int v_level, int degree, int num_points = 0);

//! L2 distance by quadrature on the finer of the two (nested) meshes
double l2_distance(legendre_field_2d const &a, legendre_field_2d const &b);

struct chu_config
{
  interval x_domain{-1, 1};
  interval v_domain{-6, 6};
  int x_level = 4;
  int v_level = 4;
  int degree  = 2;
  double nu   = 0;
  bool lb_boundary_closure = true;
  bool evolve_g3 = true;
};

//! g1 = <f>, g2 = <f (v_y^2 + v_z^2)>, g3 = <f (v_y^4 + v_z^4)>
struct chu_state
{
  Eigen::MatrixXd g1, g2, g3;
};

struct chu_invariants
{
  double mass     = 0;
  double momentum = 0;
  double kinetic  = 0; // 1/2 int (g1 v^2 + g2)
  double potential = 0;
  double total() const { return kinetic + potential; }
};

struct chu_step_report
{
  int gmres_iterations = 0;
  bool converged       = true;
  double worst_residual = 0;
};

class chu_solver
{
public:
  explicit chu_solver(chu_config config);

  chu_config const &config() const { return config_; }

  //! local Maxwellian data: g1 = n M(v; u, theta), g2 = 2 theta g1,
  //! g3 = 6 theta^2 g1; `fluid` returns (n, u, theta) at x
  chu_state project_maxwellian(std::function<std::array<double, 3>(double)> const &fluid,
                               int num_points = 0) const;

  //! reduced moments; throws if n or theta is not positive
  fluid_fields moments(chu_state const &state) const;
  electric_field field(chu_state const &state) const;
  chu_invariants invariants(chu_state const &state) const;

  //! one IMEX-RK2 step; the implicit stages use Gauss-Seidel order g1, g2, g3
  chu_step_report step(chu_state &state, double dt, gmres_options const &gmres,
                       bool precondition = true) const;

  //! A_VP g in (test, trial) form for the given field
  Eigen::MatrixXd apply_vlasov(electric_field const &field, Eigen::MatrixXd const &g) const;
  //! C1(g; u, theta) in (test, trial) form
  Eigen::MatrixXd apply_collision(fluid_fields const &fluid, Eigen::MatrixXd const &g) const;

  legendre_field_2d wrap(Eigen::MatrixXd const &g) const;

  //! CSV "x,v_x,value" on a (2^lx + 1) x (2^lv + 1) uniform lattice
  void write_snapshot(std::ostream &os, Eigen::MatrixXd const &g) const;

private:
  using sparse = Eigen::SparseMatrix<double>;
  sparse x_operator(operator_spec const &spec) const;
  sparse v_operator(operator_spec const &spec) const;

  struct lb_multipliers
  {
    sparse theta, u; // (theta w, g) and (u w, g) in x
  };
  lb_multipliers multipliers(fluid_fields const &fluid) const;
  Eigen::MatrixXd collision(lb_multipliers const &m, Eigen::MatrixXd const &g) const;

  //! solves (I - c (C1 - alpha I)) x = b
  Eigen::MatrixXd implicit_solve(fluid_fields const &fluid, double c, double alpha,
                                 Eigen::MatrixXd const &b, gmres_options const &gmres,
                                 bool precondition, chu_step_report &report) const;

  chu_config config_;
  int p_ = 1;
  sparse x_central_, x_jump_;
  sparse v_coord_, v_abs_, v_central_, v_jump_, v_lb_flux_, v_diffusion_;
  // transposes, for right multiplication
  sparse v_coord_t_, v_abs_t_, v_central_t_, v_jump_t_, v_lb_flux_t_, v_diffusion_t_;
  Eigen::VectorXd m0_, m1_, m2_;
  periodic_poisson poisson_;
};

} // namespace sparsekin
