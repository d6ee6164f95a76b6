#pragma once

#include "sparsekin/basis1d.hpp"
#include "sparsekin/hiergrid.hpp"
#include "sparsekin/kronops.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace sparsekin
{
enum class geometry
{
  relaxation_0x3v, // dimensions (v_x, v_y, v_z)
  slab_1x3v        // dimensions (x, v_x, v_y, v_z)
};

struct phase_space_config
{
  geometry geom = geometry::slab_1x3v;
  interval x_domain{-1.0, 1.0};
  std::array<interval, 3> v_domain{interval{-6, 6}, interval{-6, 6}, interval{-6, 6}};
  double nu  = 0.0;
  int degree = 2;
  //! per-dimension level caps, 3 entries for 0x3v and 4 for 1x3v
  std::vector<int> caps;
  //! jump boundary traces against zero in the LDG gradient; this makes the
  //! discrete collision operator conserve momentum and energy exactly
  bool lb_boundary_closure = true;
  //! Gauss points per cap cell for initial projections, 0 selects k + 3
  int projection_points = 0;

  int dims() const { return geom == geometry::slab_1x3v ? 4 : 3; }
  //! index of the v_x dimension
  int vdim(int m) const { return geom == geometry::slab_1x3v ? m + 1 : m; }
  int x_level() const { return geom == geometry::slab_1x3v ? caps[0] : 0; }
  void validate() const;
};

//! n (2 pi theta)^{-3/2} exp(-|v - u|^2 / (2 theta))
double maxwellian(double n, std::array<double, 3> const &u, double theta,
                  std::array<double, 3> const &v);

//! one dimensional factor of a Maxwellian, density folded into the caller
double maxwellian_1d(double u, double theta, double v);

/*!
 * \brief Velocity moments and fluid variables as DG functions of x.
 *
 * In 0x3v every field lives on a single cell of (0, 1), so the leading
 * coefficient is the value itself. In 1x3v only u[0] can be nonzero.
 */
struct fluid_fields
{
  dg_function_1d rho0;                  // number density
  std::array<dg_function_1d, 3> rho1;   // momentum density
  dg_function_1d rho2;                  // energy density, 1/2 <|v|^2 f>
  dg_function_1d n;
  std::array<dg_function_1d, 3> u;
  dg_function_1d theta;
};

//! derives n, u, theta from the raw moments by cellwise weak division;
//! throws std::runtime_error naming the cell if n or theta is not positive
void derive_fluid(fluid_fields &fields, bool slab);

struct electric_field
{
  interval domain;
  std::vector<double> phi; // nodal values of the continuous P1 potential
  std::vector<double> e;   // cellwise constant field
  double cell_width() const { return domain.length() / static_cast<double>(e.size()); }
  //! DG representation of degree `degree` (only the mean coefficient is set)
  dg_function_1d as_dg(int degree, bool absolute = false) const;
};

double potential_energy(electric_field const &field);

//! continuous P1 periodic solve of -phi'' = n - mean(n) with zero mean phi;
//! E is the cellwise constant -phi'
class periodic_poisson
{
public:
  periodic_poisson() = default;
  periodic_poisson(interval domain, int level, int degree);
  electric_field solve(dg_function_1d const &density) const;

private:
  interval domain_{0, 1};
  int level_  = 0;
  int degree_ = 0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

//! product of one dimensional functions with a constant weight
struct separable_function
{
  double weight = 1.0;
  std::vector<std::function<double(double)>> factors;
};

enum class transverse_weight
{
  g1, // 1
  g2, // v_y^2 + v_z^2
  g3  // v_y^4 + v_z^4
};

class vplb_model
{
public:
  explicit vplb_model(phase_space_config config);

  phase_space_config const &config() const { return config_; }
  interval domain(int dim) const;

  fluid_fields raw_moments(adaptive_grid const &grid,
                           Eigen::VectorXd const &state) const;
  //! raw moments plus derived fluid variables
  fluid_fields compute_moments(adaptive_grid const &grid,
                               Eigen::VectorXd const &state) const;

  //! continuous P1 periodic solve of -phi'' = n - mean(n), zero mean phi
  electric_field solve_poisson(dg_function_1d const &density) const;

  //! A_VP in (test, trial) form; the semi-discrete rhs is -A_VP f
  separable_operator assemble_vlasov(electric_field const &field) const;
  //! A_LB without the collision frequency; the rhs is +nu A_LB f
  separable_operator assemble_lb(fluid_fields const &fluid) const;

  //! L2 projection of a sum of separable functions, element by element
  Eigen::VectorXd project_separable(adaptive_grid const &grid,
                                    std::vector<separable_function> const &f) const;
  //! L2 projection of a general function by tensor quadrature on the cap
  //! level cells; intended for small grids
  Eigen::VectorXd project_function(
      adaptive_grid const &grid,
      std::function<double(std::vector<double> const &)> const &f) const;

  //! integrals of v^power against the wavelets of velocity dimension m
  Eigen::VectorXd const &velocity_moment(int m, int power) const;

  /*!
   * \brief <f w(v_y, v_z)>_{v_y, v_z} as per-cell Legendre coefficients on
   *        the (x, v_x) cap mesh, stored as a (x dofs) by (v_x dofs) matrix.
   */
  Eigen::MatrixXd transverse_marginal(adaptive_grid const &grid,
                                      Eigen::VectorXd const &state,
                                      transverse_weight weight) const;

  //! pointwise value of the state at a phase-space point
  double evaluate(adaptive_grid const &grid, Eigen::VectorXd const &state,
                  std::vector<double> const &point) const;

private:
  factor_ptr factor(operator_spec const &spec, int dim) const;

  phase_space_config config_;
  std::vector<std::vector<Eigen::VectorXd>> moments_; // [v dim][power]

  // cached immutable factors
  factor_ptr x_central_, x_jump_;
  std::array<factor_ptr, 3> v_coord_, v_abs_, v_central_, v_jump_, v_lb_flux_, v_diffusion_;

  periodic_poisson poisson_;
};

} // namespace sparsekin
