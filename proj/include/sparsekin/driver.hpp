#pragma once

#include "sparsekin/chu1d.hpp"
#include "sparsekin/hiergrid.hpp"
#include "sparsekin/timeint.hpp"
#include "sparsekin/vplb.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sparsekin
{
enum class problem_kind
{
  relaxation,
  riemann,
  landau,
  chu_riemann,
  chu_landau
};

enum class grid_kind
{
  full,
  sparse,
  mixed,
  adaptive
};

problem_kind parse_problem(std::string const &name);
grid_kind parse_grid(std::string const &name);
std::string to_string(problem_kind p);
std::string to_string(grid_kind g);

struct run_config
{
  problem_kind problem = problem_kind::relaxation;
  grid_kind grid       = grid_kind::full;
  int lx = 0;    // spatial level, ignored by the relaxation problem
  int lv = 3;    // velocity level
  std::vector<int> caps; // adaptive caps, empty means (lx, lv, lv, lv)
  int degree = 2;
  double nu  = 0;
  double dt  = 0; // 0 derives the preset step
  double t_final = 0;
  int max_steps  = 0; // 0 runs to t_final
  double tau = 0;
  double mu  = 0.1;
  int max_refine_passes = 10;
  gmres_options gmres;
  bool precondition = true;
  int projection_points = 0;
  std::string output_dir;
  int snapshot_every = 0; // steps between snapshots, 0 writes only the final state
  double slice_vz    = 0; // v_z of the 0x3v snapshot slice

  interval x_domain{-1, 1};
  std::array<interval, 3> v_domain{interval{-6, 6}, interval{-6, 6}, interval{-6, 6}};
  double s_initial = 0.3; // Riemann discontinuity

  bool is_chu() const
  {
    return problem == problem_kind::chu_riemann || problem == problem_kind::chu_landau;
  }
  std::vector<int> level_caps() const;
  //! Landau runs with dt = 0 take dt = (0.75/30) dx
  void derive_time_step();
  void validate() const;
};

/*!
 * \brief Preset for a problem; for the Riemann problems the geometry
 *        depends on the collision frequency (nu >= 100 selects the
 *        collisional setup).
 */
run_config preset(problem_kind problem, double nu);

//! flat key=value pairs, '#' starts a comment
std::map<std::string, std::string> read_key_values(std::istream &is);

/*!
 * \brief Preset for the `problem` and `nu` keys, then every other key.
 *
 * Unknown keys and malformed values throw std::invalid_argument.
 */
run_config make_config(std::map<std::string, std::string> const &values);
void apply_setting(run_config &config, std::string const &key, std::string const &value);

struct time_record
{
  double t = 0;
  int active_elements = 0;
  int gmres_iterations = 0;
  double dn = 0, dmom = 0, denergy = 0;
  double epot = 0, ekin = 0, etotal = 0;
};

void write_timeseries(std::ostream &os, std::vector<time_record> const &records);
std::vector<time_record> read_timeseries(std::istream &is);

//! E_pot ~ exp(-gamma t) fitted through the local maxima
double damping_rate_fit(std::vector<double> const &t, std::vector<double> const &epot);

//! indices of the maxima used by damping_rate_fit
std::vector<int> damping_maxima(std::vector<double> const &t, std::vector<double> const &epot);

//! the discrete relaxation equilibrium target n M(v; u, theta), analytic L2 error
double maxwellian_l2_error(vplb_model const &model, adaptive_grid const &grid,
                           Eigen::VectorXd const &state, double n,
                           std::array<double, 3> const &u, double theta);

//! L2 distance over (x, v_x) between a transverse marginal and a Chu field
double reduced_moment_error(vplb_model const &model, adaptive_grid const &grid,
                            Eigen::VectorXd const &state, legendre_field_2d const &reference,
                            transverse_weight weight);

//! Legendre field of the transverse marginal on the (x, v_x) cap mesh
legendre_field_2d marginal_field(vplb_model const &model, adaptive_grid const &grid,
                                 Eigen::VectorXd const &state, transverse_weight weight);

//! CSV "x,v_x,value" sampled on a (2^lx + 1) x (2^lv + 1) lattice
void write_lattice(std::ostream &os, legendre_field_2d const &field);

//! L2 norm of the difference of two lattice CSVs by the trapezoidal rule
double lattice_l2_difference(std::istream &a, std::istream &b);

phase_space_config physics_config(run_config const &config);
chu_config chu_physics_config(run_config const &config);

//! initial data of the 4D presets as sums of separable functions
std::vector<separable_function> initial_condition(run_config const &config);
//! initial fluid (n, u_x, theta) of the slab presets at x
std::array<double, 3> initial_fluid(run_config const &config, double x);

adaptive_grid initial_grid(run_config const &config);

struct run_result
{
  std::vector<time_record> records;
  int steps = 0;
  double t  = 0;
  bool solver_failure = false;
  std::string message;
  // final state of 4D runs
  adaptive_grid grid;
  Eigen::VectorXd state;
  // final state of Chu runs
  chu_state chu;
};

//! observer called after every accepted step of a 4D run
using step_observer =
    std::function<void(int step, adapt_result const &result, adaptive_grid const &before)>;

/*!
 * \brief Executes a configuration. Writes artifacts when output_dir is set:
 *        timeseries.csv, snapshots, grid dumps and final marginals.
 */
run_result run(run_config const &config, step_observer const &observer = nullptr);

} // namespace sparsekin
