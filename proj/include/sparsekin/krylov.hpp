#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace sparsekin
{
using linear_map = std::function<Eigen::VectorXd(Eigen::VectorXd const &)>;

struct gmres_options
{
  double tolerance = 1e-8; // relative to the norm of the right-hand side
  int restart      = 100;
  int max_iterations = 2000;
};

struct solve_report
{
  int iterations        = 0;
  int restarts          = 0;
  double final_residual = 0;
  bool converged        = false;
  bool breakdown        = false;
  //! relative residual estimate after every inner iteration
  std::vector<double> history;
};

/*!
 * \brief Restarted GMRES with optional right preconditioning.
 *
 * Modified Gram-Schmidt with one reorthogonalization pass when the new
 * basis vector loses more than 1e-8 of its norm to cancellation. The
 * reported residual is the true residual recomputed at every restart.
 */
solve_report gmres(linear_map const &apply_a, Eigen::VectorXd const &b,
                   Eigen::VectorXd &x, gmres_options const &options,
                   linear_map const &precond = nullptr);

//! block diagonal inverse built from dense blocks, factorized once
class block_jacobi
{
public:
  block_jacobi() = default;
  explicit block_jacobi(std::vector<Eigen::MatrixXd> const &blocks);

  Eigen::VectorXd apply(Eigen::VectorXd const &r) const;
  linear_map as_map() const
  {
    return [this](Eigen::VectorXd const &r) { return apply(r); };
  }
  int num_blocks() const { return static_cast<int>(factors_.size()); }

private:
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> factors_;
  std::vector<Eigen::Index> offsets_;
};

} // namespace sparsekin
