#pragma once

#include "sparsekin/hiergrid.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <unordered_set>
#include <vector>

namespace sparsekin
{
/*!
 * \brief Dense 1D factor in wavelet coordinates at a cap level, plus the
 *        (k+1)x(k+1) block sparsity pattern used during application.
 *
 * Entries below 1e-15 times the largest magnitude are round-off from the
 * change of basis and are set to zero.
 */
class kron_factor
{
public:
  kron_factor(Eigen::MatrixXd values, int degree);

  Eigen::MatrixXd const &values() const { return values_; }
  int degree() const { return degree_; }
  int num_blocks() const { return num_blocks_; }

  struct coupling
  {
    int row_block;
    int offset; // into block storage, row-major (k+1)x(k+1)
  };
  //! structurally nonzero row blocks of column block c
  std::vector<coupling> const &column(int c) const { return columns_[c]; }
  double const *block_data(int offset) const { return blocks_.data() + offset; }
  //! diagonal block (b, b), row-major
  Eigen::MatrixXd diagonal_block(int b) const;

private:
  Eigen::MatrixXd values_;
  int degree_;
  int num_blocks_;
  std::vector<std::vector<coupling>> columns_;
  std::vector<double> blocks_;
};

using factor_ptr = std::shared_ptr<kron_factor const>;

factor_ptr make_factor(Eigen::MatrixXd values, int degree);

//! scale times the Kronecker product of its factors; nullptr means identity
struct kron_term
{
  double scale = 1.0;
  std::vector<factor_ptr> factors;
};

class separable_operator
{
public:
  separable_operator() = default;
  separable_operator(int degree, std::vector<int> caps);

  int dims() const { return static_cast<int>(caps_.size()); }
  int degree() const { return degree_; }
  std::vector<int> const &caps() const { return caps_; }
  std::vector<kron_term> const &terms() const { return terms_; }

  void add_term(double scale, std::vector<factor_ptr> factors);
  void add_identity(double scale);

  //! merges all terms acting on a single dimension into one factor per
  //! dimension and all identity terms into one
  void simplify();

private:
  int degree_ = 0;
  std::vector<int> caps_;
  std::vector<kron_term> terms_;
};

//! alpha * a + beta * b
separable_operator add_scaled(separable_operator const &a,
                              separable_operator const &b, double alpha,
                              double beta);

/*!
 * \brief Applies separable operators on one grid with the Galerkin
 *        restriction to the active set.
 *
 * For every term the non-identity dimensions are swept one at a time.
 * Intermediate tuples carry row indices in the swept dimensions and column
 * indices elsewhere; a tuple is kept only when its identity and swept
 * components match some active row, so nothing outside the active space
 * survives the last sweep. The grid must outlive the applier.
 */
class kron_applier
{
public:
  explicit kron_applier(adaptive_grid const &grid);

  adaptive_grid const &grid() const { return grid_; }

  Eigen::VectorXd apply(separable_operator const &op,
                        Eigen::VectorXd const &x) const;
  //! y += alpha * op(x)
  void apply_add(separable_operator const &op, Eigen::VectorXd const &x,
                 double alpha, Eigen::VectorXd &y) const;

  //! per element diagonal block of the Galerkin matrix
  std::vector<Eigen::MatrixXd> block_diagonal(separable_operator const &op) const;

private:
  void apply_term(kron_term const &term, Eigen::VectorXd const &x, double alpha,
                  Eigen::VectorXd &y) const;
  std::unordered_set<std::uint64_t> const &projection(std::uint64_t mask) const;
  void check(separable_operator const &op) const;

  adaptive_grid const &grid_;
  mutable std::map<std::uint64_t, std::unordered_set<std::uint64_t>> projections_;
};

Eigen::VectorXd apply(separable_operator const &op, adaptive_grid const &grid,
                      Eigen::VectorXd const &x);

std::vector<Eigen::MatrixXd> compose_block_diag(separable_operator const &op,
                                                adaptive_grid const &grid);

} // namespace sparsekin
