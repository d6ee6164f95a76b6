#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include "sparsekin/hiergrid.hpp"
#include "sparsekin/kronops.hpp"

#include <Eigen/Dense>

namespace oracle
{
//! visits the Galerkin matrix of a separable operator restricted to the
//! active set, entry by entry from the Kronecker definition
template<typename Sink>
void for_each_entry(sparsekin::separable_operator const &op, sparsekin::adaptive_grid const &grid,
                    Sink &&sink)
{
  int const d  = grid.dims();
  int const p  = grid.degree() + 1;
  int const bs = grid.block_size();
  std::vector<int> li(d), lj(d);
  for (auto const &term : op.terms())
    for (int er = 0; er < grid.size(); er++)
      for (int ec = 0; ec < grid.size(); ec++)
      {
        auto const kr = grid.key(er), kc = grid.key(ec);
        for (int a = 0; a < bs; a++)
          for (int b = 0; b < bs; b++)
          {
            int ra = a, rb = b;
            for (int m = d - 1; m >= 0; m--)
            {
              li[m] = ra % p;
              lj[m] = rb % p;
              ra /= p;
              rb /= p;
            }
            double v = term.scale;
            for (int m = 0; m < d && v != 0; m++)
            {
              auto const &f = term.factors[m];
              int const row = kr.block(m) * p + li[m];
              int const col = kc.block(m) * p + lj[m];
              if (f)
                v *= f->values()(row, col);
              else
                v *= (row == col) ? 1.0 : 0.0;
            }
            if (v != 0)
              sink(grid.offset(er) + a, grid.offset(ec) + b, v);
          }
      }
}

inline Eigen::MatrixXd dense_matrix(sparsekin::separable_operator const &op,
                                    sparsekin::adaptive_grid const &grid)
{
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(grid.num_dofs(), grid.num_dofs());
  for_each_entry(op, grid, [&](Eigen::Index r, Eigen::Index c, double v) { out(r, c) += v; });
  return out;
}

//! the same product without storing the matrix
inline Eigen::VectorXd dense_apply(sparsekin::separable_operator const &op,
                                   sparsekin::adaptive_grid const &grid, Eigen::VectorXd const &x)
{
  Eigen::VectorXd y = Eigen::VectorXd::Zero(grid.num_dofs());
  for_each_entry(op, grid, [&](Eigen::Index r, Eigen::Index c, double v) { y(r) += v * x(c); });
  return y;
}
} // namespace oracle
