#include "sparsekin/krylov.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsekin
{
solve_report gmres(linear_map const &apply_a, Eigen::VectorXd const &b,
                   Eigen::VectorXd &x, gmres_options const &options,
                   linear_map const &precond)
{
  if (options.tolerance <= 0 || options.restart < 1)
    throw std::invalid_argument("gmres: invalid options");
  if (x.size() != b.size())
    x = Eigen::VectorXd::Zero(b.size());

  solve_report report;
  double const bnorm = b.norm();
  if (bnorm == 0.0)
  {
    x.setZero();
    report.converged = true;
    return report;
  }

  int const m = options.restart;
  std::vector<Eigen::VectorXd> v;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);
  std::vector<Eigen::VectorXd> z_store;

  Eigen::VectorXd r = b - apply_a(x);
  double rnorm      = r.norm();
  report.final_residual = rnorm / bnorm;
  if (report.final_residual <= options.tolerance)
  {
    report.converged = true;
    return report;
  }

  while (report.iterations < options.max_iterations)
  {
    v.clear();
    z_store.clear();
    v.push_back(r / rnorm);
    g.setZero();
    g(0)  = rnorm;
    int j = 0;
    for (; j < m && report.iterations < options.max_iterations; j++)
    {
      Eigen::VectorXd w;
      if (precond)
      {
        z_store.push_back(precond(v[j]));
        w = apply_a(z_store[j]);
      }
      else
        w = apply_a(v[j]);
      report.iterations++;

      double const before = w.norm();
      for (int i = 0; i <= j; i++)
      {
        h(i, j) = v[i].dot(w);
        w -= h(i, j) * v[i];
      }
      double after = w.norm();
      if (after < 1e-8 * before)
      {
        for (int i = 0; i <= j; i++)
        {
          double const c = v[i].dot(w);
          h(i, j) += c;
          w -= c * v[i];
        }
        after = w.norm();
      }
      h(j + 1, j) = after;

      for (int i = 0; i < j; i++)
      {
        double const t = cs(i) * h(i, j) + sn(i) * h(i + 1, j);
        h(i + 1, j)    = -sn(i) * h(i, j) + cs(i) * h(i + 1, j);
        h(i, j)        = t;
      }
      double const denom = std::hypot(h(j, j), h(j + 1, j));
      cs(j)     = h(j, j) / denom;
      sn(j)     = h(j + 1, j) / denom;
      h(j, j)   = denom;
      h(j + 1, j) = 0.0;
      g(j + 1)  = -sn(j) * g(j);
      g(j)      = cs(j) * g(j);

      double const estimate = std::abs(g(j + 1)) / bnorm;
      report.history.push_back(estimate);
      if (after == 0.0)
      {
        report.breakdown = true;
        j++;
        break;
      }
      v.push_back(w / after);
      if (estimate <= options.tolerance)
      {
        j++;
        break;
      }
    }

    // least squares update with the j columns built in this cycle
    Eigen::VectorXd y = h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    Eigen::VectorXd update = Eigen::VectorXd::Zero(b.size());
    for (int i = 0; i < j; i++)
      update += y(i) * (precond ? z_store[i] : v[i]);
    x += update;

    r     = b - apply_a(x);
    rnorm = r.norm();
    report.final_residual = rnorm / bnorm;
    if (report.final_residual <= options.tolerance)
    {
      report.converged = true;
      return report;
    }
    if (report.breakdown)
      return report;
    report.restarts++;
  }
  return report;
}

block_jacobi::block_jacobi(std::vector<Eigen::MatrixXd> const &blocks)
{
  Eigen::Index offset = 0;
  factors_.reserve(blocks.size());
  for (auto const &b : blocks)
  {
    if (b.rows() != b.cols())
      throw std::invalid_argument("block_jacobi: blocks must be square");
    factors_.emplace_back(b);
    double const rc = factors_.back().rcond();
    if (!(rc > 1e-14))
      throw std::runtime_error("block_jacobi: singular diagonal block");
    offsets_.push_back(offset);
    offset += b.rows();
  }
}

Eigen::VectorXd block_jacobi::apply(Eigen::VectorXd const &r) const
{
  Eigen::VectorXd z(r.size());
  for (size_t i = 0; i < factors_.size(); i++)
  {
    auto const n = factors_[i].rows();
    z.segment(offsets_[i], n) = factors_[i].solve(r.segment(offsets_[i], n));
  }
  return z;
}

} // namespace sparsekin
