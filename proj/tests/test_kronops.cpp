#include "oracles.hpp"

#include "sparsekin/kronops.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace sparsekin;

namespace
{
factor_ptr random_factor(int degree, int level, std::mt19937 &rng, double density = 0.5)
{
  int const n = (degree + 1) << level;
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++)
      m(i, j) = (std::abs(u(rng)) < density) ? u(rng) : 0.0;
  return make_factor(m, degree);
}

// sparse grid plus a random sprinkle of deeper elements
adaptive_grid random_grid(std::vector<int> const &caps, int degree, std::mt19937 &rng)
{
  int const d = static_cast<int>(caps.size());
  adaptive_grid g = sparse_index_set(1, d, degree, caps);
  adaptive_grid const full = full_index_set(caps, degree);
  std::bernoulli_distribution coin(0.3);
  for (int i = 0; i < full.size(); i++)
    if (coin(rng))
      g.insert(full.key(i));
  return g;
}

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937 &rng)
{
  std::normal_distribution<double> u;
  Eigen::VectorXd x(n);
  for (auto &v : x)
    v = u(rng);
  return x;
}
} // namespace

TEST_CASE("kron apply equals the dense restricted Kronecker product", "[kronops]")
{
  std::mt19937 rng(11);
  for (int d = 2; d <= 3; d++)
    for (int degree : {0, 1, 2})
    {
      std::vector<int> caps(d, 2);
      separable_operator op(degree, caps);
      for (int t = 0; t < 3; t++)
      {
        std::vector<factor_ptr> f(d);
        for (int m = 0; m < d; m++)
          if (m != t % d)
            f[m] = random_factor(degree, 2, rng);
        op.add_term(0.5 + t, f);
      }
      op.add_identity(-2.0);
      for (auto const &grid : {full_index_set(caps, degree), random_grid(caps, degree, rng)})
      {
        Eigen::VectorXd const x = random_vector(grid.num_dofs(), rng);
        Eigen::MatrixXd const a = oracle::dense_matrix(op, grid);
        Eigen::VectorXd const y = apply(op, grid, x);
        REQUIRE((y - a * x).norm() <= 1e-12 * (1 + (a * x).norm()));

        auto const blocks = compose_block_diag(op, grid);
        REQUIRE(static_cast<int>(blocks.size()) == grid.size());
        for (int e = 0; e < grid.size(); e++)
        {
          auto const bs = grid.block_size();
          REQUIRE((blocks[e] - a.block(grid.offset(e), grid.offset(e), bs, bs)).norm() < 1e-12);
        }
      }
    }
}

TEST_CASE("single-dimension factors with mixed levels", "[kronops]")
{
  std::mt19937 rng(5);
  std::vector<int> caps{3, 1, 2};
  separable_operator op(1, caps);
  op.add_term(1.0, {random_factor(1, 3, rng), nullptr, nullptr});
  op.add_term(1.0, {nullptr, random_factor(1, 1, rng), random_factor(1, 2, rng)});
  adaptive_grid const g = random_grid(caps, 1, rng);
  Eigen::VectorXd const x = random_vector(g.num_dofs(), rng);
  REQUIRE((apply(op, g, x) - oracle::dense_apply(op, g, x)).norm() < 1e-12 * (1 + x.norm()));
}

TEST_CASE("simplify and add_scaled preserve the operator", "[kronops]")
{
  std::mt19937 rng(3);
  std::vector<int> caps{2, 2};
  separable_operator op(1, caps);
  op.add_term(1.0, {random_factor(1, 2, rng), nullptr});
  op.add_term(2.0, {random_factor(1, 2, rng), nullptr});
  op.add_term(-1.0, {nullptr, random_factor(1, 2, rng)});
  op.add_term(1.0, {random_factor(1, 2, rng), random_factor(1, 2, rng)});
  op.add_identity(0.5);
  op.add_identity(0.25);
  adaptive_grid const g = full_index_set(caps, 1);
  Eigen::VectorXd const x = random_vector(g.num_dofs(), rng);
  Eigen::VectorXd const before = apply(op, g, x);

  separable_operator s = op;
  s.simplify();
  REQUIRE(s.terms().size() == 4); // one per dimension, one tensor term, one identity
  REQUIRE((apply(s, g, x) - before).norm() < 1e-12 * before.norm());

  separable_operator const c = add_scaled(op, s, 2.0, -1.0);
  REQUIRE((apply(c, g, x) - before).norm() < 1e-12 * before.norm());
}

TEST_CASE("factor validation", "[kronops]")
{
  std::mt19937 rng(1);
  separable_operator op(1, {2, 2});
  REQUIRE_THROWS(op.add_term(1.0, {random_factor(1, 1, rng), nullptr}));
  REQUIRE_THROWS(op.add_term(1.0, {nullptr}));
  REQUIRE_THROWS(make_factor(Eigen::MatrixXd::Zero(5, 5), 1));

  // round-off entries are dropped from the sparsity pattern
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
  m(0, 3) = 1e-17;
  auto const f = make_factor(m, 1);
  REQUIRE(f->column(1).size() == 1);
  REQUIRE(f->values()(0, 3) == 0.0);
}
