#include "sparsekin/basis1d.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace sparsekin;
using Catch::Approx;

namespace
{
// brute-force integral of a(y) b(y) on (0, 1) with 8-point Gauss on 2^7 cells
double inner(std::function<double(double)> const &a, std::function<double(double)> const &b)
{
  quadrature const q = gauss_legendre(8);
  int const n = 128;
  double s = 0;
  for (int c = 0; c < n; c++)
    for (size_t i = 0; i < q.nodes.size(); i++)
    {
      double const y = (c + 0.5 * (q.nodes[i] + 1)) / n;
      s += 0.5 / n * q.weights[i] * a(y) * b(y);
    }
  return s;
}

Eigen::MatrixXd dense(Eigen::SparseMatrix<double> const &m) { return Eigen::MatrixXd(m); }
} // namespace

TEST_CASE("gauss_legendre integrates polynomials of degree 2n-1", "[basis1d]")
{
  for (int n = 1; n <= 8; n++)
  {
    quadrature const q = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; p++)
    {
      double s = 0;
      for (int i = 0; i < n; i++)
        s += q.weights[i] * std::pow(q.nodes[i], p);
      double const exact = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
      REQUIRE(s == Approx(exact).margin(1e-14));
    }
  }
  REQUIRE_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("k = 2 mother wavelets match the closed form", "[basis1d]")
{
  auto const fam = get_wavelet_family(2);
  Eigen::MatrixXd expected(3, 3);
  expected << 1, -24, 30, 3, -16, 15, 4, -15, 12;
  double const scale[] = {std::sqrt(0.5) / 3, std::sqrt(1.5) / 2, std::sqrt(2.5) / 3};
  for (int i = 0; i < 3; i++)
    for (int j = 0; j < 3; j++)
      REQUIRE(fam->right_monomials()(i, j) == Approx(scale[i] * expected(i, j)).margin(1e-12));
  // parity phi_i(y) = (-1)^(i+k) phi_i(-y), i one based
  for (int i = 0; i < 3; i++)
    for (double y : {0.1, 0.37, 0.8})
      REQUIRE(fam->mother(i, -y) == Approx(std::pow(-1.0, i + 1 + 2) * fam->mother(i, y)).margin(1e-13));
}

TEST_CASE("mother wavelets have vanishing moments", "[basis1d]")
{
  for (int k = 0; k <= max_degree; k++)
  {
    auto const fam = get_wavelet_family(k);
    for (int i = 0; i < k + 1; i++)
      for (int j = 0; j <= i + k; j++)
      {
        // integral over (-1, 1) through the map y = 2s - 1
        double const m = 2 * inner([&](double s) { return fam->mother(i, 2 * s - 1); },
                                   [&](double s) { return std::pow(2 * s - 1, j); });
        REQUIRE(std::abs(m) < 1e-12);
      }
  }
}

TEST_CASE("hierarchical basis is orthonormal on (0,1)", "[basis1d]")
{
  for (int k = 0; k <= 2; k++)
  {
    auto const fam = get_wavelet_family(k);
    int const maxl = 4;
    struct fn
    {
      int l, j, i;
    };
    std::vector<fn> all;
    for (int l = 0; l <= maxl; l++)
      for (int j = 0; j < (l == 0 ? 1 : 1 << (l - 1)); j++)
        for (int i = 0; i <= k; i++)
          all.push_back({l, j, i});
    double worst = 0;
    for (size_t a = 0; a < all.size(); a++)
      for (size_t b = a; b < all.size(); b++)
      {
        double const g = inner(
            [&](double y) { return eval_wavelet(*fam, all[a].l, all[a].j, all[a].i, y); },
            [&](double y) { return eval_wavelet(*fam, all[b].l, all[b].j, all[b].i, y); });
        worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
      }
    REQUIRE(worst < 1e-12);
  }
}

TEST_CASE("eval_wavelet validates its index triple", "[basis1d]")
{
  auto const fam = get_wavelet_family(1);
  REQUIRE_THROWS_AS(eval_wavelet(*fam, 0, 1, 0, 0.5), std::out_of_range);
  REQUIRE_THROWS_AS(eval_wavelet(*fam, 2, 2, 0, 0.5), std::out_of_range);
  REQUIRE_THROWS_AS(eval_wavelet(*fam, 1, 0, 2, 0.5), std::out_of_range);
  // level 1 support is all of (0, 1), level 2 position 1 lives on (1/2, 1)
  REQUIRE(eval_wavelet(*fam, 2, 1, 0, 0.25) == 0.0);
}

TEST_CASE("block index round trip", "[basis1d]")
{
  for (int l = 0; l <= 10; l++)
    for (int j = 0; j < (l == 0 ? 1 : 1 << (l - 1)); j++)
    {
      int const b = block_index(l, j);
      REQUIRE(block_level(b) == l);
      REQUIRE(block_position(b) == j);
    }
}

TEST_CASE("transform is orthogonal and matches direct wavelet projection", "[basis1d]")
{
  for (int k = 0; k <= 2; k++)
    for (int level = 0; level <= 4; level++)
    {
      auto const t = build_transform(k, level);
      Eigen::MatrixXd const f = dense(t->forward);
      REQUIRE((f * f.transpose() - Eigen::MatrixXd::Identity(f.rows(), f.cols())).norm() < 1e-12);
    }
  // projection oracle: coefficient of g_{l,j}^i is the inner product with f
  int const k = 2, level = 3;
  auto fun = [](double y) { return std::exp(y) * std::sin(3 * y); };
  Eigen::VectorXd const w = wavelet_project(fun, k, level, interval{0, 1}, 10);
  auto const fam = get_wavelet_family(k);
  for (int l = 0; l <= level; l++)
    for (int j = 0; j < (l == 0 ? 1 : 1 << (l - 1)); j++)
      for (int i = 0; i <= k; i++)
      {
        double const ref = inner(fun, [&](double y) { return eval_wavelet(*fam, l, j, i, y); });
        REQUIRE(w(block_index(l, j) * (k + 1) + i) == Approx(ref).margin(1e-12));
      }
}

TEST_CASE("legendre projection reproduces polynomials", "[basis1d]")
{
  interval const dom{-2, 3};
  auto poly = [](double x) { return 1 - 2 * x + 0.5 * x * x; };
  Eigen::VectorXd const c = legendre_project(poly, 2, 3, dom);
  dg_function_1d f;
  f.domain = dom;
  f.level  = 3;
  f.degree = 2;
  f.coeffs.assign(c.data(), c.data() + c.size());
  for (double x : {-1.9, -0.3, 0.0, 1.7, 2.99})
    REQUIRE(f.eval(x) == Approx(poly(x)).margin(1e-12));
  // int_{-2}^{3} poly = 5 - (9 - 4) + (27 + 8) / 6
  REQUIRE(f.integral() == Approx(5 - 5 + 35.0 / 6).margin(1e-12));
  Eigen::VectorXd const m0 = legendre_moment(0, 2, 3, dom);
  REQUIRE(m0.dot(c) == Approx(35.0 / 6).margin(1e-12));
}

TEST_CASE("mass matrix is the identity in both bases", "[basis1d]")
{
  operator_spec s;
  s.kind = operator_kind::mass;
  auto const m = assemble_1d_operator(s, 2, 3, interval{-1, 4}, boundary_type::zero_flux);
  REQUIRE((m.values - Eigen::MatrixXd::Identity(m.rows(), m.rows())).norm() < 1e-12);
}

TEST_CASE("periodic flux form is consistent and kills constants", "[basis1d]")
{
  double const two_pi = 2 * std::numbers::pi;
  interval const dom{0, 1};
  operator_spec s;
  s.kind = operator_kind::flux_divergence;
  s.wind = [](double) { return 1.0; };
  double prev = 0;
  for (int level = 3; level <= 6; level++)
  {
    Eigen::MatrixXd const a = dense(assemble_legendre_operator(s, 2, level, dom, boundary_type::periodic));
    Eigen::VectorXd const one = legendre_project([](double) { return 1.0; }, 2, level, dom);
    REQUIRE((a * one).norm() < 1e-14 * a.norm());
    Eigen::VectorXd const w  = legendre_project([&](double x) { return std::sin(two_pi * x); }, 2, level, dom);
    Eigen::VectorXd const dw = legendre_project([&](double x) { return two_pi * std::cos(two_pi * x); }, 2, level, dom);
    double const err = (a * w - dw).norm();
    if (level > 3)
      REQUIRE(prev / err > 3.5); // at least O(h^2)
    prev = err;
  }
}

TEST_CASE("upwind advection with a constant wind is dissipative", "[basis1d]")
{
  for (double wind : {1.0, -2.0})
  {
    operator_spec s;
    s.kind = operator_kind::upwind_advection;
    s.wind = [wind](double) { return wind; };
    Eigen::MatrixXd const a = dense(assemble_legendre_operator(s, 2, 3, interval{-1, 1}, boundary_type::periodic));
    Eigen::MatrixXd const sym = 0.5 * (a + a.transpose());
    REQUIRE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues().maxCoeff() < 1e-12);
  }
}

TEST_CASE("jump penalty is symmetric positive semidefinite", "[basis1d]")
{
  operator_spec s;
  s.kind = operator_kind::jump_penalty;
  for (auto bc : {boundary_type::periodic, boundary_type::zero_flux})
  {
    Eigen::MatrixXd const j = dense(assemble_legendre_operator(s, 1, 3, interval{0, 2}, bc));
    REQUIRE((j - j.transpose()).norm() < 1e-13);
    REQUIRE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(j).eigenvalues().minCoeff() > -1e-12);
    Eigen::VectorXd const one = legendre_project([](double) { return 1.0; }, 1, 3, interval{0, 2});
    REQUIRE((j * one).norm() < 1e-12);
  }
}

TEST_CASE("LDG diffusion converges to the second derivative", "[basis1d]")
{
  double const pi = std::numbers::pi;
  interval const dom{0, 1};
  operator_spec s;
  s.kind = operator_kind::ldg_diffusion;
  double prev = 0;
  for (int level = 3; level <= 6; level++)
  {
    Eigen::MatrixXd const k = dense(assemble_legendre_operator(s, 2, level, dom, boundary_type::zero_flux));
    Eigen::VectorXd const w   = legendre_project([&](double x) { return std::cos(pi * x); }, 2, level, dom);
    Eigen::VectorXd const d2w = legendre_project([&](double x) { return -pi * pi * std::cos(pi * x); }, 2, level, dom);
    double const err = (k * w - d2w).norm();
    if (level > 3)
      REQUIRE(prev / err > 3.5);
    prev = err;
    // number conservation: the column sums against 1 vanish
    Eigen::VectorXd const m0 = legendre_moment(0, 2, level, dom);
    REQUIRE((m0.transpose() * k).norm() < 1e-14 * k.norm());
  }
}

TEST_CASE("1D Lenard-Bernstein operator conserves its moments", "[basis1d]")
{
  // C(w) = ((v - u) w + theta w')' with u, theta the moments of w
  interval const dom{-6, 6};
  int const k = 2, level = 4;
  auto op = [&](operator_kind kind, auto wind, auto pen, bool closure) {
    operator_spec s;
    s.kind              = kind;
    s.wind              = wind;
    s.penalty           = pen;
    s.dirichlet_closure = closure;
    return dense(assemble_legendre_operator(s, k, level, dom, boundary_type::zero_flux));
  };
  auto none = std::function<double(double)>{};
  Eigen::MatrixXd const f = op(operator_kind::flux_divergence, std::function<double(double)>([](double v) { return v; }),
                               std::function<double(double)>([](double v) { return -std::abs(v); }), false);
  Eigen::MatrixXd const c = op(operator_kind::flux_divergence, std::function<double(double)>([](double) { return 1.0; }), none, false);
  Eigen::MatrixXd const kd = op(operator_kind::ldg_diffusion, none, none, true);

  Eigen::VectorXd const w = legendre_project(
      [](double v) { return std::exp(-(v - 1) * (v - 1)) * (1 + 0.3 * std::sin(2 * v)); }, k, level, dom);
  Eigen::VectorXd const m0 = legendre_moment(0, k, level, dom);
  Eigen::VectorXd const m1 = legendre_moment(1, k, level, dom);
  Eigen::VectorXd const m2 = legendre_moment(2, k, level, dom);
  double const n = m0.dot(w), u = m1.dot(w) / n;
  double const theta = (m2.dot(w) - u * m1.dot(w)) / n;
  Eigen::VectorXd const r = f * w - u * (c * w) + theta * (kd * w);
  REQUIRE(std::abs(m0.dot(r)) < 1e-12);
  REQUIRE(std::abs(m1.dot(r)) < 1e-12);
  REQUIRE(std::abs(m2.dot(r)) < 1e-11);
}

TEST_CASE("multiply operators match quadrature", "[basis1d]")
{
  interval const dom{-3, 3};
  int const k = 2, level = 3;
  operator_spec s;
  s.kind = operator_kind::coordinate_multiply;
  Eigen::MatrixXd const mv = dense(assemble_legendre_operator(s, k, level, dom, boundary_type::zero_flux));
  s             = {};
  s.kind        = operator_kind::coefficient_multiply;
  s.coefficient = [](double v) { return std::abs(v); };
  s.breakpoints = {0.0};
  Eigen::MatrixXd const ma = dense(assemble_legendre_operator(s, k, level, dom, boundary_type::zero_flux));

  // (c w, g) with w = g = the same cell basis function, oracle by fine quadrature
  double const h = dom.length() / (1 << level);
  for (int cell : {0, 3, 4, 7})
    for (int i = 0; i <= k; i++)
    {
      auto phi = [&](double x) {
        double const lo = dom.lo + cell * h;
        if (x < lo || x > lo + h)
          return 0.0;
        return std::sqrt((2.0 * i + 1) / h) * legendre(i, 2 * (x - lo) / h - 1);
      };
      auto on_dom = [&](std::function<double(double)> c) {
        return dom.length() * inner([&](double y) { double x = dom.lo + dom.length() * y; return c(x) * phi(x); },
                                    [&](double y) { return phi(dom.lo + dom.length() * y); });
      };
      int const idx = cell * (k + 1) + i;
      REQUIRE(mv(idx, idx) == Approx(on_dom([](double x) { return x; })).margin(1e-10));
      REQUIRE(ma(idx, idx) == Approx(on_dom([](double x) { return std::abs(x); })).margin(1e-10));
    }
}

TEST_CASE("operator kinds print", "[basis1d]")
{
  REQUIRE(to_string(operator_kind::ldg_diffusion) == "ldg-diffusion");
}
