#include "oracles.hpp"

#include "sparsekin/chu1d.hpp"
#include "sparsekin/vplb.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace sparsekin;
using Catch::Approx;

namespace
{
double const pi = std::numbers::pi;

dg_function_1d project_dg(std::function<double(double)> const &f, interval dom, int level, int k)
{
  Eigen::VectorXd const c = legendre_project(f, k, level, dom, 8);
  dg_function_1d out;
  out.domain = dom;
  out.level  = level;
  out.degree = k;
  out.coeffs.assign(c.data(), c.data() + c.size());
  return out;
}

phase_space_config slab(std::vector<int> caps, int degree = 2)
{
  phase_space_config c;
  c.geom     = geometry::slab_1x3v;
  c.x_domain = {-1, 1};
  c.v_domain = {interval{-6, 6}, interval{-6, 6}, interval{-6, 6}};
  c.degree   = degree;
  c.caps     = std::move(caps);
  return c;
}

std::vector<separable_function> bumpy_state()
{
  separable_function a;
  a.factors = {[](double x) { return 1 + 0.3 * std::cos(pi * x); },
               [](double v) { return maxwellian_1d(0.5, 1.2, v); },
               [](double v) { return maxwellian_1d(0, 0.9, v); },
               [](double v) { return maxwellian_1d(0, 1.1, v); }};
  separable_function b;
  b.weight  = 0.2;
  b.factors = {[](double x) { return 1 + std::sin(pi * x); },
               [](double v) { return maxwellian_1d(-1.5, 0.5, v); },
               [](double v) { return maxwellian_1d(0, 1, v); },
               [](double v) { return maxwellian_1d(0, 1, v); }};
  return {a, b};
}
} // namespace

TEST_CASE("Maxwellians are normalized", "[vplb]")
{
  quadrature const q = gauss_legendre(40);
  double s = 0;
  for (size_t i = 0; i < q.nodes.size(); i++)
    s += 8 * q.weights[i] * maxwellian_1d(0.3, 1.5, 8 * q.nodes[i]);
  REQUIRE(s == Approx(1.0).margin(1e-10));
  REQUIRE(maxwellian(2, {0, 0, 0}, 1, {0, 0, 0}) == Approx(2 * std::pow(2 * pi, -1.5)));
  REQUIRE_THROWS(maxwellian(-1, {0, 0, 0}, 1, {0, 0, 0}));
}

TEST_CASE("derive_fluid recovers polynomial fluid fields", "[vplb]")
{
  interval const dom{-1, 1};
  auto n     = [](double x) { return 1 + 0.3 * x; };
  double const u = 0.4, theta = 1.7;
  fluid_fields f;
  f.rho0    = project_dg(n, dom, 3, 2);
  f.rho1[0] = project_dg([&](double x) { return n(x) * u; }, dom, 3, 2);
  f.rho1[1] = project_dg([](double) { return 0.0; }, dom, 3, 2);
  f.rho1[2] = f.rho1[1];
  f.rho2    = project_dg([&](double x) { return 0.5 * n(x) * (u * u + 3 * theta); }, dom, 3, 2);
  derive_fluid(f, true);
  for (double x : {-0.9, -0.1, 0.5, 0.99})
  {
    REQUIRE(f.n.eval(x) == Approx(n(x)).margin(1e-12));
    REQUIRE(f.u[0].eval(x) == Approx(u).margin(1e-12));
    REQUIRE(f.theta.eval(x) == Approx(theta).margin(1e-12));
  }

  // a negative density names the offending cell
  fluid_fields g = f;
  g.rho0 = project_dg([](double x) { return (x > 0.25 && x < 0.5) ? -1.0 : 1.0; }, dom, 3, 2);
  try
  {
    derive_fluid(g, true);
    FAIL("expected an exception");
  }
  catch (std::runtime_error const &e)
  {
    REQUIRE(std::string(e.what()).find("spatial cell 5") != std::string::npos);
  }
}

TEST_CASE("Poisson solve against the analytic field", "[vplb]")
{
  // -phi'' = eps cos(x/2) on (-2 pi, 2 pi): E = 2 eps sin(x/2), E_pot = 4 pi eps^2
  double const eps = 1e-2;
  interval const dom{-2 * pi, 2 * pi};
  double prev = 0;
  for (int level = 4; level <= 7; level++)
  {
    periodic_poisson const solver(dom, level, 2);
    auto const e = solver.solve(project_dg([&](double x) { return 1 + eps * std::cos(0.5 * x); }, dom, level, 2));
    double const h = e.cell_width();
    double err = 0;
    for (size_t c = 0; c < e.e.size(); c++)
    {
      double const a = dom.lo + c * h, b = a + h;
      double const mean = -4 * eps * (std::cos(0.5 * b) - std::cos(0.5 * a)) / h;
      err = std::max(err, std::abs(e.e[c] - mean));
    }
    REQUIRE(err < 0.05 * eps);
    double const epot_err = std::abs(potential_energy(e) - 4 * pi * eps * eps);
    if (level > 4)
      REQUIRE(prev / epot_err > 3.5);
    prev = epot_err;
  }
  electric_field zero;
  zero.domain = dom;
  zero.e.assign(8, 0.0);
  REQUIRE(potential_energy(zero) == 0.0);
}

TEST_CASE("Vlasov operator conserves number and streaming is dissipative", "[vplb]")
{
  vplb_model const model(slab({3, 2, 2, 2}));
  adaptive_grid const grid = full_index_set({3, 2, 2, 2}, 2);
  Eigen::VectorXd const f = model.project_separable(grid, bumpy_state());
  fluid_fields const fl   = model.compute_moments(grid, f);
  auto const field        = model.solve_poisson(fl.rho0);
  Eigen::VectorXd const r = apply(model.assemble_vlasov(field), grid, f);
  REQUIRE(std::abs(model.raw_moments(grid, r).rho0.integral()) < 1e-14);

  // E = 0 leaves the streaming operator, whose symmetric part is PSD
  vplb_model const small(slab({2, 1, 1, 1}, 1));
  adaptive_grid const g2 = full_index_set({2, 1, 1, 1}, 1);
  electric_field zero;
  zero.domain = {-1, 1};
  zero.e.assign(4, 0.0);
  zero.phi.assign(4, 0.0);
  Eigen::MatrixXd const a = oracle::dense_matrix(small.assemble_vlasov(zero), g2);
  Eigen::MatrixXd const sym = -0.5 * (a + a.transpose());
  REQUIRE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues().maxCoeff() < 1e-12);
}

TEST_CASE("Lenard-Bernstein operator conserves number, momentum and energy", "[vplb]")
{
  SECTION("slab")
  {
    vplb_model const model(slab({3, 2, 2, 2}));
    adaptive_grid const grid = full_index_set({3, 2, 2, 2}, 2);
    Eigen::VectorXd const f = model.project_separable(grid, bumpy_state());
    auto const raw0 = model.raw_moments(grid, f);
    Eigen::VectorXd const r = apply(model.assemble_lb(model.compute_moments(grid, f)), grid, f);
    auto const raw = model.raw_moments(grid, r);
    REQUIRE(std::abs(raw.rho0.integral()) < 1e-13);
    REQUIRE(std::abs(raw.rho1[0].integral()) < 1e-13);
    REQUIRE(std::abs(raw.rho2.integral()) < 1e-12 * raw0.rho2.integral());
    // cellwise: every x cell conserves on its own
    for (double v : raw.rho2.coeffs)
      REQUIRE(std::abs(v) < 1e-12);
  }
  SECTION("0x3v")
  {
    phase_space_config c;
    c.geom     = geometry::relaxation_0x3v;
    c.v_domain = {interval{-8, 12}, interval{-8, 12}, interval{-8, 12}};
    c.caps     = {3, 3, 3};
    vplb_model const model(c);
    adaptive_grid const grid = sparse_index_set(5, 3, 2, {3, 3, 3});
    std::vector<separable_function> terms;
    for (int b = 0; b < 3; b++)
    {
      separable_function s;
      s.weight = 1.0 / 3;
      for (int m = 0; m < 3; m++)
      {
        double const u = m == b ? 3 : 0;
        s.factors.push_back([u](double v) { return maxwellian_1d(u, 0.5, v); });
      }
      terms.push_back(s);
    }
    Eigen::VectorXd const f = model.project_separable(grid, terms);
    Eigen::VectorXd const r = apply(model.assemble_lb(model.compute_moments(grid, f)), grid, f);
    auto const raw = model.raw_moments(grid, r);
    REQUIRE(std::abs(raw.rho0.coeffs[0]) < 1e-13);
    for (int m = 0; m < 3; m++)
      REQUIRE(std::abs(raw.rho1[m].coeffs[0]) < 1e-13);
    REQUIRE(std::abs(raw.rho2.coeffs[0]) < 1e-12);
  }
}

TEST_CASE("Maxwellians are near equilibria of the collision operator", "[vplb]")
{
  double prev = 0;
  for (int level = 3; level <= 4; level++)
  {
    phase_space_config c;
    c.geom     = geometry::relaxation_0x3v;
    c.v_domain = {interval{-8, 8}, interval{-8, 8}, interval{-8, 8}};
    c.caps     = {level, level, level};
    c.projection_points = 10;
    vplb_model const model(c);
    adaptive_grid const grid = full_index_set(c.caps, 2);
    separable_function s;
    for (int m = 0; m < 3; m++)
      s.factors.push_back([](double v) { return maxwellian_1d(0.5, 2.0, v); });
    Eigen::VectorXd const f = model.project_separable(grid, {s});
    double const res = apply(model.assemble_lb(model.compute_moments(grid, f)), grid, f).norm();
    INFO("level " << level << " residual " << res);
    if (level > 3)
      REQUIRE(res < 0.5 * prev);
    prev = res;
  }
}

TEST_CASE("transverse marginals of a product state", "[vplb]")
{
  phase_space_config pc = slab({3, 3, 2, 2});
  pc.projection_points  = 8;
  vplb_model const model(pc);
  adaptive_grid const grid = full_index_set({3, 3, 2, 2}, 2);
  auto g = [](double x) { return 1 + 0.3 * std::cos(pi * x); };
  auto h = [](double v) { return maxwellian_1d(0.5, 1.2, v); };
  double const theta = 0.8;
  separable_function s;
  s.factors = {g, h, [=](double v) { return maxwellian_1d(0, theta, v); },
               [=](double v) { return maxwellian_1d(0, theta, v); }};
  Eigen::VectorXd const f = model.project_separable(grid, {s});

  // transverse weights of the projected level-2 Gaussian; only the fourth
  // moment differs from the continuous 6 theta^2
  dg_function_1d const pm = project_dg([=](double v) { return maxwellian_1d(0, theta, v); }, {-6, 6}, 2, 2);
  quadrature const q = gauss_legendre(6);
  double mom[5] = {};
  for (int cell = 0; cell < pm.num_cells(); cell++)
    for (size_t i = 0; i < q.nodes.size(); i++)
    {
      double const v = -6 + pm.cell_width() * (cell + 0.5 + 0.5 * q.nodes[i]);
      for (int p = 0; p <= 4; p++)
        mom[p] += 0.5 * pm.cell_width() * q.weights[i] * std::pow(v, p) * pm.eval_cell(cell, q.nodes[i]);
    }
  REQUIRE(mom[2] / mom[0] == Approx(theta).epsilon(1e-3));
  double const w[] = {mom[0] * mom[0], 2 * mom[2] * mom[0], 2 * mom[4] * mom[0]};
  transverse_weight const tw[] = {transverse_weight::g1, transverse_weight::g2, transverse_weight::g3};
  for (int i = 0; i < 3; i++)
  {
    Eigen::MatrixXd const m = model.transverse_marginal(grid, f, tw[i]);
    legendre_field_2d const ref = project_2d([&](double x, double v) { return w[i] * g(x) * h(v); },
                                             interval{-1, 1}, interval{-6, 6}, 3, 3, 2, 8);
    REQUIRE((m - ref.coeffs).norm() < 1e-12 * ref.coeffs.norm());
  }
}

TEST_CASE("projection helpers agree", "[vplb]")
{
  vplb_model const model(slab({2, 2, 1, 1}));
  adaptive_grid const grid = sparse_index_set(3, 4, 2, {2, 2, 1, 1});
  auto const terms = bumpy_state();
  Eigen::VectorXd const a = model.project_separable(grid, terms);
  Eigen::VectorXd const b = model.project_function(grid, [&](std::vector<double> const &p) {
    double s = 0;
    for (auto const &t : terms)
    {
      double v = t.weight;
      for (int m = 0; m < 4; m++)
        v *= t.factors[m](p[m]);
      s += v;
    }
    return s;
  });
  REQUIRE((a - b).norm() < 1e-12 * a.norm());

  // point evaluation of a full grid projection approximates the function
  adaptive_grid const full = full_index_set({3, 3, 3, 3}, 2);
  vplb_model const fine(slab({3, 3, 3, 3}));
  Eigen::VectorXd const f = fine.project_separable(full, terms);
  std::vector<double> const pt{0.1, 0.3, -0.2, 0.4};
  double exact = 0;
  for (auto const &t : terms)
  {
    double v = t.weight;
    for (int m = 0; m < 4; m++)
      v *= t.factors[m](pt[m]);
    exact += v;
  }
  REQUIRE(fine.evaluate(full, f, pt) == Approx(exact).epsilon(2e-2));
}
