#include "sparsekin/chu1d.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace sparsekin
{
namespace
{
double basis_value(int i, double xi, double h)
{
  return std::sqrt((2.0 * i + 1) / h) * legendre(i, xi);
}

//! cell index and reference coordinate of y, the right end belongs to the last cell
std::pair<int, double> locate(interval const &dom, int level, double y)
{
  int const n    = 1 << level;
  double const h = dom.length() / n;
  int c = static_cast<int>(std::floor((y - dom.lo) / h));
  c     = std::clamp(c, 0, n - 1);
  return {c, 2.0 * (y - dom.lo - c * h) / h - 1.0};
}

dg_function_1d make_dg(interval domain, int level, int degree, Eigen::VectorXd const &c)
{
  dg_function_1d f;
  f.domain = domain;
  f.level  = level;
  f.degree = degree;
  f.coeffs.assign(c.data(), c.data() + c.size());
  return f;
}
} // namespace

double legendre_field_2d::eval(double x, double v) const
{
  int const p        = degree + 1;
  auto const [cx, xi] = locate(x_domain, x_level, x);
  auto const [cv, eta] = locate(v_domain, v_level, v);
  double const hx = x_domain.length() / (1 << x_level);
  double const hv = v_domain.length() / (1 << v_level);
  double s = 0;
  for (int i = 0; i < p; i++)
    for (int j = 0; j < p; j++)
      s += coeffs(cx * p + i, cv * p + j) * basis_value(i, xi, hx) * basis_value(j, eta, hv);
  return s;
}

legendre_field_2d project_2d(std::function<double(double, double)> const &f,
                             interval x_domain, interval v_domain, int x_level,
                             int v_level, int degree, int num_points)
{
  int const p  = degree + 1;
  int const nx = 1 << x_level, nv = 1 << v_level;
  double const hx = x_domain.length() / nx;
  double const hv = v_domain.length() / nv;
  quadrature const q = gauss_legendre(num_points > 0 ? num_points : degree + 3);
  int const nq = static_cast<int>(q.nodes.size());

  // basis values at the nodes
  Eigen::MatrixXd bx(p, nq), bv(p, nq);
  for (int i = 0; i < p; i++)
    for (int a = 0; a < nq; a++)
    {
      bx(i, a) = basis_value(i, q.nodes[a], hx) * 0.5 * hx * q.weights[a];
      bv(i, a) = basis_value(i, q.nodes[a], hv) * 0.5 * hv * q.weights[a];
    }

  legendre_field_2d out;
  out.x_domain = x_domain;
  out.v_domain = v_domain;
  out.x_level  = x_level;
  out.v_level  = v_level;
  out.degree   = degree;
  out.coeffs   = Eigen::MatrixXd::Zero(nx * p, nv * p);
  Eigen::MatrixXd vals(nq, nq);
  for (int cx = 0; cx < nx; cx++)
    for (int cv = 0; cv < nv; cv++)
    {
      for (int a = 0; a < nq; a++)
        for (int b = 0; b < nq; b++)
          vals(a, b) = f(x_domain.lo + cx * hx + 0.5 * hx * (q.nodes[a] + 1),
                         v_domain.lo + cv * hv + 0.5 * hv * (q.nodes[b] + 1));
      out.coeffs.block(cx * p, cv * p, p, p) = bx * vals * bv.transpose();
    }
  return out;
}

double l2_distance(legendre_field_2d const &a, legendre_field_2d const &b)
{
  if (a.x_domain.lo != b.x_domain.lo || a.x_domain.hi != b.x_domain.hi ||
      a.v_domain.lo != b.v_domain.lo || a.v_domain.hi != b.v_domain.hi)
    throw std::invalid_argument("l2_distance: domain mismatch");
  if (a.x_level == b.x_level && a.v_level == b.v_level && a.degree == b.degree)
    return (a.coeffs - b.coeffs).norm();

  int const lx = std::max(a.x_level, b.x_level);
  int const lv = std::max(a.v_level, b.v_level);
  int const nx = 1 << lx, nv = 1 << lv;
  double const hx = a.x_domain.length() / nx;
  double const hv = a.v_domain.length() / nv;
  quadrature const q = gauss_legendre(std::max(a.degree, b.degree) + 1);
  double s = 0;
  for (int cx = 0; cx < nx; cx++)
    for (int cv = 0; cv < nv; cv++)
      for (size_t i = 0; i < q.nodes.size(); i++)
        for (size_t j = 0; j < q.nodes.size(); j++)
        {
          double const x = a.x_domain.lo + cx * hx + 0.5 * hx * (q.nodes[i] + 1);
          double const v = a.v_domain.lo + cv * hv + 0.5 * hv * (q.nodes[j] + 1);
          double const d = a.eval(x, v) - b.eval(x, v);
          s += 0.25 * hx * hv * q.weights[i] * q.weights[j] * d * d;
        }
  return std::sqrt(s);
}

chu_solver::chu_solver(chu_config config) : config_(std::move(config))
{
  if (config_.degree < 0 || config_.x_level < 0 || config_.v_level < 0)
    throw std::invalid_argument("chu_solver: invalid discretization");
  if (config_.nu < 0)
    throw std::invalid_argument("chu_solver: negative collision frequency");
  p_ = config_.degree + 1;

  operator_spec s;
  s.kind     = operator_kind::flux_divergence;
  s.wind     = [](double) { return 1.0; };
  x_central_ = x_operator(s);
  v_central_ = v_operator(s);

  s        = {};
  s.kind   = operator_kind::jump_penalty;
  x_jump_  = x_operator(s);
  v_jump_  = v_operator(s);

  s        = {};
  s.kind   = operator_kind::coordinate_multiply;
  v_coord_ = v_operator(s);

  s             = {};
  s.kind        = operator_kind::coefficient_multiply;
  s.coefficient = [](double v) { return std::abs(v); };
  s.breakpoints = {0.0};
  v_abs_        = v_operator(s);

  s          = {};
  s.kind     = operator_kind::flux_divergence;
  s.wind     = [](double v) { return v; };
  s.penalty  = [](double v) { return -std::abs(v); };
  v_lb_flux_ = v_operator(s);

  s                   = {};
  s.kind              = operator_kind::ldg_diffusion;
  s.dirichlet_closure = config_.lb_boundary_closure;
  v_diffusion_        = v_operator(s);

  v_coord_t_     = v_coord_.transpose();
  v_abs_t_       = v_abs_.transpose();
  v_central_t_   = v_central_.transpose();
  v_jump_t_      = v_jump_.transpose();
  v_lb_flux_t_   = v_lb_flux_.transpose();
  v_diffusion_t_ = v_diffusion_.transpose();

  m0_ = legendre_moment(0, config_.degree, config_.v_level, config_.v_domain);
  m1_ = legendre_moment(1, config_.degree, config_.v_level, config_.v_domain);
  m2_ = legendre_moment(2, config_.degree, config_.v_level, config_.v_domain);

  poisson_ = periodic_poisson(config_.x_domain, config_.x_level, config_.degree);
}

chu_solver::sparse chu_solver::x_operator(operator_spec const &spec) const
{
  return assemble_legendre_operator(spec, config_.degree, config_.x_level, config_.x_domain,
                                    boundary_type::periodic);
}

chu_solver::sparse chu_solver::v_operator(operator_spec const &spec) const
{
  return assemble_legendre_operator(spec, config_.degree, config_.v_level, config_.v_domain,
                                    boundary_type::zero_flux);
}

legendre_field_2d chu_solver::wrap(Eigen::MatrixXd const &g) const
{
  legendre_field_2d f;
  f.x_domain = config_.x_domain;
  f.v_domain = config_.v_domain;
  f.x_level  = config_.x_level;
  f.v_level  = config_.v_level;
  f.degree   = config_.degree;
  f.coeffs   = g;
  return f;
}

chu_state chu_solver::project_maxwellian(
    std::function<std::array<double, 3>(double)> const &fluid, int num_points) const
{
  auto g = [&](double x, double v, int power) {
    auto const [n, u, theta] = fluid(x);
    double const g1 = n * maxwellian_1d(u, theta, v);
    if (power == 0)
      return g1;
    if (power == 1)
      return 2 * theta * g1;
    return 6 * theta * theta * g1;
  };
  auto proj = [&](int power) {
    return project_2d([&](double x, double v) { return g(x, v, power); }, config_.x_domain,
                      config_.v_domain, config_.x_level, config_.v_level, config_.degree,
                      num_points)
        .coeffs;
  };
  return {proj(0), proj(1), proj(2)};
}

fluid_fields chu_solver::moments(chu_state const &state) const
{
  int const lx = config_.x_level, k = config_.degree;
  Eigen::VectorXd const zero = Eigen::VectorXd::Zero(state.g1.rows());
  fluid_fields f;
  f.rho0    = make_dg(config_.x_domain, lx, k, state.g1 * m0_);
  f.rho1[0] = make_dg(config_.x_domain, lx, k, state.g1 * m1_);
  f.rho1[1] = make_dg(config_.x_domain, lx, k, zero);
  f.rho1[2] = make_dg(config_.x_domain, lx, k, zero);
  f.rho2    = make_dg(config_.x_domain, lx, k, 0.5 * (state.g1 * m2_ + state.g2 * m0_));
  derive_fluid(f, true);
  return f;
}

electric_field chu_solver::field(chu_state const &state) const
{
  return poisson_.solve(make_dg(config_.x_domain, config_.x_level, config_.degree,
                                state.g1 * m0_));
}

chu_invariants chu_solver::invariants(chu_state const &state) const
{
  Eigen::VectorXd const xm = legendre_moment(0, config_.degree, config_.x_level, config_.x_domain);
  chu_invariants out;
  out.mass      = xm.dot(state.g1 * m0_);
  out.momentum  = xm.dot(state.g1 * m1_);
  out.kinetic   = 0.5 * xm.dot(state.g1 * m2_ + state.g2 * m0_);
  out.potential = potential_energy(field(state));
  return out;
}

Eigen::MatrixXd chu_solver::apply_vlasov(electric_field const &field,
                                         Eigen::MatrixXd const &g) const
{
  dg_function_1d const e     = field.as_dg(config_.degree);
  dg_function_1d const e_abs = field.as_dg(config_.degree, true);
  operator_spec s;
  s.kind           = operator_kind::coefficient_multiply;
  s.dg_coefficient = &e;
  sparse const m_e = x_operator(s);
  s.dg_coefficient = &e_abs;
  sparse const m_eabs = x_operator(s);

  Eigen::MatrixXd y = (x_central_ * g) * v_coord_t_;
  y += (x_jump_ * g) * v_abs_t_;
  y += (m_e * g) * v_central_t_;
  y += (m_eabs * g) * v_jump_t_;
  return y;
}

Eigen::MatrixXd chu_solver::apply_collision(fluid_fields const &fluid,
                                            Eigen::MatrixXd const &g) const
{
  return collision(multipliers(fluid), g);
}

chu_solver::lb_multipliers chu_solver::multipliers(fluid_fields const &fluid) const
{
  operator_spec s;
  s.kind           = operator_kind::coefficient_multiply;
  s.dg_coefficient = &fluid.theta;
  lb_multipliers m;
  m.theta          = x_operator(s);
  s.dg_coefficient = &fluid.u[0];
  m.u              = x_operator(s);
  return m;
}

Eigen::MatrixXd chu_solver::collision(lb_multipliers const &m, Eigen::MatrixXd const &g) const
{
  Eigen::MatrixXd y = g * v_lb_flux_t_;
  y += (m.theta * g) * v_diffusion_t_;
  y -= (m.u * g) * v_central_t_;
  return y;
}

Eigen::MatrixXd chu_solver::implicit_solve(fluid_fields const &fluid, double c, double alpha,
                                           Eigen::MatrixXd const &b, gmres_options const &gmres_opts,
                                           bool precondition, chu_step_report &report) const
{
  Eigen::Index const rows = b.rows(), cols = b.cols();
  lb_multipliers const mult = multipliers(fluid);
  auto apply_a = [&](Eigen::VectorXd const &xv) -> Eigen::VectorXd {
    Eigen::Map<Eigen::MatrixXd const> x(xv.data(), rows, cols);
    Eigen::MatrixXd y = (1 + c * alpha) * x - c * collision(mult, x);
    return Eigen::Map<Eigen::VectorXd>(y.data(), y.size());
  };

  linear_map precond;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lus;
  if (precondition)
  {
    Eigen::MatrixXd const m_theta(mult.theta);
    Eigen::MatrixXd const m_u(mult.u);
    Eigen::MatrixXd const f(v_lb_flux_), kd(v_diffusion_), vc(v_central_);

    int const p  = p_;
    int const nx = 1 << config_.x_level, nv = 1 << config_.v_level;
    lus.reserve(std::size_t(nx) * nv);
    // element dofs ordered i + p j, block = kron(B, A) for Y = A X B^T
    auto kron = [p](Eigen::MatrixXd const &bv, Eigen::MatrixXd const &ax) {
      Eigen::MatrixXd out(p * p, p * p);
      for (int j = 0; j < p; j++)
        for (int jj = 0; jj < p; jj++)
          out.block(j * p, jj * p, p, p) = bv(j, jj) * ax;
      return out;
    };
    Eigen::MatrixXd const ix = Eigen::MatrixXd::Identity(p, p);
    for (int cv = 0; cv < nv; cv++)
      for (int cx = 0; cx < nx; cx++)
      {
        Eigen::MatrixXd blk = kron(f.block(cv * p, cv * p, p, p), ix) +
                              kron(kd.block(cv * p, cv * p, p, p), m_theta.block(cx * p, cx * p, p, p)) -
                              kron(vc.block(cv * p, cv * p, p, p), m_u.block(cx * p, cx * p, p, p));
        blk = (1 + c * alpha) * Eigen::MatrixXd::Identity(p * p, p * p) - c * blk;
        lus.emplace_back(blk);
        if (!(lus.back().rcond() > 1e-14))
          throw std::runtime_error("chu_solver: singular preconditioner block");
      }
    precond = [&, p, nx, nv](Eigen::VectorXd const &r) -> Eigen::VectorXd {
      Eigen::VectorXd z(r.size());
      Eigen::VectorXd loc(p * p);
      for (int cv = 0; cv < nv; cv++)
        for (int cx = 0; cx < nx; cx++)
        {
          for (int j = 0; j < p; j++)
            for (int i = 0; i < p; i++)
              loc(i + p * j) = r((cx * p + i) + rows * (cv * p + j));
          Eigen::VectorXd const s = lus[std::size_t(cv) * nx + cx].solve(loc);
          for (int j = 0; j < p; j++)
            for (int i = 0; i < p; i++)
              z((cx * p + i) + rows * (cv * p + j)) = s(i + p * j);
        }
      return z;
    };
  }

  Eigen::VectorXd const bv = Eigen::Map<Eigen::VectorXd const>(b.data(), b.size());
  Eigen::VectorXd x = bv;
  solve_report const sr = gmres(apply_a, bv, x, gmres_opts, precond);
  report.gmres_iterations += sr.iterations;
  report.converged = report.converged && sr.converged;
  report.worst_residual = std::max(report.worst_residual, sr.final_residual);
  return Eigen::Map<Eigen::MatrixXd>(x.data(), rows, cols);
}

chu_step_report chu_solver::step(chu_state &state, double dt, gmres_options const &gmres_opts,
                                 bool precondition) const
{
  chu_step_report report;
  double const nu = config_.nu;
  bool const g3   = config_.evolve_g3;

  auto transport = [&](chu_state const &s) {
    electric_field const e = field(s);
    chu_state out;
    out.g1 = s.g1 - dt * apply_vlasov(e, s.g1);
    out.g2 = s.g2 - dt * apply_vlasov(e, s.g2);
    if (g3)
      out.g3 = s.g3 - dt * apply_vlasov(e, s.g3);
    return out;
  };
  auto collide = [&](chu_state &s, double c) {
    if (nu == 0)
      return;
    fluid_fields const fl = moments(s);
    sparse const m_theta = multipliers(fl).theta;
    s.g1 = implicit_solve(fl, c, 0, s.g1, gmres_opts, precondition, report);
    s.g2 = implicit_solve(fl, c, 2, s.g2 + 4 * c * (m_theta * s.g1), gmres_opts, precondition,
                          report);
    if (g3)
      s.g3 = implicit_solve(fl, c, 4, s.g3 + 12 * c * (m_theta * s.g2), gmres_opts,
                            precondition, report);
  };

  chu_state s1 = transport(state);
  collide(s1, dt * nu);

  chu_state s2 = transport(s1);
  s2.g1 = 0.5 * state.g1 + 0.5 * s2.g1;
  s2.g2 = 0.5 * state.g2 + 0.5 * s2.g2;
  if (g3)
    s2.g3 = 0.5 * state.g3 + 0.5 * s2.g3;
  collide(s2, 0.5 * dt * nu);

  if (!g3)
    s2.g3 = state.g3;
  state = std::move(s2);
  return report;
}

void chu_solver::write_snapshot(std::ostream &os, Eigen::MatrixXd const &g) const
{
  legendre_field_2d const f = wrap(g);
  int const nx = (1 << config_.x_level) + 1, nv = (1 << config_.v_level) + 1;
  os << "x,v_x,value\n";
  os.precision(17);
  for (int i = 0; i < nx; i++)
    for (int j = 0; j < nv; j++)
    {
      double const x = config_.x_domain.lo + config_.x_domain.length() * i / (nx - 1);
      double const v = config_.v_domain.lo + config_.v_domain.length() * j / (nv - 1);
      os << x << ',' << v << ',' << f.eval(x, v) << '\n';
    }
}

} // namespace sparsekin
