#include "sparsekin/vplb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sparsekin
{
void phase_space_config::validate() const
{
  if (static_cast<int>(caps.size()) != dims())
    throw std::invalid_argument("phase_space_config: need one cap per dimension");
  if (nu < 0)
    throw std::invalid_argument("phase_space_config: negative collision frequency");
  if (degree < 0 || degree > max_degree)
    throw std::invalid_argument("phase_space_config: unsupported degree");
  if (geom == geometry::slab_1x3v && !(x_domain.length() > 0))
    throw std::invalid_argument("phase_space_config: empty x domain");
  for (auto const &v : v_domain)
    if (!(v.length() > 0))
      throw std::invalid_argument("phase_space_config: empty velocity domain");
}

double maxwellian(double n, std::array<double, 3> const &u, double theta,
                  std::array<double, 3> const &v)
{
  if (!(n > 0) || !(theta > 0))
    throw std::invalid_argument("maxwellian: density and temperature must be positive");
  double r2 = 0;
  for (int m = 0; m < 3; m++)
    r2 += (v[m] - u[m]) * (v[m] - u[m]);
  return n * std::pow(2 * std::numbers::pi * theta, -1.5) * std::exp(-r2 / (2 * theta));
}

double maxwellian_1d(double u, double theta, double v)
{
  return std::exp(-(v - u) * (v - u) / (2 * theta)) / std::sqrt(2 * std::numbers::pi * theta);
}

namespace
{
dg_function_1d make_dg(interval domain, int level, int degree)
{
  dg_function_1d f;
  f.domain = domain;
  f.level  = level;
  f.degree = degree;
  f.coeffs.assign(std::size_t(degree + 1) << level, 0.0);
  return f;
}

double basis_value(int i, double xi, double h)
{
  return std::sqrt((2.0 * i + 1) / h) * legendre(i, xi);
}
} // namespace

void derive_fluid(fluid_fields &fields, bool slab)
{
  int const k    = fields.rho0.degree;
  int const p    = k + 1;
  int const nc   = fields.rho0.num_cells();
  double const h = fields.rho0.cell_width();
  quadrature const q = gauss_legendre(k + 3);

  fields.n = fields.rho0;
  for (int m = 0; m < 3; m++)
    fields.u[m] = make_dg(fields.rho0.domain, fields.rho0.level, k);
  fields.theta = make_dg(fields.rho0.domain, fields.rho0.level, k);

  auto fail = [&](char const *what, int c, double x, double value) {
    std::ostringstream os;
    os << "nonpositive " << what << " " << value << " in spatial cell " << c
       << " at x = " << x;
    throw std::runtime_error(os.str());
  };

  int const ncomp = slab ? 1 : 3;
  for (int c = 0; c < nc; c++)
  {
    double const xl = fields.rho0.domain.lo + c * h;
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(p, p);
    for (size_t iq = 0; iq < q.nodes.size(); iq++)
    {
      double const nv = fields.n.eval_cell(c, q.nodes[iq]);
      if (!(nv > 0))
        fail("density", c, xl + 0.5 * h * (q.nodes[iq] + 1), nv);
      for (int i = 0; i < p; i++)
        for (int j = 0; j < p; j++)
          mass(i, j) += 0.5 * h * q.weights[iq] * nv * basis_value(i, q.nodes[iq], h) *
                        basis_value(j, q.nodes[iq], h);
    }
    Eigen::LDLT<Eigen::MatrixXd> const solver(mass);

    Eigen::VectorXd rhs_theta(p);
    for (int i = 0; i < p; i++)
      rhs_theta(i) = 2.0 * fields.rho2.coeffs[c * p + i];
    for (int m = 0; m < ncomp; m++)
    {
      Eigen::VectorXd r(p);
      for (int i = 0; i < p; i++)
        r(i) = fields.rho1[m].coeffs[c * p + i];
      Eigen::VectorXd const u = solver.solve(r);
      for (int i = 0; i < p; i++)
        fields.u[m].coeffs[c * p + i] = u(i);
      // subtract (u rho1, phi_i)
      for (size_t iq = 0; iq < q.nodes.size(); iq++)
      {
        double const prod = fields.u[m].eval_cell(c, q.nodes[iq]) *
                            fields.rho1[m].eval_cell(c, q.nodes[iq]);
        for (int i = 0; i < p; i++)
          rhs_theta(i) -= 0.5 * h * q.weights[iq] * prod * basis_value(i, q.nodes[iq], h);
      }
    }
    Eigen::VectorXd const theta = solver.solve(rhs_theta) / 3.0;
    for (int i = 0; i < p; i++)
      fields.theta.coeffs[c * p + i] = theta(i);
    for (size_t iq = 0; iq < q.nodes.size(); iq++)
    {
      double const tv = fields.theta.eval_cell(c, q.nodes[iq]);
      if (!(tv > 0))
        fail("temperature", c, xl + 0.5 * h * (q.nodes[iq] + 1), tv);
    }
  }
}

dg_function_1d electric_field::as_dg(int degree, bool absolute) const
{
  int const level = static_cast<int>(std::lround(std::log2(double(e.size()))));
  dg_function_1d f = make_dg(domain, level, degree);
  double const h   = cell_width();
  for (size_t c = 0; c < e.size(); c++)
    f.coeffs[c * (degree + 1)] = (absolute ? std::abs(e[c]) : e[c]) * std::sqrt(h);
  return f;
}

double potential_energy(electric_field const &field)
{
  double const h = field.cell_width();
  double s       = 0;
  for (double v : field.e)
    s += v * v * h;
  return 0.5 * s;
}

periodic_poisson::periodic_poisson(interval domain, int level, int degree)
    : domain_(domain), level_(level), degree_(degree)
{
  // periodic P1 stiffness with a zero-mean multiplier
  int const nn   = 1 << level;
  double const h = domain.length() / nn;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nn + 1, nn + 1);
  for (int c = 0; c < nn; c++)
  {
    int const i = c, j = (c + 1) % nn;
    a(i, i) += 1 / h;
    a(j, j) += 1 / h;
    a(i, j) -= 1 / h;
    a(j, i) -= 1 / h;
  }
  for (int i = 0; i < nn; i++)
  {
    a(i, nn) = h;
    a(nn, i) = h;
  }
  lu_.compute(a);
}

electric_field periodic_poisson::solve(dg_function_1d const &density) const
{
  if (density.domain.lo != domain_.lo || density.domain.hi != domain_.hi)
    throw std::invalid_argument("periodic_poisson: density on a different domain");
  int const nn       = 1 << level_;
  interval const dom = domain_;
  double const h     = dom.length() / nn;
  double const ne    = density.integral() / dom.length();

  quadrature const q = gauss_legendre(std::max(degree_, density.degree) + 3);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nn + 1);
  for (int c = 0; c < nn; c++)
  {
    for (size_t iq = 0; iq < q.nodes.size(); iq++)
    {
      double const xi = q.nodes[iq];
      double const x  = dom.lo + c * h + 0.5 * h * (xi + 1);
      double const s  = 0.5 * h * q.weights[iq] * (density.eval(x) - ne);
      rhs(c) += s * 0.5 * (1 - xi);
      rhs((c + 1) % nn) += s * 0.5 * (1 + xi);
    }
  }
  Eigen::VectorXd const sol = lu_.solve(rhs);

  electric_field out;
  out.domain = dom;
  out.phi.assign(sol.data(), sol.data() + nn);
  out.e.resize(nn);
  for (int c = 0; c < nn; c++)
    out.e[c] = -(out.phi[(c + 1) % nn] - out.phi[c]) / h;
  return out;
}

vplb_model::vplb_model(phase_space_config config) : config_(std::move(config))
{
  config_.validate();
  int const k = config_.degree;

  moments_.resize(3);
  for (int m = 0; m < 3; m++)
  {
    int const d = config_.vdim(m);
    for (int power = 0; power <= 4; power++)
    {
      Eigen::VectorXd mv = wavelet_moment(power, k, config_.caps[d], config_.v_domain[m]);
      // vanishing moments make these exact zeros; drop the round-off
      double const drop = 1e-13 * mv.cwiseAbs().maxCoeff();
      for (auto &v : mv)
        if (std::abs(v) <= drop)
          v = 0;
      moments_[m].push_back(std::move(mv));
    }
  }

  auto abs_v = [](double v) { return std::abs(v); };
  for (int m = 0; m < 3; m++)
  {
    int const d = config_.vdim(m);
    operator_spec s;
    s.kind    = operator_kind::coordinate_multiply;
    v_coord_[m] = factor(s, d);

    s             = {};
    s.kind        = operator_kind::coefficient_multiply;
    s.coefficient = abs_v;
    s.breakpoints = {0.0};
    v_abs_[m]     = factor(s, d);

    s         = {};
    s.kind    = operator_kind::flux_divergence;
    s.wind    = [](double) { return 1.0; };
    v_central_[m] = factor(s, d);

    s         = {};
    s.kind    = operator_kind::jump_penalty;
    v_jump_[m] = factor(s, d);

    s         = {};
    s.kind    = operator_kind::flux_divergence;
    s.wind    = [](double v) { return v; };
    s.penalty = [](double v) { return -std::abs(v); };
    v_lb_flux_[m] = factor(s, d);

    s                   = {};
    s.kind              = operator_kind::ldg_diffusion;
    s.dirichlet_closure = config_.lb_boundary_closure;
    v_diffusion_[m]     = factor(s, d);
  }

  if (config_.geom == geometry::slab_1x3v)
  {
    operator_spec s;
    s.kind     = operator_kind::flux_divergence;
    s.wind     = [](double) { return 1.0; };
    x_central_ = factor(s, 0);
    s          = {};
    s.kind     = operator_kind::jump_penalty;
    x_jump_    = factor(s, 0);

    poisson_ = periodic_poisson(config_.x_domain, config_.caps[0], k);
  }
}

interval vplb_model::domain(int dim) const
{
  if (config_.geom == geometry::slab_1x3v)
    return dim == 0 ? config_.x_domain : config_.v_domain[dim - 1];
  return config_.v_domain[dim];
}

factor_ptr vplb_model::factor(operator_spec const &spec, int dim) const
{
  bool const is_x = config_.geom == geometry::slab_1x3v && dim == 0;
  auto const op   = assemble_1d_operator(spec, config_.degree, config_.caps[dim], domain(dim),
                                         is_x ? boundary_type::periodic : boundary_type::zero_flux);
  return make_factor(op.values, config_.degree);
}

Eigen::VectorXd const &vplb_model::velocity_moment(int m, int power) const
{
  return moments_.at(m).at(power);
}

fluid_fields vplb_model::raw_moments(adaptive_grid const &grid,
                                     Eigen::VectorXd const &state) const
{
  if (grid.caps() != config_.caps || grid.degree() != config_.degree)
    throw std::invalid_argument("raw_moments: grid does not match the model");
  if (state.size() != grid.num_dofs())
    throw std::invalid_argument("raw_moments: state not aligned with grid");

  int const p    = config_.degree + 1;
  bool const slab = config_.geom == geometry::slab_1x3v;
  int const xlev = slab ? config_.caps[0] : 0;
  int const nx   = p << xlev;
  int const px   = slab ? p : 1; // size of the x factor of a block
  int const pv   = p * p * p;

  // accumulators in wavelet coordinates: rho0, rho1 (3), rho2
  std::array<Eigen::VectorXd, 5> acc;
  for (auto &a : acc)
    a = Eigen::VectorXd::Zero(slab ? nx : 1);

  std::array<std::array<Eigen::VectorXd, 3>, 3> w; // [dim][power]
  for (int e = 0; e < grid.size(); e++)
  {
    element_key const key = grid.key(e);
    bool zero             = false;
    for (int m = 0; m < 3 && !zero; m++)
    {
      int const b = key.block(config_.vdim(m));
      bool any    = false;
      for (int power = 0; power <= 2; power++)
      {
        w[m][power] = moments_[m][power].segment(b * p, p);
        any         = any || w[m][power].squaredNorm() > 0;
      }
      zero = !any;
    }
    if (zero)
      continue;

    double const *f = state.data() + grid.offset(e);
    int const xb    = slab ? key.block(0) : 0;
    for (int ix = 0; ix < px; ix++)
    {
      double s0 = 0, s1[3] = {0, 0, 0}, s2 = 0;
      for (int a = 0; a < p; a++)
        for (int b = 0; b < p; b++)
          for (int c = 0; c < p; c++)
          {
            double const v = f[ix * pv + (a * p + b) * p + c];
            if (v == 0.0)
              continue;
            double const w00 = w[0][0](a), w10 = w[1][0](b), w20 = w[2][0](c);
            s0 += v * w00 * w10 * w20;
            s1[0] += v * w[0][1](a) * w10 * w20;
            s1[1] += v * w00 * w[1][1](b) * w20;
            s1[2] += v * w00 * w10 * w[2][1](c);
            s2 += v * (w[0][2](a) * w10 * w20 + w00 * w[1][2](b) * w20 + w00 * w10 * w[2][2](c));
          }
      int const row = slab ? xb * p + ix : 0;
      acc[0](row) += s0;
      acc[1](row) += s1[0];
      acc[2](row) += s1[1];
      acc[3](row) += s1[2];
      acc[4](row) += 0.5 * s2;
    }
  }

  fluid_fields out;
  interval const xdom = slab ? config_.x_domain : interval{0.0, 1.0};
  auto to_dg = [&](Eigen::VectorXd const &wav) {
    dg_function_1d f = make_dg(xdom, xlev, config_.degree);
    if (slab)
    {
      Eigen::VectorXd const leg = build_transform(config_.degree, xlev)->to_legendre(wav);
      for (int i = 0; i < nx; i++)
        f.coeffs[i] = leg(i);
    }
    else
      f.coeffs[0] = wav(0);
    return f;
  };
  out.rho0 = to_dg(acc[0]);
  for (int m = 0; m < 3; m++)
    out.rho1[m] = to_dg(acc[1 + m]);
  out.rho2 = to_dg(acc[4]);
  return out;
}

fluid_fields vplb_model::compute_moments(adaptive_grid const &grid,
                                         Eigen::VectorXd const &state) const
{
  fluid_fields f = raw_moments(grid, state);
  derive_fluid(f, config_.geom == geometry::slab_1x3v);
  return f;
}

electric_field vplb_model::solve_poisson(dg_function_1d const &density) const
{
  if (config_.geom != geometry::slab_1x3v)
    throw std::logic_error("solve_poisson: no spatial dimension");
  return poisson_.solve(density);
}

separable_operator vplb_model::assemble_vlasov(electric_field const &field) const
{
  if (config_.geom != geometry::slab_1x3v)
    throw std::logic_error("assemble_vlasov: no spatial dimension");
  int const k = config_.degree;
  separable_operator op(k, config_.caps);
  op.add_term(1.0, {x_central_, v_coord_[0], nullptr, nullptr});
  op.add_term(1.0, {x_jump_, v_abs_[0], nullptr, nullptr});

  dg_function_1d const e     = field.as_dg(k);
  dg_function_1d const e_abs = field.as_dg(k, true);
  operator_spec s;
  s.kind           = operator_kind::coefficient_multiply;
  s.dg_coefficient = &e;
  op.add_term(1.0, {factor(s, 0), v_central_[0], nullptr, nullptr});
  s.dg_coefficient = &e_abs;
  op.add_term(1.0, {factor(s, 0), v_jump_[0], nullptr, nullptr});
  return op;
}

separable_operator vplb_model::assemble_lb(fluid_fields const &fluid) const
{
  int const k = config_.degree;
  separable_operator op(k, config_.caps);
  if (config_.geom == geometry::relaxation_0x3v)
  {
    double const theta = fluid.theta.coeffs.at(0);
    if (!(theta > 0))
      throw std::runtime_error("assemble_lb: nonpositive temperature");
    for (int m = 0; m < 3; m++)
    {
      double const u = fluid.u[m].coeffs.at(0);
      Eigen::MatrixXd a = v_lb_flux_[m]->values() - u * v_central_[m]->values() +
                          theta * v_diffusion_[m]->values();
      std::vector<factor_ptr> f(3);
      f[m] = make_factor(std::move(a), k);
      op.add_term(1.0, std::move(f));
    }
    return op;
  }

  for (int i = 0; i < fluid.theta.num_cells(); i++)
    if (!(fluid.theta.eval_cell(i, 0.0) > 0))
      throw std::runtime_error("assemble_lb: nonpositive temperature in cell " + std::to_string(i));

  operator_spec s;
  s.kind           = operator_kind::coefficient_multiply;
  s.dg_coefficient = &fluid.theta;
  factor_ptr const m_theta = factor(s, 0);
  s.dg_coefficient         = &fluid.u[0];
  factor_ptr const m_u     = factor(s, 0);

  for (int m = 0; m < 3; m++)
  {
    std::vector<factor_ptr> flux(4), diff(4);
    flux[m + 1] = v_lb_flux_[m];
    diff[0]     = m_theta;
    diff[m + 1] = v_diffusion_[m];
    op.add_term(1.0, std::move(flux));
    op.add_term(1.0, std::move(diff));
  }
  op.add_term(-1.0, {m_u, v_central_[0], nullptr, nullptr});
  op.simplify();
  return op;
}

Eigen::VectorXd
vplb_model::project_separable(adaptive_grid const &grid,
                              std::vector<separable_function> const &terms) const
{
  int const d = config_.dims();
  int const p = config_.degree + 1;
  std::vector<std::vector<Eigen::VectorXd>> proj(terms.size());
  for (size_t t = 0; t < terms.size(); t++)
  {
    if (static_cast<int>(terms[t].factors.size()) != d)
      throw std::invalid_argument("project_separable: one factor per dimension required");
    for (int m = 0; m < d; m++)
      proj[t].push_back(wavelet_project(terms[t].factors[m], config_.degree,
                                        config_.caps[m], domain(m),
                                        config_.projection_points));
  }

  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.num_dofs());
  for (int e = 0; e < grid.size(); e++)
  {
    element_key const key = grid.key(e);
    for (size_t t = 0; t < terms.size(); t++)
    {
      Eigen::VectorXd acc = Eigen::VectorXd::Constant(1, terms[t].weight);
      for (int m = 0; m < d; m++)
      {
        auto const seg = proj[t][m].segment(key.block(m) * p, p);
        Eigen::VectorXd next(acc.size() * p);
        for (Eigen::Index i = 0; i < acc.size(); i++)
          next.segment(i * p, p) = acc(i) * seg;
        acc = std::move(next);
      }
      out.segment(grid.offset(e), grid.block_size()) += acc;
    }
  }
  return out;
}

Eigen::VectorXd vplb_model::project_function(
    adaptive_grid const &grid,
    std::function<double(std::vector<double> const &)> const &f) const
{
  int const d = config_.dims();
  int const k = config_.degree;
  int const p = k + 1;
  auto const family = get_wavelet_family(k);
  quadrature const q = gauss_legendre(k + 3);

  struct sample
  {
    double x, w;
    std::vector<double> g;
  };
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.num_dofs());
  for (int e = 0; e < grid.size(); e++)
  {
    element_key const key = grid.key(e);
    std::vector<std::vector<sample>> lists(d);
    for (int m = 0; m < d; m++)
    {
      interval const dom = domain(m);
      int const cap      = config_.caps[m];
      int const lev = key.level(m), pos = key.position(m);
      int first = 0, count = 1 << cap;
      if (lev > 0)
      {
        count = 1 << (cap - lev + 1);
        first = pos * count;
      }
      double const hr = 1.0 / (1 << cap);
      for (int c = first; c < first + count; c++)
        for (size_t iq = 0; iq < q.nodes.size(); iq++)
        {
          double const y = (c + 0.5 * (q.nodes[iq] + 1)) * hr;
          sample s{dom.lo + y * dom.length(), 0.5 * hr * dom.length() * q.weights[iq], {}};
          for (int i = 0; i < p; i++)
            s.g.push_back(eval_wavelet(*family, lev, pos, i, y) / std::sqrt(dom.length()));
          lists[m].push_back(std::move(s));
        }
    }
    std::vector<double> point(d);
    std::vector<size_t> idx(d, 0);
    double *block = out.data() + grid.offset(e);
    while (true)
    {
      double w = 1;
      for (int m = 0; m < d; m++)
      {
        point[m] = lists[m][idx[m]].x;
        w *= lists[m][idx[m]].w;
      }
      double const fv = w * f(point);
      for (int l = 0; l < grid.block_size(); l++)
      {
        double v = fv;
        int r    = l;
        for (int m = d - 1; m >= 0; m--)
        {
          v *= lists[m][idx[m]].g[r % p];
          r /= p;
        }
        block[l] += v;
      }
      int m = d - 1;
      for (; m >= 0; m--)
      {
        if (++idx[m] < lists[m].size())
          break;
        idx[m] = 0;
      }
      if (m < 0)
        break;
    }
  }
  return out;
}

Eigen::MatrixXd vplb_model::transverse_marginal(adaptive_grid const &grid,
                                                Eigen::VectorXd const &state,
                                                transverse_weight weight) const
{
  if (config_.geom != geometry::slab_1x3v)
    throw std::logic_error("transverse_marginal: needs the slab geometry");
  int const p  = config_.degree + 1;
  int const nx = p << config_.caps[0];
  int const nv = p << config_.caps[1];
  int const hi = weight == transverse_weight::g2 ? 2 : 4;

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(nx, nv);
  for (int e = 0; e < grid.size(); e++)
  {
    element_key const key = grid.key(e);
    Eigen::VectorXd const y0 = moments_[1][0].segment(key.block(2) * p, p);
    Eigen::VectorXd const z0 = moments_[2][0].segment(key.block(3) * p, p);
    Eigen::MatrixXd wyz;
    if (weight == transverse_weight::g1)
      wyz = y0 * z0.transpose();
    else
    {
      Eigen::VectorXd const yh = moments_[1][hi].segment(key.block(2) * p, p);
      Eigen::VectorXd const zh = moments_[2][hi].segment(key.block(3) * p, p);
      wyz = yh * z0.transpose() + y0 * zh.transpose();
    }
    if (wyz.cwiseAbs().maxCoeff() == 0.0)
      continue;
    double const *f = state.data() + grid.offset(e);
    for (int ix = 0; ix < p; ix++)
      for (int iv = 0; iv < p; iv++)
      {
        double s = 0;
        for (int a = 0; a < p; a++)
          for (int b = 0; b < p; b++)
            s += f[((ix * p + iv) * p + a) * p + b] * wyz(a, b);
        acc(key.block(0) * p + ix, key.block(1) * p + iv) += s;
      }
  }
  Eigen::MatrixXd const tx(build_transform(config_.degree, config_.caps[0])->forward);
  Eigen::MatrixXd const tv(build_transform(config_.degree, config_.caps[1])->forward);
  return tx.transpose() * acc * tv;
}

double vplb_model::evaluate(adaptive_grid const &grid, Eigen::VectorXd const &state,
                            std::vector<double> const &point) const
{
  int const d = config_.dims();
  int const p = config_.degree + 1;
  auto const family = get_wavelet_family(config_.degree);
  double sum = 0;
  std::vector<std::vector<double>> g(d, std::vector<double>(p));
  for (int e = 0; e < grid.size(); e++)
  {
    element_key const key = grid.key(e);
    bool zero = false;
    for (int m = 0; m < d && !zero; m++)
    {
      interval const dom = domain(m);
      double const y = std::clamp((point[m] - dom.lo) / dom.length(), 0.0, 1.0);
      zero = true;
      for (int i = 0; i < p; i++)
      {
        g[m][i] = eval_wavelet(*family, key.level(m), key.position(m), i, y) / std::sqrt(dom.length());
        zero    = zero && g[m][i] == 0.0;
      }
    }
    if (zero)
      continue;
    double const *f = state.data() + grid.offset(e);
    for (int l = 0; l < grid.block_size(); l++)
    {
      double v = f[l];
      int r    = l;
      for (int m = d - 1; m >= 0; m--)
      {
        v *= g[m][r % p];
        r /= p;
      }
      sum += v;
    }
  }
  return sum;
}

} // namespace sparsekin
