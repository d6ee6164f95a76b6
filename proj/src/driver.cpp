#include "sparsekin/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sparsekin
{
namespace
{
std::string trim(std::string const &s)
{
  auto const b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return {};
  auto const e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(std::string const &key, std::string const &value)
{
  std::size_t pos = 0;
  double v        = 0;
  try
  {
    v = std::stod(value, &pos);
  }
  catch (std::exception const &)
  {
    pos = 0;
  }
  if (pos == 0 || pos != value.size())
    throw std::invalid_argument("bad numeric value for " + key + ": '" + value + "'");
  return v;
}

int to_int(std::string const &key, std::string const &value)
{
  double const v = to_double(key, value);
  if (v != std::floor(v))
    throw std::invalid_argument("bad integer value for " + key + ": '" + value + "'");
  return static_cast<int>(v);
}

bool to_bool(std::string const &key, std::string const &value)
{
  if (value == "1" || value == "true" || value == "yes" || value == "on")
    return true;
  if (value == "0" || value == "false" || value == "no" || value == "off")
    return false;
  throw std::invalid_argument("bad boolean value for " + key + ": '" + value + "'");
}

std::vector<double> to_list(std::string const &key, std::string const &value)
{
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(to_double(key, trim(item)));
  return out;
}

std::string step_name(std::string const &prefix, int step, std::string const &ext)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d", step);
  return prefix + buf + ext;
}

//! integral of M_1(v; u, theta)^2 over (a, b)
double maxwellian_square_integral(double u, double theta, double a, double b)
{
  double const s = std::sqrt(theta);
  return std::sqrt(std::numbers::pi * theta) / 2 * (std::erf((b - u) / s) - std::erf((a - u) / s)) /
         (2 * std::numbers::pi * theta);
}
} // namespace

problem_kind parse_problem(std::string const &name)
{
  if (name == "relaxation")
    return problem_kind::relaxation;
  if (name == "riemann")
    return problem_kind::riemann;
  if (name == "landau")
    return problem_kind::landau;
  if (name == "chu-riemann")
    return problem_kind::chu_riemann;
  if (name == "chu-landau")
    return problem_kind::chu_landau;
  throw std::invalid_argument("unknown problem '" + name + "'");
}

grid_kind parse_grid(std::string const &name)
{
  if (name == "full")
    return grid_kind::full;
  if (name == "sparse")
    return grid_kind::sparse;
  if (name == "mixed")
    return grid_kind::mixed;
  if (name == "adaptive")
    return grid_kind::adaptive;
  throw std::invalid_argument("unknown grid '" + name + "'");
}

std::string to_string(problem_kind p)
{
  switch (p)
  {
  case problem_kind::relaxation: return "relaxation";
  case problem_kind::riemann: return "riemann";
  case problem_kind::landau: return "landau";
  case problem_kind::chu_riemann: return "chu-riemann";
  case problem_kind::chu_landau: return "chu-landau";
  }
  return "?";
}

std::string to_string(grid_kind g)
{
  switch (g)
  {
  case grid_kind::full: return "full";
  case grid_kind::sparse: return "sparse";
  case grid_kind::mixed: return "mixed";
  case grid_kind::adaptive: return "adaptive";
  }
  return "?";
}

std::vector<int> run_config::level_caps() const
{
  if (!caps.empty())
    return caps;
  if (problem == problem_kind::relaxation)
    return {lv, lv, lv};
  return {lx, lv, lv, lv};
}

void run_config::derive_time_step()
{
  if (dt == 0 && (problem == problem_kind::landau || problem == problem_kind::chu_landau))
    dt = 0.75 / 30 * x_domain.length() / (1 << lx);
}

void run_config::validate() const
{
  if (!(dt > 0))
    throw std::invalid_argument("run_config: dt must be positive");
  if (t_final < 0)
    throw std::invalid_argument("run_config: negative final time");
  if (nu < 0)
    throw std::invalid_argument("run_config: negative collision frequency");
  if (degree < 0 || degree > max_degree)
    throw std::invalid_argument("run_config: polynomial degree out of range");
  if (grid == grid_kind::adaptive && !(tau > 0))
    throw std::invalid_argument("run_config: adaptive grids need tau > 0");
  if (tau > 0 && !(mu > 0 && mu < 1))
    throw std::invalid_argument("run_config: coarsening factor must lie in (0, 1)");
  auto const c = level_caps();
  std::size_t const dims = is_chu() ? 2 : (problem == problem_kind::relaxation ? 3 : 4);
  if (!is_chu() && c.size() != dims)
    throw std::invalid_argument("run_config: caps need one entry per dimension");
  for (int l : c)
    if (l < 0 || l > max_level)
      throw std::invalid_argument("run_config: level out of range");
  if (problem == problem_kind::relaxation && grid == grid_kind::mixed)
    throw std::invalid_argument("run_config: the relaxation problem has no spatial level");
}

run_config preset(problem_kind problem, double nu)
{
  run_config c;
  c.problem = problem;
  double const pi = std::numbers::pi;
  switch (problem)
  {
  case problem_kind::relaxation:
    c.v_domain = {interval{-8, 12}, interval{-8, 12}, interval{-8, 12}};
    c.nu       = 1e3;
    c.dt       = 5e-4;
    c.t_final  = 0.02;
    c.lv       = 3;
    c.gmres.tolerance = 1e-8;
    break;
  case problem_kind::riemann:
  case problem_kind::chu_riemann:
    c.nu = nu;
    c.gmres.tolerance = 1e-8;
    if (nu >= 100)
    {
      c.x_domain  = {-0.25, 0.25};
      c.s_initial = 9.0 / 64;
      c.dt        = 2e-4;
      c.t_final   = 0.05;
    }
    else
    {
      c.x_domain  = {-0.6, 0.6};
      c.s_initial = 0.3;
      c.dt        = 2.3419e-4;
      c.t_final   = 0.04918;
    }
    if (problem == problem_kind::chu_riemann)
    {
      c.lx = 6;
      c.lv = 5;
    }
    else
    {
      c.grid = grid_kind::adaptive;
      c.tau  = 1e-4;
      c.lx   = 5;
      c.lv   = 4;
    }
    break;
  case problem_kind::landau:
  case problem_kind::chu_landau:
    c.nu       = nu;
    c.x_domain = {-2 * pi, 2 * pi};
    c.t_final  = 50;
    c.dt       = 0; // derived from the spatial level
    c.gmres.tolerance = nu <= 0.1 ? 1e-14 : 1e-11;
    if (problem == problem_kind::chu_landau)
    {
      c.lx = 5;
      c.lv = 6;
    }
    else
    {
      c.grid = grid_kind::adaptive;
      c.tau  = 1e-8;
      c.lx   = 4;
      c.lv   = 5;
    }
    break;
  }
  return c;
}

std::map<std::string, std::string> read_key_values(std::istream &is)
{
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(is, line))
  {
    number++;
    auto const hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    auto const eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_setting(run_config &c, std::string const &key, std::string const &value)
{
  if (key == "problem")
    c.problem = parse_problem(value);
  else if (key == "grid")
    c.grid = parse_grid(value);
  else if (key == "levels.x" || key == "lx")
    c.lx = to_int(key, value);
  else if (key == "levels.v" || key == "lv")
    c.lv = to_int(key, value);
  else if (key == "caps")
  {
    c.caps.clear();
    for (double v : to_list(key, value))
      c.caps.push_back(static_cast<int>(v));
  }
  else if (key == "k" || key == "degree")
    c.degree = to_int(key, value);
  else if (key == "nu")
    c.nu = to_double(key, value);
  else if (key == "dt")
    c.dt = to_double(key, value);
  else if (key == "t_final" || key == "T")
    c.t_final = to_double(key, value);
  else if (key == "max_steps")
    c.max_steps = to_int(key, value);
  else if (key == "tau")
    c.tau = to_double(key, value);
  else if (key == "mu")
    c.mu = to_double(key, value);
  else if (key == "refine_passes")
    c.max_refine_passes = to_int(key, value);
  else if (key == "gmres.tol")
    c.gmres.tolerance = to_double(key, value);
  else if (key == "gmres.restart")
    c.gmres.restart = to_int(key, value);
  else if (key == "gmres.maxiter")
    c.gmres.max_iterations = to_int(key, value);
  else if (key == "gmres.precond")
    c.precondition = to_bool(key, value);
  else if (key == "projection_points")
    c.projection_points = to_int(key, value);
  else if (key == "output")
    c.output_dir = value;
  else if (key == "snapshot_every")
    c.snapshot_every = to_int(key, value);
  else if (key == "slice_vz")
    c.slice_vz = to_double(key, value);
  else if (key == "s_initial")
    c.s_initial = to_double(key, value);
  else if (key == "x_domain")
  {
    auto const v = to_list(key, value);
    if (v.size() != 2)
      throw std::invalid_argument("x_domain needs lo,hi");
    c.x_domain = {v[0], v[1]};
  }
  else if (key == "v_domain")
  {
    auto const v = to_list(key, value);
    if (v.size() != 2)
      throw std::invalid_argument("v_domain needs lo,hi");
    c.v_domain = {interval{v[0], v[1]}, interval{v[0], v[1]}, interval{v[0], v[1]}};
  }
  else
    throw std::invalid_argument("unknown config key '" + key + "'");
}

run_config make_config(std::map<std::string, std::string> const &values)
{
  auto const p = values.find("problem");
  if (p == values.end())
    throw std::invalid_argument("config: 'problem' is required");
  problem_kind const problem = parse_problem(p->second);
  double nu = problem == problem_kind::relaxation ? 1e3 : 1e-2;
  if (problem == problem_kind::riemann || problem == problem_kind::chu_riemann)
    nu = 1;
  if (auto const it = values.find("nu"); it != values.end())
    nu = to_double("nu", it->second);
  run_config c = preset(problem, nu);
  for (auto const &[key, value] : values)
    if (key != "problem")
      apply_setting(c, key, value);
  c.derive_time_step();
  c.validate();
  return c;
}

void write_timeseries(std::ostream &os, std::vector<time_record> const &records)
{
  os << "t,active_elements,gmres_iters,dn,dmom,denergy,epot,ekin,etotal\n";
  auto const old = os.precision(17);
  for (auto const &r : records)
    os << r.t << ',' << r.active_elements << ',' << r.gmres_iterations << ',' << r.dn << ','
       << r.dmom << ',' << r.denergy << ',' << r.epot << ',' << r.ekin << ',' << r.etotal
       << '\n';
  os.precision(old);
}

std::vector<time_record> read_timeseries(std::istream &is)
{
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("timeseries: empty input");
  std::vector<time_record> out;
  int number = 1;
  while (std::getline(is, line))
  {
    number++;
    if (trim(line).empty())
      continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ','))
      v.push_back(to_double("timeseries line " + std::to_string(number), trim(item)));
    if (v.size() != 9)
      throw std::invalid_argument("timeseries line " + std::to_string(number) + ": expected 9 columns");
    time_record r;
    r.t = v[0];
    r.active_elements  = static_cast<int>(v[1]);
    r.gmres_iterations = static_cast<int>(v[2]);
    r.dn      = v[3];
    r.dmom    = v[4];
    r.denergy = v[5];
    r.epot    = v[6];
    r.ekin    = v[7];
    r.etotal  = v[8];
    out.push_back(r);
  }
  return out;
}

std::vector<int> damping_maxima(std::vector<double> const &t, std::vector<double> const &epot)
{
  if (t.size() != epot.size())
    throw std::invalid_argument("damping_maxima: size mismatch");
  std::vector<int> strict;
  for (std::size_t i = 1; i + 1 < epot.size(); i++)
    if (epot[i] > epot[i - 1] && epot[i] > epot[i + 1])
      strict.push_back(static_cast<int>(i));
  if (strict.size() < 2)
    return strict;

  // half of the spacing between the first two maxima separates genuine peaks
  double const window = 0.5 * (t[strict[1]] - t[strict[0]]);
  std::vector<int> kept;
  for (int i : strict)
  {
    if (!kept.empty() && t[i] - t[kept.back()] < window)
    {
      if (epot[i] > epot[kept.back()])
        kept.back() = i;
      continue;
    }
    kept.push_back(i);
  }
  return kept;
}

double damping_rate_fit(std::vector<double> const &t, std::vector<double> const &epot)
{
  if (t.size() != epot.size() || t.empty())
    throw std::invalid_argument("damping_rate_fit: need matching nonempty series");
  auto const [lo, hi] = std::minmax_element(epot.begin(), epot.end());
  if (*hi - *lo <= 1e-14 * std::abs(*hi))
    return 0.0;

  std::vector<int> const peaks = damping_maxima(t, epot);
  if (peaks.size() < 3)
    throw std::runtime_error("damping_rate_fit: fewer than three local maxima");
  Eigen::MatrixXd a(peaks.size(), 2);
  Eigen::VectorXd b(peaks.size());
  for (std::size_t i = 0; i < peaks.size(); i++)
  {
    if (!(epot[peaks[i]] > 0))
      throw std::runtime_error("damping_rate_fit: nonpositive energy at a maximum");
    a(i, 0) = 1;
    a(i, 1) = t[peaks[i]];
    b(i)    = std::log(epot[peaks[i]]);
  }
  Eigen::Vector2d const coef = a.colPivHouseholderQr().solve(b);
  return -coef(1);
}

double maxwellian_l2_error(vplb_model const &model, adaptive_grid const &grid,
                           Eigen::VectorXd const &state, double n,
                           std::array<double, 3> const &u, double theta)
{
  auto const &cfg = model.config();
  int const d     = grid.dims();
  int const k     = cfg.degree;
  int const p     = k + 1;

  // exact squared norm of the Maxwellian on the box
  double m2 = n * n;
  for (int m = 0; m < 3; m++)
    m2 *= maxwellian_square_integral(u[m], theta, cfg.v_domain[m].lo, cfg.v_domain[m].hi);

  // (f, M) through the projection of M, which is exact on the active space
  std::vector<Eigen::VectorXd> proj;
  for (int m = 0; m < d; m++)
  {
    int const vm = cfg.geom == geometry::slab_1x3v ? m - 1 : m;
    if (vm < 0)
      throw std::invalid_argument("maxwellian_l2_error: needs the 0x3v geometry");
    double const um = u[vm];
    proj.push_back(wavelet_project([um, theta](double v) { return maxwellian_1d(um, theta, v); },
                                   k, cfg.caps[m], cfg.v_domain[vm], 16));
  }
  double fm = 0;
  for (int e = 0; e < grid.size(); e++)
  {
    element_key const key = grid.key(e);
    Eigen::VectorXd acc   = Eigen::VectorXd::Constant(1, n);
    for (int m = 0; m < d; m++)
    {
      auto const seg = proj[m].segment(key.block(m) * p, p);
      Eigen::VectorXd next(acc.size() * p);
      for (Eigen::Index i = 0; i < acc.size(); i++)
        next.segment(i * p, p) = acc(i) * seg;
      acc = std::move(next);
    }
    fm += state.segment(grid.offset(e), grid.block_size()).dot(acc);
  }
  double const err2 = m2 - 2 * fm + state.squaredNorm();
  return std::sqrt(std::max(err2, 0.0));
}

legendre_field_2d marginal_field(vplb_model const &model, adaptive_grid const &grid,
                                 Eigen::VectorXd const &state, transverse_weight weight)
{
  auto const &cfg = model.config();
  legendre_field_2d f;
  f.x_domain = cfg.x_domain;
  f.v_domain = cfg.v_domain[0];
  f.x_level  = cfg.caps[0];
  f.v_level  = cfg.caps[1];
  f.degree   = cfg.degree;
  f.coeffs   = model.transverse_marginal(grid, state, weight);
  return f;
}

double reduced_moment_error(vplb_model const &model, adaptive_grid const &grid,
                            Eigen::VectorXd const &state, legendre_field_2d const &reference,
                            transverse_weight weight)
{
  return l2_distance(marginal_field(model, grid, state, weight), reference);
}

void write_lattice(std::ostream &os, legendre_field_2d const &field)
{
  int const nx = (1 << field.x_level) + 1, nv = (1 << field.v_level) + 1;
  os << "x,v_x,value\n";
  auto const old = os.precision(17);
  for (int i = 0; i < nx; i++)
    for (int j = 0; j < nv; j++)
    {
      double const x = field.x_domain.lo + field.x_domain.length() * i / (nx - 1);
      double const v = field.v_domain.lo + field.v_domain.length() * j / (nv - 1);
      os << x << ',' << v << ',' << field.eval(x, v) << '\n';
    }
  os.precision(old);
}

double lattice_l2_difference(std::istream &a, std::istream &b)
{
  auto read = [](std::istream &is) {
    std::vector<std::array<double, 3>> rows;
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line))
    {
      if (trim(line).empty())
        continue;
      std::array<double, 3> r{};
      std::stringstream ss(line);
      std::string item;
      for (int c = 0; c < 3; c++)
      {
        if (!std::getline(ss, item, ','))
          throw std::invalid_argument("lattice: expected three columns");
        r[c] = to_double("lattice", trim(item));
      }
      rows.push_back(r);
    }
    return rows;
  };
  auto const ra = read(a), rb = read(b);
  if (ra.size() != rb.size() || ra.empty())
    throw std::invalid_argument("lattice: sample counts differ");
  std::set<double> xs, vs;
  for (std::size_t i = 0; i < ra.size(); i++)
  {
    if (std::abs(ra[i][0] - rb[i][0]) > 1e-12 * (1 + std::abs(ra[i][0])) ||
        std::abs(ra[i][1] - rb[i][1]) > 1e-12 * (1 + std::abs(ra[i][1])))
      throw std::invalid_argument("lattice: sample points differ");
    xs.insert(ra[i][0]);
    vs.insert(ra[i][1]);
  }
  if (xs.size() * vs.size() != ra.size() || xs.size() < 2 || vs.size() < 2)
    throw std::invalid_argument("lattice: not a tensor lattice");
  std::vector<double> const xv(xs.begin(), xs.end()), vv(vs.begin(), vs.end());
  auto weight = [](std::vector<double> const &g, double y) {
    auto const i = std::lower_bound(g.begin(), g.end(), y) - g.begin();
    double w     = 0;
    if (i > 0)
      w += 0.5 * (g[i] - g[i - 1]);
    if (i + 1 < static_cast<long>(g.size()))
      w += 0.5 * (g[i + 1] - g[i]);
    return w;
  };
  double s = 0;
  for (std::size_t i = 0; i < ra.size(); i++)
  {
    double const d = ra[i][2] - rb[i][2];
    s += weight(xv, ra[i][0]) * weight(vv, ra[i][1]) * d * d;
  }
  return std::sqrt(s);
}

phase_space_config physics_config(run_config const &c)
{
  phase_space_config p;
  p.geom     = c.problem == problem_kind::relaxation ? geometry::relaxation_0x3v : geometry::slab_1x3v;
  p.x_domain = c.x_domain;
  p.v_domain = c.v_domain;
  p.nu       = c.nu;
  p.degree   = c.degree;
  p.caps     = c.level_caps();
  p.projection_points = c.projection_points;
  return p;
}

chu_config chu_physics_config(run_config const &c)
{
  chu_config p;
  p.x_domain = c.x_domain;
  p.v_domain = c.v_domain[0];
  p.x_level  = c.lx;
  p.v_level  = c.lv;
  p.degree   = c.degree;
  p.nu       = c.nu;
  return p;
}

std::array<double, 3> initial_fluid(run_config const &c, double x)
{
  switch (c.problem)
  {
  case problem_kind::riemann:
  case problem_kind::chu_riemann:
    if (std::abs(x) >= c.s_initial)
      return {1.0, 0.0, 1.0};
    return {0.125, 0.0, 0.8};
  case problem_kind::landau:
  case problem_kind::chu_landau:
    return {1 + 1e-4 * std::cos(0.5 * x), 0.0, 1.0};
  default:
    throw std::invalid_argument("initial_fluid: no spatial dependence for this problem");
  }
}

std::vector<separable_function> initial_condition(run_config const &c)
{
  std::vector<separable_function> out;
  auto mx = [](double u, double theta) {
    return [u, theta](double v) { return maxwellian_1d(u, theta, v); };
  };
  switch (c.problem)
  {
  case problem_kind::relaxation:
    // three Maxwellians drifting along the axes
    for (int b = 0; b < 3; b++)
    {
      separable_function s;
      s.weight = 1.0 / 3;
      for (int m = 0; m < 3; m++)
        s.factors.push_back(mx(m == b ? 3.0 : 0.0, 0.5));
      out.push_back(std::move(s));
    }
    break;
  case problem_kind::riemann:
  {
    // outer and inner states as indicator functions in x
    double const s0 = c.s_initial;
    for (int inner = 0; inner < 2; inner++)
    {
      double const n = inner ? 0.125 : 1.0, th = inner ? 0.8 : 1.0;
      separable_function s;
      s.factors.push_back([s0, inner, n](double x) {
        bool const in = std::abs(x) < s0;
        return (in == static_cast<bool>(inner)) ? n : 0.0;
      });
      for (int m = 0; m < 3; m++)
        s.factors.push_back(mx(0.0, th));
      out.push_back(std::move(s));
    }
    break;
  }
  case problem_kind::landau:
  {
    separable_function s;
    s.factors.push_back([](double x) { return 1 + 1e-4 * std::cos(0.5 * x); });
    for (int m = 0; m < 3; m++)
      s.factors.push_back(mx(0.0, 1.0));
    out.push_back(std::move(s));
    break;
  }
  default:
    throw std::invalid_argument("initial_condition: not a phase-space problem");
  }
  return out;
}

adaptive_grid initial_grid(run_config const &c)
{
  auto const caps = c.level_caps();
  int const dims  = static_cast<int>(caps.size());
  switch (c.grid)
  {
  case grid_kind::full: return full_index_set(caps, c.degree);
  case grid_kind::mixed: return mixed_index_set(c.lx, c.lv, c.degree, caps);
  case grid_kind::sparse:
  case grid_kind::adaptive:
    return sparse_index_set(c.problem == problem_kind::relaxation ? c.lv : std::max(c.lx, c.lv),
                            dims, c.degree, caps);
  }
  throw std::logic_error("initial_grid: unknown grid kind");
}

namespace
{
struct conserved
{
  double number = 0;
  std::array<double, 3> momentum{};
  double kinetic = 0, potential = 0;
};

conserved conserved_4d(vplb_model const &model, adaptive_grid const &grid,
                       Eigen::VectorXd const &state)
{
  fluid_fields const raw = model.raw_moments(grid, state);
  conserved c;
  c.number = raw.rho0.integral();
  for (int m = 0; m < 3; m++)
    c.momentum[m] = raw.rho1[m].integral();
  c.kinetic = raw.rho2.integral();
  if (model.config().geom == geometry::slab_1x3v)
    c.potential = potential_energy(model.solve_poisson(raw.rho0));
  return c;
}

time_record make_record(double t, int elements, int iterations, conserved const &c,
                        conserved const &c0)
{
  time_record r;
  r.t = t;
  r.active_elements  = elements;
  r.gmres_iterations = iterations;
  r.dn = c.number - c0.number;
  double dm = 0;
  for (int m = 0; m < 3; m++)
    dm += (c.momentum[m] - c0.momentum[m]) * (c.momentum[m] - c0.momentum[m]);
  r.dmom    = std::sqrt(dm);
  r.epot    = c.potential;
  r.ekin    = c.kinetic;
  r.etotal  = c.kinetic + c.potential;
  r.denergy = r.etotal - (c0.kinetic + c0.potential);
  return r;
}

void write_file(std::filesystem::path const &path, std::function<void(std::ostream &)> const &w)
{
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("cannot write " + path.string());
  w(os);
  if (!os)
    throw std::runtime_error("write failed for " + path.string());
}

int step_count(run_config const &c)
{
  // dt is often T / n rounded to a few digits, so a sliver over an integer is not another step
  int n = static_cast<int>(std::ceil(c.t_final / c.dt - 1e-3));
  if (c.max_steps > 0)
    n = std::min(n, c.max_steps);
  return n;
}

void write_snapshot_4d(std::filesystem::path const &dir, int step, run_config const &c,
                       vplb_model const &model, adaptive_grid const &grid,
                       Eigen::VectorXd const &state)
{
  write_file(dir / step_name("snapshot_", step, ".csv"), [&](std::ostream &os) {
    if (model.config().geom == geometry::slab_1x3v)
    {
      write_lattice(os, marginal_field(model, grid, state, transverse_weight::g1));
      return;
    }
    // 0x3v: slice at v_z = slice_vz on the (v_x, v_y) lattice
    auto const caps = model.config().caps;
    int const nx = (1 << caps[0]) + 1, ny = (1 << caps[1]) + 1;
    os << "v_x,v_y,value\n";
    os.precision(17);
    for (int i = 0; i < nx; i++)
      for (int j = 0; j < ny; j++)
      {
        double const vx = c.v_domain[0].lo + c.v_domain[0].length() * i / (nx - 1);
        double const vy = c.v_domain[1].lo + c.v_domain[1].length() * j / (ny - 1);
        os << vx << ',' << vy << ',' << model.evaluate(grid, state, {vx, vy, c.slice_vz})
           << '\n';
      }
  });
  if (c.grid == grid_kind::adaptive)
    write_file(dir / step_name("grid_", step, ".txt"), [&](std::ostream &os) { grid.dump(os); });
}

run_result run_chu(run_config const &c)
{
  run_result out;
  chu_solver const solver(chu_physics_config(c));
  chu_state state = solver.project_maxwellian(
      [&](double x) { return initial_fluid(c, x); }, c.projection_points);
  std::filesystem::path const dir = c.output_dir;
  bool const write = !c.output_dir.empty();

  auto cons = [&](chu_state const &s) {
    chu_invariants const iv = solver.invariants(s);
    conserved r;
    r.number      = iv.mass;
    r.momentum[0] = iv.momentum;
    r.kinetic     = iv.kinetic;
    r.potential   = iv.potential;
    return r;
  };
  int const cells = (1 << c.lx) * (1 << c.lv);
  conserved const c0 = cons(state);
  out.records.push_back(make_record(0, cells, 0, c0, c0));

  auto snapshot = [&](int step) {
    write_file(dir / step_name("snapshot_", step, ".csv"),
               [&](std::ostream &os) { write_lattice(os, solver.wrap(state.g1)); });
  };
  if (write && c.snapshot_every > 0)
    snapshot(0);

  int const n = step_count(c);
  for (int s = 1; s <= n; s++)
  {
    chu_step_report rep;
    try
    {
      rep = solver.step(state, c.dt, c.gmres, c.precondition);
    }
    catch (std::exception const &e)
    {
      out.solver_failure = true;
      out.message = "step " + std::to_string(s) + ": " + e.what();
      break;
    }
    out.steps = s;
    out.t     = s * c.dt;
    out.records.push_back(make_record(out.t, cells, rep.gmres_iterations, cons(state), c0));
    if (!rep.converged)
    {
      out.solver_failure = true;
      out.message = "step " + std::to_string(s) + ": GMRES did not converge (residual " +
                    std::to_string(rep.worst_residual) + ")";
      break;
    }
    if (write && c.snapshot_every > 0 && s % c.snapshot_every == 0)
      snapshot(s);
  }
  out.chu = state;
  if (write)
  {
    write_file(dir / "final_g1.csv", [&](std::ostream &os) { write_lattice(os, solver.wrap(state.g1)); });
    write_file(dir / "final_g2.csv", [&](std::ostream &os) { write_lattice(os, solver.wrap(state.g2)); });
    write_file(dir / "final_g3.csv", [&](std::ostream &os) { write_lattice(os, solver.wrap(state.g3)); });
  }
  return out;
}
} // namespace

run_result run(run_config const &config, step_observer const &observer)
{
  run_config c = config;
  c.derive_time_step();
  c.validate();
  std::filesystem::path const dir = c.output_dir;
  bool const write = !c.output_dir.empty();
  if (write)
    std::filesystem::create_directories(dir);

  run_result out;
  if (c.is_chu())
    out = run_chu(c);
  else
  {
    vplb_model const model(physics_config(c));
    step_config sc;
    sc.dt     = c.dt;
    sc.scheme = c.problem == problem_kind::relaxation ? time_scheme::backward_euler
                                                       : time_scheme::imex2;
    sc.tau    = c.grid == grid_kind::adaptive ? c.tau : 0.0;
    sc.mu     = c.mu;
    sc.max_refine_passes = c.max_refine_passes;
    sc.gmres        = c.gmres;
    sc.precondition = c.precondition;

    adaptive_grid grid = initial_grid(c);
    Eigen::VectorXd state;
    if (sc.tau > 0)
    {
      adapt_result const init = adapt_initial(model, grid, initial_condition(c), sc);
      grid  = init.grid;
      state = init.state;
    }
    else
      state = model.project_separable(grid, initial_condition(c));

    conserved const c0 = conserved_4d(model, grid, state);
    out.records.push_back(make_record(0, grid.size(), 0, c0, c0));
    if (write && c.snapshot_every > 0)
      write_snapshot_4d(dir, 0, c, model, grid, state);

    int const n = step_count(c);
    for (int s = 1; s <= n; s++)
    {
      adapt_result res;
      try
      {
        res = adapt_advance(model, grid, state, sc);
      }
      catch (std::exception const &e)
      {
        out.solver_failure = true;
        out.message = "step " + std::to_string(s) + ": " + e.what();
        break;
      }
      if (observer)
        observer(s, res, grid);
      grid  = std::move(res.grid);
      state = std::move(res.state);
      out.steps = s;
      out.t     = s * c.dt;
      out.records.push_back(make_record(out.t, res.report.elements_after_refinement,
                                        res.report.gmres_iterations,
                                        conserved_4d(model, grid, state), c0));
      if (!res.report.converged)
      {
        out.solver_failure = true;
        out.message = "step " + std::to_string(s) + ": GMRES did not converge (residual " +
                      std::to_string(res.report.worst_residual) + ")";
        break;
      }
      if (write && c.snapshot_every > 0 && s % c.snapshot_every == 0)
        write_snapshot_4d(dir, s, c, model, grid, state);
    }
    if (write)
    {
      write_snapshot_4d(dir, out.steps, c, model, grid, state);
      if (model.config().geom == geometry::slab_1x3v)
      {
        char const *names[] = {"final_g1.csv", "final_g2.csv", "final_g3.csv"};
        transverse_weight const w[] = {transverse_weight::g1, transverse_weight::g2,
                                       transverse_weight::g3};
        for (int i = 0; i < 3; i++)
          write_file(dir / names[i], [&](std::ostream &os) {
            write_lattice(os, marginal_field(model, grid, state, w[i]));
          });
      }
      write_file(dir / "grid_final.txt", [&](std::ostream &os) { grid.dump(os); });
    }
    out.grid  = std::move(grid);
    out.state = std::move(state);
  }

  if (write)
  {
    write_file(dir / "timeseries.csv", [&](std::ostream &os) { write_timeseries(os, out.records); });
    if (out.solver_failure)
      write_file(dir / "failure.txt", [&](std::ostream &os) { os << out.message << '\n'; });
  }
  return out;
}

} // namespace sparsekin
