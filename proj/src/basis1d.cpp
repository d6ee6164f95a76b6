#include "sparsekin/basis1d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace sparsekin
{
quadrature gauss_legendre(int num_points)
{
  if (num_points < 1)
    throw std::invalid_argument("gauss_legendre needs at least one point");

  quadrature q;
  q.nodes.resize(num_points);
  q.weights.resize(num_points);
  int const n = num_points;
  for (int i = 0; i < (n + 1) / 2; i++)
  {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; it++)
    {
      double const dx = legendre(n, x) / legendre_derivative(n, x);
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    double const dp = legendre_derivative(n, x);
    double const w  = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[i]         = -x;
    q.nodes[n - 1 - i] = x;
    q.weights[i]         = w;
    q.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
    q.nodes[n / 2] = 0.0;
  return q;
}

double legendre(int n, double x)
{
  if (n == 0)
    return 1.0;
  double p0 = 1.0, p1 = x;
  for (int m = 2; m <= n; m++)
  {
    double const p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double legendre_derivative(int n, double x)
{
  // derivative recurrence, valid also at the end points
  if (n == 0)
    return 0.0;
  double dp0 = 0.0, dp1 = 1.0;
  double p1 = x;
  double p0 = 1.0;
  for (int m = 2; m <= n; m++)
  {
    double const p2  = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
    double const dp2 = dp0 + (2 * m - 1) * p1;
    p0  = p1;
    p1  = p2;
    dp0 = dp1;
    dp1 = dp2;
  }
  return dp1;
}

namespace
{
// monomial coefficients of P_m(s*y + t)
std::vector<double> legendre_monomials(int m, double s, double t)
{
  // P_0 = 1, P_1 = z, with z = s*y + t
  std::vector<double> p0{1.0};
  if (m == 0)
    return p0;
  std::vector<double> p1{t, s};
  for (int n = 2; n <= m; n++)
  {
    std::vector<double> p2(n + 1, 0.0);
    // (2n-1) z p1 - (n-1) p0, all over n
    for (size_t i = 0; i < p1.size(); i++)
    {
      p2[i] += (2 * n - 1) * t * p1[i];
      p2[i + 1] += (2 * n - 1) * s * p1[i];
    }
    for (size_t i = 0; i < p0.size(); i++)
      p2[i] -= (n - 1) * p0[i];
    for (auto &c : p2)
      c /= n;
    p0 = std::move(p1);
    p1 = std::move(p2);
  }
  return p1;
}

double horner(Eigen::RowVectorXd const &c, double y)
{
  double r = 0;
  for (Eigen::Index i = c.size() - 1; i >= 0; i--)
    r = r * y + c(i);
  return r;
}

Eigen::VectorXd null_vector(Eigen::MatrixXd const &a)
{
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  return svd.matrixV().col(a.cols() - 1);
}
} // namespace

wavelet_family::wavelet_family(int degree) : degree_(degree)
{
  if (degree < 0 || degree > max_degree)
    throw std::invalid_argument("unsupported polynomial degree " +
                                std::to_string(degree));

  int const p   = degree + 1;
  int const dim = 2 * p;

  // orthonormal piecewise Legendre basis of the two-piece space,
  // entries [0, p) live on (-1, 0) and [p, 2p) on (0, 1)
  quadrature const q = gauss_legendre(12);
  auto piece_value   = [](int m, double y, bool right) {
    double const z = right ? 2 * y - 1 : 2 * y + 1;
    return std::sqrt(2.0 * m + 1) * legendre(m, z);
  };
  auto moment = [&](int power) {
    Eigen::RowVectorXd row(dim);
    for (int m = 0; m < p; m++)
    {
      double left = 0, right = 0;
      for (size_t iq = 0; iq < q.nodes.size(); iq++)
      {
        double const yl = 0.5 * (q.nodes[iq] - 1.0);
        double const yr = 0.5 * (q.nodes[iq] + 1.0);
        left += 0.5 * q.weights[iq] * std::pow(yl, power) * piece_value(m, yl, false);
        right += 0.5 * q.weights[iq] * std::pow(yr, power) * piece_value(m, yr, true);
      }
      row(m)     = left;
      row(p + m) = right;
    }
    return row;
  };

  Eigen::MatrixXd low(p, dim);
  for (int j = 0; j < p; j++)
    low.row(j) = moment(j);
  // complement of the global polynomials of degree <= k
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(low, Eigen::ComputeFullV);
  Eigen::MatrixXd const complement = svd.matrixV().rightCols(p);

  std::vector<Eigen::VectorXd> phi(p);
  for (int i = p - 1; i >= 0; i--)
  {
    // phi_{i+1} must also annihilate y^{k+1}, ..., y^{k+i}, and be
    // orthogonal to the wavelets already fixed
    Eigen::MatrixXd constraints(degree, dim);
    int row = 0;
    for (int j = degree + 1; j <= degree + i; j++)
      constraints.row(row++) = moment(j);
    for (int other = i + 1; other < p; other++)
      constraints.row(row++) = phi[other].transpose();

    Eigen::VectorXd coeff;
    if (degree == 0)
      coeff = complement.col(0);
    else
      coeff = complement * null_vector(constraints * complement);
    phi[i] = coeff / coeff.norm();
  }

  right_ = Eigen::MatrixXd::Zero(p, p);
  left_  = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; i++)
  {
    for (int m = 0; m < p; m++)
    {
      auto const lm = legendre_monomials(m, 2.0, 1.0);
      auto const rm = legendre_monomials(m, 2.0, -1.0);
      double const scale = std::sqrt(2.0 * m + 1);
      for (size_t e = 0; e < lm.size(); e++)
      {
        left_(i, e) += phi[i](m) * scale * lm[e];
        right_(i, e) += phi[i](p + m) * scale * rm[e];
      }
    }
    // sign: positive leading coefficient on (0, 1)
    for (int e = degree; e >= 0; e--)
    {
      if (std::abs(right_(i, e)) > 1e-10)
      {
        if (right_(i, e) < 0)
        {
          right_.row(i) *= -1;
          left_.row(i) *= -1;
        }
        break;
      }
    }
  }
}

double wavelet_family::mother(int i, double y) const
{
  if (y < -1.0 || y > 1.0)
    return 0.0;
  return (y >= 0) ? horner(right_.row(i), y) : horner(left_.row(i), y);
}

double wavelet_family::scaling(int i, double y) const
{
  return std::sqrt(2.0 * i + 1) * legendre(i, 2 * y - 1);
}

std::shared_ptr<wavelet_family const> get_wavelet_family(int degree)
{
  static std::mutex lock;
  static std::map<int, std::shared_ptr<wavelet_family const>> cache;
  std::lock_guard<std::mutex> guard(lock);
  auto &slot = cache[degree];
  if (!slot)
    slot = std::make_shared<wavelet_family const>(degree);
  return slot;
}

double eval_wavelet(wavelet_family const &family, int level, int position,
                    int i, double y)
{
  if (i < 0 || i > family.degree() || level < 0 || position < 0)
    throw std::out_of_range("wavelet index out of range");
  if (level == 0)
  {
    if (position != 0)
      throw std::out_of_range("level 0 has a single position");
    if (y < 0 || y > 1)
      return 0.0;
    return family.scaling(i, y);
  }
  if (level > 30 || position >= (1 << (level - 1)))
    throw std::out_of_range("wavelet position out of range");

  double const scale = std::ldexp(1.0, level - 1);
  double const s     = scale * y - position;
  // half-open support so a point on an interior support edge belongs to
  // exactly one wavelet of each level
  if (s < 0.0 || s > 1.0 || (s == 1.0 && y < 1.0))
    return 0.0;
  return std::sqrt(scale) * std::sqrt(2.0) * family.mother(i, 2 * s - 1);
}

std::shared_ptr<basis_transform const> build_transform(int degree, int level)
{
  static std::mutex lock;
  static std::map<std::pair<int, int>, std::shared_ptr<basis_transform const>> cache;
  {
    std::lock_guard<std::mutex> guard(lock);
    auto it = cache.find({degree, level});
    if (it != cache.end())
      return it->second;
  }
  if (level < 0)
    throw std::invalid_argument("negative level");

  auto const family    = get_wavelet_family(degree);
  int const p          = degree + 1;
  int const num_cells  = 1 << level;
  double const h       = 1.0 / num_cells;
  quadrature const q   = gauss_legendre(degree + 2);

  std::vector<Eigen::Triplet<double>> triplets;
  for (int b = 0; b < num_cells; b++)
  {
    int const lev = block_level(b);
    int const pos = block_position(b);
    int first = 0, count = num_cells;
    if (lev > 0)
    {
      count = 1 << (level - lev + 1);
      first = pos * count;
    }
    for (int c = first; c < first + count; c++)
    {
      for (int i = 0; i < p; i++)
      {
        for (int ip = 0; ip < p; ip++)
        {
          double sum = 0;
          for (size_t iq = 0; iq < q.nodes.size(); iq++)
          {
            double const y = (c + 0.5 * (q.nodes[iq] + 1.0)) * h;
            double const leg = std::sqrt((2.0 * ip + 1) / h) * legendre(ip, q.nodes[iq]);
            sum += 0.5 * h * q.weights[iq] * eval_wavelet(*family, lev, pos, i, y) * leg;
          }
          if (std::abs(sum) > 1e-15)
            triplets.emplace_back(b * p + i, c * p + ip, sum);
        }
      }
    }
  }
  auto t     = std::make_shared<basis_transform>();
  t->degree  = degree;
  t->level   = level;
  t->forward = Eigen::SparseMatrix<double>(p * num_cells, p * num_cells);
  t->forward.setFromTriplets(triplets.begin(), triplets.end());

  std::lock_guard<std::mutex> guard(lock);
  cache[{degree, level}] = t;
  return t;
}

double dg_function_1d::eval_cell(int cell, double xi) const
{
  double const h = cell_width();
  double r       = 0;
  for (int i = 0; i <= degree; i++)
    r += coeffs[cell * (degree + 1) + i] * std::sqrt((2.0 * i + 1) / h) * legendre(i, xi);
  return r;
}

double dg_function_1d::eval(double x) const
{
  double const h = cell_width();
  int cell       = static_cast<int>(std::floor((x - domain.lo) / h));
  cell           = std::clamp(cell, 0, num_cells() - 1);
  double const xi = 2.0 * (x - domain.lo - cell * h) / h - 1.0;
  return eval_cell(cell, xi);
}

double dg_function_1d::integral() const
{
  double const h = cell_width();
  double r       = 0;
  for (int c = 0; c < num_cells(); c++)
    r += coeffs[c * (degree + 1)] * std::sqrt(h);
  return r;
}

std::string to_string(operator_kind kind)
{
  switch (kind)
  {
  case operator_kind::mass: return "mass";
  case operator_kind::upwind_advection: return "upwind-advection";
  case operator_kind::flux_divergence: return "flux-divergence";
  case operator_kind::jump_penalty: return "jump-penalty";
  case operator_kind::ldg_gradient: return "ldg-gradient";
  case operator_kind::ldg_diffusion: return "ldg-diffusion";
  case operator_kind::coordinate_multiply: return "coordinate-multiply";
  case operator_kind::coefficient_multiply: return "coefficient-multiply";
  }
  return "unknown";
}

namespace
{
// orthonormal Legendre basis on a cell of width h
struct cell_basis
{
  int p;
  double h;
  double value(int i, double xi) const
  {
    return std::sqrt((2.0 * i + 1) / h) * legendre(i, xi);
  }
  double derivative(int i, double xi) const
  {
    return std::sqrt((2.0 * i + 1) / h) * (2.0 / h) * legendre_derivative(i, xi);
  }
  double left(int i) const { return std::sqrt((2.0 * i + 1) / h) * ((i % 2) ? -1.0 : 1.0); }
  double right(int i) const { return std::sqrt((2.0 * i + 1) / h); }
};

class triplet_builder
{
public:
  explicit triplet_builder(int n) : n_(n), dense_(Eigen::MatrixXd::Zero(0, 0)) {}
  void add(int r, int c, double v)
  {
    if (v != 0.0)
      t_.emplace_back(r, c, v);
  }
  Eigen::SparseMatrix<double> finish()
  {
    Eigen::SparseMatrix<double> m(n_, n_);
    m.setFromTriplets(t_.begin(), t_.end());
    m.prune(0.0);
    return m;
  }

private:
  int n_;
  Eigen::MatrixXd dense_;
  std::vector<Eigen::Triplet<double>> t_;
};

struct face
{
  int left_cell;  // cell whose right end touches the face
  int right_cell; // cell whose left end touches the face
  double x_left;  // physical coordinate of the left trace
  double x_right;
  bool boundary = false;
};

std::vector<face> mesh_faces(int num_cells, interval const &dom,
                             boundary_type boundary)
{
  double const h = dom.length() / num_cells;
  std::vector<face> faces;
  for (int c = 1; c < num_cells; c++)
  {
    double const x = dom.lo + c * h;
    faces.push_back({c - 1, c, x, x});
  }
  if (boundary == boundary_type::periodic)
    faces.push_back({num_cells - 1, 0, dom.hi, dom.lo});
  return faces;
}

// integrate fn(x, xi) over cell c with splitting at breakpoints
template<typename fn_type>
void cell_quadrature(int c, double h, interval const &dom,
                     std::vector<double> const &breakpoints, quadrature const &q,
                     fn_type &&fn)
{
  double const xl = dom.lo + c * h;
  double const xr = xl + h;
  std::vector<double> cuts{xl};
  for (double b : breakpoints)
    if (b > xl + 1e-14 * h && b < xr - 1e-14 * h)
      cuts.push_back(b);
  cuts.push_back(xr);
  std::sort(cuts.begin(), cuts.end());
  for (size_t s = 0; s + 1 < cuts.size(); s++)
  {
    double const a = cuts[s], b = cuts[s + 1];
    for (size_t iq = 0; iq < q.nodes.size(); iq++)
    {
      double const x  = 0.5 * (a + b) + 0.5 * (b - a) * q.nodes[iq];
      double const xi = 2.0 * (x - xl) / h - 1.0;
      fn(x, xi, 0.5 * (b - a) * q.weights[iq]);
    }
  }
}

Eigen::SparseMatrix<double>
assemble_flux(std::function<double(double)> const &wind,
              std::function<double(double)> const &penalty, int p, int level,
              interval const &dom, boundary_type boundary)
{
  int const nc   = 1 << level;
  double const h = dom.length() / nc;
  cell_basis const cb{p, h};
  quadrature const q = gauss_legendre(p + 2);
  triplet_builder tb(nc * p);

  if (wind)
  {
    for (int c = 0; c < nc; c++)
      for (int i = 0; i < p; i++)
        for (int j = 0; j < p; j++)
        {
          double sum = 0;
          cell_quadrature(c, h, dom, {}, q, [&](double x, double xi, double w) {
            sum -= w * wind(x) * cb.value(j, xi) * cb.derivative(i, xi);
          });
          tb.add(c * p + i, c * p + j, sum);
        }
  }

  for (face const &f : mesh_faces(nc, dom, boundary))
  {
    // side-wise wind so a wind that jumps at the periodic seam stays upwind
    double const am = wind ? wind(f.x_left) : 0.0;
    double const ap = wind ? wind(f.x_right) : 0.0;
    double const s  = penalty ? std::max(penalty(f.x_left), penalty(f.x_right)) : 0.0;
    // trial traces: minus from left cell (right end), plus from right cell
    for (int side = 0; side < 2; side++)
    {
      int const trial_cell = side == 0 ? f.left_cell : f.right_cell;
      for (int j = 0; j < p; j++)
      {
        double const wm = side == 0 ? cb.right(j) : 0.0;
        double const wp = side == 1 ? cb.left(j) : 0.0;
        double const flux = 0.5 * (am * wm + ap * wp) + 0.5 * s * (wm - wp);
        for (int i = 0; i < p; i++)
        {
          tb.add(f.left_cell * p + i, trial_cell * p + j, flux * cb.right(i));
          tb.add(f.right_cell * p + i, trial_cell * p + j, -flux * cb.left(i));
        }
      }
    }
  }
  return tb.finish();
}

Eigen::SparseMatrix<double>
assemble_gradient(int p, int level, interval const &dom, boundary_type boundary,
                  bool closure)
{
  int const nc   = 1 << level;
  double const h = dom.length() / nc;
  cell_basis const cb{p, h};
  quadrature const q = gauss_legendre(p + 2);
  triplet_builder tb(nc * p);

  for (int c = 0; c < nc; c++)
    for (int i = 0; i < p; i++)
      for (int j = 0; j < p; j++)
      {
        double sum = 0;
        for (size_t iq = 0; iq < q.nodes.size(); iq++)
          sum += 0.5 * h * q.weights[iq] * cb.derivative(j, q.nodes[iq]) * cb.value(i, q.nodes[iq]);
        tb.add(c * p + i, c * p + j, sum);
      }

  // - [w]{g} with [w] = w^- - w^+
  for (face const &f : mesh_faces(nc, dom, boundary))
  {
    for (int side = 0; side < 2; side++)
    {
      int const trial_cell = side == 0 ? f.left_cell : f.right_cell;
      for (int j = 0; j < p; j++)
      {
        double const jump = side == 0 ? cb.right(j) : -cb.left(j);
        for (int i = 0; i < p; i++)
        {
          tb.add(f.left_cell * p + i, trial_cell * p + j, -jump * 0.5 * cb.right(i));
          tb.add(f.right_cell * p + i, trial_cell * p + j, -jump * 0.5 * cb.left(i));
        }
      }
    }
  }
  if (closure && boundary == boundary_type::zero_flux)
  {
    // boundary traces jumped against a zero exterior state
    for (int j = 0; j < p; j++)
      for (int i = 0; i < p; i++)
      {
        tb.add((nc - 1) * p + i, (nc - 1) * p + j, -cb.right(j) * cb.right(i));
        tb.add(i, j, cb.left(j) * cb.left(i));
      }
  }
  return tb.finish();
}

Eigen::SparseMatrix<double>
assemble_multiply(std::function<double(double)> const &coef,
                  std::vector<double> const &breakpoints, int p, int level,
                  interval const &dom, int num_points)
{
  int const nc   = 1 << level;
  double const h = dom.length() / nc;
  cell_basis const cb{p, h};
  quadrature const q = gauss_legendre(num_points);
  triplet_builder tb(nc * p);
  for (int c = 0; c < nc; c++)
  {
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(p, p);
    cell_quadrature(c, h, dom, breakpoints, q, [&](double x, double xi, double w) {
      double const cv = coef(x);
      for (int i = 0; i < p; i++)
        for (int j = 0; j < p; j++)
          local(i, j) += w * cv * cb.value(i, xi) * cb.value(j, xi);
    });
    for (int i = 0; i < p; i++)
      for (int j = 0; j < p; j++)
        tb.add(c * p + i, c * p + j, local(i, j));
  }
  return tb.finish();
}
} // namespace

Eigen::SparseMatrix<double>
assemble_legendre_operator(operator_spec const &spec, int degree, int level,
                           interval const &domain, boundary_type boundary)
{
  if (degree < 0 || degree > max_degree)
    throw std::invalid_argument("unsupported polynomial degree");
  int const p = degree + 1;
  int const n = p << level;

  switch (spec.kind)
  {
  case operator_kind::mass:
  {
    Eigen::SparseMatrix<double> id(n, n);
    id.setIdentity();
    return id;
  }
  case operator_kind::upwind_advection:
  {
    if (!spec.wind)
      throw std::invalid_argument("upwind advection needs a wind function");
    auto const &a = spec.wind;
    Eigen::SparseMatrix<double> m = assemble_flux(
        a, [&](double x) { return std::abs(a(x)); }, p, level, domain, boundary);
    return -m;
  }
  case operator_kind::flux_divergence:
    return assemble_flux(spec.wind, spec.penalty, p, level, domain, boundary);
  case operator_kind::jump_penalty:
    return assemble_flux(nullptr, [](double) { return 1.0; }, p, level, domain,
                         boundary);
  case operator_kind::ldg_gradient:
    return assemble_gradient(p, level, domain, boundary, spec.dirichlet_closure);
  case operator_kind::ldg_diffusion:
  {
    auto const g_int = assemble_gradient(p, level, domain, boundary, false);
    auto const g     = assemble_gradient(p, level, domain, boundary, spec.dirichlet_closure);
    Eigen::SparseMatrix<double> r = -(Eigen::SparseMatrix<double>(g_int.transpose()) * g);
    r.prune(0.0);
    return r;
  }
  case operator_kind::coordinate_multiply:
    return assemble_multiply([](double x) { return x; }, {}, p, level, domain,
                             degree + 3);
  case operator_kind::coefficient_multiply:
  {
    if (spec.dg_coefficient)
    {
      auto const &c = *spec.dg_coefficient;
      if (c.degree + 2 * degree > 2 * (degree + 3) - 1)
        throw std::invalid_argument("coefficient degree exceeds quadrature exactness");
      if (c.level > level)
        throw std::invalid_argument("coefficient mesh finer than assembly mesh");
      return assemble_multiply([&](double x) { return c.eval(x); }, {}, p, level,
                               domain, degree + 3);
    }
    if (!spec.coefficient)
      throw std::invalid_argument("coefficient multiply needs a coefficient");
    return assemble_multiply(spec.coefficient, spec.breakpoints, p, level,
                             domain, degree + 3);
  }
  }
  throw std::invalid_argument("unknown operator kind");
}

Eigen::VectorXd legendre_moment(int power, int degree, int level,
                                interval const &domain)
{
  int const p    = degree + 1;
  int const nc   = 1 << level;
  double const h = domain.length() / nc;
  cell_basis const cb{p, h};
  quadrature const q = gauss_legendre(degree + 4);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(nc * p);
  for (int c = 0; c < nc; c++)
    cell_quadrature(c, h, domain, {}, q, [&](double x, double xi, double w) {
      double const xp = std::pow(x, power);
      for (int i = 0; i < p; i++)
        m(c * p + i) += w * xp * cb.value(i, xi);
    });
  return m;
}

Eigen::VectorXd legendre_project(std::function<double(double)> const &f,
                                 int degree, int level, interval const &domain,
                                 int num_points)
{
  int const p    = degree + 1;
  int const nc   = 1 << level;
  double const h = domain.length() / nc;
  cell_basis const cb{p, h};
  quadrature const q = gauss_legendre(num_points > 0 ? num_points : degree + 3);
  Eigen::VectorXd m  = Eigen::VectorXd::Zero(nc * p);
  for (int c = 0; c < nc; c++)
    cell_quadrature(c, h, domain, {}, q, [&](double x, double xi, double w) {
      double const fx = f(x);
      for (int i = 0; i < p; i++)
        m(c * p + i) += w * fx * cb.value(i, xi);
    });
  return m;
}

operator_matrix_1d assemble_1d_operator(operator_spec const &spec, int degree,
                                        int level, interval const &domain,
                                        boundary_type boundary)
{
  operator_matrix_1d op;
  op.kind     = spec.kind;
  op.degree   = degree;
  op.level    = level;
  op.domain   = domain;
  op.boundary = boundary;

  if (spec.kind == operator_kind::mass)
  {
    int const n = (degree + 1) << level;
    op.values   = Eigen::MatrixXd::Identity(n, n);
    return op;
  }
  auto const leg = assemble_legendre_operator(spec, degree, level, domain, boundary);
  auto const t   = build_transform(degree, level);
  Eigen::SparseMatrix<double> const w =
      t->forward * leg * Eigen::SparseMatrix<double>(t->forward.transpose());
  op.values = Eigen::MatrixXd(w);
  return op;
}

Eigen::VectorXd wavelet_moment(int power, int degree, int level,
                               interval const &domain)
{
  return build_transform(degree, level)->forward *
         legendre_moment(power, degree, level, domain);
}

Eigen::VectorXd wavelet_project(std::function<double(double)> const &f,
                                int degree, int level, interval const &domain,
                                int num_points)
{
  return build_transform(degree, level)->forward *
         legendre_project(f, degree, level, domain, num_points);
}

} // namespace sparsekin
