#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace sparsekin
{
//! largest polynomial degree with a tabulated Alpert family
int constexpr max_degree = 3;

struct quadrature
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

//! Gauss-Legendre rule on [-1, 1]
quadrature gauss_legendre(int num_points);

//! Legendre polynomial P_n and its derivative on [-1, 1]
double legendre(int n, double x);
double legendre_derivative(int n, double x);

struct interval
{
  double lo = 0;
  double hi = 1;
  double length() const { return hi - lo; }
};

enum class boundary_type
{
  periodic,
  zero_flux
};

// hierarchical block index: 0 for level 0, otherwise 2^(level-1) + position
inline int block_index(int level, int position)
{
  return (level == 0) ? 0 : (1 << (level - 1)) + position;
}
inline int block_level(int block)
{
  int level = 0;
  while (block > 0)
  {
    block >>= 1;
    ++level;
  }
  return level;
}
inline int block_position(int block)
{
  return (block == 0) ? 0 : block - (1 << (block_level(block) - 1));
}

/*!
 * \brief Alpert multiwavelets of degree k on (-1, 1)
 *
 * Each mother wavelet is stored as two polynomial pieces in monomial form,
 * one on (-1, 0) and one on (0, 1). Signs are chosen so the leading
 * coefficient of the (0, 1) piece is positive; for k = 2 this reproduces
 * the classical closed-form wavelets.
 */
class wavelet_family
{
public:
  explicit wavelet_family(int degree);

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }

  //! row i holds the monomial coefficients of phi_{i+1} on (0, 1)
  Eigen::MatrixXd const &right_monomials() const { return right_; }
  //! row i holds the monomial coefficients of phi_{i+1} on (-1, 0)
  Eigen::MatrixXd const &left_monomials() const { return left_; }

  //! phi_{i+1}(y), zero outside [-1, 1]; i is zero based
  double mother(int i, double y) const;
  //! normalized shifted Legendre polynomial of degree i on (0, 1)
  double scaling(int i, double y) const;

private:
  int degree_;
  Eigen::MatrixXd right_;
  Eigen::MatrixXd left_;
};

std::shared_ptr<wavelet_family const> get_wavelet_family(int degree);

/*!
 * \brief Value of g_{level,position}^{i} at y in (0, 1), i zero based.
 *
 * Level 0 returns the normalized shifted Legendre polynomials. Throws
 * std::out_of_range for an invalid index triple.
 */
double eval_wavelet(wavelet_family const &family, int level, int position,
                    int i, double y);

/*!
 * \brief Orthogonal change of basis at a fixed level.
 *
 * forward maps per-cell orthonormal Legendre coefficients (cell-major, degree
 * minor) to hierarchical wavelet coefficients (block-major, index minor).
 * The matrix does not depend on the physical interval.
 */
struct basis_transform
{
  int degree = 0;
  int level  = 0;
  Eigen::SparseMatrix<double> forward;

  Eigen::VectorXd to_wavelet(Eigen::VectorXd const &legendre) const
  {
    return forward * legendre;
  }
  Eigen::VectorXd to_legendre(Eigen::VectorXd const &wavelet) const
  {
    return forward.transpose() * wavelet;
  }
};

std::shared_ptr<basis_transform const> build_transform(int degree, int level);

//! per-cell orthonormal Legendre representation of a piecewise polynomial
struct dg_function_1d
{
  interval domain;
  int level  = 0;
  int degree = 0;
  std::vector<double> coeffs; // cell-major

  int num_cells() const { return 1 << level; }
  double cell_width() const { return domain.length() / num_cells(); }
  double eval(double x) const;
  //! evaluate inside a given cell at reference coordinate xi in [-1, 1]
  double eval_cell(int cell, double xi) const;
  double integral() const;
};

enum class operator_kind
{
  mass,
  upwind_advection,
  flux_divergence,
  jump_penalty,
  ldg_gradient,
  ldg_diffusion,
  coordinate_multiply,
  coefficient_multiply,
};

std::string to_string(operator_kind kind);

/*!
 * \brief Description of a one dimensional DG bilinear form.
 *
 * Conventions, with [w] = w^- - w^+ (left trace minus right trace) and
 * {w} the face average:
 *  - flux_divergence:  -(a w, g') + sum_faces ({a w} + penalty/2 [w]) [g],
 *    with the face penalty the larger of its two one-sided values
 *  - upwind_advection: right-hand side of w_t + (a w)' = 0, i.e. the negative
 *    of flux_divergence with penalty |a|
 *  - jump_penalty:     sum_faces 1/2 [w][g]
 *  - ldg_gradient:     (w', g) - sum_faces [w]{g}; with zero-flux boundaries
 *    and dirichlet_closure the boundary traces are jumped against zero
 *  - ldg_diffusion:    -(G_interior)^T G, the LDG second derivative with the
 *    auxiliary variable eliminated
 *  - coordinate_multiply / coefficient_multiply: (c w, g)
 */
struct operator_spec
{
  operator_kind kind = operator_kind::mass;
  std::function<double(double)> wind;
  std::function<double(double)> penalty;
  std::function<double(double)> coefficient;
  //! alternative to coefficient: a piecewise polynomial on a mesh no finer
  //! than the assembly mesh
  dg_function_1d const *dg_coefficient = nullptr;
  //! points where the coefficient has a kink, quadrature splits there
  std::vector<double> breakpoints;
  bool dirichlet_closure = false;
};

/*!
 * \brief Assembled 1D operator in orthonormal per-cell Legendre coordinates.
 *
 * Entry (i, j) is the bilinear form evaluated with trial basis j and test
 * basis i.
 */
Eigen::SparseMatrix<double>
assemble_legendre_operator(operator_spec const &spec, int degree, int level,
                           interval const &domain, boundary_type boundary);

//! integrals of y^power against every Legendre basis function
Eigen::VectorXd legendre_moment(int power, int degree, int level,
                                interval const &domain);

//! L2 projection of a function onto per-cell Legendre coordinates
Eigen::VectorXd legendre_project(std::function<double(double)> const &f,
                                 int degree, int level, interval const &domain,
                                 int num_points = 0);

struct operator_matrix_1d
{
  operator_kind kind = operator_kind::mass;
  int degree = 0;
  int level  = 0;
  interval domain;
  boundary_type boundary = boundary_type::zero_flux;
  Eigen::MatrixXd values; // wavelet coordinates

  int rows() const { return static_cast<int>(values.rows()); }
};

//! assembles in Legendre coordinates and conjugates into wavelet coordinates
operator_matrix_1d assemble_1d_operator(operator_spec const &spec, int degree,
                                        int level, interval const &domain,
                                        boundary_type boundary);

//! integrals of y^power against every wavelet, wavelet coordinates
Eigen::VectorXd wavelet_moment(int power, int degree, int level,
                               interval const &domain);

//! exact L2 projection of f onto the level-N wavelet space
Eigen::VectorXd wavelet_project(std::function<double(double)> const &f,
                                int degree, int level, interval const &domain,
                                int num_points = 0);

} // namespace sparsekin
