#include "sparsekin/kronops.hpp"

#include <stdexcept>
#include <unordered_map>

namespace sparsekin
{
namespace
{
int constexpr field_bits = 10;
std::uint64_t constexpr field_ones = (1u << field_bits) - 1;

std::uint64_t field_mask(int m) { return field_ones << (field_bits * m); }

int ipow(int base, int e)
{
  int r = 1;
  for (int i = 0; i < e; i++)
    r *= base;
  return r;
}

// dst += coef * (B applied along dimension m) src, tensors of size p^d
void apply_along(double const *b, double const *src, double *dst, int p,
                 int outer, int inner, double coef)
{
  for (int o = 0; o < outer; o++)
  {
    double const *s = src + o * p * inner;
    double *t        = dst + o * p * inner;
    for (int r = 0; r < p; r++)
    {
      double *tr = t + r * inner;
      for (int c = 0; c < p; c++)
      {
        double const a = coef * b[r * p + c];
        if (a == 0.0)
          continue;
        double const *sc = s + c * inner;
        for (int i = 0; i < inner; i++)
          tr[i] += a * sc[i];
      }
    }
  }
}
} // namespace

kron_factor::kron_factor(Eigen::MatrixXd values, int degree)
    : values_(std::move(values)), degree_(degree)
{
  int const p = degree + 1;
  if (values_.rows() != values_.cols() || values_.rows() % p != 0)
    throw std::invalid_argument("kron_factor: matrix is not block square");
  num_blocks_ = static_cast<int>(values_.rows() / p);

  double const drop = 1e-15 * values_.cwiseAbs().maxCoeff();
  values_           = values_.unaryExpr([drop](double v) { return std::abs(v) <= drop ? 0.0 : v; });

  columns_.resize(num_blocks_);
  for (int c = 0; c < num_blocks_; c++)
  {
    for (int r = 0; r < num_blocks_; r++)
    {
      auto const blk = values_.block(r * p, c * p, p, p);
      if (blk.cwiseAbs().maxCoeff() == 0.0)
        continue;
      int const offset = static_cast<int>(blocks_.size());
      for (int i = 0; i < p; i++)
        for (int j = 0; j < p; j++)
          blocks_.push_back(blk(i, j));
      columns_[c].push_back({r, offset});
    }
  }
}

Eigen::MatrixXd kron_factor::diagonal_block(int b) const
{
  int const p = degree_ + 1;
  return values_.block(b * p, b * p, p, p);
}

factor_ptr make_factor(Eigen::MatrixXd values, int degree)
{
  return std::make_shared<kron_factor const>(std::move(values), degree);
}

separable_operator::separable_operator(int degree, std::vector<int> caps)
    : degree_(degree), caps_(std::move(caps))
{}

void separable_operator::add_term(double scale, std::vector<factor_ptr> factors)
{
  if (static_cast<int>(factors.size()) != dims())
    throw std::invalid_argument("add_term: one factor per dimension required");
  int const p = degree_ + 1;
  for (int m = 0; m < dims(); m++)
    if (factors[m] && factors[m]->values().rows() != (p << caps_[m]))
      throw std::invalid_argument("add_term: factor size does not match the cap level");
  terms_.push_back({scale, std::move(factors)});
}

void separable_operator::add_identity(double scale)
{
  terms_.push_back({scale, std::vector<factor_ptr>(dims())});
}

void separable_operator::simplify()
{
  std::vector<kron_term> kept;
  std::vector<Eigen::MatrixXd> merged(dims());
  double identity = 0;
  bool has_identity = false;
  for (auto const &t : terms_)
  {
    int count = 0, axis = -1;
    for (int m = 0; m < dims(); m++)
      if (t.factors[m])
      {
        count++;
        axis = m;
      }
    if (count == 0)
    {
      identity += t.scale;
      has_identity = true;
    }
    else if (count == 1)
    {
      if (merged[axis].size() == 0)
        merged[axis] = t.scale * t.factors[axis]->values();
      else
        merged[axis] += t.scale * t.factors[axis]->values();
    }
    else
      kept.push_back(t);
  }
  terms_ = std::move(kept);
  for (int m = 0; m < dims(); m++)
  {
    if (merged[m].size() == 0)
      continue;
    std::vector<factor_ptr> f(dims());
    f[m] = make_factor(std::move(merged[m]), degree_);
    terms_.push_back({1.0, std::move(f)});
  }
  if (has_identity && identity != 0.0)
    add_identity(identity);
}

separable_operator add_scaled(separable_operator const &a,
                              separable_operator const &b, double alpha,
                              double beta)
{
  if (a.caps() != b.caps() || a.degree() != b.degree())
    throw std::invalid_argument("add_scaled: operators live on different spaces");
  separable_operator out(a.degree(), a.caps());
  for (auto const &t : a.terms())
    if (alpha != 0.0)
      out.add_term(alpha * t.scale, t.factors);
  for (auto const &t : b.terms())
    if (beta != 0.0)
      out.add_term(beta * t.scale, t.factors);
  return out;
}

kron_applier::kron_applier(adaptive_grid const &grid) : grid_(grid) {}

void kron_applier::check(separable_operator const &op) const
{
  if (op.caps() != grid_.caps() || op.degree() != grid_.degree())
    throw std::invalid_argument("kron_applier: operator and grid disagree");
}

std::unordered_set<std::uint64_t> const &
kron_applier::projection(std::uint64_t mask) const
{
  auto it = projections_.find(mask);
  if (it != projections_.end())
    return it->second;
  auto &set = projections_[mask];
  set.reserve(grid_.size() * 2);
  for (auto code : grid_.codes())
    set.insert(code & mask);
  return set;
}

Eigen::VectorXd kron_applier::apply(separable_operator const &op,
                                    Eigen::VectorXd const &x) const
{
  Eigen::VectorXd y = Eigen::VectorXd::Zero(grid_.num_dofs());
  apply_add(op, x, 1.0, y);
  return y;
}

void kron_applier::apply_add(separable_operator const &op,
                             Eigen::VectorXd const &x, double alpha,
                             Eigen::VectorXd &y) const
{
  check(op);
  if (x.size() != grid_.num_dofs() || y.size() != grid_.num_dofs())
    throw std::invalid_argument("kron_applier: state not aligned with grid");
  for (auto const &t : op.terms())
    apply_term(t, x, alpha, y);
}

void kron_applier::apply_term(kron_term const &term, Eigen::VectorXd const &x,
                              double alpha, Eigen::VectorXd &y) const
{
  int const d  = grid_.dims();
  int const p  = grid_.degree() + 1;
  int const bs = grid_.block_size();
  double const coef = alpha * term.scale;
  if (coef == 0.0)
    return;

  std::vector<int> sweep;
  std::uint64_t mask = 0;
  for (int m = 0; m < d; m++)
  {
    if (term.factors[m])
      sweep.push_back(m);
    else
      mask |= field_mask(m);
  }
  if (sweep.empty())
  {
    y += coef * x;
    return;
  }

  std::vector<std::uint64_t> keys(grid_.codes());
  std::vector<double> storage;
  double const *data = x.data();

  for (size_t t = 0; t < sweep.size(); t++)
  {
    int const m          = sweep[t];
    kron_factor const &f = *term.factors[m];
    int const outer      = ipow(p, m);
    int const inner      = ipow(p, d - 1 - m);
    int const shift      = field_bits * m;
    mask |= field_mask(m);
    bool const last = t + 1 == sweep.size();

    if (last)
    {
      for (size_t s = 0; s < keys.size(); s++)
      {
        std::uint64_t const base = keys[s] & ~field_mask(m);
        int const cb             = int((keys[s] >> shift) & field_ones);
        for (auto const &cpl : f.column(cb))
        {
          int const row = grid_.find(base | (std::uint64_t(cpl.row_block) << shift));
          if (row < 0)
            continue;
          apply_along(f.block_data(cpl.offset), data + s * bs,
                      y.data() + grid_.offset(row), p, outer, inner, coef);
        }
      }
      return;
    }

    auto const &allowed = projection(mask);
    std::vector<std::uint64_t> next_keys;
    std::vector<double> next;
    std::unordered_map<std::uint64_t, int> index;
    index.reserve(keys.size() * 4);
    next_keys.reserve(keys.size() * 2);
    next.reserve(keys.size() * 2 * bs);
    for (size_t s = 0; s < keys.size(); s++)
    {
      std::uint64_t const base = keys[s] & ~field_mask(m);
      int const cb             = int((keys[s] >> shift) & field_ones);
      for (auto const &cpl : f.column(cb))
      {
        std::uint64_t const code = base | (std::uint64_t(cpl.row_block) << shift);
        if (!allowed.count(code & mask))
          continue;
        auto [it, added] = index.try_emplace(code, static_cast<int>(next_keys.size()));
        if (added)
        {
          next_keys.push_back(code);
          next.resize(next.size() + bs, 0.0);
        }
        apply_along(f.block_data(cpl.offset), data + s * bs,
                    next.data() + std::size_t(it->second) * bs, p, outer, inner, 1.0);
      }
    }
    keys    = std::move(next_keys);
    storage = std::move(next);
    data    = storage.data();
  }
}

std::vector<Eigen::MatrixXd>
kron_applier::block_diagonal(separable_operator const &op) const
{
  check(op);
  int const d  = grid_.dims();
  int const p  = grid_.degree() + 1;
  int const bs = grid_.block_size();
  std::vector<Eigen::MatrixXd> blocks(grid_.size(), Eigen::MatrixXd::Zero(bs, bs));
  Eigen::MatrixXd const id = Eigen::MatrixXd::Identity(p, p);
  for (int e = 0; e < grid_.size(); e++)
  {
    element_key const key = grid_.key(e);
    for (auto const &t : op.terms())
    {
      Eigen::MatrixXd acc = Eigen::MatrixXd::Constant(1, 1, t.scale);
      for (int m = 0; m < d; m++)
      {
        Eigen::MatrixXd const f = t.factors[m] ? t.factors[m]->diagonal_block(key.block(m)) : id;
        Eigen::MatrixXd next(acc.rows() * p, acc.cols() * p);
        for (int i = 0; i < acc.rows(); i++)
          for (int j = 0; j < acc.cols(); j++)
            next.block(i * p, j * p, p, p) = acc(i, j) * f;
        acc = std::move(next);
      }
      blocks[e] += acc;
    }
  }
  return blocks;
}

Eigen::VectorXd apply(separable_operator const &op, adaptive_grid const &grid,
                      Eigen::VectorXd const &x)
{
  return kron_applier(grid).apply(op, x);
}

std::vector<Eigen::MatrixXd> compose_block_diag(separable_operator const &op,
                                                adaptive_grid const &grid)
{
  return kron_applier(grid).block_diagonal(op);
}

} // namespace sparsekin
