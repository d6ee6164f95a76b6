#include "sparsekin/hiergrid.hpp"

#include "sparsekin/basis1d.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <stdexcept>

namespace sparsekin
{
namespace
{
int constexpr bits_per_dim = 10;
}

element_key::element_key(std::vector<int> const &levels,
                         std::vector<int> const &positions)
    : dims_(static_cast<int>(levels.size()))
{
  if (levels.size() != positions.size() || dims_ > max_dims)
    throw std::invalid_argument("element_key: bad dimension");
  blocks_.fill(0);
  for (int m = 0; m < dims_; m++)
  {
    int const l = levels[m], j = positions[m];
    if (l < 0 || l > max_level || j < 0 || j >= std::max(1, l == 0 ? 1 : 1 << (l - 1)))
      throw std::out_of_range("element_key: invalid level/position pair");
    blocks_[m] = block_index(l, j);
  }
}

int element_key::level(int m) const { return block_level(blocks_[m]); }
int element_key::position(int m) const { return block_position(blocks_[m]); }

int element_key::level_sum() const
{
  int s = 0;
  for (int m = 0; m < dims_; m++)
    s += level(m);
  return s;
}

bool element_key::is_root() const
{
  for (int m = 0; m < dims_; m++)
    if (blocks_[m] != 0)
      return false;
  return true;
}

std::uint64_t element_key::pack() const
{
  std::uint64_t code = 0;
  for (int m = 0; m < dims_; m++)
    code |= std::uint64_t(blocks_[m]) << (bits_per_dim * m);
  return code;
}

element_key element_key::unpack(std::uint64_t code, int dims)
{
  element_key key(dims);
  for (int m = 0; m < dims; m++)
    key.blocks_[m] = int((code >> (bits_per_dim * m)) & ((1u << bits_per_dim) - 1));
  return key;
}

adaptive_grid::adaptive_grid(int degree, std::vector<int> caps)
    : degree_(degree), caps_(std::move(caps))
{
  if (caps_.empty() || static_cast<int>(caps_.size()) > max_dims)
    throw std::invalid_argument("adaptive_grid: unsupported dimension");
  for (int c : caps_)
    if (c < 0 || c > max_level)
      throw std::invalid_argument("adaptive_grid: level cap out of range");
  block_size_ = 1;
  for (size_t m = 0; m < caps_.size(); m++)
    block_size_ *= degree_ + 1;
}

bool adaptive_grid::respects_caps(element_key const &key) const
{
  for (int m = 0; m < dims(); m++)
    if (key.level(m) > caps_[m])
      return false;
  return true;
}

bool adaptive_grid::insert(element_key const &key)
{
  if (key.dims() != dims())
    throw std::invalid_argument("adaptive_grid: key dimension mismatch");
  if (!respects_caps(key))
    throw std::out_of_range("adaptive_grid: key exceeds level caps");
  std::uint64_t const code = key.pack();
  auto [it, added] = index_.try_emplace(code, size());
  if (added)
    codes_.push_back(code);
  return added;
}

void adaptive_grid::dump(std::ostream &os) const
{
  for (int i = 0; i < size(); i++)
  {
    element_key const k = key(i);
    for (int m = 0; m < dims(); m++)
      os << k.level(m) << ' ';
    for (int m = 0; m < dims(); m++)
      os << k.position(m) << (m + 1 < dims() ? " " : "\n");
  }
}

namespace
{
// enumerates all level tuples accepted by the predicate, then all positions
void enumerate(adaptive_grid &grid,
               std::function<bool(std::vector<int> const &)> const &accept)
{
  int const d = grid.dims();
  std::vector<int> levels(d, 0);
  std::function<void(int)> level_loop = [&](int m) {
    if (m == d)
    {
      if (!accept(levels))
        return;
      element_key key(d);
      std::function<void(int)> pos_loop = [&](int q) {
        if (q == d)
        {
          grid.insert(key);
          return;
        }
        int const count = levels[q] == 0 ? 1 : 1 << (levels[q] - 1);
        for (int j = 0; j < count; j++)
        {
          key.set_block(q, block_index(levels[q], j));
          pos_loop(q + 1);
        }
      };
      pos_loop(0);
      return;
    }
    for (int l = 0; l <= grid.caps()[m]; l++)
    {
      levels[m] = l;
      level_loop(m + 1);
    }
  };
  level_loop(0);
}
} // namespace

adaptive_grid full_index_set(std::vector<int> const &levels, int degree)
{
  adaptive_grid grid(degree, levels);
  enumerate(grid, [](std::vector<int> const &) { return true; });
  return grid;
}

adaptive_grid sparse_index_set(int level, int dims, int degree,
                               std::vector<int> caps)
{
  if (level < 0)
    throw std::invalid_argument("sparse_index_set: negative level");
  if (caps.empty())
    caps.assign(dims, std::min(level, max_level));
  adaptive_grid grid(degree, caps);
  enumerate(grid, [&](std::vector<int> const &l) {
    int s = 0;
    for (int v : l)
      s += v;
    return s <= level;
  });
  return grid;
}

adaptive_grid mixed_index_set(int lx, int lv, int degree, std::vector<int> caps)
{
  if (caps.empty())
    caps = {lx, lv, lv, lv};
  adaptive_grid grid(degree, caps);
  enumerate(grid, [&](std::vector<int> const &l) {
    return l[0] <= lx && l[1] + l[2] + l[3] <= lv;
  });
  return grid;
}

std::vector<element_key> children(element_key const &key,
                                  std::vector<int> const &caps)
{
  std::vector<element_key> out;
  for (int m = 0; m < key.dims(); m++)
  {
    int const l = key.level(m);
    if (l >= caps[m])
      continue;
    element_key child = key;
    if (l == 0)
    {
      child.set_block(m, block_index(1, 0));
      out.push_back(child);
    }
    else
    {
      int const j = key.position(m);
      child.set_block(m, block_index(l + 1, 2 * j));
      out.push_back(child);
      child.set_block(m, block_index(l + 1, 2 * j + 1));
      out.push_back(child);
    }
  }
  return out;
}

std::vector<element_key> parents(element_key const &key)
{
  std::vector<element_key> out;
  for (int m = 0; m < key.dims(); m++)
  {
    int const l = key.level(m);
    if (l == 0)
      continue;
    element_key parent = key;
    parent.set_block(m, l == 1 ? 0 : block_index(l - 1, key.position(m) / 2));
    out.push_back(parent);
  }
  return out;
}

std::vector<block_norm> block_norms(adaptive_grid const &grid,
                                    Eigen::VectorXd const &state)
{
  if (state.size() != grid.num_dofs())
    throw std::invalid_argument("block_norms: state not aligned with grid");
  std::vector<block_norm> norms(grid.size());
  for (int i = 0; i < grid.size(); i++)
  {
    auto const block = state.segment(grid.offset(i), grid.block_size());
    norms[i].l2      = block.norm();
    norms[i].linf    = block.cwiseAbs().maxCoeff();
  }
  return norms;
}

namespace
{
double pick(block_norm const &n, norm_type type)
{
  return type == norm_type::linf ? n.linf : n.l2;
}

double max_norm(std::vector<block_norm> const &norms, norm_type type)
{
  double m = 0;
  for (auto const &n : norms)
    m = std::max(m, pick(n, type));
  return m;
}
} // namespace

refine_result refine(adaptive_grid const &grid,
                     std::vector<block_norm> const &norms, double tau,
                     norm_type type)
{
  if (tau <= 0)
    throw std::invalid_argument("refine: threshold must be positive");
  refine_result r{grid, {}};
  double const top = max_norm(norms, type);
  if (top == 0)
    return r;
  for (int i = 0; i < grid.size(); i++)
  {
    if (pick(norms[i], type) < tau * top)
      continue;
    for (auto const &child : children(grid.key(i), grid.caps()))
      if (r.grid.insert(child))
        r.added.push_back(child);
  }
  return r;
}

adaptive_grid coarsen(adaptive_grid const &grid,
                      std::vector<block_norm> const &norms, double tau,
                      double mu, norm_type type)
{
  if (mu <= 0 || mu >= 1)
    throw std::invalid_argument("coarsen: factor must lie in (0, 1)");
  double const top = max_norm(norms, type);
  adaptive_grid out(grid.degree(), grid.caps());
  for (int i = 0; i < grid.size(); i++)
  {
    element_key const key = grid.key(i);
    if (key.is_root() || pick(norms[i], type) > mu * tau * top)
      out.insert(key);
  }
  return out;
}

Eigen::VectorXd reindex(adaptive_grid const &old_grid,
                        adaptive_grid const &new_grid,
                        Eigen::VectorXd const &state)
{
  if (state.size() != old_grid.num_dofs())
    throw std::invalid_argument("reindex: state not aligned with grid");
  if (old_grid.block_size() != new_grid.block_size())
    throw std::invalid_argument("reindex: block size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(new_grid.num_dofs());
  int const bs        = new_grid.block_size();
  for (int i = 0; i < new_grid.size(); i++)
  {
    int const src = old_grid.find(new_grid.code(i));
    if (src >= 0)
      out.segment(new_grid.offset(i), bs) = state.segment(old_grid.offset(src), bs);
  }
  return out;
}

} // namespace sparsekin
