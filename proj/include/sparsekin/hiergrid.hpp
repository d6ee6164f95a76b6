#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

namespace sparsekin
{
int constexpr max_dims  = 6;
int constexpr max_level = 10;

/*!
 * \brief Hierarchical element W_{l,j}, stored as one block index per
 *        dimension (see block_index) and packed into a 64-bit word.
 */
class element_key
{
public:
  element_key() = default;
  explicit element_key(int dims) : dims_(dims) { blocks_.fill(0); }
  element_key(std::vector<int> const &levels, std::vector<int> const &positions);

  int dims() const { return dims_; }
  int block(int m) const { return blocks_[m]; }
  void set_block(int m, int b) { blocks_[m] = b; }
  int level(int m) const;
  int position(int m) const;
  int level_sum() const;
  bool is_root() const;

  std::uint64_t pack() const;
  static element_key unpack(std::uint64_t code, int dims);

  bool operator==(element_key const &other) const
  {
    return dims_ == other.dims_ && blocks_ == other.blocks_;
  }

private:
  int dims_ = 0;
  std::array<int, max_dims> blocks_{};
};

enum class norm_type
{
  linf,
  l2
};

struct block_norm
{
  double l2   = 0;
  double linf = 0;
};

/*!
 * \brief Insertion ordered set of active elements with per-dimension caps.
 *
 * Element i owns the coefficient block [i * block_size(), (i+1) * block_size())
 * of any state aligned with the grid. Inside a block the local index is
 * sum_m i_m (k+1)^(d-1-m).
 */
class adaptive_grid
{
public:
  adaptive_grid() = default;
  adaptive_grid(int degree, std::vector<int> caps);

  int dims() const { return static_cast<int>(caps_.size()); }
  int degree() const { return degree_; }
  std::vector<int> const &caps() const { return caps_; }
  int block_size() const { return block_size_; }
  int size() const { return static_cast<int>(codes_.size()); }
  Eigen::Index num_dofs() const { return Eigen::Index(size()) * block_size_; }

  element_key key(int i) const { return element_key::unpack(codes_[i], dims()); }
  std::uint64_t code(int i) const { return codes_[i]; }
  std::vector<std::uint64_t> const &codes() const { return codes_; }
  //! element index or -1 when inactive
  int find(element_key const &key) const { return find(key.pack()); }
  int find(std::uint64_t code) const
  {
    auto it = index_.find(code);
    return it == index_.end() ? -1 : it->second;
  }
  bool contains(element_key const &key) const { return find(key) >= 0; }
  Eigen::Index offset(int i) const { return Eigen::Index(i) * block_size_; }

  //! adds a key if absent; throws when the key exceeds the caps
  bool insert(element_key const &key);
  bool respects_caps(element_key const &key) const;

  //! one line per element: levels then positions
  void dump(std::ostream &os) const;

private:
  int degree_     = 0;
  int block_size_ = 1;
  std::vector<int> caps_;
  std::vector<std::uint64_t> codes_;
  std::unordered_map<std::uint64_t, int> index_;
};

//! every key with l_m <= levels[m]
adaptive_grid full_index_set(std::vector<int> const &levels, int degree);

//! keys with |l|_1 <= level; caps default to level in every dimension
adaptive_grid sparse_index_set(int level, int dims, int degree,
                               std::vector<int> caps = {});

//! full grid of level lx in x times a 3D sparse grid of level lv in v
adaptive_grid mixed_index_set(int lx, int lv, int degree,
                              std::vector<int> caps = {});

std::vector<element_key> children(element_key const &key,
                                  std::vector<int> const &caps);
std::vector<element_key> parents(element_key const &key);

std::vector<block_norm> block_norms(adaptive_grid const &grid,
                                    Eigen::VectorXd const &state);

struct refine_result
{
  adaptive_grid grid;
  std::vector<element_key> added;
};

//! refinement rule: children of every block with norm >= tau * max
refine_result refine(adaptive_grid const &grid,
                     std::vector<block_norm> const &norms, double tau,
                     norm_type type = norm_type::linf);

//! coarsening rule: drop blocks with norm <= mu * tau * max, keep root
adaptive_grid coarsen(adaptive_grid const &grid,
                      std::vector<block_norm> const &norms, double tau,
                      double mu, norm_type type = norm_type::linf);

//! copy shared blocks, zero-fill new blocks, drop missing ones
Eigen::VectorXd reindex(adaptive_grid const &old_grid,
                        adaptive_grid const &new_grid,
                        Eigen::VectorXd const &state);

} // namespace sparsekin
