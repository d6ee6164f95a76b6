#include "sparsekin/basis1d.hpp"
#include "sparsekin/hiergrid.hpp"

#include <catch_amalgamated.hpp>

#include <functional>
#include <random>
#include <set>
#include <sstream>

using namespace sparsekin;

namespace
{
// every block tuple below the caps, filtered by a predicate on the levels
std::set<std::vector<int>> brute_force(std::vector<int> const &caps,
                                       std::function<bool(std::vector<int> const &)> const &keep)
{
  std::set<std::vector<int>> out;
  int const d = static_cast<int>(caps.size());
  std::vector<int> blocks(d, 0);
  std::function<void(int)> rec = [&](int m) {
    if (m == d)
    {
      std::vector<int> levels(d);
      for (int i = 0; i < d; i++)
        levels[i] = block_level(blocks[i]);
      if (keep(levels))
        out.insert(blocks);
      return;
    }
    for (int b = 0; b < (1 << caps[m]); b++)
    {
      blocks[m] = b;
      rec(m + 1);
    }
  };
  rec(0);
  return out;
}

std::set<std::vector<int>> as_set(adaptive_grid const &g)
{
  std::set<std::vector<int>> out;
  for (int i = 0; i < g.size(); i++)
  {
    std::vector<int> b(g.dims());
    for (int m = 0; m < g.dims(); m++)
      b[m] = g.key(i).block(m);
    out.insert(b);
  }
  return out;
}
} // namespace

TEST_CASE("sparse grid dimension matches the quoted value", "[hiergrid]")
{
  REQUIRE(sparse_index_set(9, 2, 0).num_dofs() == 2816);
}

TEST_CASE("one dimensional space dimensions", "[hiergrid]")
{
  for (int k = 0; k <= 3; k++)
    for (int l = 0; l <= max_level; l++)
    {
      adaptive_grid const g = full_index_set({l}, k);
      REQUIRE(g.num_dofs() == (Eigen::Index(1) << l) * (k + 1));
      int at_level = 0;
      for (int i = 0; i < g.size(); i++)
        at_level += g.key(i).level(0) == l;
      int const expected = l == 0 ? 1 : (1 << (l - 1));
      REQUIRE(at_level == expected);
    }
}

TEST_CASE("index sets match brute-force enumeration", "[hiergrid]")
{
  for (int d = 1; d <= 4; d++)
    for (int n = 0; n <= 4; n++)
    {
      std::vector<int> caps(d, n);
      auto sum_ok = [n](std::vector<int> const &l) {
        int s = 0;
        for (int v : l)
          s += v;
        return s <= n;
      };
      REQUIRE(as_set(sparse_index_set(n, d, 1)) == brute_force(caps, sum_ok));
      REQUIRE(as_set(full_index_set(caps, 1)) == brute_force(caps, [](auto const &) { return true; }));
    }
  for (int lx = 0; lx <= 3; lx++)
    for (int lv = 0; lv <= 3; lv++)
    {
      auto keep = [&](std::vector<int> const &l) { return l[1] + l[2] + l[3] <= lv; };
      REQUIRE(as_set(mixed_index_set(lx, lv, 0)) == brute_force({lx, lv, lv, lv}, keep));
    }
}

TEST_CASE("element keys pack and validate", "[hiergrid]")
{
  element_key const k({3, 0, 2}, {3, 0, 1});
  REQUIRE(k.level(0) == 3);
  REQUIRE(k.position(0) == 3);
  REQUIRE(k.level_sum() == 5);
  REQUIRE(element_key::unpack(k.pack(), 3) == k);
  REQUIRE_THROWS(element_key({2}, {2}));
  REQUIRE(element_key(std::vector<int>{0, 0}, std::vector<int>{0, 0}).is_root());
}

TEST_CASE("children and parents are inverse relations", "[hiergrid]")
{
  std::vector<int> caps{3, 3};
  adaptive_grid const g = full_index_set(caps, 0);
  for (int i = 0; i < g.size(); i++)
  {
    element_key const key = g.key(i);
    for (auto const &c : children(key, caps))
    {
      auto const ps = parents(c);
      REQUIRE(std::find(ps.begin(), ps.end(), key) != ps.end());
      REQUIRE(c.level_sum() == key.level_sum() + 1);
    }
  }
  // capped dimensions have no children
  REQUIRE(children(element_key({3, 3}, {0, 0}), caps).empty());
  REQUIRE(children(element_key({0, 1}, {0, 0}), caps).size() == 3);
}

TEST_CASE("grid insert respects caps and dump format", "[hiergrid]")
{
  adaptive_grid g(1, {2, 1});
  REQUIRE(g.insert(element_key({2, 1}, {1, 0})));
  REQUIRE_FALSE(g.insert(element_key({2, 1}, {1, 0})));
  REQUIRE_THROWS(g.insert(element_key({3, 0}, {0, 0})));
  std::ostringstream os;
  g.dump(os);
  REQUIRE(os.str() == "2 1 1 0\n");
}

TEST_CASE("refinement and coarsening follow the threshold rules", "[hiergrid]")
{
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  adaptive_grid const g = sparse_index_set(3, 3, 1, {4, 4, 4});
  Eigen::VectorXd state(g.num_dofs());
  for (auto &v : state)
    v = u(rng) * std::pow(10.0, -4 * std::abs(u(rng)));
  auto const norms = block_norms(g, state);
  double top = 0;
  for (auto const &n : norms)
    top = std::max(top, n.linf);

  double const tau = 1e-2, mu = 0.1;
  auto const r = refine(g, norms, tau);
  for (int i = 0; i < g.size(); i++)
  {
    bool const passes = norms[i].linf >= tau * top;
    for (auto const &c : children(g.key(i), g.caps()))
      if (passes)
        REQUIRE(r.grid.contains(c));
  }
  // nothing else is added
  for (auto const &a : r.added)
  {
    bool has_passing_parent = false;
    for (auto const &p : parents(a))
    {
      int const idx = g.find(p);
      has_passing_parent |= idx >= 0 && norms[idx].linf >= tau * top;
    }
    REQUIRE(has_passing_parent);
    REQUIRE_FALSE(g.contains(a));
  }
  REQUIRE(r.grid.size() == g.size() + static_cast<int>(r.added.size()));

  adaptive_grid const c = coarsen(g, norms, tau, mu);
  for (int i = 0; i < g.size(); i++)
  {
    bool const keep = g.key(i).is_root() || norms[i].linf > mu * tau * top;
    REQUIRE(c.contains(g.key(i)) == keep);
  }

  // the l2 variant uses the block l2 norms
  auto const r2 = refine(g, norms, tau, norm_type::l2);
  REQUIRE(r2.grid.size() >= g.size());
}

TEST_CASE("refinement of a zero state adds nothing", "[hiergrid]")
{
  adaptive_grid const g = sparse_index_set(2, 2, 1);
  auto const r = refine(g, block_norms(g, Eigen::VectorXd::Zero(g.num_dofs())), 1e-3);
  REQUIRE(r.added.empty());
}

TEST_CASE("reindex copies shared blocks and zero-fills new ones", "[hiergrid]")
{
  adaptive_grid const a = sparse_index_set(2, 2, 1);
  adaptive_grid const b = full_index_set({2, 2}, 1);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(a.num_dofs(), 1, double(a.num_dofs()));
  Eigen::VectorXd const y = reindex(a, b, x);
  for (int i = 0; i < b.size(); i++)
  {
    int const src = a.find(b.key(i));
    auto const blk = y.segment(b.offset(i), b.block_size());
    if (src < 0)
      REQUIRE(blk.norm() == 0.0);
    else
      REQUIRE(blk == x.segment(a.offset(src), a.block_size()));
  }
  REQUIRE(reindex(b, a, y) == x);
}
