#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "paravmo/oscillation.hpp"
#include "support.hpp"

using namespace paravmo;
using doctest::Approx;

namespace {

SimpleFunction real(std::initializer_list<double> v) { return SimpleFunction::from_real(std::vector<double>(v)); }

double brute_modulus(const SimpleFunction& b, const Measure& mu, double p, auto keep) {
  double s = 0.0;
  for (CubeId q : mu.tree().all_cubes()) {
    if (keep(q)) s = std::max(s, oracle::osc(b, mu, q, p));
  }
  return s;
}

}  // namespace

TEST_CASE("osc examples") {
  const auto t1 = oracle::unit_tree(1);
  const Measure leb1 = Measure::lebesgue(t1);
  for (double p : {1.0, 2.0, 3.7}) CHECK(osc(real({1, 0}), t1->root(), p, leb1) == Approx(0.5));
  CHECK(osc(SimpleFunction::constant(2, 4.0), t1->root(), 2, leb1) == 0.0);
  const auto t2 = oracle::unit_tree(2);
  CHECK(osc(real({1, 0, 0, 0}), t2->root(), 1, Measure::lebesgue(t2)) == Approx(3.0 / 8.0));
}

TEST_CASE("osc matches direct sums and the 2 inf_c bound") {
  const auto t = oracle::unit_tree(4, 2);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Measure mu = oracle::random_measure(t, seed, 0.25);
    const SimpleFunction b = oracle::random_function(t->leaf_count(), seed + 50, seed % 2 == 0);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      const auto all = all_oscillations(b, p, mu);
      for (CubeId q : t->all_cubes()) {
        const double expect = oracle::osc(b, mu, q, p);
        CHECK(osc(b, q, p, mu) == Approx(expect).epsilon(1e-11));
        CHECK(all[q.value] == Approx(expect).epsilon(1e-11));
      }
    }
  }
  // Exhaustive c-scan on a small value set.
  const Measure mu = oracle::random_measure(oracle::unit_tree(3), 9);
  const SimpleFunction b = real({0, 1, 1, 2, 0, 5, 1, 1});
  for (double p : {1.0, 2.0, 3.0}) {
    double best = INFINITY;
    for (int k = -100; k <= 700; ++k) {
      const SimpleFunction c = b - SimpleFunction::constant(8, k / 100.0);
      best = std::min(best, oracle::lp(c, mu, p) / std::pow(mu.total_mass(), 1.0 / p));
    }
    CHECK(osc(b, mu.tree().root(), p, mu) <= 2 * best + 1e-12);
  }
}

TEST_CASE("bmo norm") {
  const auto t1 = oracle::unit_tree(3);
  const Measure leb = Measure::lebesgue(t1);
  SimpleFunction b(8);
  for (int i = 0; i < 4; ++i) b[i] = 1.0;
  CHECK(bmo_norm(b, CubeCollection::all(*t1), 2, leb) == Approx(0.5));
  CHECK(bmo_norm(SimpleFunction::constant(8, 1.0), CubeCollection::all(*t1), 2, leb) == 0.0);
  CHECK(bmo_norm(b, CubeCollection(*t1, {t1->root()}), 2, leb) == Approx(osc(b, t1->root(), 2, leb)));
  CHECK(bmo_norm(b, CubeCollection(), 2, leb) == 0.0);
}

TEST_CASE("collections") {
  const auto t = oracle::unit_tree(3);
  const auto all = CubeCollection::all(*t);
  CHECK(all.size() == 15);
  CHECK(CubeCollection::non_leaf(*t).size() == 7);
  CHECK(all.is_connected(*t));
  const CubeId leaf = t->leaf_cube(0);
  CHECK_FALSE(CubeCollection(*t, {t->root(), leaf}).is_connected(*t));
  CHECK(CubeCollection(*t, {leaf, t->root()}).ids().front() == t->root());
  const CubeId right = t->children(t->root())[1];
  CHECK(all.below(*t, right).size() == 7);
  CHECK(all.minus(*t, all.below(*t, right)).united(*t, all.below(*t, right)) == all);
}

TEST_CASE("vmo moduli agree with exhaustive sups") {
  // Windows shifted off the origin so that distant cubes exist.
  const auto t = std::make_shared<const DyadicTree>(1, -3, 4, std::vector<DyadicRational>{DyadicRational(8, 0)});
  const std::vector<double> thresholds{1, 2, 4, 8, 16, 32};
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Measure mu = oracle::random_measure(t, seed, 0.2);
    const SimpleFunction b = oracle::random_function(t->leaf_count(), seed);
    for (double p : {1.0, 2.0}) {
      const VmoModuli m = vmo_moduli(b, mu, p, thresholds);
      for (std::size_t i = 0; i < thresholds.size(); ++i) {
        const double M = thresholds[i];
        CHECK(m.heavy[i] == Approx(brute_modulus(b, mu, p, [&](CubeId q) { return oracle::mass(mu, t->leaves(q).begin, t->leaves(q).end) >= M; })));
        CHECK(m.light[i] == Approx(brute_modulus(b, mu, p, [&](CubeId q) { return oracle::mass(mu, t->leaves(q).begin, t->leaves(q).end) <= 1 / M; })));
        CHECK(m.distant[i] == Approx(brute_modulus(b, mu, p, [&](CubeId q) { return t->distance(q) >= M; })));
        if (i > 0) {
          CHECK(m.heavy[i] <= m.heavy[i - 1]);
          CHECK(m.light[i] <= m.light[i - 1]);
          CHECK(m.distant[i] <= m.distant[i - 1]);
        }
      }
    }
  }
  SUBCASE("constant symbol and unit window") {
    const auto u = oracle::unit_tree(5);
    const Measure leb = Measure::lebesgue(u);
    const VmoModuli z = vmo_moduli(SimpleFunction::constant(32, 3.0), leb, 2, thresholds);
    for (std::size_t i = 0; i < thresholds.size(); ++i) CHECK(z.heavy[i] + z.light[i] + z.distant[i] == 0.0);
    SimpleFunction h(32);
    for (CubeId q : u->cubes_at_level(2)) {
      const auto r = u->leaves(q);
      for (std::size_t x = r.begin; x < r.end; ++x) h[x] = x < r.begin + r.size() / 2 ? 1.0 : -1.0;
    }
    const std::vector<double> grid{2, 8, 16};
    const VmoModuli hm = vmo_moduli(h, leb, 2, grid);
    CHECK(hm.light[0] > 0.0);
    CHECK(hm.light[1] == 0.0);
    CHECK(hm.light[2] == 0.0);
    for (double d : hm.distant) CHECK(d == 0.0);
  }
  CHECK_THROWS_AS(vmo_moduli(SimpleFunction(16), Measure::lebesgue(oracle::unit_tree(4)), 2, std::vector<double>{2, 1}),
                  std::invalid_argument);
}

TEST_CASE("doubling constant") {
  const auto t = oracle::unit_tree(4);
  CHECK(doubling_constant(Measure::lebesgue(t), CubeCollection::non_leaf(*t)) == Approx(0.5));
  const auto t2 = oracle::unit_tree(2);
  const Measure mu = oracle::weighted(t2, {0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6});
  CHECK(doubling_constant(mu, CubeCollection::non_leaf(*t2)) == Approx(0.25));
  const Measure point = oracle::weighted(t2, {1, 0, 0, 0});
  CHECK(doubling_constant(point, CubeCollection(*t2, {t2->root()})) == 0.0);
  CHECK_THROWS_WITH_AS(doubling_constant(point, CubeCollection::non_leaf(*t2)), "undefined ratio", std::domain_error);
  CHECK_THROWS_AS(doubling_constant(mu, CubeCollection::all(*t2)), std::invalid_argument);
}

TEST_CASE("partition by measure") {
  const auto t = oracle::unit_tree(3);
  const Measure leb = Measure::lebesgue(t);
  const auto all = CubeCollection::all(*t);
  CHECK(partition_by_measure(all, leb, 1).bounded == CubeCollection(*t, {t->root()}));
  const auto p4 = partition_by_measure(all, leb, 4);
  CHECK(p4.bounded.size() == 7);
  for (CubeId q : p4.bounded) CHECK(t->level(q) <= 2);
  CHECK(p4.rest.size() == 8);
  CHECK(partition_by_measure(all, leb, INFINITY).rest.empty());
  CHECK_THROWS_AS(partition_by_measure(all, leb, 0.5), std::invalid_argument);
}

TEST_CASE("partition reduction") {
  const auto t = oracle::unit_tree(3);
  const Measure leb = Measure::lebesgue(t);
  const auto all = CubeCollection::all(*t);
  const auto everything = partition_reduction(all, leb, CubeCollection(*t, {t->root()}));
  CHECK(everything.distant.empty());
  CHECK(everything.inner == all);
  CHECK(everything.outer.empty());

  const CubeId leaf = t->leaf_cube(5);
  const auto one = partition_reduction(all, leb, CubeCollection(*t, {leaf}));
  CHECK(one.inner == CubeCollection(*t, {leaf}));
  for (CubeId q : all) {
    const bool ancestor = q != leaf && t->contains(q, leaf);
    CHECK(one.outer.contains(q) == ancestor);
    CHECK(one.distant.contains(q) == !t->intersects(q, leaf));
  }
  REQUIRE(one.outer_chains.size() == 1);
  CHECK(one.outer_chains[0].second == one.outer);

  const auto none = partition_reduction(CubeCollection(), leb, CubeCollection(*t, {leaf}));
  CHECK(none.inner.empty());
  CHECK(none.outer.empty());
  CHECK(none.distant.empty());

  SUBCASE("disjoint, exhaustive and chained on shifted windows") {
    const auto s = std::make_shared<const DyadicTree>(2, -2, 2, std::vector<DyadicRational>{DyadicRational::integer(-4), DyadicRational::integer(0)});
    const Measure m = Measure::lebesgue(s);
    const auto coll = CubeCollection::all(*s);
    for (double M : {0.5, 1.0, 2.0, 3.0, 5.0}) {
      const auto part = partition_reduction(coll, m, M);
      CHECK(part.distant.size() + part.inner.size() + part.outer.size() == coll.size());
      CHECK(part.distant.united(*s, part.inner).united(*s, part.outer) == coll);
      std::size_t chained = 0;
      for (const auto& [root, chain] : part.outer_chains) {
        chained += chain.size();
        for (CubeId a : chain) {
          for (CubeId b : chain) CHECK((s->contains(a, b) || s->contains(b, a)));
        }
      }
      CHECK(chained == part.outer.size());
      for (std::size_t i = 0; i < part.outer_chains.size(); ++i) {
        for (std::size_t j = i + 1; j < part.outer_chains.size(); ++j) {
          CHECK_FALSE(s->intersects(part.outer_chains[i].first, part.outer_chains[j].first));
        }
      }
    }
  }
}

TEST_CASE("moduli csv") {
  const auto t = oracle::unit_tree(3);
  std::ostringstream out;
  write_moduli_csv(out, vmo_moduli(SimpleFunction(8), Measure::lebesgue(t), 2, default_thresholds()));
  const std::string s = out.str();
  CHECK(std::count(s.begin(), s.end(), '\n') == 9);
}

TEST_CASE("default anchors are maximal cubes inside the ball") {
  const auto s = std::make_shared<const DyadicTree>(2, -2, 2, std::vector<DyadicRational>{DyadicRational::integer(-4), DyadicRational::integer(0)});
  auto far = [&](CubeId q) {
    double f2 = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double lo = s->corner(q, j).to_double();
      const double hi = lo + s->cube(q).side.to_double();
      f2 += std::max(lo * lo, hi * hi);
    }
    return std::sqrt(f2);
  };
  for (double r : {0.5, 1.0, 2.5, 4.0}) {
    const auto anchors = default_anchors(*s, r);
    for (CubeId q : s->all_cubes()) {
      const bool inside = far(q) <= r;
      const bool parent_inside = s->parent(q) != kNoCube && far(CubeId{s->parent(q)}) <= r;
      CHECK(anchors.contains(q) == (inside && !parent_inside));
    }
  }
}
