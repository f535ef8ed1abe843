#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "caper/error.hpp"
#include "caper/harness.hpp"
#include "caper/multilevel.hpp"
#include "support/dense.hpp"
#include "support/generators.hpp"

using namespace caper;
using namespace caper::testing;

namespace {

AlignmentMatrix dense_to_sparse(const Dense& d) {
  std::vector<AlignmentTriplet> t;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d[i].size(); ++j)
      if (d[i][j] != 0.0) t.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), d[i][j]});
  return AlignmentMatrix::from_triplets(d.size(), d.empty() ? 0 : d[0].size(), t);
}

Assignment pairs_of(std::size_t n) {
  Assignment a;
  for (std::size_t u = 0; u < n; ++u) a.fine_to_coarse.push_back(static_cast<NodeId>(u / 2));
  a.num_coarse = (n + 1) / 2;
  return a;
}

AlignmentMatrix random_alignment(std::size_t n1, std::size_t n2, std::size_t per_row, std::uint64_t seed) {
  Rng rng(seed);
  return testing::random_alignment(n1, n2, per_row, rng);
}

}  // namespace

TEST_CASE("projection through identity assignments is a no-op") {
  const auto s = random_alignment(6, 6, 2, 1);
  CHECK(project(s, Assignment::identity(6), Assignment::identity(6)) == s);
}

TEST_CASE("projection expands a merged pair into a block") {
  const auto one = AlignmentMatrix::identity(1);
  const auto fine = project(one, pairs_of(2), pairs_of(2));
  CHECK(dense_alignment(fine) == Dense{{1, 1}, {1, 1}});
}

TEST_CASE("projection of a 2x2 identity is block diagonal") {
  const auto fine = project(AlignmentMatrix::identity(2), pairs_of(4), pairs_of(4));
  CHECK(dense_alignment(fine) == Dense{{1, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}});
}

TEST_CASE("projection equals P1 S P2^T") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g1 = erdos_renyi(30, 4, seed);
    const auto g2 = erdos_renyi(34, 4, seed + 100);
    const auto [c1, a1] = contract(g1, nhem_match(g1));
    const auto [c2, a2] = contract(g2, nhem_match(g2));
    const auto s = random_alignment(c1.num_nodes(), c2.num_nodes(), 3, seed);
    const auto expected =
        multiply(multiply(assignment_matrix(a1), dense_alignment(s)), transpose(assignment_matrix(a2)));
    CHECK(dense_alignment(project(s, a1, a2)) == expected);
  }
}

TEST_CASE("projection is equivariant under supernode relabeling") {
  const auto s = random_alignment(3, 3, 2, 5);
  Assignment a = pairs_of(6);
  // Swap supernodes 0 and 2 on both sides.
  const std::vector<NodeId> swap{2, 1, 0};
  Assignment b = a;
  for (auto& c : b.fine_to_coarse) c = swap[c];
  std::vector<AlignmentTriplet> t;
  for (const auto& x : s.triplets()) t.push_back({swap[x.row], swap[x.col], x.score});
  const auto s_swapped = AlignmentMatrix::from_triplets(3, 3, t);
  CHECK(project(s, a, a) == project(s_swapped, b, b));
}

TEST_CASE("projection rejects mismatched dimensions") {
  CHECK_THROWS_AS(project(AlignmentMatrix::identity(3), pairs_of(4), pairs_of(4)), ValidationError);
}

TEST_CASE("normalize_once examples") {
  auto norm = [](const Dense& d) { return dense_alignment(normalize_once(dense_to_sparse(d))); };
  CHECK(norm({{1, 1}, {1, 1}}) == Dense{{0.5, 0.5}, {0.5, 0.5}});
  CHECK(norm({{2, 0}, {0, 8}}) == Dense{{1, 0}, {0, 1}});
  const auto r = norm({{1, 1}, {0, 1}});
  CHECK(r[0][0] == doctest::Approx(1.0));
  CHECK(r[0][1] == doctest::Approx(1.0 / 3.0));
  CHECK(r[1][0] == 0.0);
  CHECK(r[1][1] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("normalize_once leaves empty rows and columns alone") {
  const auto r = dense_alignment(normalize_once(dense_to_sparse({{0, 0, 0}, {0, 2, 0}})));
  CHECK(r == Dense{{0, 0, 0}, {0, 1, 0}});
}

TEST_CASE("normalize_once matches the dense oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = random_alignment(25, 30, 4, seed);
    Dense expected = dense_alignment(s);
    dense_normalize(expected);
    const auto got = dense_alignment(normalize_once(s));
    for (std::size_t i = 0; i < expected.size(); ++i)
      for (std::size_t j = 0; j < expected[i].size(); ++j)
        CHECK(got[i][j] == doctest::Approx(expected[i][j]).epsilon(1e-12));
  }
}

TEST_CASE("refine step on a path keeps the diagonal") {
  const auto p3 = path_graph(3);
  const auto out = refine_step(AlignmentMatrix::identity(3), p3, p3, 1e-3, 3);
  // A S A = A^2, diag (1,2,1); S o T = diag(1,2,1).
  const auto expected = dense_refine_step(p3, p3, AlignmentMatrix::identity(3), 1e-3);
  const auto got = dense_alignment(out);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(got[i][j] == doctest::Approx(expected[i][j]).epsilon(1e-12));
  const auto m = extract_matching(out);
  CHECK(m == std::vector<NodeId>{0, 1, 2});
}

TEST_CASE("refine step with a zero alignment is epsilon-uniform on its support") {
  const auto g = cycle_graph(4);
  std::vector<AlignmentTriplet> t;
  for (NodeId i = 0; i < 4; ++i) t.push_back({i, i, 0.0});
  const auto zero = AlignmentMatrix::from_triplets(4, 4, t);
  const auto out = refine_step(zero, g, g, 0.01, 4);
  for (NodeId i = 0; i < 4; ++i) {
    const auto row = out.row(i);
    REQUIRE(row.size() == 1);
    CHECK(row[0].col == i);
    CHECK(row[0].score == doctest::Approx(1.0));
  }
}

TEST_CASE("refine step with topk = n matches the dense oracle") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto g1 = random_weighted(40, 3, seed % 3 == 0, seed);
    const auto g2 = random_weighted(40, 3, seed % 3 == 1, seed + 50);
    const auto s = random_alignment(40, 40, 3, seed);
    const auto got = dense_alignment(refine_step(s, g1, g2, 1e-2, 40));
    const auto expected = dense_refine_step(g1, g2, s, 1e-2);
    for (std::size_t i = 0; i < 40; ++i)
      for (std::size_t j = 0; j < 40; ++j) CHECK(got[i][j] == doctest::Approx(expected[i][j]).epsilon(1e-9));
  }
}

TEST_CASE("refine step bounds rows by topk and keeps scores nonnegative") {
  const auto g1 = erdos_renyi(150, 6, 1);
  const auto g2 = erdos_renyi(150, 6, 2);
  auto s = random_alignment(150, 150, 5, 3);
  for (std::size_t topk : {1, 3, 8}) {
    const auto out = refine_step(s, g1, g2, 1e-3, topk);
    CHECK(out.max_row_entries() <= topk);
    for (const auto& t : out.triplets()) {
      CHECK(t.score >= 0.0);
      CHECK(std::isfinite(t.score));
    }
  }
}

TEST_CASE("refine step keeps the largest entries") {
  // Star against itself from the identity: every stored diagonal entry has
  // S o T > 0 and outranks the eps-only candidates.
  const auto star = star_graph(3);
  const auto out = refine_step(AlignmentMatrix::identity(4), star, star, 1e-3, 1);
  for (NodeId i = 0; i < 4; ++i) {
    REQUIRE(out.row(i).size() == 1);
    CHECK(out.row(i)[0].col == i);
  }
}

TEST_CASE("eps-only candidates are ranked by T") {
  // Row 0 of the star has no stored entries; it reaches G2 nodes 1 and 2
  // through S(1,0), with T = 1 and T = 5. Both score eps.
  const auto star = star_graph(3);
  std::vector<Edge> e{{0, 1, 1.0}, {0, 2, 5.0}, {3, 2, 1.0}};
  const auto g2 = Graph::from_edges(4, e);
  const std::vector<AlignmentTriplet> t{{1, 0, 1.0}};
  const auto s = AlignmentMatrix::from_triplets(4, 4, t);
  const auto out = refine_step(s, star, g2, 1e-3, 1);
  REQUIRE(out.row(0).size() == 1);
  CHECK(out.row(0)[0].col == 2);
  const auto wide = refine_step(s, star, g2, 1e-3, 4);
  CHECK(wide.row(0).size() == 2);
}

TEST_CASE("refine step validates its arguments") {
  const auto g = path_graph(3);
  CHECK_THROWS_AS(refine_step(AlignmentMatrix::identity(3), g, g, 0.0, 3), ValidationError);
  CHECK_THROWS_AS(refine_step(AlignmentMatrix::identity(3), g, g, 1e-3, 0), ValidationError);
  CHECK_THROWS_AS(refine_step(AlignmentMatrix::identity(2), g, g, 1e-3, 3), ValidationError);
}

TEST_CASE("identity is a fixed point of refinement for equal graphs") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = erdos_renyi(60, 4, seed);
    const auto m = extract_matching(refine_step(AlignmentMatrix::identity(60), g, g, 1e-2, 6));
    for (NodeId u = 0; u < 60; ++u)
      if (g.hop_degree(u) > 0) CHECK(m[u] == u);
  }
}

TEST_CASE("automatic epsilon and topk") {
  CHECK(auto_epsilon(1133) == doctest::Approx(1e-4));
  CHECK(auto_epsilon(1000) == doctest::Approx(1e-3));
  CHECK(auto_epsilon(1001) == doctest::Approx(1e-4));
  CHECK(auto_epsilon(10) == doctest::Approx(1e-1));
  CHECK(auto_topk(1000) == 10);
  CHECK(auto_topk(1024) == 10);
  CHECK(auto_topk(1025) == 11);
  CHECK(auto_topk(2) == 1);
  CHECK(auto_topk(1) == 1);
}

TEST_CASE("refine with zero iterations returns the input") {
  const auto g = erdos_renyi(30, 4, 1);
  const auto s = random_alignment(30, 30, 3, 2);
  RefineConfig cfg;
  cfg.iterations = 0;
  CHECK(refine(s, g, g, cfg) == s);
  cfg.mode = RefineConfig::Mode::HardStartSoft;
  CHECK(refine(s, g, g, cfg) == binarize_rows(s));
}

TEST_CASE("binarize keeps one unit entry per nonempty row") {
  const auto b = binarize_rows(dense_to_sparse({{0.2, 0.8}, {0.5, 0.5}, {0, 0}}));
  CHECK(dense_alignment(b) == Dense{{0, 1}, {1, 0}, {0, 0}});
}

TEST_CASE("refine config validation") {
  RefineConfig cfg;
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.epsilon = 1e-3;
  cfg.topk = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("caper with zero levels is base alignment plus one refinement") {
  const auto g = erdos_renyi(120, 5, 1);
  const auto [g2, truth] = permuted_noisy_copy(g, {0.05, 2});
  CaperConfig cfg;
  cfg.levels = 0;
  cfg.refine.iterations = 20;
  const auto result = run_caper(g, g2, cfg);
  CHECK(result.levels_used == 0);
  const auto expected = refine(builtin_align(g, g2), g, g2, cfg.refine);
  CHECK(result.alignment == expected);
}

TEST_CASE("caper on a noise-free copy is at least as accurate as the base aligner") {
  // No isolated nodes and no twins, so every node is identifiable.
  const auto g = erdos_renyi(300, 8, 7);
  for (NodeId a = 0; a < g.num_nodes(); ++a) {
    REQUIRE(g.hop_degree(a) > 0);
    for (NodeId b = a + 1; b < g.num_nodes(); ++b) {
      std::set<NodeId> na(g.neighbors(a).begin(), g.neighbors(a).end());
      std::set<NodeId> nb(g.neighbors(b).begin(), g.neighbors(b).end());
      na.erase(b);
      nb.erase(a);
      REQUIRE(na != nb);
    }
  }
  const auto [g2, truth] = permuted_noisy_copy(g, {0.0, 3});
  CaperConfig cfg;
  cfg.levels = 2;
  const double caper_acc = accuracy(extract_matching(caper::caper(g, g2, cfg)), truth);
  const double base_acc = accuracy(extract_matching(builtin_align(g, g2)), truth);
  CHECK(caper_acc >= base_acc);
}

TEST_CASE("caper handles graphs of different sizes and strips padding") {
  const auto g1 = erdos_renyi(100, 5, 1);
  const auto g2 = erdos_renyi(90, 5, 2);
  CaperConfig cfg;
  cfg.levels = 2;
  cfg.refine.iterations = 10;
  const auto result = run_caper(g1, g2, cfg);
  CHECK(result.alignment.n1() == 100);
  CHECK(result.alignment.n2() == 90);
  CHECK(result.levels_used == 2);
  CHECK_THROWS_AS(run_caper(Graph(0), g2, cfg), ValidationError);
}

TEST_CASE("caper clamps to the shallower hierarchy") {
  // A perfect matching graph collapses to isolated nodes after one level.
  std::vector<Edge> e;
  for (NodeId u = 0; u < 20; u += 2) e.push_back({u, u + 1, 1.0});
  const auto matching = Graph::from_edges(20, e);
  CaperConfig cfg;
  cfg.levels = 3;
  cfg.refine.iterations = 5;
  const auto result = run_caper(matching, erdos_renyi(20, 4, 1), cfg);
  CHECK(result.levels_used == 1);
}

TEST_CASE("caper dumps per-level alignments on request") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "caper-dump-test";
  fs::remove_all(dir);
  CaperConfig cfg;
  cfg.levels = 2;
  cfg.refine.iterations = 3;
  cfg.dump_dir = dir.string();
  const auto g = erdos_renyi(80, 5, 1);
  run_caper(g, g, cfg);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir)) ++files;
  CHECK(files == 3);
  fs::remove_all(dir);
}
