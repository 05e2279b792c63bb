#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "qdeform/fqg.hpp"

using namespace qdeform;

TEST_CASE("group construction and validation") {
  auto z4 = abelian_group({4});
  REQUIRE(z4.order == 4);
  REQUIRE(z4.e == 0);
  REQUIRE(z4.op(1, 3) == 0);
  REQUIRE(z4.inv[1] == 3);
  REQUIRE(z4.is_abelian());

  auto z2z2 = abelian_group({2, 2});
  REQUIRE(z2z2.order == 4);
  REQUIRE(z2z2.op(1, 1) == 0);  // (0,1)+(0,1) = (0,0)
  REQUIRE(z2z2.op(1, 2) == 3);  // (0,1)+(1,0) = (1,1)

  auto s3 = symmetric_group_3();
  REQUIRE(s3.order == 6);
  REQUIRE(!s3.is_abelian());
  for (int a = 0; a < 6; ++a) REQUIRE(s3.op(a, s3.inv[a]) == s3.e);

  // broken table: duplicate in a row
  std::vector<std::vector<int>> bad = {{0, 1}, {1, 1}};
  REQUIRE_THROWS_WITH(group_from_table("bad", bad),
                      Catch::Matchers::ContainsSubstring("Latin square"));
  // valid Latin square without associativity cannot exist at order 2; use a
  // 5-element quasigroup that is not associative
  std::vector<std::vector<int>> loop = {{0, 1, 2, 3, 4},
                                        {1, 0, 3, 4, 2},
                                        {2, 4, 0, 1, 3},
                                        {3, 2, 4, 0, 1},
                                        {4, 3, 1, 2, 0}};
  REQUIRE_THROWS_WITH(group_from_table("loop", loop),
                      Catch::Matchers::ContainsSubstring("associativity"));
}

TEST_CASE("group file parsing") {
  std::istringstream ok(
      "# cyclic group of order 2\n"
      "group z2 order 2\n"
      "table\n"
      "0 1\n"
      "1 0\n");
  auto g = parse_group(ok);
  REQUIRE(g.order == 2);
  REQUIRE(g.name == "z2");

  std::istringstream ab("group k4 order 4\nabelian 2 2\n");
  auto k4 = parse_group(ab);
  REQUIRE(k4.order == 4);
  REQUIRE(k4.invariant_factors == std::vector<int>{2, 2});

  std::istringstream bad_header("order 2 group z2\ntable\n0 1\n1 0\n");
  REQUIRE_THROWS_AS(parse_group(bad_header), std::invalid_argument);

  std::istringstream not_latin(
      "group broken order 2\ntable\n0 0\n1 1\n");
  REQUIRE_THROWS_WITH(parse_group(not_latin),
                      Catch::Matchers::ContainsSubstring("cell (0,1)"));

  std::istringstream mismatch("group z2 order 4\nabelian 2\n");
  REQUIRE_THROWS_AS(parse_group(mismatch), std::invalid_argument);
}

TEST_CASE("characters of abelian groups") {
  auto g = abelian_group({2, 3});
  // orthogonality relations
  for (int c1 = 0; c1 < g.order; ++c1)
    for (int c2 = 0; c2 < g.order; ++c2) {
      complexd sum = 0;
      for (int s = 0; s < g.order; ++s)
        sum += character_value(g, c1, s) * std::conj(character_value(g, c2, s));
      REQUIRE(std::abs(sum - (c1 == c2 ? complexd(g.order) : complexd(0))) < 1e-12);
    }
  // multiplicativity
  for (int c = 0; c < g.order; ++c)
    for (int s = 0; s < g.order; ++s)
      for (int t = 0; t < g.order; ++t)
        REQUIRE(std::abs(character_value(g, c, g.op(s, t)) -
                         character_value(g, c, s) * character_value(g, c, t)) < 1e-12);
}

TEST_CASE("trivial group: all structure maps are 1") {
  auto q = function_algebra(abelian_group({1}));
  REQUIRE(op_norm(q.W - identity(1)) < 1e-14);
  REQUIRE(op_norm(q.What - identity(1)) < 1e-14);
  REQUIRE(fqg_checks(q).pass());
  auto qg = group_algebra(abelian_group({1}));
  REQUIRE(op_norm(qg.W - identity(1)) < 1e-14);
  REQUIRE(fqg_checks(qg).pass());
}

TEST_CASE("group algebra of Z2: explicit What action") {
  auto q = group_algebra(abelian_group({2}));
  // What(delta_1 (x) delta_1) = delta_1 (x) delta_0
  Vec in = Vec::Zero(4), expect = Vec::Zero(4);
  in(1 * 2 + 1) = 1.0;
  expect(1 * 2 + 0) = 1.0;
  REQUIRE((q.What * in - expect).norm() < 1e-14);
  // and delta_0 (x) delta_1 is fixed
  Vec in2 = Vec::Zero(4);
  in2(0 * 2 + 1) = 1.0;
  REQUIRE((q.What * in2 - in2).norm() < 1e-14);
}

TEST_CASE("function algebra of Z2: dual span") {
  auto q = function_algebra(abelian_group({2}));
  Mat lam(2, 2);
  lam << 0, 1, 1, 0;
  auto expect = make_span({q.H}, {identity(2), lam});
  REQUIRE(span_equal(q.Mhat_span, expect));
  // J acts as plain conjugation: J x J = conj(x) for diagonal x
  Mat d(2, 2);
  d << complexd(1, 2), 0, 0, complexd(3, -1);
  REQUIRE(op_norm(ad(q.J, d) - d.conjugate()) < 1e-14);
}

TEST_CASE("full invariant battery for the shipped groups") {
  std::vector<FiniteGroup> groups = {abelian_group({2}), abelian_group({3}),
                                     abelian_group({4}), abelian_group({2, 2}),
                                     symmetric_group_3()};
  for (const auto& g : groups) {
    auto qf = function_algebra(g);
    auto qg = group_algebra(g);
    auto rf = fqg_checks(qf);
    auto rg = fqg_checks(qg);
    INFO("group " << g.name);
    for (const auto& c : rf.checks) {
      INFO("function algebra check " << c.name << " defect " << c.defect);
      REQUIRE(c.pass);
    }
    for (const auto& c : rg.checks) {
      INFO("group algebra check " << c.name << " defect " << c.defect);
      REQUIRE(c.pass);
    }
  }
}

TEST_CASE("duality between the two constructors") {
  for (const auto& g : {abelian_group({3}), abelian_group({2, 2})}) {
    auto qf = function_algebra(g);
    auto qg = group_algebra(g);
    auto dq = dual(qg);
    REQUIRE(span_equal(dq.M_span, qf.M_span));
    REQUIRE(span_equal(dq.Mhat_span, qf.Mhat_span));
    REQUIRE(op_norm(dq.W - qf.W) < 1e-14);
    // biduality
    auto back = dual(dq);
    REQUIRE(span_equal(back.M_span, qg.M_span));
  }
}

TEST_CASE("GNS data") {
  // C(Z2): Lambda = identity on the diagonal algebra, J = conjugation
  auto qf = function_algebra(abelian_group({2}));
  auto gf = gns(qf);
  for (int k = 0; k < 2; ++k) REQUIRE((gf.lambda_images[k] - Vec::Unit(2, k)).norm() < 1e-14);
  REQUIRE(op_norm(gf.J.m - identity(2)) < 1e-13);
  REQUIRE(op_norm(gf.delta - identity(2)) < 1e-13);

  // C*(Z3): Lambda(lambda_s) = delta_s, J maps delta_s to delta_{-s}
  auto g3 = abelian_group({3});
  auto qg = group_algebra(g3);
  auto gg = gns(qg);
  for (int s = 0; s < 3; ++s) REQUIRE((gg.lambda_images[s] - Vec::Unit(3, s)).norm() < 1e-14);
  REQUIRE(op_norm(gg.J.m - inversion_matrix(g3)) < 1e-13);
  REQUIRE(op_norm(compose(gg.J, gg.J) - identity(3)) < 1e-13);
}

TEST_CASE("opposite dual unitary") {
  auto q = group_algebra(abelian_group({2, 2}));
  Mat wop = q.What_op();
  int n = q.n();
  REQUIRE(op_norm(Mat(wop * wop.adjoint() - identity(n * n))) < 1e-12);
  // What_op implements the opposite dual coproduct on Mhat:
  // Delta_hat_op(x) = Sigma Delta_hat(x) Sigma = (What_op)* (1 (x) x) What_op
  for (const auto& x : q.Mhat_basis) {
    Mat lhs = q.delta_hat_op(x);
    Mat rhs = wop.adjoint() * kron(identity(n), x) * wop;
    REQUIRE(op_norm(lhs - rhs) < 1e-12);
  }
}
