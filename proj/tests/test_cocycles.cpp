#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "qdeform/cocycles.hpp"

using namespace qdeform;

namespace {

// sigma((a,b),(c,d)) = (-1)^{bc} on Z2 x Z2; element s encodes (s1,s2) as
// s = 2*s1 + s2.
Mat sigma_table() {
  Mat psi(4, 4);
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) psi(s, t) = ((s % 2) * (t / 2)) % 2 ? -1.0 : 1.0;
  return psi;
}

DualCocycle sigma_cocycle() {
  return bicharacter_cocycle(abelian_group({2, 2}), sigma_table(), "sigma");
}

}  // namespace

TEST_CASE("trivial cocycle verifies on every shipped ambient") {
  std::vector<FiniteGroup> groups = {abelian_group({2}), abelian_group({3}),
                                     abelian_group({4}), abelian_group({2, 2}),
                                     symmetric_group_3()};
  for (const auto& g : groups) {
    for (auto q : {function_algebra(g), group_algebra(g)}) {
      auto r = verify_cocycle(trivial_cocycle(q));
      INFO("group " << g.name);
      for (const auto& c : r.checks) {
        INFO(c.name << " defect " << c.defect);
        REQUIRE(c.pass);
      }
    }
  }
}

TEST_CASE("bicharacter validation rejects broken tables") {
  auto g = abelian_group({2, 2});
  Mat psi = sigma_table();
  psi(1, 2) = 2.0;  // not unimodular
  REQUIRE_THROWS_WITH(bicharacter_cocycle(g, psi),
                      Catch::Matchers::ContainsSubstring("unimodular"));
  psi = sigma_table();
  psi(1, 2) = -psi(1, 2);
  REQUIRE_THROWS_WITH(bicharacter_cocycle(g, psi),
                      Catch::Matchers::ContainsSubstring("bicharacter law"));
  REQUIRE_THROWS_WITH(bicharacter_cocycle(symmetric_group_3(), Mat::Ones(6, 6)),
                      Catch::Matchers::ContainsSubstring("abelian"));
}

TEST_CASE("sigma on Z2 x Z2 is a verified cocycle") {
  auto c = sigma_cocycle();
  auto r = verify_cocycle(c);
  for (const auto& chk : r.checks) {
    INFO(chk.name << " defect " << chk.defect);
    REQUIRE(chk.pass);
  }
  // twisted left translations: slices of What Omega* give
  // lambda_s diag(conj sigma(s, .)) on the diagonal slices and 0 off it
  int n = 4;
  Mat wo = c.q.What * c.omega.adjoint();
  Space h1 = make_space(n, "1"), h2 = make_space(n, "2");
  LegOp wo_op{{h1, h2}, wo};
  Mat psi = sigma_table();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat got = slice(wo_op, "1", matrix_unit(n, i, j)).m;
      if (i != j) {
        REQUIRE(op_norm(got) < 1e-14);
        continue;
      }
      Mat d = Mat::Zero(n, n);
      for (int t = 0; t < n; ++t) d(t, t) = std::conj(psi(i, t));
      Mat expect = c.q.lambda(i) * d;
      REQUIRE(op_norm(got - expect) < 1e-13);
    }
}

TEST_CASE("twisted translation relations for sigma") {
  auto c = sigma_cocycle();
  const auto& g = c.q.group;
  int n = 4;
  Mat psi = sigma_table();
  auto lam_om = [&](int s) {
    Mat d = Mat::Zero(n, n);
    for (int t = 0; t < n; ++t) d(t, t) = std::conj(psi(s, t));
    return Mat(c.q.lambda(s) * d);
  };
  for (int s = 0; s < n; ++s) {
    // adjoints: (lam_om_s)* = sigma(s, s^-1) lam_om_{s^-1}
    Mat lhs = lam_om(s).adjoint();
    Mat rhs = psi(s, g.inv[s]) * lam_om(g.inv[s]);
    REQUIRE(op_norm(lhs - rhs) < 1e-14);
    for (int t = 0; t < n; ++t) {
      // products: lam_om_{st} = sigma(s,t) lam_om_s lam_om_t
      Mat prod = psi(s, t) * lam_om(s) * lam_om(t);
      REQUIRE(op_norm(lam_om(g.op(s, t)) - prod) < 1e-14);
    }
  }
}

TEST_CASE("deformed dual data for sigma") {
  auto c = sigma_cocycle();
  auto d = dual_weight_gns(c);
  auto r = deformed_dual_checks(c, d);
  for (const auto& chk : r.checks) {
    INFO(chk.name << " defect " << chk.defect);
    REQUIRE(chk.pass);
  }
  // for group duals the deformed weight stays tracial: Stilde is already
  // antiunitary, so Jtilde = Stilde and the modular matrix is 1
  REQUIRE(op_norm(d.delta_tilde - identity(4)) < 1e-12);
  REQUIRE(op_norm(d.Jtilde.m - d.Stilde.m) < 1e-12);
  REQUIRE(op_norm(compose(d.Stilde, d.Stilde) - identity(4)) < 1e-12);
  // the deformation is genuine: Jtilde differs from J, and
  // X = Jtilde J = diag(sigma(s^-1, s))
  REQUIRE(op_norm(d.Jtilde.m - c.q.J.m) > 0.5);
  Mat psi = sigma_table();
  Mat x_expect = Mat::Zero(4, 4);
  for (int s = 0; s < 4; ++s) x_expect(s, s) = psi(c.q.group.inv[s], s);
  REQUIRE(op_norm(d.X - x_expect) < 1e-12);
  // for a diagonal bicharacter cocycle the coproduct itself is undeformed
  // (Omega commutes with every Delta_hat image), so What_Omega = What even
  // though the weight data moved
  REQUIRE(op_norm(d.What_Omega - c.q.What) < 1e-12);
}

TEST_CASE("trivial cocycle reproduces the undeformed dual") {
  for (const auto& g : {abelian_group({3}), abelian_group({2, 2})}) {
    for (auto q : {group_algebra(g), function_algebra(g)}) {
      auto c = trivial_cocycle(q);
      auto d = dual_weight_gns(c);
      INFO("group " << g.name);
      REQUIRE(op_norm(d.What_Omega - q.What) < 1e-12);
      REQUIRE(op_norm(d.X - identity(q.n())) < 1e-12);
      REQUIRE(deformed_dual_checks(c, d).pass());
    }
  }
}

TEST_CASE("Omega* is a cocycle over the deformed coproduct") {
  auto c = sigma_cocycle();
  auto d = dual_weight_gns(c);
  auto r = cocycle_on_deformed(c, d);
  for (const auto& chk : r.checks) {
    INFO(chk.name << " defect " << chk.defect);
    REQUIRE(chk.pass);
  }
}

TEST_CASE("coboundary twists") {
  auto q = group_algebra(abelian_group({2, 2}));
  Mat u = Mat::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = complexd(0, 1);
  u(2, 2) = -1.0;
  u(3, 3) = std::polar(1.0, 1.0);
  auto c0 = trivial_cocycle(q);
  auto cb = coboundary_twist(c0, u);
  REQUIRE(verify_cocycle(cb).pass());
  REQUIRE(deformed_dual_checks(cb, dual_weight_gns(cb)).pass());

  auto cs = coboundary_twist(sigma_cocycle(), u);
  REQUIRE(verify_cocycle(cs).pass());

  // rejects non-unitary u and u outside the Mhat span
  REQUIRE_THROWS_WITH(coboundary_twist(c0, Mat(2.0 * u)),
                      Catch::Matchers::ContainsSubstring("unitary"));
  Mat offdiag = Mat::Identity(4, 4);
  std::swap(offdiag(0, 0), offdiag(0, 1));
  std::swap(offdiag(1, 1), offdiag(1, 0));
  REQUIRE_THROWS_WITH(coboundary_twist(c0, offdiag),
                      Catch::Matchers::ContainsSubstring("Mhat span"));
}

TEST_CASE("bicharacter enumeration is exhaustive") {
  struct CaseData {
    std::vector<int> factors;
    int expected;
  };
  for (const auto& cd : std::vector<CaseData>{{{2}, 2}, {{3}, 3}, {{4}, 4}, {{2, 2}, 16}}) {
    auto g = abelian_group(cd.factors);
    auto all = enumerate_bicharacters(g);
    REQUIRE((int)all.size() == cd.expected);
    // distinct and each a verified cocycle
    for (size_t a = 0; a < all.size(); ++a)
      for (size_t b = a + 1; b < all.size(); ++b)
        REQUIRE(op_norm(all[a] - all[b]) > 1e-3);
    for (const auto& psi : all) REQUIRE(verify_cocycle(bicharacter_cocycle(g, psi)).pass());
  }
  // sigma is in the Z2 x Z2 list
  auto all = enumerate_bicharacters(abelian_group({2, 2}));
  bool found = false;
  for (const auto& psi : all)
    if (op_norm(psi - sigma_table()) < 1e-12) found = true;
  REQUIRE(found);
}

TEST_CASE("nontrivial bicharacter on Z4: full pipeline") {
  auto g = abelian_group({4});
  Mat psi(4, 4);
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) psi(s, t) = std::polar(1.0, M_PI * s * t / 2.0);
  auto c = bicharacter_cocycle(g, psi, "i^st");
  REQUIRE(verify_cocycle(c).pass());
  auto d = dual_weight_gns(c);
  REQUIRE(deformed_dual_checks(c, d).pass());
  REQUIRE(cocycle_on_deformed(c, d).pass());
}

TEST_CASE("non-diagonal cocycle on a function algebra ambient") {
  // transport sigma through the Fourier isomorphism: Omega =
  // sum_{chi,eta} sigma(chi,eta) P_chi (x) P_eta with spectral projections
  // P_chi = (1/n) sum_s conj(chi(s)) lambda_s inside C(Z2 x Z2)'s dual
  auto g = abelian_group({2, 2});
  auto q = function_algebra(g);
  int n = 4;
  std::vector<Mat> proj;
  for (int chi = 0; chi < n; ++chi) {
    Mat p = Mat::Zero(n, n);
    for (int s = 0; s < n; ++s)
      p += std::conj(character_value(g, chi, s)) * lambda_matrix(g, s);
    proj.push_back(Mat(p / n));
  }
  Mat psi = sigma_table();
  Mat omega = Mat::Zero(n * n, n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) omega += psi(a, b) * kron(proj[a], proj[b]);
  REQUIRE(op_norm(Mat(omega - Mat(omega.diagonal().asDiagonal()))) > 0.5);

  DualCocycle c{q, omega, CocycleProvenance::Raw, "fourier-sigma"};
  REQUIRE(verify_cocycle(c).pass());
  auto d = dual_weight_gns(c);
  REQUIRE(deformed_dual_checks(c, d).pass());
  REQUIRE(cocycle_on_deformed(c, d).pass());
}

TEST_CASE("cocycle file parsing") {
  auto g = abelian_group({2, 2});
  auto q = group_algebra(g);

  std::string text = bicharacter_file_text(g, sigma_table());
  std::istringstream in(text);
  auto c = parse_cocycle(in, q);
  REQUIRE(op_norm(c.omega - sigma_cocycle().omega) < 1e-12);

  // raw format roundtrip of the same cocycle
  std::string raw = "# raw matrix\nraw\n";
  for (int r = 0; r < 16; ++r) {
    for (int col = 0; col < 16; ++col) {
      complexd v = c.omega(r, col);
      char buf[80];
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g ", v.real(), v.imag());
      raw += buf;
    }
    raw += "\n";
  }
  std::istringstream rin(raw);
  auto cr = parse_cocycle(rin, q);
  REQUIRE(op_norm(cr.omega - c.omega) < 1e-12);

  // parse errors
  std::istringstream empty("# nothing\n");
  REQUIRE_THROWS_AS(parse_cocycle(empty, q), std::invalid_argument);
  std::istringstream bad_mode("diagonal\n0 0 0.5\n");
  REQUIRE_THROWS_AS(parse_cocycle(bad_mode, q), std::invalid_argument);
  std::istringstream out_of_range("bicharacter\n0 9 0.5\n");
  REQUIRE_THROWS_AS(parse_cocycle(out_of_range, q), std::invalid_argument);

  // a non-cocycle is rejected unless forced
  std::istringstream not_cocycle("bicharacter\n1 2 0.5\n");
  REQUIRE_THROWS_WITH(parse_cocycle(not_cocycle, q),
                      Catch::Matchers::ContainsSubstring("bicharacter law"));
  std::string bad_raw = "raw\n";
  for (int r = 0; r < 16; ++r) {
    for (int col = 0; col < 16; ++col)
      bad_raw += (r == col) ? ((r % 3) ? "1,0 " : "0,1 ") : "0,0 ";
    bad_raw += "\n";
  }
  std::istringstream braw(bad_raw);
  REQUIRE_THROWS_WITH(parse_cocycle(braw, q),
                      Catch::Matchers::ContainsSubstring("--force-unverified"));
  std::istringstream braw2(bad_raw);
  auto forced = parse_cocycle(braw2, q, true);
  REQUIRE(!verify_cocycle(forced).pass());
}
