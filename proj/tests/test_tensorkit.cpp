#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qdeform/tensorkit.hpp"

using namespace qdeform;

namespace {

Mat random_matrix(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = complexd(g(rng), g(rng));
  return m;
}

// Independent construction of a two-leg operator placed at positions (p, q) of
// a three-leg ambient, by explicit index loops.
Mat place_two_leg_oracle(const Mat& x, int p, int q, const std::vector<int>& dims) {
  int d = dims[0] * dims[1] * dims[2];
  Mat r = Mat::Zero(d, d);
  std::vector<int> I(3), J(3);
  for (int ri = 0; ri < d; ++ri) {
    decode_index(ri, dims, I);
    for (int ci = 0; ci < d; ++ci) {
      decode_index(ci, dims, J);
      bool rest_match = true;
      for (int k = 0; k < 3; ++k)
        if (k != p && k != q && I[k] != J[k]) rest_match = false;
      if (!rest_match) continue;
      int xr = I[p] * dims[q] + I[q];
      int xc = J[p] * dims[q] + J[q];
      r(ri, ci) = x(xr, xc);
    }
  }
  return r;
}

}  // namespace

TEST_CASE("kron basics") {
  Space a = make_space(2, "a"), b = make_space(3, "b");
  LegOp ia{{a}, identity(2)}, ib{{b}, identity(3)};
  auto k = kron(ia, ib);
  REQUIRE(k.m.isApprox(identity(6)));
  REQUIRE(k.legs.size() == 2);

  Mat z(2, 2);
  z << 1, 0, 0, -1;
  Mat zz = kron(z, z);
  Mat expect = Mat::Zero(4, 4);
  expect(0, 0) = 1;
  expect(1, 1) = -1;
  expect(2, 2) = -1;
  expect(3, 3) = 1;
  REQUIRE(zz.isApprox(expect));

  Mat sx(2, 2);
  sx << 0, 1, 1, 0;
  Mat sxsx = kron(sx, sx);
  REQUIRE((sxsx * sxsx).isApprox(identity(4)));

  LegOp xa{{a}, z};
  REQUIRE_THROWS_AS(kron(xa, xa), std::invalid_argument);
}

TEST_CASE("place matches explicit index-loop oracle") {
  std::mt19937_64 rng(12345);
  std::vector<Space> amb = {make_space(2, "1"), make_space(3, "2"), make_space(4, "3")};
  std::vector<int> dims = {2, 3, 4};
  struct CaseDef {
    int p, q;
  };
  for (auto [p, q] : {CaseDef{0, 1}, CaseDef{0, 2}, CaseDef{1, 2}, CaseDef{2, 0}}) {
    Mat x = random_matrix(dims[p] * dims[q], rng);
    LegOp xo{{make_space(dims[p], "u"), make_space(dims[q], "v")}, x};
    auto placed = place(xo, {amb[p].label, amb[q].label}, amb);
    Mat oracle = place_two_leg_oracle(x, p, q, dims);
    REQUIRE(op_norm(placed.m - oracle) < 1e-13);
  }
}

TEST_CASE("place trivial and flip cases") {
  std::mt19937_64 rng(99);
  std::vector<Space> amb2 = {make_space(2, "1"), make_space(2, "2")};
  Mat x = random_matrix(4, rng);
  LegOp xo{amb2, x};
  auto noop = place(xo, {"1", "2"}, amb2);
  REQUIRE(op_norm(noop.m - x) < 1e-14);

  std::vector<Space> amb3 = {make_space(2, "1"), make_space(2, "2"), make_space(2, "3")};
  Mat sig = flip_matrix(2, 2);
  LegOp so{{make_space(2, "u"), make_space(2, "v")}, sig};
  auto s12 = place(so, {"1", "2"}, amb3);
  REQUIRE(op_norm(s12.m - kron(sig, identity(2))) < 1e-14);
}

TEST_CASE("place respects composition") {
  std::mt19937_64 rng(7);
  std::vector<Space> amb = {make_space(2, "1"), make_space(3, "2"), make_space(2, "3")};
  Mat x = random_matrix(4, rng), y = random_matrix(4, rng);
  std::vector<Space> sub = {make_space(2, "u"), make_space(2, "v")};
  LegOp xo{sub, x}, yo{sub, y}, xyo{sub, Mat(x * y)};
  auto lhs = place(xyo, {"1", "3"}, amb);
  Mat rhs = place(xo, {"1", "3"}, amb).m * place(yo, {"1", "3"}, amb).m;
  REQUIRE(op_norm(lhs.m - rhs) < 1e-12);
}

TEST_CASE("pentagon for the order-2 regular representation") {
  // W = sum_s E_ss (x) lambda_s on l2(Z2) (x) l2(Z2)
  Mat lam(2, 2);
  lam << 0, 1, 1, 0;
  Mat w = Mat::Zero(4, 4);
  w.block(0, 0, 2, 2) = identity(2);
  w.block(2, 2, 2, 2) = lam;
  std::vector<Space> amb = {make_space(2, "1"), make_space(2, "2"), make_space(2, "3")};
  std::vector<Space> sub = {make_space(2, "u"), make_space(2, "v")};
  LegOp wo{sub, w};
  Mat w12 = place(wo, {"1", "2"}, amb).m;
  Mat w13 = place(wo, {"1", "3"}, amb).m;
  Mat w23 = place(wo, {"2", "3"}, amb).m;
  REQUIRE(op_norm(w12 * w13 * w23 - w23 * w12) < 1e-14);
}

TEST_CASE("slice basics and oracle") {
  std::mt19937_64 rng(555);
  Mat a = random_matrix(2, rng), b = random_matrix(3, rng);
  LegOp ab{{make_space(2, "1"), make_space(3, "2")}, kron(a, b)};
  Mat rho = random_matrix(3, rng);
  complexd wb = (rho.transpose() * b).trace();
  auto s = slice(ab, "2", rho);
  REQUIRE(op_norm(s.m - wb * a) < 1e-12);

  // slice(I, any leg, omega) = omega(1) I
  LegOp eye{{make_space(2, "1"), make_space(3, "2")}, identity(6)};
  auto si = slice(eye, "2", rho);
  REQUIRE(op_norm(si.m - rho.trace() * identity(2)) < 1e-13);

  // matrix-unit functional omega_ij(a) = a_ij via rho = E_ij
  Mat x = random_matrix(6, rng);
  LegOp xo{{make_space(2, "1"), make_space(3, "2")}, x};
  Mat e01 = Mat::Zero(2, 2);
  e01(0, 1) = 1;
  auto sl = slice(xo, "1", e01);
  // oracle: block (0,1) of the 2x2 block structure over leg 1
  Mat blk = x.block(0, 3, 3, 3);
  REQUIRE(op_norm(sl.m - blk) < 1e-13);
}

TEST_CASE("slice is linear and compatible with place") {
  std::mt19937_64 rng(3);
  std::vector<Space> amb = {make_space(2, "1"), make_space(3, "2")};
  Mat x = random_matrix(2, rng);
  LegOp xo{{make_space(2, "u")}, x};
  auto placed = place(xo, {"1"}, amb);
  Mat rho = random_matrix(3, rng);
  auto s = slice(placed, "2", rho);
  REQUIRE(op_norm(s.m - rho.trace() * x) < 1e-12);

  Mat y = random_matrix(6, rng), z = random_matrix(6, rng);
  LegOp yo{amb, y}, zo{amb, z}, sum{amb, Mat(y + 2.0 * z)};
  Mat lhs = slice(sum, "2", rho).m;
  Mat rhs = slice(yo, "2", rho).m + 2.0 * slice(zo, "2", rho).m;
  REQUIRE(op_norm(lhs - rhs) < 1e-12);
}

TEST_CASE("antilinear composition and adjoint") {
  std::mt19937_64 rng(21);
  Mat m1 = random_matrix(3, rng), m2 = random_matrix(3, rng);
  Antilinear a1{m1}, a2{m2};
  Vec v = random_matrix(3, rng).col(0);
  // (a1 . a2)(v) as linear operator
  Mat lin = compose(a1, a2);
  REQUIRE((lin * v - apply_anti(a1, apply_anti(a2, v))).norm() < 1e-12);
  // adjoint pairing <a* x, y> = <a y, x>
  Vec x = random_matrix(3, rng).col(0), y = random_matrix(3, rng).col(1);
  Antilinear ast = adjoint(a1);
  complexd lhs = apply_anti(ast, x).dot(y);  // <a* x, y>, Eigen dot conjugates lhs
  complexd rhs = apply_anti(a1, y).dot(x);
  REQUIRE(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("antilinear polar decomposition") {
  // entrywise conjugation: J = conjugation, Delta = I
  Antilinear conj_op{identity(2)};
  auto p1 = antilinear_polar(conj_op);
  REQUIRE(op_norm(p1.delta - identity(2)) < 1e-14);
  REQUIRE(op_norm(p1.j.m - identity(2)) < 1e-14);

  // conjugation followed by diag(2, 1/2)
  Mat d(2, 2);
  d << 2, 0, 0, 0.5;
  Antilinear s{d};
  auto p2 = antilinear_polar(s);
  Mat expect_delta(2, 2);
  expect_delta << 4, 0, 0, 0.25;
  REQUIRE(op_norm(p2.delta - expect_delta) < 1e-13);
  REQUIRE(op_norm(p2.j.m - identity(2)) < 1e-13);
  // reconstruction s = J Delta^{1/2}
  Eigen::SelfAdjointEigenSolver<Mat> es(p2.delta);
  Mat sqrt_delta = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                   es.eigenvectors().adjoint();
  Antilinear rec = compose(p2.j, sqrt_delta);
  REQUIRE(op_norm(rec.m - s.m) < 1e-12);

  // random invertible antilinear: reconstruction + J antiunitary
  std::mt19937_64 rng(77);
  Mat m = random_matrix(4, rng) + 3.0 * identity(4);
  Antilinear s3{m};
  auto p3 = antilinear_polar(s3);
  Eigen::SelfAdjointEigenSolver<Mat> es3(p3.delta);
  Mat sq3 = es3.eigenvectors() * es3.eigenvalues().cwiseSqrt().asDiagonal() *
            es3.eigenvectors().adjoint();
  REQUIRE(op_norm(compose(p3.j, sq3).m - m) < 1e-10);
  REQUIRE(op_norm(Mat(p3.j.m * p3.j.m.adjoint()) - identity(4)) < 1e-12);
  // antiunitarity: <J xi, J eta> = conj(<xi, eta>)
  Vec xi = random_matrix(4, rng).col(0), eta = random_matrix(4, rng).col(1);
  complexd lhs = apply_anti(p3.j, xi).dot(apply_anti(p3.j, eta));
  REQUIRE(std::abs(lhs - std::conj(xi.dot(eta))) < 1e-12);

  // s^2 = 1 forces J^2 = 1
  Mat inv_m(2, 2);
  inv_m << 0, 2, 0.5, 0;  // s^2: m conj(m) = I
  Antilinear s4{inv_m};
  REQUIRE(op_norm(compose(s4, s4) - identity(2)) < 1e-14);
  auto p4 = antilinear_polar(s4);
  REQUIRE(op_norm(compose(p4.j, p4.j) - identity(2)) < 1e-12);

  REQUIRE_THROWS_AS(antilinear_polar(Antilinear{Mat::Zero(2, 2)}), std::invalid_argument);
}

TEST_CASE("spans: dimension, equality, containment") {
  Space h = make_space(2, "h");
  Mat e11 = Mat::Zero(2, 2), e22 = Mat::Zero(2, 2), sz(2, 2);
  e11(0, 0) = 1;
  e22(1, 1) = 1;
  sz << 1, 0, 0, -1;
  auto s1 = make_span({h}, {identity(2), sz});
  auto s2 = make_span({h}, {sz, identity(2)});
  REQUIRE(span_equal(s1, s2));
  REQUIRE(span_dim(s1) == 2);

  auto se = make_span({h}, {e11});
  auto se2 = make_span({h}, {e11, e22});
  REQUIRE(span_contains(se2, se));
  REQUIRE(!span_equal(se, se2));
  REQUIRE(span_dim(se) == 1);
  REQUIRE(span_dim(se2) == 2);

  // diagonal span equals {I, sz} span
  auto sd = make_span({h}, {e11, e22});
  REQUIRE(span_equal(s1, sd));

  // residual of a member vs non-member
  REQUIRE(span_residual(s1, sz) < 1e-14);
  Mat sx(2, 2);
  sx << 0, 1, 1, 0;
  REQUIRE(span_residual(s1, sx) > 0.9);
}

TEST_CASE("span equality is an equivalence at fixed tolerance") {
  std::mt19937_64 rng(42);
  Space h = make_space(3, "h");
  std::vector<Mat> gens;
  for (int k = 0; k < 4; ++k) gens.push_back(random_matrix(3, rng));
  auto a = make_span({h}, gens);
  REQUIRE(span_equal(a, a));
  // same space from shuffled generator combinations
  std::vector<Mat> gens2 = {gens[1] + gens[0], gens[2], Mat(2.0 * gens[3]), gens[0]};
  auto b = make_span({h}, gens2);
  REQUIRE(span_equal(a, b));
  REQUIRE(span_equal(b, a));
}

TEST_CASE("slicing the order-2 dual unitary over all matrix-unit functionals") {
  // Whet on l2(Z2) (x) l2(Z2): group-algebra convention, second leg shifts by s
  Mat lam(2, 2);
  lam << 0, 1, 1, 0;
  Mat what = Mat::Zero(4, 4);
  what.block(0, 0, 2, 2) = identity(2);
  what.block(2, 2, 2, 2) = lam;
  Space h1 = make_space(2, "1"), h2 = make_space(2, "2");
  LegOp wo{{h1, h2}, what};
  std::vector<Mat> slices;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Mat rho = Mat::Zero(2, 2);
      rho(i, j) = 1;
      slices.push_back(slice(wo, "1", rho).m);
    }
  auto got = make_span({h2}, slices);
  auto expect = make_span({h2}, {identity(2), lam});
  REQUIRE(span_equal(got, expect));
  REQUIRE(span_dim(got) == 2);
}
