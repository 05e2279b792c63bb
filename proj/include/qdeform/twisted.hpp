#pragma once

// The twisted group algebra generated by the slices of What Omega*, its
// translation action beta, quantization/dequantization maps, the twisted
// Fourier product and the regularity span checks.

#include "qdeform/cocycles.hpp"

namespace qdeform {

struct TwistedAlgebra {
  DualCocycle c;
  DeformedDualData dual;
  Mat U;  // (What Omega*)_21, implements beta(x) = U (1 (x) x) U*
  std::vector<Mat> generators;
  OpSpan span;
};

inline TwistedAlgebra build_twisted_algebra(const DualCocycle& c) {
  TwistedAlgebra t;
  t.c = c;
  t.dual = dual_weight_gns(c);
  t.U = swap_legs(Mat(c.q.What * c.omega.adjoint()), c.q.n());
  t.generators = t.dual.generators;
  t.span = t.dual.span;
  return t;
}

// beta(x) = U (1 (x) x) U*, landing in span (x) M.
inline Mat beta(const TwistedAlgebra& t, const Mat& x) {
  int n = t.c.q.n();
  return t.U * kron(identity(n), x) * t.U.adjoint();
}

namespace detail {

// Apply a linear map on B(H) to the first leg of an operator on H (x) H.
template <typename F>
Mat apply_first_leg(F&& f, const Mat& y, int n) {
  Mat out = Mat::Zero(y.rows(), y.cols());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat block = y.block(i * n, j * n, n, n);
      if (block.cwiseAbs().maxCoeff() < 1e-300) continue;
      out += kron(Mat(f(Mat(matrix_unit(n, i, j)))), block);
    }
  return out;
}

// Apply a linear map on B(H) to the second leg.
template <typename F>
Mat apply_second_leg(F&& f, const Mat& y, int n) {
  Mat out = Mat::Zero(y.rows(), y.cols());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat block = y.block(i * n, j * n, n, n);
      if (block.cwiseAbs().maxCoeff() < 1e-300) continue;
      out += kron(matrix_unit(n, i, j), Mat(f(block)));
    }
  return out;
}

inline std::vector<Mat> span_basis_ops(const OpSpan& s, int n) {
  std::vector<Mat> out;
  for (int l = 0; l < s.dim(); ++l) out.push_back(unvectorize(s.basis.col(l), n, n));
  return out;
}

}  // namespace detail

inline Report twisted_checks(const TwistedAlgebra& t, const Tolerances& tol = {}) {
  Report r;
  r.suite = "twisted";
  const auto& q = t.c.q;
  int n = q.n();
  auto basis = detail::span_basis_ops(t.span, n);

  double worst = 0;
  for (const auto& a : basis)
    for (const auto& b : basis)
      worst = std::max(worst, span_residual(t.span, Mat(a * b)));
  r.add("span closed under products", "twist:product-closure", worst, tol.span);
  worst = 0;
  for (const auto& a : basis)
    worst = std::max(worst, span_residual(t.span, Mat(a.adjoint())));
  r.add("span closed under adjoints", "twist:star-closure", worst, tol.span);
  r.add("unit in span", "twist:unit", span_residual(t.span, identity(n)), tol.span);

  // beta lands in span (x) M
  std::vector<Mat> sm;
  for (const auto& a : basis)
    for (const auto& m : q.M_basis) sm.push_back(kron(a, m));
  auto sm_span = make_span({make_space(n, "1"), make_space(n, "2")}, sm);
  worst = 0;
  for (const auto& a : basis)
    worst = std::max(worst, span_residual(sm_span, beta(t, a)));
  r.add("beta lands in span (x) M", "twist:beta-range", worst, tol.span);

  // coaction law (beta (x) id) beta = (id (x) Delta) beta
  worst = 0;
  for (const auto& a : basis) {
    Mat ba = beta(t, a);
    Mat lhs = detail::apply_first_leg([&](const Mat& x) { return beta(t, x); }, ba, n);
    Mat rhs = detail::apply_second_leg([&](const Mat& x) { return q.delta(x); }, ba, n);
    worst = std::max(worst, op_norm(lhs - rhs));
  }
  r.add("beta coaction law", "twist:coaction", worst, tol.identity);

  // (id (x) beta)(What Omega*) = What_13 (What Omega*)_12
  Mat wo = q.What * t.c.omega.adjoint();
  auto amb = detail::amb3(n);
  Mat u23 = detail::place2(t.U, n, "2", "3", amb);
  Mat lhs = u23 * detail::place2(wo, n, "1", "3", amb) * u23.adjoint();
  Mat rhs = detail::place2(q.What, n, "1", "3", amb) * detail::place2(wo, n, "1", "2", amb);
  r.add("beta characterization on What Omega*", "twist:action", op_norm(lhs - rhs),
        tol.identity);

  // What Omega* lives in B(H) (x) span
  std::vector<Mat> ks;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (const auto& a : basis) ks.push_back(kron(matrix_unit(n, i, j), a));
  auto ks_span = make_span({make_space(n, "1"), make_space(n, "2")}, ks);
  r.add("What Omega* in K (x) span", "twist:multiplier", span_residual(ks_span, wo),
        tol.span);
  return r;
}

// T_nu(f) = (id (x) nu)(What_Omega Omega (f (x) 1) (What_Omega Omega)*), where
// the functional nu is given by a density matrix.
inline Mat quantize(const TwistedAlgebra& t, const Mat& rho_nu, const Mat& f) {
  int n = t.c.q.n();
  Mat wt = t.dual.What_Omega * t.c.omega;
  Mat y = wt * kron(f, identity(n)) * wt.adjoint();
  Space h1 = make_space(n, "1"), h2 = make_space(n, "2");
  return slice(LegOp{{h1, h2}, y}, "2", rho_nu).m;
}

// S_omega(x) = (omega (x) id) beta(x).
inline Mat dequantize(const TwistedAlgebra& t, const Mat& rho_omega, const Mat& x) {
  int n = t.c.q.n();
  Space h1 = make_space(n, "1"), h2 = make_space(n, "2");
  return slice(LegOp{{h1, h2}, beta(t, x)}, "1", rho_omega).m;
}

inline Report quantization_checks(const TwistedAlgebra& t, const Tolerances& tol = {}) {
  Report r;
  r.suite = "quantization";
  const auto& q = t.c.q;
  int n = q.n();

  // membership and equivariance of T_nu for all matrix-unit functionals
  double mem = 0, eqv = 0;
  std::vector<Mat> images;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat rho = matrix_unit(n, i, j);
      for (const auto& f : q.M_basis) {
        Mat tf = quantize(t, rho, f);
        images.push_back(tf);
        mem = std::max(mem, span_residual(t.span, tf));
        Mat lhs = beta(t, tf);
        Mat rhs = detail::apply_first_leg(
            [&](const Mat& x) { return quantize(t, rho, x); }, q.delta(f), n);
        eqv = std::max(eqv, op_norm(lhs - rhs));
      }
    }
  r.add("T_nu maps M into the twisted span", "quant:range", mem, tol.span);
  r.add("T_nu equivariance", "quant:equivariance", eqv, tol.identity);
  auto img_span = make_span({make_space(n, "1")}, images);
  r.add("quantization images span the twisted algebra", "quant:spanning",
        span_diff_norm(img_span, t.span), tol.span);

  // dequantization: membership, unit, and the composed map S_omega T_nu
  auto basis = detail::span_basis_ops(t.span, n);
  double dmem = 0;
  std::vector<Mat> dimages;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat rho = matrix_unit(n, i, j);
      for (const auto& x : basis) {
        Mat sx = dequantize(t, rho, x);
        dimages.push_back(sx);
        dmem = std::max(dmem, span_residual(q.M_span, sx));
      }
    }
  r.add("S_omega maps the twisted span into M", "dequant:range", dmem, tol.span);
  auto dspan = make_span({make_space(n, "1")}, dimages);
  r.add("dequantization images span M", "dequant:spanning",
        span_diff_norm(dspan, q.M_span), tol.span);

  // S_omega(1) = omega(1) 1 and T_nu(1) = nu(1) 1
  Mat rho0 = identity(n);
  r.add("T_nu unit", "quant:unit",
        op_norm(Mat(quantize(t, rho0, identity(n)) - (double)n * identity(n))),
        tol.identity);
  r.add("S_omega unit", "dequant:unit",
        op_norm(Mat(dequantize(t, rho0, identity(n)) - (double)n * identity(n))),
        tol.identity);

  // composed map stays in M: S_omega T_nu(f) for matrix-unit pairs
  double cmem = 0;
  for (const auto& f : q.M_basis) {
    Mat v = dequantize(t, matrix_unit(n, 0, 0), quantize(t, matrix_unit(n, 1, 1), f));
    cmem = std::max(cmem, span_residual(q.M_span, v));
  }
  r.add("S_omega T_nu lands in M", "dequant:composition", cmem, tol.span);
  return r;
}

// --- twisted Fourier product (group-dual ambients with diagonal cocycles) ---

// dimension of the center of an operator span, by solving [x, basis] = 0
// inside the span
inline int center_dimension(const OpSpan& s, int n) {
  int r = s.dim();
  Mat sys(r * n * n, r);
  for (int l = 0; l < r; ++l) {
    Mat bl = unvectorize(s.basis.col(l), n, n);
    for (int k = 0; k < r; ++k) {
      Mat bk = unvectorize(s.basis.col(k), n, n);
      sys.block(k * n * n, l, n * n, 1) = vectorize(Mat(bl * bk - bk * bl));
    }
  }
  Eigen::JacobiSVD<Mat> svd(sys);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int rank = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > 1e-10 * std::max(smax, 1.0)) ++rank;
  return r - rank;
}

inline Mat scalar_cocycle_table(const DualCocycle& c) {
  int n = c.q.n();
  if (c.q.kind != QGKind::GroupAlgebra)
    throw std::invalid_argument("scalar cocycle table needs a group-dual ambient");
  Mat offdiag = c.omega;
  offdiag.diagonal().setZero();
  if (op_norm(offdiag) > 1e-12)
    throw std::invalid_argument("cocycle is not diagonal");
  Mat tab(n, n);
  for (int s = 0; s < n; ++s)
    for (int u = 0; u < n; ++u) tab(s, u) = c.omega(s * n + u, s * n + u);
  return tab;
}

inline Vec twisted_fourier_product(const TwistedAlgebra& t, const Vec& f1,
                                   const Vec& f2) {
  const auto& g = t.c.q.group;
  int n = g.order;
  Mat tab = scalar_cocycle_table(t.c);
  Vec out = Vec::Zero(n);
  for (int s = 0; s < n; ++s)
    for (int u = 0; u < n; ++u)
      out(g.op(s, u)) += f1(s) * f2(u) * std::conj(tab(s, u));
  return out;
}

// pi_Omega(f) = (f (x) id)(What Omega*).
inline Mat pi_omega(const TwistedAlgebra& t, const Vec& f) {
  int n = t.c.q.n();
  Mat wo = t.c.q.What * t.c.omega.adjoint();
  Space h1 = make_space(n, "1"), h2 = make_space(n, "2");
  return slice(LegOp{{h1, h2}, wo}, "1", Mat(f.asDiagonal())).m;
}

inline Report fourier_checks(const TwistedAlgebra& t, const Tolerances& tol = {}) {
  Report r;
  r.suite = "fourier";
  const auto& g = t.c.q.group;
  int n = g.order;
  double rep = 0, assoc = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Vec fa = Vec::Unit(n, a), fb = Vec::Unit(n, b);
      Mat lhs = pi_omega(t, fa) * pi_omega(t, fb);
      Mat rhs = pi_omega(t, twisted_fourier_product(t, fa, fb));
      rep = std::max(rep, op_norm(lhs - rhs));
      for (int cidx = 0; cidx < n; ++cidx) {
        Vec fc = Vec::Unit(n, cidx);
        Vec l = twisted_fourier_product(t, twisted_fourier_product(t, fa, fb), fc);
        Vec rr = twisted_fourier_product(t, fa, twisted_fourier_product(t, fb, fc));
        assoc = std::max(assoc, (l - rr).norm());
      }
    }
  r.add("pi_Omega is multiplicative for the twisted product", "fourier:representation",
        rep, tol.identity);
  r.add("twisted product associative", "fourier:associativity", assoc, tol.identity);

  // delta_e acts as conj(Omega(e,e)) times the identity
  Mat tab = scalar_cocycle_table(t.c);
  complexd unit_scale = std::conj(tab(g.e, g.e));
  double uworst = 0;
  for (int a = 0; a < n; ++a) {
    Vec f = Vec::Unit(n, a);
    uworst = std::max(uworst,
                      (twisted_fourier_product(t, Vec(Vec::Unit(n, g.e)), f) -
                       unit_scale * f)
                          .norm());
  }
  r.add("delta_e is the scaled unit", "fourier:unit", uworst, tol.identity);

  // the pi_Omega image is *-closed (unimodularity of finite groups)
  double star = 0;
  for (int a = 0; a < n; ++a)
    star = std::max(star,
                    span_residual(t.span, Mat(pi_omega(t, Vec(Vec::Unit(n, a))).adjoint())));
  r.add("pi_Omega image is star-closed", "fourier:star-closed", star, tol.span);
  return r;
}

// Regularity: span{x Jhat y Jhat} over the twisted algebra equals all of B(H),
// and span{(K (x) 1) What Omega* (1 (x) K)} is all of B(H (x) H).
inline Report regularity_check(const TwistedAlgebra& t, const Tolerances& tol = {}) {
  Report r;
  r.suite = "regularity";
  const auto& q = t.c.q;
  int n = q.n();
  auto basis = detail::span_basis_ops(t.span, n);
  std::vector<Mat> prods;
  for (const auto& x : basis)
    for (const auto& y : q.Mhat_basis) prods.push_back(Mat(x * ad(q.Jhat, y)));
  auto pspan = make_span({make_space(n, "1")}, prods);
  r.add("product span is all of B(H)", "regular:products",
        std::abs((double)pspan.dim() - (double)n * n), 0.5);

  Mat wo = q.What * t.c.omega.adjoint();
  std::vector<Mat> ks;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc)
        for (int dd = 0; dd < n; ++dd)
          ks.push_back(Mat(kron(matrix_unit(n, a, b), identity(n)) * wo *
                           kron(identity(n), matrix_unit(n, cc, dd))));
  auto kspan = make_span({make_space(n, "1"), make_space(n, "2")}, ks);
  r.add("compact sandwich span is all of B(H (x) H)", "regular:sandwich",
        std::abs((double)kspan.dim() - (double)n * n * n * n), 0.5);
  (void)tol;
  return r;
}

struct AverageResult {
  complexd value = 0;
  double scalar_defect = 0;
  double positivity = 0;  // most negative eigenvalue of the Hermitian part
};

// (id (x) haar) beta(x) = phi_tilde(x) 1; the Haar functional on the M leg is
// the counting-type weight, so average(1) = |G|.
inline AverageResult average(const TwistedAlgebra& t, const Mat& x) {
  const auto& q = t.c.q;
  int n = q.n();
  AverageResult out;
  Mat herm = (x + Mat(x.adjoint())) / 2.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(herm);
  out.positivity = es.eigenvalues().minCoeff();
  Space h1 = make_space(n, "1"), h2 = make_space(n, "2");
  Mat avg = slice(LegOp{{h1, h2}, beta(t, x)}, "2", q.haar_rho).m;
  out.value = avg.trace() / (double)n;
  out.scalar_defect = op_norm(Mat(avg - out.value * identity(n)));
  return out;
}

inline Report average_checks(const TwistedAlgebra& t, const Tolerances& tol = {}) {
  Report r;
  r.suite = "average";
  const auto& q = t.c.q;
  int n = q.n();
  auto one = average(t, identity(n));
  r.add("average(1) = |G|", "avg:unit",
        std::abs(one.value - complexd(n)) + one.scalar_defect, tol.identity);
  // phi_tilde(y* y) = (|G| / |xi_0|^2) |LambdaTilde(y)|^2 on generator
  // combinations; the prefactor reflects the cyclic vector normalization
  auto basis = detail::span_basis_ops(t.span, n);
  double factor = n / q.gns_cyclic.squaredNorm();
  double worst = 0, scalar = 0, pos = 0;
  for (size_t a = 0; a < basis.size(); ++a)
    for (size_t b = a; b < basis.size(); ++b) {
      Mat y = basis[a] + complexd(0.3, 0.4) * basis[b];
      Mat x = y.adjoint() * y;
      auto res = average(t, x);
      scalar = std::max(scalar, res.scalar_defect);
      pos = std::max(pos, -res.positivity);
      double expect = factor * lambda_tilde(t.dual, y).squaredNorm();
      worst = std::max(worst, std::abs(res.value - complexd(expect)));
    }
  r.add("averages of positives are scalar", "avg:scalar", scalar, tol.identity);
  r.add("positivity of inputs", "avg:positivity", pos, tol.identity);
  r.add("average matches the GNS norm", "avg:gns", worst, tol.identity);
  return r;
}

}  // namespace qdeform
