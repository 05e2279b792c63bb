#pragma once

// Finite quantum groups: the function algebra C(G) and the group algebra
// C*(Gamma), with Haar data, multiplicative unitaries, duality and modular
// conjugations.
//
// Conventions (fixed once, everything downstream verified against them):
//   group algebra:     What(delta_s (x) delta_t) = delta_s (x) delta_{st},
//                      W = Sigma What* Sigma = sum_s lambda_s* (x) E_ss.
//   function algebra:  W(delta_s (x) delta_t) = delta_s (x) delta_{st},
//                      i.e. W = sum_s E_ss (x) lambda_s.
//   Haar: counting-type on both sides, phi(1) = |G|; GNS maps are unscaled
//   (Lambda(lambda_s) = delta_s, Lambda(f) = f as a vector).

#include "qdeform/group.hpp"
#include "qdeform/report.hpp"
#include "qdeform/tensorkit.hpp"

namespace qdeform {

// Left regular representation: lambda_s delta_t = delta_{st}.
inline Mat lambda_matrix(const FiniteGroup& g, int s) {
  Mat m = Mat::Zero(g.order, g.order);
  for (int t = 0; t < g.order; ++t) m(g.op(s, t), t) = 1.0;
  return m;
}

inline Mat matrix_unit(int n, int i, int j) {
  Mat m = Mat::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

// delta_s -> delta_{s^{-1}} permutation.
inline Mat inversion_matrix(const FiniteGroup& g) {
  Mat m = Mat::Zero(g.order, g.order);
  for (int s = 0; s < g.order; ++s) m(g.inv[s], s) = 1.0;
  return m;
}

enum class QGKind { FunctionAlgebra, GroupAlgebra };

struct FiniteQuantumGroup {
  QGKind kind = QGKind::FunctionAlgebra;
  FiniteGroup group;
  Space H;
  Mat W, What, V;          // on H (x) H
  Antilinear J, Jhat;      // modular involutions for (M, phi) and (Mhat, phihat)
  std::vector<Mat> M_basis, Mhat_basis;
  OpSpan M_span, Mhat_span;
  Mat haar_rho, haar_hat_rho;  // density matrices: phi(a) = Tr(rho^T a)
  Vec gns_cyclic;              // xi0 with Lambda(x) = x xi0

  int n() const { return group.order; }

  Mat delta(const Mat& x) const { return W.adjoint() * kron(identity(n()), x) * W; }
  Mat delta_hat(const Mat& x) const {
    return What.adjoint() * kron(identity(n()), x) * What;
  }
  Mat delta_hat_op(const Mat& x) const { return swap_legs(delta_hat(x), n()); }
  Mat What_op() const {
    Antilinear jj = kron(J, J);
    return compose(compose(jj, What), jj);
  }
  Mat lambda(int s) const { return lambda_matrix(group, s); }
};

namespace detail {

inline void finish_quantum_group(FiniteQuantumGroup& q) {
  int n = q.n();
  q.H = make_space(n, "H", q.group.elements);
  q.What = swap_legs(q.W.adjoint(), n);
  Antilinear jj = kron(q.Jhat, q.Jhat);
  q.V = compose(compose(jj, q.What), jj);
  q.M_span = make_span({q.H}, q.M_basis);
  q.Mhat_span = make_span({q.H}, q.Mhat_basis);
}

}  // namespace detail

inline FiniteQuantumGroup function_algebra(const FiniteGroup& g) {
  FiniteQuantumGroup q;
  q.kind = QGKind::FunctionAlgebra;
  q.group = g;
  int n = g.order;
  q.W = Mat::Zero(n * n, n * n);
  for (int s = 0; s < n; ++s)
    q.W.block(s * n, s * n, n, n) = lambda_matrix(g, s);  // sum_s E_ss (x) lambda_s
  q.J = Antilinear{identity(n)};
  q.Jhat = Antilinear{inversion_matrix(g)};
  for (int s = 0; s < n; ++s) {
    q.M_basis.push_back(matrix_unit(n, s, s));
    q.Mhat_basis.push_back(lambda_matrix(g, s));
  }
  q.haar_rho = identity(n);                                  // counting measure
  q.haar_hat_rho = double(n) * matrix_unit(n, g.e, g.e);     // n * trace
  q.gns_cyclic = Vec::Ones(n);
  detail::finish_quantum_group(q);
  return q;
}

inline FiniteQuantumGroup group_algebra(const FiniteGroup& g) {
  FiniteQuantumGroup q;
  q.kind = QGKind::GroupAlgebra;
  q.group = g;
  int n = g.order;
  Mat what = Mat::Zero(n * n, n * n);
  for (int s = 0; s < n; ++s)
    what.block(s * n, s * n, n, n) = lambda_matrix(g, s);
  q.W = swap_legs(what.adjoint(), n);  // = sum_s lambda_s* (x) E_ss
  q.J = Antilinear{inversion_matrix(g)};
  q.Jhat = Antilinear{identity(n)};
  for (int s = 0; s < n; ++s) {
    q.M_basis.push_back(lambda_matrix(g, s));
    q.Mhat_basis.push_back(matrix_unit(n, s, s));
  }
  q.haar_rho = double(n) * matrix_unit(n, g.e, g.e);
  q.haar_hat_rho = identity(n);
  q.gns_cyclic = Vec::Unit(n, g.e);
  detail::finish_quantum_group(q);
  return q;
}

inline FiniteQuantumGroup dual(const FiniteQuantumGroup& q) {
  FiniteQuantumGroup d;
  d.kind = q.kind == QGKind::FunctionAlgebra ? QGKind::GroupAlgebra
                                             : QGKind::FunctionAlgebra;
  d.group = q.group;
  d.W = q.What;
  d.J = q.Jhat;
  d.Jhat = q.J;
  d.M_basis = q.Mhat_basis;
  d.Mhat_basis = q.M_basis;
  d.haar_rho = q.haar_hat_rho;
  d.haar_hat_rho = q.haar_rho;
  d.gns_cyclic = d.kind == QGKind::FunctionAlgebra ? Vec(Vec::Ones(q.n()))
                                                   : Vec(Vec::Unit(q.n(), q.group.e));
  detail::finish_quantum_group(d);
  return d;
}

struct GnsData {
  std::vector<Vec> lambda_images;  // Lambda on the M basis
  Antilinear S, J;
  Mat delta;
};

// GNS data of the Haar state: Lambda(x) = x xi0, S: Lambda(x) -> Lambda(x*),
// J from the antilinear polar decomposition of S.
inline GnsData gns(const FiniteQuantumGroup& q) {
  int n = q.n();
  Mat vmat(n, n), wmat(n, n);
  GnsData out;
  for (int k = 0; k < n; ++k) {
    Vec v = q.M_basis[k] * q.gns_cyclic;
    Vec w = q.M_basis[k].adjoint() * q.gns_cyclic;
    vmat.col(k) = v;
    wmat.col(k) = w;
    out.lambda_images.push_back(v);
  }
  // S (conj of coordinates of Lambda-images): M_S conj(v_k) = w_k
  Mat s_mat = wmat * vmat.conjugate().inverse();
  out.S = Antilinear{s_mat};
  auto polar = antilinear_polar(out.S);
  out.J = polar.j;
  out.delta = polar.delta;
  return out;
}

inline Mat commutant_reflection(const FiniteQuantumGroup& q, const Mat& x) {
  return ad(q.J, x);  // J x J, lands in M'
}

// Full invariant battery for a constructed quantum group.
inline Report fqg_checks(const FiniteQuantumGroup& q, const Tolerances& tol = {}) {
  Report r;
  r.suite = "pentagon";
  int n = q.n();
  std::vector<Space> amb3 = {make_space(n, "1"), make_space(n, "2"),
                             make_space(n, "3")};
  std::vector<Space> sub2 = {make_space(n, "u"), make_space(n, "v")};
  auto pentagon = [&](const Mat& w) {
    LegOp wo{sub2, w};
    Mat w12 = place(wo, {"1", "2"}, amb3).m;
    Mat w13 = place(wo, {"1", "3"}, amb3).m;
    Mat w23 = place(wo, {"2", "3"}, amb3).m;
    return op_norm(w12 * w13 * w23 - w23 * w12);
  };
  auto unitarity = [&](const Mat& w) {
    return op_norm(Mat(w * w.adjoint() - identity(n * n)));
  };
  r.add("W unitary", "unitary:W", unitarity(q.W), tol.identity);
  r.add("What unitary", "unitary:What", unitarity(q.What), tol.identity);
  r.add("V unitary", "unitary:V", unitarity(q.V), tol.identity);
  r.add("pentagon W", "pentagon:W", pentagon(q.W), tol.identity);
  r.add("pentagon What", "pentagon:What", pentagon(q.What), tol.identity);
  r.add("pentagon V", "pentagon:V", pentagon(q.V), tol.identity);
  r.add("What = Sigma W* Sigma", "duality:What",
        op_norm(q.What - swap_legs(q.W.adjoint(), n)), tol.identity);

  // coproduct lands in M (x) M and is implemented by V as well
  std::vector<Mat> mm_gens;
  for (const auto& a : q.M_basis)
    for (const auto& b : q.M_basis) mm_gens.push_back(kron(a, b));
  auto mm_span = make_span({make_space(n, "1"), make_space(n, "2")}, mm_gens);
  double worst_mem = 0, worst_v = 0;
  for (const auto& x : q.M_basis) {
    Mat dx = q.delta(x);
    worst_mem = std::max(worst_mem, span_residual(mm_span, dx));
    Mat via_v = q.V * kron(x, identity(n)) * q.V.adjoint();
    worst_v = std::max(worst_v, op_norm(dx - via_v));
  }
  r.add("Delta(M) in M(x)M", "coproduct:membership", worst_mem, tol.span);
  r.add("Delta via W equals Delta via V", "coproduct:W-vs-V", worst_v, tol.identity);

  // (Jhat (x) J) W* (Jhat (x) J) = W
  Antilinear jj = kron(q.Jhat, q.J);
  Mat wr = compose(compose(jj, Mat(q.W.adjoint())), jj);
  r.add("(Jhat x J) W* (Jhat x J) = W", "unitary-antipode:W", op_norm(wr - q.W),
        tol.identity);

  // dual algebra = slices of W on the first leg
  std::vector<Mat> slices;
  LegOp wo{{make_space(n, "1"), make_space(n, "2")}, q.W};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      slices.push_back(slice(wo, "1", matrix_unit(n, i, j)).m);
  auto slice_span = make_span({make_space(n, "2")}, slices);
  r.add("Mhat = slices of W", "dual:slices",
        span_diff_norm(q.Mhat_span, slice_span), tol.span);

  // What_op lands in Mhat (x) M'
  std::vector<Mat> mhat_mp;
  for (const auto& a : q.Mhat_basis)
    for (const auto& b : q.M_basis) mhat_mp.push_back(kron(a, ad(q.J, b)));
  auto mhat_mp_span = make_span({make_space(n, "1"), make_space(n, "2")}, mhat_mp);
  r.add("What_op in Mhat (x) M'", "opposite:What_op",
        span_residual(mhat_mp_span, q.What_op()), tol.span);

  // biduality at span level
  auto dd = dual(dual(q));
  r.add("bidual M span", "biduality:M", span_diff_norm(dd.M_span, q.M_span), tol.span);
  r.add("bidual Mhat span", "biduality:Mhat",
        span_diff_norm(dd.Mhat_span, q.Mhat_span), tol.span);
  r.add("bidual W", "biduality:W", op_norm(dd.W - q.W), tol.identity);

  // GNS sanity: J from polar matches the stored involution on M basis
  auto g = gns(q);
  double jd = op_norm(g.J.m - q.J.m);
  r.add("GNS modular involution matches construction", "gns:J", jd, tol.identity);
  r.add("J^2 = 1", "gns:J-squared", op_norm(compose(g.J, g.J) - identity(n)),
        tol.identity);

  if (q.group.is_abelian()) {
    double comm = 0;
    for (const auto& a : q.Mhat_basis)
      for (const auto& b : q.Mhat_basis) comm = std::max(comm, op_norm(a * b - b * a));
    r.add("Mhat commutative (abelian group)", "abelian:Mhat", comm, tol.identity);
  }
  return r;
}

}  // namespace qdeform
