#pragma once

// Unitary dual 2-cocycles: generation (bicharacters, coboundaries, raw
// matrices), verification, the deformed coproduct, dual-weight GNS data
// (LambdaTilde, Jtilde) and the deformed multiplicative unitary.

#include <cmath>
#include <istream>
#include <numeric>
#include <sstream>

#include "qdeform/fqg.hpp"

namespace qdeform {

enum class CocycleProvenance { Trivial, Bicharacter, Coboundary, Raw };

struct DualCocycle {
  FiniteQuantumGroup q;
  Mat omega;  // on H (x) H, expected unitary element of Mhat (x) Mhat
  CocycleProvenance provenance = CocycleProvenance::Raw;
  std::string name = "raw";
};

inline DualCocycle trivial_cocycle(const FiniteQuantumGroup& q) {
  return {q, identity(q.n() * q.n()), CocycleProvenance::Trivial, "trivial"};
}

namespace detail {

// (Delta_hat (x) id)(y) for y on H(x)H with first leg in Mhat, as a three-leg
// operator: What_12* y_23 What_12.
inline Mat coproduct_first_leg(const Mat& what, const Mat& y, int n) {
  std::vector<Space> amb = {make_space(n, "1"), make_space(n, "2"),
                            make_space(n, "3")};
  std::vector<Space> sub = {make_space(n, "u"), make_space(n, "v")};
  Mat w12 = place(LegOp{sub, what}, {"1", "2"}, amb).m;
  Mat y23 = place(LegOp{sub, y}, {"2", "3"}, amb).m;
  return w12.adjoint() * y23 * w12;
}

// (id (x) Delta_hat)(y) for y with second leg in Mhat: What_23* y_13 What_23.
inline Mat coproduct_second_leg(const Mat& what, const Mat& y, int n) {
  std::vector<Space> amb = {make_space(n, "1"), make_space(n, "2"),
                            make_space(n, "3")};
  std::vector<Space> sub = {make_space(n, "u"), make_space(n, "v")};
  Mat w23 = place(LegOp{sub, what}, {"2", "3"}, amb).m;
  Mat y13 = place(LegOp{sub, y}, {"1", "3"}, amb).m;
  return w23.adjoint() * y13 * w23;
}

inline Mat place2(const Mat& x, int n, const std::string& a, const std::string& b,
                  const std::vector<Space>& amb) {
  std::vector<Space> sub = {make_space(n, "u"), make_space(n, "v")};
  return place(LegOp{sub, x}, {a, b}, amb).m;
}

inline std::vector<Space> amb3(int n) {
  return {make_space(n, "1"), make_space(n, "2"), make_space(n, "3")};
}

}  // namespace detail

// Defect norms of: unitarity, Mhat(x)Mhat membership, the cocycle identity
// (Omega (x) 1)(Delta_hat (x) id)(Omega) = (1 (x) Omega)(id (x) Delta_hat)(Omega),
// and its rewritten form
// (Delta_hat (x) id)(What Omega*) Omega*_12 = (What Omega*)_13 (What Omega*)_23.
inline Report verify_cocycle(const DualCocycle& c, const Tolerances& tol = {}) {
  Report r;
  r.suite = "cocycle";
  const auto& q = c.q;
  int n = q.n();
  r.add("Omega unitary", "cocycle:unitary",
        op_norm(Mat(c.omega * c.omega.adjoint() - identity(n * n))), tol.identity);

  std::vector<Mat> mm;
  for (const auto& a : q.Mhat_basis)
    for (const auto& b : q.Mhat_basis) mm.push_back(kron(a, b));
  auto mm_span = make_span({make_space(n, "1"), make_space(n, "2")}, mm);
  r.add("Omega in Mhat (x) Mhat", "cocycle:membership",
        span_residual(mm_span, c.omega), tol.span);

  auto amb = detail::amb3(n);
  Mat o12 = detail::place2(c.omega, n, "1", "2", amb);
  Mat o23 = detail::place2(c.omega, n, "2", "3", amb);
  Mat lhs = o12 * detail::coproduct_first_leg(q.What, c.omega, n);
  Mat rhs = o23 * detail::coproduct_second_leg(q.What, c.omega, n);
  r.add("cocycle identity", "cocycle:identity", op_norm(lhs - rhs), tol.identity);

  Mat wo = q.What * c.omega.adjoint();
  Mat eq21_lhs = detail::coproduct_first_leg(q.What, wo, n) *
                 detail::place2(c.omega.adjoint(), n, "1", "2", amb);
  Mat eq21_rhs = detail::place2(wo, n, "1", "3", amb) *
                 detail::place2(wo, n, "2", "3", amb);
  r.add("rewritten cocycle identity", "cocycle:rewritten",
        op_norm(eq21_lhs - eq21_rhs), tol.identity);
  return r;
}

// Scalar bicharacter on an abelian group -> diagonal cocycle on the dual of
// group_algebra(gamma).
inline DualCocycle bicharacter_cocycle(const FiniteGroup& gamma, const Mat& psi,
                                       std::string name = "bicharacter") {
  int n = gamma.order;
  if (!gamma.is_abelian())
    throw std::invalid_argument("bicharacter cocycles need an abelian group");
  if (psi.rows() != n || psi.cols() != n)
    throw std::invalid_argument("bicharacter table has wrong size");
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t)
      if (std::abs(std::abs(psi(s, t)) - 1.0) > 1e-12)
        throw std::invalid_argument("bicharacter value at (" + std::to_string(s) +
                                    "," + std::to_string(t) + ") is not unimodular");
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      for (int s2 = 0; s2 < n; ++s2)
        if (std::abs(psi(gamma.op(s, s2), t) - psi(s, t) * psi(s2, t)) > 1e-10)
          throw std::invalid_argument("bicharacter law fails in the first slot at (" +
                                      std::to_string(s) + "*" + std::to_string(s2) +
                                      "," + std::to_string(t) + ")");
      for (int t2 = 0; t2 < n; ++t2)
        if (std::abs(psi(s, gamma.op(t, t2)) - psi(s, t) * psi(s, t2)) > 1e-10)
          throw std::invalid_argument("bicharacter law fails in the second slot at (" +
                                      std::to_string(s) + "," + std::to_string(t) +
                                      "*" + std::to_string(t2) + ")");
    }
  auto q = group_algebra(gamma);
  Mat omega = Mat::Zero(n * n, n * n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) omega(s * n + t, s * n + t) = psi(s, t);
  return {std::move(q), std::move(omega), CocycleProvenance::Bicharacter,
          std::move(name)};
}

// All bicharacters of an invariant-factor abelian group: bilinear forms
// determined by a matrix of exponents m_ij modulo gcd(n_i, n_j).
inline std::vector<Mat> enumerate_bicharacters(const FiniteGroup& gamma) {
  if (gamma.invariant_factors.empty())
    throw std::invalid_argument("bicharacter enumeration needs invariant factors");
  const auto& fs = gamma.invariant_factors;
  int k = (int)fs.size(), n = gamma.order;
  std::vector<int> range;  // one gcd per ordered factor pair
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) range.push_back(std::gcd(fs[i], fs[j]));
  int count = 1;
  for (int g : range) count *= g;
  std::vector<Mat> out;
  std::vector<int> m, S, T;
  for (int idx = 0; idx < count; ++idx) {
    decode_index(idx, range, m);
    Mat psi(n, n);
    for (int s = 0; s < n; ++s) {
      decode_index(s, fs, S);
      for (int t = 0; t < n; ++t) {
        decode_index(t, fs, T);
        double phase = 0;
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j)
            phase += (double)m[i * k + j] * S[i] * T[j] / range[i * k + j];
        psi(s, t) = std::polar(1.0, 2.0 * M_PI * phase);
      }
    }
    out.push_back(std::move(psi));
  }
  return out;
}

// Omega_u = (u (x) u) Omega Delta_hat(u)*.
inline DualCocycle coboundary_twist(const DualCocycle& c, const Mat& u,
                                    const Tolerances& tol = {}) {
  const auto& q = c.q;
  int n = q.n();
  if (op_norm(Mat(u * u.adjoint() - identity(n))) > tol.identity)
    throw std::invalid_argument("coboundary twist: u is not unitary");
  if (span_residual(q.Mhat_span, u) > tol.span)
    throw std::invalid_argument("coboundary twist: u is not in the Mhat span");
  Mat omega_u = kron(u, u) * c.omega * q.delta_hat(u).adjoint();
  return {q, std::move(omega_u), CocycleProvenance::Coboundary, c.name + "+coboundary"};
}

// x -> Omega Delta_hat(x) Omega* on the Mhat basis, with a coassociativity report.
inline Mat deformed_coproduct_apply(const DualCocycle& c, const Mat& x) {
  return c.omega * c.q.delta_hat(x) * c.omega.adjoint();
}

inline double deformed_coproduct_coassociativity(const DualCocycle& c) {
  const auto& q = c.q;
  int n = q.n();
  auto amb = detail::amb3(n);
  Mat o12 = detail::place2(c.omega, n, "1", "2", amb);
  Mat o23 = detail::place2(c.omega, n, "2", "3", amb);
  double worst = 0;
  for (const auto& x : q.Mhat_basis) {
    Mat dx = deformed_coproduct_apply(c, x);
    Mat lhs = o12 * detail::coproduct_first_leg(q.What, dx, n) * o12.adjoint();
    Mat rhs = o23 * detail::coproduct_second_leg(q.What, dx, n) * o23.adjoint();
    worst = std::max(worst, op_norm(lhs - rhs));
  }
  return worst;
}

struct DeformedDualData {
  std::vector<Mat> generators;   // (omega_ij (x) id)(What Omega*), lex order
  std::vector<Vec> gen_images;   // LambdaTilde of the generators
  OpSpan span;                   // C*_r(Ghat; Omega)
  double lambda_well_defined_defect = 0;
  Antilinear Stilde, Jtilde;
  Mat delta_tilde;
  Mat What_Omega;  // deformed multiplicative unitary
  Mat X;           // Jtilde J, unitary element of Mhat
  Mat coeff_pinv;  // maps vec(x) to generator coefficients
};

// LambdaTilde of an element of the generator span (coefficients via the cached
// pseudoinverse).
inline Vec lambda_tilde(const DeformedDualData& d, const Mat& x) {
  Vec coeff = d.coeff_pinv * vectorize(x);
  Vec out = Vec::Zero(d.gen_images.empty() ? 0 : d.gen_images[0].size());
  for (size_t k = 0; k < d.gen_images.size(); ++k) out += coeff(k) * d.gen_images[k];
  return out;
}

inline DeformedDualData dual_weight_gns(const DualCocycle& c) {
  const auto& q = c.q;
  int n = q.n();
  DeformedDualData d;
  Mat wo = q.What * c.omega.adjoint();
  Space h1 = make_space(n, "1"), h2 = make_space(n, "2");
  LegOp wo_op{{h1, h2}, wo}, what_op{{h1, h2}, q.What};
  Mat gen_mat(n * n, n * n);  // vectorized generators as columns
  Mat img_mat(n, n * n);
  {
    int k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j, ++k) {
        Mat g = slice(wo_op, "1", matrix_unit(n, i, j)).m;
        Vec img = slice(what_op, "1", matrix_unit(n, i, j)).m * q.gns_cyclic;
        d.generators.push_back(g);
        d.gen_images.push_back(img);
        gen_mat.col(k) = vectorize(g);
        img_mat.col(k) = img;
      }
  }
  d.span = make_span({h2}, d.generators);
  // well-definedness: the kernel of the generator matrix must be killed by the
  // LambdaTilde images
  Eigen::JacobiSVD<Mat> svd(gen_mat, Eigen::ComputeThinV);
  double smax = svd.singularValues()(0);
  int rank = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > 1e-10 * smax) ++rank;
  if (rank < n * n) {
    Mat null_basis = svd.matrixV().rightCols(n * n - rank);
    d.lambda_well_defined_defect = op_norm(Mat(img_mat * null_basis));
  }
  if (d.lambda_well_defined_defect > 1e-8)
    throw std::runtime_error("dual weight GNS map is ill defined (defect " +
                             std::to_string(d.lambda_well_defined_defect) + ")");
  // pseudoinverse for coefficient extraction
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(gen_mat);
  d.coeff_pinv = cod.pseudoInverse();

  // S-tilde on H: LambdaTilde(x) -> LambdaTilde(x*), via an operator basis of
  // the span
  int r = d.span.dim();
  if (r != n)
    throw std::runtime_error("twisted algebra span dimension " + std::to_string(r) +
                             " does not match the GNS space dimension");
  Mat p(n, r), pstar(n, r);
  for (int l = 0; l < r; ++l) {
    Mat b = unvectorize(d.span.basis.col(l), n, n);
    p.col(l) = lambda_tilde(d, b);
    pstar.col(l) = lambda_tilde(d, b.adjoint());
  }
  d.Stilde = Antilinear{pstar * p.conjugate().inverse()};
  auto polar = antilinear_polar(d.Stilde);
  d.Jtilde = polar.j;
  d.delta_tilde = polar.delta;
  d.X = compose(d.Jtilde, q.J);

  // What_Omega = (Jtilde (x) Jhat) Omega What* (J (x) Jhat) Omega*
  Antilinear left = kron(d.Jtilde, q.Jhat);
  Antilinear right = kron(q.J, q.Jhat);
  Antilinear inner = compose(right, Mat(c.omega.adjoint()));
  Antilinear mid{Mat(c.omega * q.What.adjoint()) * inner.m};
  d.What_Omega = compose(left, mid);
  return d;
}

// Verification battery for the deformed dual data.
inline Report deformed_dual_checks(const DualCocycle& c, const DeformedDualData& d,
                                   const Tolerances& tol = {}) {
  Report r;
  r.suite = "deformed-dual";
  const auto& q = c.q;
  int n = q.n();
  r.add("deformed coproduct coassociative", "dco:coassociativity",
        deformed_coproduct_coassociativity(c), tol.identity);
  r.add("LambdaTilde well defined", "dweight:well-defined",
        d.lambda_well_defined_defect, tol.span);
  r.add("X = Jtilde J in Mhat span", "dweight:X-membership",
        span_residual(q.Mhat_span, d.X), tol.span);
  r.add("X unitary", "dweight:X-unitary",
        op_norm(Mat(d.X * d.X.adjoint() - identity(n))), tol.identity);

  const Mat& w = d.What_Omega;
  r.add("What_Omega unitary", "dmu:unitary",
        op_norm(Mat(w * w.adjoint() - identity(n * n))), tol.identity);
  auto amb = detail::amb3(n);
  Mat w12 = detail::place2(w, n, "1", "2", amb);
  Mat w13 = detail::place2(w, n, "1", "3", amb);
  Mat w23 = detail::place2(w, n, "2", "3", amb);
  r.add("pentagon What_Omega", "dmu:pentagon", op_norm(w12 * w13 * w23 - w23 * w12),
        tol.identity);
  double worst = 0;
  for (const auto& x : q.Mhat_basis) {
    Mat lhs = w.adjoint() * kron(identity(n), x) * w;
    worst = std::max(worst, op_norm(lhs - deformed_coproduct_apply(c, x)));
  }
  r.add("What_Omega implements the deformed coproduct", "dmu:implements", worst,
        tol.identity);

  // (What_Omega Omega)_23 What_12 (What_Omega Omega)*_23
  //   = (What Omega*)_12 (What_Omega Omega)_13
  Mat woo = w * c.omega;
  Mat lhs = detail::place2(woo, n, "2", "3", amb) *
            detail::place2(q.What, n, "1", "2", amb) *
            detail::place2(woo, n, "2", "3", amb).adjoint();
  Mat rhs = detail::place2(Mat(q.What * c.omega.adjoint()), n, "1", "2", amb) *
            detail::place2(woo, n, "1", "3", amb);
  r.add("compatibility of the deformed unitary", "dmu:compatibility",
        op_norm(lhs - rhs), tol.identity);
  return r;
}

// Omega* as a cocycle on the deformed dual; also checks that the twisted
// algebra built over the deformed dual is Jhat (twisted algebra) Jhat.
inline Report cocycle_on_deformed(const DualCocycle& c, const DeformedDualData& d,
                                  const Tolerances& tol = {}) {
  Report r;
  r.suite = "cocycle-on-deformed";
  const auto& q = c.q;
  int n = q.n();
  Mat o1 = c.omega.adjoint();
  r.add("Omega* unitary", "pcod:unitary",
        op_norm(Mat(o1 * o1.adjoint() - identity(n * n))), tol.identity);
  std::vector<Mat> mm;
  for (const auto& a : q.Mhat_basis)
    for (const auto& b : q.Mhat_basis) mm.push_back(kron(a, b));
  auto mm_span = make_span({make_space(n, "1"), make_space(n, "2")}, mm);
  r.add("Omega* in Mhat (x) Mhat", "pcod:membership", span_residual(mm_span, o1),
        tol.span);
  auto amb = detail::amb3(n);
  Mat p12 = detail::place2(o1, n, "1", "2", amb);
  Mat p23 = detail::place2(o1, n, "2", "3", amb);
  Mat lhs = p12 * detail::coproduct_first_leg(d.What_Omega, o1, n);
  Mat rhs = p23 * detail::coproduct_second_leg(d.What_Omega, o1, n);
  r.add("cocycle identity over the deformed coproduct", "pcod:identity",
        op_norm(lhs - rhs), tol.identity);

  // span{(omega (x) id)(What_Omega Omega)} = Jhat C*_r(Ghat;Omega) Jhat
  Mat woo = d.What_Omega * c.omega;
  Space h1 = make_space(n, "1"), h2 = make_space(n, "2");
  LegOp woo_op{{h1, h2}, woo};
  std::vector<Mat> gens, conj_gens;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gens.push_back(slice(woo_op, "1", matrix_unit(n, i, j)).m);
  for (const auto& g : d.generators) conj_gens.push_back(ad(q.Jhat, g));
  auto got = make_span({h2}, gens);
  auto expect = make_span({h2}, conj_gens);
  r.add("deformed twisted algebra = Jhat twisted algebra Jhat", "pcod:span",
        span_diff_norm(got, expect), tol.span);
  return r;
}

// --- cocycle file format ---
//
//   bicharacter
//   <s> <t> <angle-in-turns>     (omitted pairs default to angle 0)
// or
//   raw
//   <n^2 rows of n^2 whitespace-separated "re,im" entries>

inline DualCocycle parse_cocycle(std::istream& in, const FiniteQuantumGroup& q,
                                 bool force_unverified = false,
                                 const Tolerances& tol = {}) {
  int n = q.n();
  std::string line, mode;
  auto content = [&](std::string& out) {
    while (std::getline(in, line)) {
      auto pos = line.find('#');
      if (pos != std::string::npos) line.erase(pos);
      std::istringstream probe(line);
      std::string tok;
      if (probe >> tok) {
        out = line;
        return true;
      }
    }
    return false;
  };
  std::string head;
  if (!content(head)) throw std::invalid_argument("empty cocycle file");
  std::istringstream hs(head);
  hs >> mode;
  DualCocycle c;
  if (mode == "bicharacter") {
    if (q.kind != QGKind::GroupAlgebra)
      throw std::invalid_argument(
          "bicharacter cocycles live on the dual of a group algebra");
    Mat psi = Mat::Ones(n, n);
    std::string body;
    while (content(body)) {
      std::istringstream bs(body);
      int s, t;
      double turns;
      if (!(bs >> s >> t >> turns))
        throw std::invalid_argument("bad bicharacter line: " + body);
      if (s < 0 || s >= n || t < 0 || t >= n)
        throw std::invalid_argument("bicharacter pair out of range: " + body);
      psi(s, t) = std::polar(1.0, 2.0 * M_PI * turns);
    }
    c = bicharacter_cocycle(q.group, psi);
  } else if (mode == "raw") {
    Mat omega(n * n, n * n);
    for (int r = 0; r < n * n; ++r) {
      std::string row;
      if (!content(row))
        throw std::invalid_argument("raw cocycle row " + std::to_string(r) +
                                    " missing");
      std::istringstream rs(row);
      for (int col = 0; col < n * n; ++col) {
        std::string entry;
        if (!(rs >> entry))
          throw std::invalid_argument("raw cocycle row " + std::to_string(r) +
                                      " too short");
        auto comma = entry.find(',');
        if (comma == std::string::npos)
          throw std::invalid_argument("raw entries must be re,im pairs");
        omega(r, col) = complexd(std::stod(entry.substr(0, comma)),
                                 std::stod(entry.substr(comma + 1)));
      }
    }
    c = DualCocycle{q, std::move(omega), CocycleProvenance::Raw, "raw"};
  } else {
    throw std::invalid_argument("expected 'bicharacter' or 'raw'");
  }
  auto rep = verify_cocycle(c, tol);
  if (!rep.pass() && !force_unverified) {
    std::string which;
    for (const auto& chk : rep.checks)
      if (!chk.pass) which += (which.empty() ? "" : ", ") + chk.name;
    throw std::runtime_error("cocycle fails verification (" + which +
                             "); rerun with --force-unverified to accept");
  }
  return c;
}

inline std::string bicharacter_file_text(const FiniteGroup& gamma, const Mat& psi) {
  std::string out = "# bicharacter cocycle on " + gamma.name + "\nbicharacter\n";
  for (int s = 0; s < gamma.order; ++s)
    for (int t = 0; t < gamma.order; ++t) {
      double turns = std::arg(psi(s, t)) / (2.0 * M_PI);
      if (turns < 0) turns += 1.0;
      if (std::abs(turns) < 1e-15) continue;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", s, t, turns);
      out += buf;
    }
  return out;
}

}  // namespace qdeform
