#pragma once

// Dense complex linear algebra over small labeled tensor products:
// leg placement, slice maps, operator-space spans, antilinear operators
// and their polar decomposition.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdeform {

using complexd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct Tolerances {
  double identity = 1e-10;  // operator-norm defect of exact identities
  double span = 1e-8;       // span projection comparisons
};

struct Space {
  int dim = 1;
  std::string label;
  std::vector<std::string> basis_names;
};

inline Space make_space(int dim, std::string label,
                        std::vector<std::string> basis_names = {}) {
  if (dim < 1) throw std::invalid_argument("space dimension must be >= 1");
  if (basis_names.empty()) {
    basis_names.reserve(dim);
    for (int i = 0; i < dim; ++i) basis_names.push_back(std::to_string(i));
  }
  if ((int)basis_names.size() != dim)
    throw std::invalid_argument("basis name count does not match dimension");
  auto sorted = basis_names;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("duplicate basis name");
  return Space{dim, std::move(label), std::move(basis_names)};
}

inline int total_dim(const std::vector<Space>& legs) {
  int d = 1;
  for (const auto& s : legs) d *= s.dim;
  return d;
}

// An operator on an ordered tensor product of labeled spaces.
// Row/column indices use row-major mixed-radix encoding over the listed order.
struct LegOp {
  std::vector<Space> legs;
  Mat m;

  int dim() const { return total_dim(legs); }
};

inline LegOp make_legop(std::vector<Space> legs, Mat m) {
  int d = total_dim(legs);
  if (m.rows() != d || m.cols() != d)
    throw std::invalid_argument("matrix side does not match product of leg dims");
  return LegOp{std::move(legs), std::move(m)};
}

inline Mat identity(int d) { return Mat::Identity(d, d); }

inline Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

inline LegOp kron(const LegOp& a, const LegOp& b) {
  for (const auto& la : a.legs)
    for (const auto& lb : b.legs)
      if (la.label == lb.label)
        throw std::invalid_argument("duplicate leg label in kron: " + la.label);
  std::vector<Space> legs = a.legs;
  legs.insert(legs.end(), b.legs.begin(), b.legs.end());
  return LegOp{std::move(legs), kron(a.m, b.m)};
}

// --- mixed-radix index helpers ---

inline void decode_index(int idx, const std::vector<int>& dims, std::vector<int>& out) {
  out.resize(dims.size());
  for (int k = (int)dims.size() - 1; k >= 0; --k) {
    out[k] = idx % dims[k];
    idx /= dims[k];
  }
}

inline int encode_index(const std::vector<int>& digits, const std::vector<int>& dims) {
  int idx = 0;
  for (size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + digits[k];
  return idx;
}

// Permutation matrix reordering tensor legs. `perm[j]` is the old position of
// the leg that sits at new position j. For a vector with multi-index I over the
// old order, the image has multi-index J with J_j = I_{perm[j]}.
inline Mat leg_perm_matrix(const std::vector<int>& dims, const std::vector<int>& perm) {
  int d = 1;
  for (int x : dims) d *= x;
  std::vector<int> new_dims(perm.size());
  for (size_t j = 0; j < perm.size(); ++j) new_dims[j] = dims[perm[j]];
  Mat p = Mat::Zero(d, d);
  std::vector<int> I, J(perm.size());
  for (int idx = 0; idx < d; ++idx) {
    decode_index(idx, dims, I);
    for (size_t j = 0; j < perm.size(); ++j) J[j] = I[perm[j]];
    p(encode_index(J, new_dims), idx) = 1.0;
  }
  return p;
}

inline int leg_position(const std::vector<Space>& legs, const std::string& label) {
  for (size_t i = 0; i < legs.size(); ++i)
    if (legs[i].label == label) return (int)i;
  throw std::invalid_argument("unknown leg label: " + label);
}

// x acting on the named legs of `ambient`, identity elsewhere.
inline LegOp place(const LegOp& x, const std::vector<std::string>& target_legs,
                   const std::vector<Space>& ambient) {
  if (target_legs.size() != x.legs.size())
    throw std::invalid_argument("place: target count does not match operator legs");
  std::vector<int> tpos;
  for (size_t i = 0; i < target_legs.size(); ++i) {
    int p = leg_position(ambient, target_legs[i]);
    if (ambient[p].dim != x.legs[i].dim)
      throw std::invalid_argument("place: dimension mismatch on leg " + target_legs[i]);
    tpos.push_back(p);
  }
  std::vector<int> rest;
  for (int p = 0; p < (int)ambient.size(); ++p)
    if (std::find(tpos.begin(), tpos.end(), p) == tpos.end()) rest.push_back(p);
  // order1 = targets (in x's leg order) followed by the remaining ambient legs
  std::vector<int> order1 = tpos;
  order1.insert(order1.end(), rest.begin(), rest.end());
  int rest_dim = 1;
  for (int p : rest) rest_dim *= ambient[p].dim;
  Mat y = kron(x.m, identity(rest_dim));
  std::vector<int> dims1;
  for (int p : order1) dims1.push_back(ambient[p].dim);
  // perm maps ambient position j to its slot inside order1
  std::vector<int> perm(ambient.size());
  for (size_t j = 0; j < ambient.size(); ++j) {
    auto it = std::find(order1.begin(), order1.end(), (int)j);
    perm[j] = (int)(it - order1.begin());
  }
  Mat p = leg_perm_matrix(dims1, perm);
  return LegOp{ambient, p * y * p.transpose()};
}

// Partial contraction of one leg against a functional given as a density
// matrix rho, with the pairing omega(a) = Tr(rho^T a).
inline LegOp slice(const LegOp& x, const std::string& leg, const Mat& rho) {
  int pos = leg_position(x.legs, leg);
  int dleg = x.legs[pos].dim;
  if (rho.rows() != dleg || rho.cols() != dleg)
    throw std::invalid_argument("slice: functional dimension mismatch");
  std::vector<Space> out_legs;
  std::vector<int> dims, out_dims;
  for (int k = 0; k < (int)x.legs.size(); ++k) {
    dims.push_back(x.legs[k].dim);
    if (k != pos) {
      out_legs.push_back(x.legs[k]);
      out_dims.push_back(x.legs[k].dim);
    }
  }
  int dout = 1;
  for (int v : out_dims) dout *= v;
  Mat r = Mat::Zero(dout, dout);
  std::vector<int> R, C, Rf(dims.size()), Cf(dims.size());
  for (int a = 0; a < dout; ++a) {
    decode_index(a, out_dims, R);
    for (int b = 0; b < dout; ++b) {
      decode_index(b, out_dims, C);
      for (size_t k = 0, t = 0; k < dims.size(); ++k) {
        if ((int)k != pos) {
          Rf[k] = R[t];
          Cf[k] = C[t];
          ++t;
        }
      }
      complexd sum = 0.0;
      for (int i = 0; i < dleg; ++i) {
        Rf[pos] = i;
        for (int j = 0; j < dleg; ++j) {
          Cf[pos] = j;
          sum += rho(i, j) * x.m(encode_index(Rf, dims), encode_index(Cf, dims));
        }
      }
      r(a, b) = sum;
    }
  }
  return LegOp{std::move(out_legs), std::move(r)};
}

// The flip H1 (x) H2 -> H2 (x) H1.
inline Mat flip_matrix(int d1, int d2) {
  Mat f = Mat::Zero(d1 * d2, d1 * d2);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j) f(j * d1 + i, i * d2 + j) = 1.0;
  return f;
}

// X_{21} for a two-leg operator on H (x) H (equal leg dimensions).
inline Mat swap_legs(const Mat& x, int d) {
  Mat f = flip_matrix(d, d);
  return f * x * f;
}

inline double op_norm(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

// --- antilinear operators ---

// Action: xi |-> m * conj(xi).
struct Antilinear {
  Mat m;
};

inline Antilinear compose(const Antilinear& a, const Mat& l) { return {a.m * l.conjugate()}; }
inline Antilinear compose(const Mat& l, const Antilinear& a) { return {l * a.m}; }
inline Mat compose(const Antilinear& a, const Antilinear& b) { return a.m * b.m.conjugate(); }
inline Antilinear adjoint(const Antilinear& a) { return {a.m.transpose()}; }
inline Antilinear kron(const Antilinear& a, const Antilinear& b) { return {kron(a.m, b.m)}; }

inline Vec apply_anti(const Antilinear& a, const Vec& v) { return a.m * v.conjugate(); }

// Conjugation by an antiunitary: x |-> a x a^*, a linear operator.
inline Mat ad(const Antilinear& a, const Mat& x) {
  return a.m * x.conjugate() * a.m.adjoint();
}

struct PolarResult {
  Antilinear j;
  Mat delta;  // positive, invertible
};

// s = J Delta^{1/2} with Delta = s* s, the antilinear adjoint taken with respect
// to the standard inner product.
inline PolarResult antilinear_polar(const Antilinear& s) {
  Mat delta = s.m.transpose() * s.m.conjugate();
  Eigen::SelfAdjointEigenSolver<Mat> es(delta);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failure");
  double lo = es.eigenvalues().minCoeff();
  if (lo <= 1e-14) throw std::invalid_argument("antilinear_polar: singular input");
  Mat inv_sqrt = es.eigenvectors() *
                 es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                 es.eigenvectors().adjoint();
  Antilinear j = compose(s, inv_sqrt);
  return {j, delta};
}

// --- operator-space spans ---

inline Vec vectorize(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

inline Mat unvectorize(const Vec& v, int rows, int cols) {
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

struct OpSpan {
  std::vector<Space> legs;
  std::vector<Mat> gens;
  Mat basis;  // columns: orthonormal vectorized operators (Frobenius)

  int dim() const { return (int)basis.cols(); }
};

// Modified Gram-Schmidt with reorthogonalization; drops numerically dependent
// generators. Deterministic in the given generator order.
inline Mat orthonormalize(const std::vector<Mat>& gens, double drop_tol = 1e-7) {
  if (gens.empty()) return Mat(0, 0);
  int n = (int)gens[0].size();
  Mat basis(n, gens.size());
  int r = 0;
  for (const auto& g : gens) {
    Vec v = vectorize(g);
    double n0 = v.norm();
    if (n0 < 1e-13) continue;  // rounding dust, not a direction
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < r; ++k) v -= basis.col(k).dot(v) * basis.col(k);
    if (v.norm() > drop_tol * n0) basis.col(r++) = v / v.norm();
  }
  return basis.leftCols(r);
}

inline OpSpan make_span(std::vector<Space> legs, std::vector<Mat> gens,
                        double drop_tol = 1e-7) {
  int d = total_dim(legs);
  for (const auto& g : gens)
    if (g.rows() != d || g.cols() != d)
      throw std::invalid_argument("span generator has wrong ambient dimension");
  Mat basis = orthonormalize(gens, drop_tol);
  return OpSpan{std::move(legs), std::move(gens), std::move(basis)};
}

inline int span_dim(const OpSpan& s) { return s.dim(); }

// Relative residual of op against the span: ||(1-P)v|| / ||v||. Operators that
// are zero up to rounding dust count as contained.
inline double span_residual(const OpSpan& s, const Mat& op) {
  Vec v = vectorize(op);
  double n0 = v.norm();
  if (n0 < 1e-13) return 0.0;
  Vec w = v - s.basis * (s.basis.adjoint() * v);
  return w.norm() / n0;
}

inline void check_same_ambient(const OpSpan& a, const OpSpan& b) {
  if (a.legs.size() != b.legs.size())
    throw std::invalid_argument("span ambient mismatch");
  for (size_t i = 0; i < a.legs.size(); ++i)
    if (a.legs[i].dim != b.legs[i].dim)
      throw std::invalid_argument("span ambient mismatch");
}

// Operator norm of P_a - P_b (largest principal-angle sine, both directions).
inline double span_diff_norm(const OpSpan& a, const OpSpan& b) {
  check_same_ambient(a, b);
  double worst = 0.0;
  if (b.dim() > 0) {
    Mat res = b.basis - a.basis * (a.basis.adjoint() * b.basis);
    worst = std::max(worst, op_norm(res));
  }
  if (a.dim() > 0) {
    Mat res = a.basis - b.basis * (b.basis.adjoint() * a.basis);
    worst = std::max(worst, op_norm(res));
  }
  return worst;
}

inline double span_containment_defect(const OpSpan& a, const OpSpan& b) {
  // how far b sits outside a
  check_same_ambient(a, b);
  if (b.dim() == 0) return 0.0;
  Mat res = b.basis - a.basis * (a.basis.adjoint() * b.basis);
  return op_norm(res);
}

inline bool span_contains(const OpSpan& a, const OpSpan& b, double tol = 1e-8) {
  return span_containment_defect(a, b) <= tol;
}

inline bool span_equal(const OpSpan& a, const OpSpan& b, double tol = 1e-8) {
  return span_diff_norm(a, b) <= tol;
}

}  // namespace qdeform
