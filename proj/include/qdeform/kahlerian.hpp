#pragma once

// Pointwise numerics for the elementary solvable kernel family: the group law
// on R x R^{2d} x R, its modular function, the kernels A, S, K_theta and
// K_{theta,tau}, and the symmetry identities they satisfy. Everything here is
// scalar evaluation plus seeded random sampling; no operator algebra.

#include <functional>
#include <random>

#include "qdeform/report.hpp"
#include "qdeform/tensorkit.hpp"

namespace qdeform {
namespace kahlerian {

template <typename R>
struct Elem {
  R a{};
  std::vector<R> v;  // length 2d
  R t{};
};

template <typename R>
Elem<R> identity_elem(int d) {
  return {R(0), std::vector<R>(2 * d, R(0)), R(0)};
}

// standard symplectic form on R^{2d}
template <typename R>
R symplectic(const std::vector<R>& v, const std::vector<R>& w, int d) {
  R s{};
  for (int i = 0; i < d; ++i) s += v[i] * w[d + i] - v[d + i] * w[i];
  return s;
}

template <typename R>
Elem<R> mul(const Elem<R>& x, const Elem<R>& y, int d) {
  if ((int)x.v.size() != 2 * d || (int)y.v.size() != 2 * d)
    throw std::invalid_argument("group element dimension mismatch");
  using std::exp;
  Elem<R> r;
  r.a = x.a + y.a;
  R ea = exp(-y.a), e2a = exp(R(-2) * y.a);
  r.v.resize(2 * d);
  for (int k = 0; k < 2 * d; ++k) r.v[k] = ea * x.v[k] + y.v[k];
  r.t = e2a * x.t + y.t + R(0.5) * ea * symplectic(x.v, y.v, d);
  return r;
}

template <typename R>
Elem<R> inv(const Elem<R>& x, int d) {
  if ((int)x.v.size() != 2 * d)
    throw std::invalid_argument("group element dimension mismatch");
  using std::exp;
  Elem<R> r;
  r.a = -x.a;
  R ea = exp(x.a), e2a = exp(R(2) * x.a);
  r.v.resize(2 * d);
  for (int k = 0; k < 2 * d; ++k) r.v[k] = -ea * x.v[k];
  r.t = -e2a * x.t;
  return r;
}

inline double modular_function(const Elem<double>& x, int d) {
  return std::exp(-(2.0 * d + 2.0) * x.a);
}

inline double kernel_A(int d, const Elem<double>& x, const Elem<double>& y) {
  double c1 = std::cosh(x.a) * std::cosh(y.a) * std::cosh(x.a - y.a);
  double c2 = std::cosh(2 * x.a) * std::cosh(2 * y.a) * std::cosh(2 * x.a - 2 * y.a);
  double r = std::pow(c1, d) * std::sqrt(c2);
  if (!std::isfinite(r))
    throw std::overflow_error("kernel amplitude overflow; |a| too large");
  return r;
}

inline double kernel_S(int d, const Elem<double>& x, const Elem<double>& y) {
  return std::sinh(2 * x.a) * y.t - std::sinh(2 * y.a) * x.t +
         std::cosh(x.a) * std::cosh(y.a) * symplectic(x.v, y.v, d);
}

inline complexd kernel_K(int d, double theta, const Elem<double>& x,
                         const Elem<double>& y) {
  if (theta == 0.0) throw std::invalid_argument("theta must be nonzero");
  // (pi theta)^{-2d-2}: even power, so the sign of theta drops out
  double amp = 4.0 * std::pow(M_PI * std::abs(theta), -(2.0 * d + 2.0));
  double a = amp * kernel_A(d, x, y);
  if (!std::isfinite(a))
    throw std::overflow_error("kernel overflow; |a| too large");
  return a * std::exp(complexd(0.0, 2.0 * kernel_S(d, x, y) / theta));
}

using TauFn = std::function<complexd(double)>;

inline complexd cohomology_factor(int d, double theta, const TauFn& tau,
                                  const Elem<double>& x, const Elem<double>& y) {
  (void)d;
  auto arg = [&](double s) { return tau(2.0 / theta * std::sinh(s)); };
  return std::exp(arg(2 * x.a) + arg(-2 * y.a) - arg(2 * x.a - 2 * y.a));
}

inline complexd kernel_Ktau(int d, double theta, const TauFn& tau,
                            const Elem<double>& x, const Elem<double>& y) {
  return kernel_K(d, theta, x, y) * cohomology_factor(d, theta, tau, x, y);
}

struct SampleParams {
  int d = 1;
  double theta = 2.0;
  int samples = 10000;
  std::uint64_t seed = 7;
  double box = 2.0;  // coordinates sampled uniformly in [-box, box]
};

namespace detail {

inline Elem<double> random_elem(int d, double box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-box, box);
  Elem<double> x;
  x.a = u(rng);
  x.v.resize(2 * d);
  for (auto& c : x.v) c = u(rng);
  x.t = u(rng);
  return x;
}

inline std::mt19937_64 sample_rng(std::uint64_t seed, int index) {
  // independent per-sample stream
  std::seed_seq seq{seed, (std::uint64_t)index, (std::uint64_t)0x9e3779b97f4a7c15ULL};
  return std::mt19937_64(seq);
}

inline std::vector<double> pack(const Elem<double>& x) {
  std::vector<double> c{x.a};
  c.insert(c.end(), x.v.begin(), x.v.end());
  c.push_back(x.t);
  return c;
}

inline Elem<complexd> lift(const std::vector<complexd>& c, int d) {
  Elem<complexd> x;
  x.a = c[0];
  x.v.assign(c.begin() + 1, c.begin() + 1 + 2 * d);
  x.t = c[2 * d + 1];
  return x;
}

inline std::vector<complexd> pack_complex(const Elem<complexd>& x) {
  std::vector<complexd> c{x.a};
  c.insert(c.end(), x.v.begin(), x.v.end());
  c.push_back(x.t);
  return c;
}

// Jacobian of x -> f(x) at x0 via complex-step differentiation (exact to
// machine precision for the analytic group law).
template <typename F>
Eigen::MatrixXd jacobian(F&& f, const Elem<double>& x0, int d) {
  int m = 2 * d + 2;
  auto base = pack(x0);
  Eigen::MatrixXd jac(m, m);
  const double h = 1e-100;
  for (int k = 0; k < m; ++k) {
    std::vector<complexd> c(base.begin(), base.end());
    c[k] += complexd(0.0, h);
    Elem<complexd> out = f(lift(c, d));
    auto col = pack_complex(out);
    for (int r = 0; r < m; ++r) jac(r, k) = col[r].imag() / h;
  }
  return jac;
}

}  // namespace detail

inline Report kahlerian_checks(const SampleParams& p, const TauFn& tau,
                               double tol = 1e-9) {
  Report r;
  r.suite = "kahlerian";
  int d = p.d;
  auto e = identity_elem<double>(d);

  double id_def = 0, inv_def = 0, assoc_def = 0, mod_def = 0;
  double jac_left = 0, jac_right = 0;
  double conj_def = 0, lemA = 0, lemS = 0, lemK = 0;
  double tau_real = 0, mod1 = 0, ratio_def = 0, slice_def = 0;

  auto norm = [d](const Elem<double>& x, const Elem<double>& y) {
    double s = std::abs(x.a - y.a) + std::abs(x.t - y.t);
    for (int k = 0; k < 2 * d; ++k) s += std::abs(x.v[k] - y.v[k]);
    return s;
  };

  for (int i = 0; i < p.samples; ++i) {
    auto rng = detail::sample_rng(p.seed, i);
    auto x = detail::random_elem(d, p.box, rng);
    auto y = detail::random_elem(d, p.box, rng);
    auto z = detail::random_elem(d, p.box, rng);

    id_def = std::max({id_def, norm(mul(x, e, d), x), norm(mul(e, x, d), x)});
    inv_def = std::max({inv_def, norm(mul(x, inv(x, d), d), e),
                        norm(mul(inv(x, d), x, d), e)});
    assoc_def = std::max(
        assoc_def, norm(mul(mul(x, y, d), z, d), mul(x, mul(y, z, d), d)));
    double mprod = modular_function(x, d) * modular_function(y, d);
    mod_def = std::max(mod_def,
                       std::abs(modular_function(mul(x, y, d), d) - mprod) /
                           std::max(1.0, std::abs(mprod)));

    if (i < 64) {  // Jacobians are exact; a few points suffice
      auto g = y;
      auto gc = detail::pack(g);
      auto lift_g = detail::lift(std::vector<complexd>(gc.begin(), gc.end()), d);
      auto left = detail::jacobian(
          [&](const Elem<complexd>& w) { return mul(lift_g, w, d); }, x, d);
      auto right = detail::jacobian(
          [&](const Elem<complexd>& w) { return mul(w, lift_g, d); }, x, d);
      jac_left = std::max(jac_left, std::abs(left.determinant() - 1.0));
      jac_right = std::max(
          jac_right, std::abs(right.determinant() - modular_function(g, d)));
    }

    conj_def = std::max(conj_def,
                        std::abs(std::conj(kernel_K(d, p.theta, x, y)) -
                                 kernel_K(d, -p.theta, x, y)));

    auto yx = mul(inv(y, d), x, d);
    auto yi = inv(y, d);
    lemA = std::max(lemA, std::abs(kernel_A(d, yx, yi) - kernel_A(d, x, y)));
    lemS = std::max(lemS, std::abs(kernel_S(d, yx, yi) + kernel_S(d, x, y)));
    complexd kxy = kernel_K(d, p.theta, x, y);
    lemK = std::max(lemK, std::abs(std::conj(kernel_K(d, p.theta, yx, yi)) -
                                   kxy) /
                              std::max(1.0, std::abs(kxy)));

    std::uniform_real_distribution<double> u(-p.box, p.box);
    tau_real = std::max(tau_real, std::abs(tau(u(rng)).real()));
    complexd fac = cohomology_factor(d, p.theta, tau, x, y);
    mod1 = std::max(mod1, std::abs(std::abs(fac) - 1.0));
    ratio_def = std::max(
        ratio_def, std::abs(kernel_Ktau(d, p.theta, tau, x, y) -
                            kernel_K(d, p.theta, x, y) * fac));
    // the factor only sees (a, a')
    auto x2 = detail::random_elem(d, p.box, rng);
    auto y2 = detail::random_elem(d, p.box, rng);
    x2.a = x.a;
    y2.a = y.a;
    slice_def = std::max(
        slice_def, std::abs(fac - cohomology_factor(d, p.theta, tau, x2, y2)));
  }

  r.add("identity element", "jgroup:identity", id_def, tol);
  r.add("inverses", "jgroup:inverse", inv_def, tol);
  r.add("associativity", "jgroup:associativity", assoc_def, tol);
  r.add("modular function is a homomorphism", "jgroup:modular-hom", mod_def,
        tol);
  r.add("modular function value", "jgroup:modular-value",
        std::abs(modular_function({1.0, std::vector<double>(2 * d, 0.0), 0.0},
                                  d) -
                 std::exp(-(2.0 * d + 2.0))),
        tol);
  r.add("left translation preserves volume", "jgroup:left-jacobian", jac_left,
        tol);
  r.add("right translation scales by the modular function",
        "jgroup:right-jacobian", jac_right, tol);

  r.add("kernels at the identity", "kernel:origin",
        std::abs(kernel_A(d, e, e) - 1.0) + std::abs(kernel_S(d, e, e)) +
            std::abs(kernel_K(d, p.theta, e, e) -
                     4.0 * std::pow(M_PI * std::abs(p.theta),
                                    -(2.0 * d + 2.0))),
        tol);
  r.add("conjugate kernel flips the parameter", "kernel:conjugate", conj_def,
        tol);
  r.add("amplitude symmetry", "kernel:symmetry-A", lemA, tol);
  r.add("phase antisymmetry", "kernel:symmetry-S", lemS, tol);
  r.add("kernel symmetry", "kernel:symmetry-K", lemK, tol);

  r.add("twist parameter is purely imaginary on samples", "factor:imaginary",
        tau_real, tol);
  r.add("cohomology factor has modulus one", "factor:modulus", mod1, tol);
  r.add("twisted kernel factorizes", "factor:ratio", ratio_def, tol);
  r.add("cohomology factor depends only on the dilation parts",
        "factor:dilation-only", slice_def, tol);
  return r;
}

inline TauFn default_tau() {
  return [](double x) { return complexd(0.0, x / (1.0 + x * x)); };
}

}  // namespace kahlerian
}  // namespace qdeform
