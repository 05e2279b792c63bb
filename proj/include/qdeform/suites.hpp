#pragma once

// Named verification suites over a configured (group, ambient, algebra,
// cocycle) context, plus the system-file loader tying the pieces together.
//
// System file format (line-oriented, '#' comments):
//   system <name>
//   group <path>                relative to the system file
//   ambient group|function
//   algebra translation|trivial|full-matrix
//   cocycle <path>              optional; defaults to the trivial cocycle

#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "qdeform/deform.hpp"
#include "qdeform/kahlerian.hpp"

namespace qdeform {

struct SuiteContext {
  FiniteQuantumGroup q;
  DualCocycle c;
  GSystem s;
  std::string system_name = "translation";
  std::uint64_t seed = 7;
  Tolerances tol;
  int coboundary_trials = 20;
  kahlerian::SampleParams kparams;
  int kahlerian_d = -1;  // -1 = run both d = 0 and d = 1
};

inline GSystem build_preset_system(const FiniteQuantumGroup& q,
                                   const std::string& algebra) {
  if (algebra == "translation") return translation_system(q);
  if (algebra == "trivial") return trivial_system(q);
  if (algebra == "full-matrix") return full_matrix_system(q);
  throw std::invalid_argument("unknown algebra preset: " + algebra);
}

inline FiniteQuantumGroup build_ambient(const FiniteGroup& g,
                                        const std::string& ambient) {
  if (ambient == "group") return group_algebra(g);
  if (ambient == "function") return function_algebra(g);
  throw std::invalid_argument("ambient must be 'group' or 'function'");
}

struct SystemSpec {
  std::string name;
  std::string group_path;
  std::string ambient = "group";
  std::string algebra = "translation";
  std::string cocycle_path;  // empty = trivial
};

inline SystemSpec parse_system(std::istream& in) {
  SystemSpec spec;
  std::string line;
  bool named = false;
  while (std::getline(in, line)) {
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string val;
    std::getline(ls, val);
    auto first = val.find_first_not_of(" \t");
    val = first == std::string::npos ? "" : val.substr(first);
    auto last = val.find_last_not_of(" \t");
    if (last != std::string::npos) val = val.substr(0, last + 1);
    if (key == "system") {
      spec.name = val;
      named = true;
    } else if (key == "group") {
      spec.group_path = val;
    } else if (key == "ambient") {
      spec.ambient = val;
    } else if (key == "algebra") {
      spec.algebra = val;
    } else if (key == "cocycle") {
      spec.cocycle_path = val;
    } else {
      throw std::invalid_argument("unknown system file key: " + key);
    }
  }
  if (!named) throw std::invalid_argument("system file lacks a 'system' line");
  if (spec.group_path.empty())
    throw std::invalid_argument("system file lacks a 'group' line");
  return spec;
}

inline FiniteGroup load_group_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open group file: " + path);
  return parse_group(in);
}

inline DualCocycle load_cocycle_file(const std::string& path,
                                     const FiniteQuantumGroup& q,
                                     bool force_unverified,
                                     const Tolerances& tol) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open cocycle file: " + path);
  auto c = parse_cocycle(in, q, force_unverified, tol);
  c.name = std::filesystem::path(path).stem().string();
  return c;
}

inline SuiteContext load_system_file(const std::string& path,
                                     bool force_unverified = false,
                                     const Tolerances& tol = {}) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open system file: " + path);
  auto spec = parse_system(in);
  auto dir = std::filesystem::path(path).parent_path();
  SuiteContext ctx;
  ctx.tol = tol;
  auto g = load_group_file((dir / spec.group_path).string());
  ctx.q = build_ambient(g, spec.ambient);
  ctx.c = spec.cocycle_path.empty()
              ? trivial_cocycle(ctx.q)
              : load_cocycle_file((dir / spec.cocycle_path).string(), ctx.q,
                                  force_unverified, tol);
  ctx.s = build_preset_system(ctx.q, spec.algebra);
  ctx.system_name = spec.name;
  return ctx;
}

// A unitary in Mhat with seeded random phases, for coboundary sampling.
inline Mat random_mhat_unitary(const FiniteQuantumGroup& q,
                               std::mt19937_64& rng) {
  int n = q.n();
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  if (q.kind == QGKind::GroupAlgebra) {
    Mat m = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) m(k, k) = std::polar(1.0, u(rng));
    return m;
  }
  if (!q.group.is_abelian() || q.group.invariant_factors.empty())
    throw std::invalid_argument(
        "random Mhat unitaries need an abelian function-algebra ambient");
  // Mhat is the group algebra; use the character projections
  Mat m = Mat::Zero(n, n);
  for (int chi = 0; chi < n; ++chi) {
    Mat p = Mat::Zero(n, n);
    for (int s = 0; s < n; ++s)
      p += std::conj(character_value(q.group, chi, s)) *
           lambda_matrix(q.group, s);
    m += std::polar(1.0, u(rng)) * (p / (double)n);
  }
  return m;
}

// --- suite runners ---

inline Report run_pentagon_suite(const SuiteContext& ctx) {
  auto r = fqg_checks(ctx.q, ctx.tol);
  r.suite = "pentagon";
  return r;
}

inline Report run_cocycle_suite(const SuiteContext& ctx) {
  Report r;
  r.suite = "cocycle";
  r.merge(verify_cocycle(ctx.c, ctx.tol));
  auto dd = dual_weight_gns(ctx.c);
  r.merge(deformed_dual_checks(ctx.c, dd, ctx.tol));
  r.merge(cocycle_on_deformed(ctx.c, dd, ctx.tol));
  return r;
}

inline Report run_twisted_suite(const SuiteContext& ctx) {
  Report r;
  r.suite = "twisted";
  auto t = build_twisted_algebra(ctx.c);
  r.merge(twisted_checks(t, ctx.tol));
  r.merge(quantization_checks(t, ctx.tol));
  r.merge(regularity_check(t, ctx.tol));
  r.merge(average_checks(t, ctx.tol));
  bool diagonal = ctx.c.q.kind == QGKind::GroupAlgebra &&
                  ctx.c.omega.isApprox(
                      Mat(ctx.c.omega.diagonal().asDiagonal()), 1e-12);
  if (diagonal) r.merge(fourier_checks(t, ctx.tol));
  return r;
}

inline Report run_deform_suite(const SuiteContext& ctx) {
  Report r;
  r.suite = "deform";
  r.merge(gsystem_checks(ctx.s, ctx.tol));
  r.merge(crossed_product_checks(crossed_product(ctx.s), ctx.tol));
  auto d = deform(ctx.s, ctx.c);
  r.merge(deformed_algebra_checks(d, ctx.tol));
  r.merge(deformed_action_checks(d, ctx.tol));
  r.merge(fixed_point_checks(d, ctx.tol));
  return r;
}

inline Report run_theorems_suite(const SuiteContext& ctx) {
  Report r;
  r.suite = "theorems";
  auto d = deform(ctx.s, ctx.c);
  r.merge(verify_ttwisted(d, ctx.tol));
  r.merge(verify_dual_action_case(op_dual_trivial_system(ctx.q), ctx.c,
                                  ctx.tol));
  return r;
}

inline Report run_stages_suite(const SuiteContext& ctx) {
  Report r;
  r.suite = "stages";
  int n = ctx.q.n();
  r.merge(verify_stages(ctx.s, ctx.c, Mat(ctx.c.omega.adjoint()), "inverse",
                        ctx.tol),
          "inverse stage: ");
  r.merge(verify_stages(ctx.s, ctx.c, identity(n * n), "trivial", ctx.tol),
          "trivial stage: ");
  return r;
}

inline Report run_cohomology_suite(const SuiteContext& ctx) {
  Report r;
  r.suite = "cohomology";
  auto d = deform(ctx.s, ctx.c);
  std::mt19937_64 rng(ctx.seed);
  double span_def = 0, dim_def = 0, eta_def = 0;
  for (int trial = 0; trial < ctx.coboundary_trials; ++trial) {
    Mat u = random_mhat_unitary(ctx.q, rng);
    auto rep = verify_cohomology_invariance(d, u, ctx.tol);
    for (const auto& c : rep.checks) {
      if (c.anchor == "cohomology:span") span_def = std::max(span_def, c.defect);
      if (c.anchor == "cohomology:dimension")
        dim_def = std::max(dim_def, c.defect);
      if (c.anchor == "cohomology:eta") eta_def = std::max(eta_def, c.defect);
    }
  }
  r.add("invariance under random coboundary twists (" +
            std::to_string(ctx.coboundary_trials) + " trials)",
        "cohomology:span", span_def, ctx.tol.span);
  r.add("dimension invariance", "cohomology:dimension", dim_def, 0.5);
  r.add("conjugation pictures are intertwined", "cohomology:eta", eta_def,
        ctx.tol.identity);
  return r;
}

inline Report run_kahlerian_suite(const SuiteContext& ctx) {
  Report r;
  r.suite = "kahlerian";
  std::vector<int> dims = ctx.kahlerian_d >= 0 ? std::vector<int>{ctx.kahlerian_d}
                                               : std::vector<int>{0, 1};
  for (int d : dims) {
    auto p = ctx.kparams;
    p.d = d;
    p.seed = ctx.seed;
    r.merge(kahlerian::kahlerian_checks(p, kahlerian::default_tau()),
            "d=" + std::to_string(d) + ": ");
  }
  return r;
}

inline std::vector<std::string> suite_names() {
  return {"pentagon", "cocycle",    "twisted",   "deform", "theorems",
          "stages",   "cohomology", "kahlerian", "all"};
}

inline std::vector<Report> run_suites(const std::string& which,
                                      const SuiteContext& ctx) {
  std::vector<Report> out;
  bool all = which == "all";
  if (all || which == "pentagon") out.push_back(run_pentagon_suite(ctx));
  if (all || which == "cocycle") out.push_back(run_cocycle_suite(ctx));
  if (all || which == "twisted") out.push_back(run_twisted_suite(ctx));
  if (all || which == "deform") out.push_back(run_deform_suite(ctx));
  if (all || which == "theorems") out.push_back(run_theorems_suite(ctx));
  if (all || which == "stages") out.push_back(run_stages_suite(ctx));
  if (all || which == "cohomology") out.push_back(run_cohomology_suite(ctx));
  if (all || which == "kahlerian") out.push_back(run_kahlerian_suite(ctx));
  if (out.empty()) throw std::invalid_argument("unknown suite: " + which);
  return out;
}

// Default context: the dual of Z2 x Z2 twisted by the antisymmetric
// bicharacter, acting on its translation system.
inline SuiteContext default_context() {
  SuiteContext ctx;
  auto g = abelian_group({2, 2}, "Z2xZ2");
  ctx.q = group_algebra(g);
  Mat psi(4, 4);
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) psi(s, t) = ((s % 2) * (t / 2)) % 2 ? -1.0 : 1.0;
  ctx.c = bicharacter_cocycle(g, psi, "sigma");
  ctx.s = translation_system(ctx.q);
  return ctx;
}

}  // namespace qdeform
