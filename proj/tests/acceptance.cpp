// Acceptance gate: one line per criterion, nonzero exit when any fails.
// argv[1] is the path to the command-line binary, used for the
// reproducibility criterion.

#include <array>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "qdeform/suites.hpp"

using namespace qdeform;

namespace {

const std::string kData = QDEFORM_DATA_DIR;

struct Criterion {
  bool ok = true;
  double worst = 0;
};

void absorb(Criterion& c, const Report& r) {
  for (const auto& chk : r.checks) {
    c.ok = c.ok && chk.pass;
    c.worst = std::max(c.worst, chk.defect);
  }
}

void note(Criterion& c, double defect, double tolerance) {
  c.ok = c.ok && defect <= tolerance;
  c.worst = std::max(c.worst, defect);
}

bool report(int idx, const std::string& label, const Criterion& c) {
  std::printf("[%s] %d. %s (max defect %.3e)\n", c.ok ? "PASS" : "FAIL", idx,
              label.c_str(), c.worst);
  std::fflush(stdout);
  return c.ok;
}

std::string capture(const std::string& cmd, int& code) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    code = -1;
    return out;
  }
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), p)) > 0) out.append(buf, got);
  code = pclose(p);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  bool all_ok = true;

  // 1. pentagon and duality identities across the shipped groups
  {
    Criterion c;
    for (const auto& path :
         {"z2.grp", "z3.grp", "z4.grp", "z2xz2.grp", "s3.grp"}) {
      auto g = load_group_file(kData + "/" + path);
      absorb(c, fqg_checks(group_algebra(g)));
      absorb(c, fqg_checks(function_algebra(g)));
    }
    all_ok &= report(1, "pentagon and duality on Z2, Z3, Z4, Z2xZ2, S3", c);
  }

  // 2. cocycle verification over every enumerated bicharacter
  {
    Criterion c;
    int total = 0;
    for (const auto& path : {"z2.grp", "z3.grp", "z2xz2.grp", "z4.grp"}) {
      auto g = load_group_file(kData + "/" + path);
      auto q = group_algebra(g);
      for (const auto& psi : enumerate_bicharacters(g)) {
        absorb(c, verify_cocycle(bicharacter_cocycle(g, psi)));
        ++total;
      }
    }
    all_ok &= report(
        2, "cocycle identities for all " + std::to_string(total) +
               " enumerated bicharacters on Z2, Z3, Z2xZ2, Z4", c);
  }

  auto sigma = load_cocycle_file(
      kData + "/sigma.coc",
      group_algebra(load_group_file(kData + "/z2xz2.grp")), false, {});

  // 3. the sigma-twisted algebra: dimension, center, twisted translations
  {
    Criterion c;
    auto t = build_twisted_algebra(sigma);
    note(c, std::abs(t.span.dim() - 4.0), 0.5);
    note(c, std::abs(center_dimension(t.span, 4) - 1.0), 0.5);
    Mat tab = scalar_cocycle_table(sigma);
    const auto& g = sigma.q.group;
    double rel = 0;
    for (int s = 0; s < 4; ++s)
      for (int u = 0; u < 4; ++u) {
        Mat lst = pi_omega(t, Vec(Vec::Unit(4, g.op(s, u))));
        Mat prod = tab(s, u) * pi_omega(t, Vec(Vec::Unit(4, s))) *
                   pi_omega(t, Vec(Vec::Unit(4, u)));
        rel = std::max(rel, op_norm(Mat(lst - prod)));
      }
    note(c, rel, 1e-12);
    all_ok &= report(
        3, "sigma-twisted algebra: dim 4, trivial center, twisted relations",
        c);
  }

  auto ist = load_cocycle_file(kData + "/ist.coc",
                               group_algebra(load_group_file(kData + "/z4.grp")),
                               false, {});
  auto parity = load_cocycle_file(
      kData + "/parity_z2.coc",
      group_algebra(load_group_file(kData + "/z2.grp")), false, {});
  std::vector<DualCocycle> shipped_cocycles = {sigma, ist, parity};

  // 4. the deformed unitary: unitarity, pentagon, deformed coproduct, and
  // the four-term compatibility identity
  {
    Criterion c;
    for (const auto& cc : shipped_cocycles)
      absorb(c, deformed_dual_checks(cc, dual_weight_gns(cc)));
    all_ok &= report(4, "deformed unitary and its compatibility identity", c);
  }

  // 5. quantization maps: spanning and equivariance
  {
    Criterion c;
    Tolerances tight{1e-10, 1e-10};
    for (const auto& cc : shipped_cocycles)
      absorb(c, quantization_checks(build_twisted_algebra(cc), tight));
    all_ok &= report(5, "quantization spanning and equivariance", c);
  }

  // 6. deformation theorems on every shipped (system, cocycle) pair
  {
    Criterion c;
    for (const auto& sys : {"cgd.sys", "fm_z2.sys", "tz4.sys"}) {
      auto ctx = load_system_file(kData + "/" + sys);
      auto d = deform(ctx.s, ctx.c);
      absorb(c, deformed_algebra_checks(d));
      absorb(c, fixed_point_checks(d));
      absorb(c, verify_ttwisted(d));
      absorb(c, verify_stages(ctx.s, ctx.c, Mat(ctx.c.omega.adjoint()),
                              "inverse"));
      std::mt19937_64 rng(20240817);
      for (int trial = 0; trial < 100; ++trial)
        absorb(c, verify_cohomology_invariance(
                      d, random_mhat_unitary(ctx.q, rng)));
    }
    all_ok &= report(6,
                     "deformation theorems, stage round trip, and 100 "
                     "coboundary twists per shipped pair",
                     c);
  }

  // 7. regularity of every shipped group-dual cocycle
  {
    Criterion c;
    for (const auto& cc : shipped_cocycles) {
      auto t = build_twisted_algebra(cc);
      absorb(c, regularity_check(t));
    }
    all_ok &= report(7, "regularity: product span has dimension |G|^2", c);
  }

  // 8. kernel identities on the elementary normal j-groups
  {
    Criterion c;
    for (int d : {0, 1}) {
      kahlerian::SampleParams p;
      p.d = d;
      p.theta = 2.0;
      p.samples = 10000;
      p.seed = 7;
      absorb(c, kahlerian::kahlerian_checks(p, kahlerian::default_tau(), 1e-9));
    }
    all_ok &= report(8, "kernel identities over 10^4 samples, d in {0, 1}", c);
  }

  // 9. byte-identical JSON across two seeded runs
  {
    Criterion c;
    if (argc < 2) {
      c.ok = false;
    } else {
      std::string cmd = std::string(argv[1]) + " run all --seed 7 2>/dev/null";
      int code1 = 0, code2 = 0;
      std::string out1 = capture(cmd, code1);
      std::string out2 = capture(cmd, code2);
      c.ok = code1 == 0 && code2 == 0 && !out1.empty() && out1 == out2;
    }
    std::printf("[%s] 9. two seeded `run all` invocations emit identical "
                "JSON\n",
                c.ok ? "PASS" : "FAIL");
    all_ok &= c.ok;
  }

  return all_ok ? 0 : 1;
}
