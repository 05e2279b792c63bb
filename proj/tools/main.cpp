// Batch front-end: load groups/cocycles/systems, run named verification
// suites, emit machine-readable reports.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "qdeform/suites.hpp"

namespace {

using namespace qdeform;

bool is_antisymmetric_bicharacter(const FiniteGroup& g, const Mat& psi) {
  for (int s = 0; s < g.order; ++s)
    for (int t = 0; t < g.order; ++t)
      if (std::abs(psi(s, t) - std::conj(psi(t, s))) > 1e-12) return false;
  return true;
}

int enumerate_command(const std::string& group_path) {
  auto g = load_group_file(group_path);
  if (!g.is_abelian() || g.invariant_factors.empty())
    throw std::invalid_argument("cocycle enumeration needs an abelian group");
  auto all = enumerate_bicharacters(g);
  std::vector<size_t> order;
  for (size_t k = 0; k < all.size(); ++k)
    if (is_antisymmetric_bicharacter(g, all[k])) order.push_back(k);
  for (size_t k = 0; k < all.size(); ++k)
    if (!is_antisymmetric_bicharacter(g, all[k])) order.push_back(k);
  std::printf("# %zu bicharacters on %s (antisymmetric first)\n", all.size(),
              g.name.c_str());
  for (size_t rank = 0; rank < order.size(); ++rank) {
    const auto& psi = all[order[rank]];
    std::printf("# --- bicharacter %zu%s\n", rank,
                is_antisymmetric_bicharacter(g, psi) ? " (antisymmetric)" : "");
    std::fputs(bicharacter_file_text(g, psi).c_str(), stdout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite quantum group cocycle deformation verifier"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a named verification suite");
  std::string suite;
  run->add_option("suite", suite, "one of: pentagon cocycle twisted deform theorems stages cohomology kahlerian all")
      ->required();
  std::string group_path, cocycle_path, system_path;
  std::string ambient = "group", algebra = "translation";
  std::uint64_t seed = 7;
  double tol_identity = 1e-10, tol_span = 1e-8;
  bool strict = false, want_table = false, want_json = false;
  bool force_unverified = false;
  int trials = 20, kd = -1, samples = 10000;
  double theta = 2.0, box = 2.0;
  run->add_option("--group", group_path, "group file");
  run->add_option("--cocycle", cocycle_path, "cocycle file");
  run->add_option("--system", system_path, "system file");
  run->add_option("--ambient", ambient, "group | function");
  run->add_option("--algebra", algebra, "translation | trivial | full-matrix");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--tol-identity", tol_identity, "tolerance for exact identities");
  run->add_option("--tol-span", tol_span, "tolerance for span comparisons");
  run->add_flag("--strict", strict, "refuse unverified inputs");
  run->add_flag("--table", want_table, "human-readable table output");
  run->add_flag("--json", want_json, "JSON output (default)");
  run->add_flag("--force-unverified", force_unverified,
                "accept cocycle files that fail verification");
  run->add_option("--trials", trials, "coboundary trials in the cohomology suite");
  run->add_option("--d", kd, "restrict the kahlerian suite to one dimension");
  run->add_option("--theta", theta, "kahlerian deformation parameter");
  run->add_option("--samples", samples, "kahlerian sample count");
  run->add_option("--box", box, "kahlerian sampling box half-width");

  auto* enumc =
      app.add_subcommand("enumerate-cocycles", "list all bicharacter cocycles");
  std::string enum_group;
  enumc->add_option("group", enum_group, "group file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (enumc->parsed()) return enumerate_command(enum_group);

    if (strict && force_unverified)
      throw std::invalid_argument("--strict refuses --force-unverified inputs");
    if (want_table && want_json)
      throw std::invalid_argument("choose one of --json and --table");

    Tolerances tol{tol_identity, tol_span};
    SuiteContext ctx;
    if (!system_path.empty()) {
      ctx = load_system_file(system_path, force_unverified, tol);
    } else if (!group_path.empty()) {
      auto g = load_group_file(group_path);
      ctx.q = build_ambient(g, ambient);
      ctx.c = trivial_cocycle(ctx.q);
      ctx.s = build_preset_system(ctx.q, algebra);
    } else {
      ctx = default_context();
    }
    if (!cocycle_path.empty())
      ctx.c = load_cocycle_file(cocycle_path, ctx.q, force_unverified, tol);
    ctx.tol = tol;
    ctx.seed = seed;
    ctx.coboundary_trials = trials;
    ctx.kahlerian_d = kd;
    ctx.kparams.theta = theta;
    ctx.kparams.samples = samples;
    ctx.kparams.box = box;

    auto reports = run_suites(suite, ctx);
    ReportEnvironment env;
    env.seed = seed;
    env.tol_identity = tol_identity;
    env.tol_span = tol_span;
    std::string out =
        want_table ? to_table(reports) : to_json(reports, env);
    std::fputs(out.c_str(), stdout);
    for (const auto& r : reports)
      if (!r.pass()) return 1;
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
