#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "brlab/curve.hpp"
#include "brlab/errors.hpp"
#include "brlab/field.hpp"
#include "brlab/lab.hpp"
#include "brlab/maximal.hpp"
#include "brlab/operators.hpp"
#include "brlab/symbols.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw brlab::config_error("config: bad number '" + item + "' in list");
    }
  }
  if (out.empty()) throw brlab::config_error("config: empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_double_list(s)) out.push_back(static_cast<int>(v));
  return out;
}

struct SweepArgs {
  std::string config_path;
  ordered_json flags = ordered_json::object();
};

void add_sweep_options(CLI::App* sub, const std::shared_ptr<SweepArgs>& a) {
  sub->add_option("--config", a->config_path,
                  "JSON config file; its keys override command-line flags");
  auto num = [sub, a](const char* opt, const char* key, const char* desc) {
    sub->add_option_function<double>(
        opt, [a, key](double v) { a->flags[key] = v; }, desc);
  };
  auto integer = [sub, a](const char* opt, const char* key, const char* desc) {
    sub->add_option_function<int>(
        opt, [a, key](int v) { a->flags[key] = v; }, desc);
  };
  auto str = [sub, a](const char* opt, const char* key, const char* desc) {
    sub->add_option_function<std::string>(
        opt, [a, key](const std::string& v) { a->flags[key] = v; }, desc);
  };
  str("--curve", "curve", "curve preset name");
  num("--Lambda", "Lambda", "torus half-period");
  integer("--N", "N", "grid size per axis");
  sub->add_option_function<std::string>(
      "--deltas",
      [a](const std::string& v) { a->flags["deltas"] = parse_double_list(v); },
      "comma-separated collar widths (dyadic)");
  integer("--fields", "fields", "random fields per delta level");
  sub->add_option_function<std::uint64_t>(
      "--seed", [a](std::uint64_t v) { a->flags["seed"] = v; }, "base RNG seed");
  integer("--ppo", "ppo", "time-quadrature points per octave (0 = automatic)");
  integer("--r-ppo", "r_ppo", "radius-grid points per octave");
  num("--lambda", "lambda", "multiplier smoothness order");
  integer("--s-points", "s_points", "subordination quadrature subintervals");
  num("--s-power", "s_power", "weighted-inequality power s");
  sub->add_option_function<std::string>(
      "--tau-list",
      [a](const std::string& v) { a->flags["tau_list"] = parse_double_list(v); },
      "comma-separated strip widths");
  sub->add_option_function<std::string>(
      "--dir-counts",
      [a](const std::string& v) { a->flags["dir_counts"] = parse_int_list(v); },
      "comma-separated direction counts");
  num("--annulus-lo", "annulus_lo", "field support annulus, inner radius");
  num("--annulus-hi", "annulus_hi", "field support annulus, outer radius");
  str("--out-json", "out_json", "JSON report path");
  str("--out-csv", "out_csv", "CSV report path");
}

int run_sweep(const std::string& experiment, const SweepArgs& a) {
  ordered_json j = a.flags;
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in)
      throw brlab::config_error("config: cannot open '" + a.config_path + "'");
    ordered_json cj = ordered_json::parse(in, nullptr, false);
    if (cj.is_discarded() || !cj.is_object())
      throw brlab::config_error("config: malformed JSON in '" + a.config_path +
                                "'");
    for (const auto& [k, v] : cj.items()) j[k] = v;
  }
  if (j.contains("experiment") &&
      j["experiment"].get<std::string>() != experiment)
    throw brlab::config_error(
        "config: file names experiment '" +
        j["experiment"].get<std::string>() + "' but the subcommand is '" +
        experiment + "'");
  j["experiment"] = experiment;

  const brlab::ExperimentConfig cfg = brlab::config_from_json(j.dump());
  const brlab::Report rep = brlab::run_experiment(cfg);
  brlab::write_report_json(rep, cfg.out_json);
  brlab::write_report_csv(rep, cfg.out_csv);

  int checks = 0, failures = 0;
  for (const auto& row : rep.rows) {
    if (row.verdict == "info") continue;
    ++checks;
    if (row.verdict == "fail") ++failures;
    std::printf("[%s] %s", row.verdict == "fail" ? "FAIL" : "ok  ",
                row.quantity.c_str());
    if (!row.curve.empty()) std::printf("  curve=%s", row.curve.c_str());
    if (row.delta != 0.0) std::printf("  delta=%g", row.delta);
    std::printf("  value=%.6g  tol=%.6g\n", row.value, row.tolerance);
  }
  std::printf("%s: %d checks, %d failures; reports in %s / %s\n",
              experiment.c_str(), checks, failures, cfg.out_json.c_str(),
              cfg.out_csv.c_str());
  return failures == 0 ? 0 : 1;
}

struct OpArgs {
  std::string name;
  std::string curve = "parabola-b1";
  double delta = 0.0625;
  double lambda = 1.0;
  double R = 1.0;
  std::string in_path, out_path;
};

int run_op(const OpArgs& a) {
  const brlab::Curve c = [&] {
    try {
      return brlab::curve_preset(a.curve);
    } catch (const brlab::contract_error& e) {
      throw brlab::config_error(std::string("config: ") + e.what());
    }
  }();
  const brlab::Field f = brlab::read_brf(a.in_path);
  brlab::Field g;
  if (a.name == "collar") {
    if (!(a.delta > 0.0 && a.delta < 1.0))
      throw brlab::config_error("config: delta must lie in (0, 1)");
    const brlab::Symbol s =
        brlab::collar_symbol(c, brlab::collar_profile(), a.delta);
    g = brlab::apply_multiplier(f, s.eval);
  } else if (a.name == "cone-inside" || a.name == "cone-outside") {
    if (!(a.R > 0.0)) throw brlab::config_error("config: R must be > 0");
    const brlab::ConeWindow w = brlab::default_cone_window(c);
    g = a.name == "cone-inside"
            ? brlab::cone_partial_inside(f, c, w, a.lambda, a.R)
            : brlab::cone_partial_outside(f, c, w, a.lambda, a.R);
  } else {
    throw brlab::config_error("config: unknown operator '" + a.name + "'");
  }
  brlab::write_brf(a.out_path, g);
  std::printf("%s: %s -> %s (N=%d, Lambda=%g)\n", a.name.c_str(),
              a.in_path.c_str(), a.out_path.c_str(), f.grid.N, f.grid.Lambda);
  return 0;
}

struct MaxOpArgs {
  std::string op = "kakeya";
  std::string ecc = "dyadic";
  int n_dirs = 64;
  double width_cells = 1.0;
  std::string in_path, out_path;
};

int run_max_op(const MaxOpArgs& a) {
  if (a.ecc != "dyadic")
    throw brlab::config_error("config: unknown eccentricity family '" + a.ecc +
                              "'");
  const brlab::Field f = brlab::read_brf(a.in_path);
  const brlab::Field af = brlab::modulus_field(f);
  brlab::Field m;
  if (a.op == "kakeya") {
    const brlab::DirectionSet dirs = brlab::dyadic_directions(a.n_dirs);
    const brlab::RectFamily fam =
        brlab::dyadic_tube_family(f.grid, a.width_cells * f.grid.h());
    m = brlab::kakeya_maximal(af, dirs, fam);
  } else if (a.op == "hl") {
    m = brlab::hl_maximal(af);
  } else if (a.op == "strong") {
    m = brlab::strong_maximal(af);
  } else {
    throw brlab::config_error("config: unknown maximal operator '" + a.op +
                              "'");
  }
  brlab::write_brf(a.out_path, m);
  std::printf("maximal %s: %s -> %s (N=%d)\n", a.op.c_str(), a.in_path.c_str(),
              a.out_path.c_str(), f.grid.N);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for curve-adapted multipliers"};
  app.require_subcommand(1);

  const char* const sweeps[] = {"l2-scaling", "l4-scaling", "lemmas",
                                "maximal-domination"};
  const char* const sweep_help[] = {
      "square-function L2 scaling sweep",
      "square-function L4 scaling sweep",
      "decomposition geometry lemma suite",
      "factorization, subordination, and maximal domination checks"};
  std::vector<std::pair<CLI::App*, std::shared_ptr<SweepArgs>>> sweep_subs;
  for (int i = 0; i < 4; ++i) {
    auto a = std::make_shared<SweepArgs>();
    CLI::App* sub = app.add_subcommand(sweeps[i], sweep_help[i]);
    add_sweep_options(sub, a);
    sweep_subs.emplace_back(sub, a);
  }

  // `maximal` doubles as a sweep and, with --in, as a single application.
  auto max_sweep = std::make_shared<SweepArgs>();
  auto max_op = std::make_shared<MaxOpArgs>();
  CLI::App* max_sub = app.add_subcommand(
      "maximal", "kakeya / weighted maximal sweep, or one maximal operator");
  add_sweep_options(max_sub, max_sweep);
  max_sub->add_option("--op", max_op->op, "kakeya | hl | strong");
  max_sub->add_option("--ecc", max_op->ecc, "eccentricity family");
  max_sub->add_option("--width", max_op->width_cells,
                      "tube width in cells (dyadic multiple)");
  max_sub->add_option("--in", max_op->in_path, "input .brf field");
  max_sub->add_option("--out", max_op->out_path, "output .brf field");

  auto op_args = std::make_shared<OpArgs>();
  CLI::App* op_sub =
      app.add_subcommand("op", "apply one multiplier to a .brf field");
  op_sub->add_option("name", op_args->name,
                     "collar | cone-inside | cone-outside")
      ->required();
  op_sub->add_option("--curve", op_args->curve, "curve preset name");
  op_sub->add_option("--delta", op_args->delta, "collar width");
  op_sub->add_option("--lambda", op_args->lambda, "multiplier order");
  op_sub->add_option("--R", op_args->R, "dilation parameter");
  op_sub->add_option("--in", op_args->in_path, "input .brf field")->required();
  op_sub->add_option("--out", op_args->out_path, "output .brf field")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (int i = 0; i < 4; ++i)
      if (sweep_subs[i].first->parsed())
        return run_sweep(sweeps[i], *sweep_subs[i].second);
    if (max_sub->parsed()) {
      if (!max_op->in_path.empty()) {
        if (max_op->out_path.empty())
          throw brlab::config_error("config: --in requires --out");
        // In single-op mode --N selects the direction count.
        if (max_sweep->flags.contains("N"))
          max_op->n_dirs = max_sweep->flags["N"].get<int>();
        return run_max_op(*max_op);
      }
      return run_sweep("maximal", *max_sweep);
    }
    if (op_sub->parsed()) return run_op(*op_args);
  } catch (const brlab::config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const brlab::contract_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
