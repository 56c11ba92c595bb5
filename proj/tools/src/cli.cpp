#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "manifest.hpp"
#include "uat/approx1d.hpp"
#include "uat/error.hpp"
#include "uat/fitnd.hpp"
#include "uat/json_io.hpp"
#include "uat/measure.hpp"
#include "uat/random.hpp"
#include "uat/surgery.hpp"
#include "uat/target.hpp"

#ifndef UAT_VERSION
#define UAT_VERSION "dev"
#endif

namespace uat::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kEquivalenceTolerance = 1e-12;

struct BuildArgs {
  std::string target;
  std::string samples;
  std::string spec;
  double eps = 0.0;
  std::string out = "net.json";
  std::string cert;
  std::string manifest;
  std::size_t max_cells = std::size_t{1} << 20;
};

struct TransformArgs {
  std::string in;
  std::string op;
  std::string with;
  std::string out = "transformed.json";
  std::string manifest;
  bool verify = false;
  std::uint64_t seed = 0;
  std::size_t points = 10000;
};

struct FitArgs {
  std::string target;
  std::string spec;
  std::size_t dim = 1;
  double eps = 0.0;
  FitConfig config;
  std::string out = "fitted.json";
  std::string report;
  std::string manifest;
};

struct VerifyArgs {
  std::string net;
  std::string target;
  std::string samples;
  std::string spec;
  std::string method = "auto";
  std::uint64_t n = 1000000;
  std::size_t resolution = 1000;
  std::uint64_t seed = 0;
  std::size_t output = 0;
  double eps = 0.0;
  std::string out;
  std::string manifest;
};

struct SweepArgs {
  std::vector<std::string> targets;
  std::vector<double> eps;
  std::vector<std::size_t> classes;
  std::vector<std::uint64_t> seeds{0};
  std::string method = "exact";
  std::uint64_t n = 100000;
  std::string out = "sweep.csv";
  std::string manifest;
};

struct BoundArgs {
  std::vector<std::size_t> classes;
  std::vector<double> eps;
};

// Scalar targets on [0,1]^d addressable from the command line.
Field named_field(const std::string& name, std::size_t dim) {
  if (name == "x1") return [](std::span<const double> x) { return x[0]; };
  if (name == "zero") return [](std::span<const double>) { return 0.0; };
  if (name == "prod") {
    return [](std::span<const double> x) {
      double p = 1.0;
      for (double v : x) p *= v;
      return p;
    };
  }
  if (name == "mean") {
    return [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v;
      return s / static_cast<double>(x.size());
    };
  }
  if (dim != 1) {
    throw InvalidInputError("target '" + name + "' is one-dimensional; use x1, prod, mean or zero for d = " +
                            std::to_string(dim));
  }
  const Target1D t = make_target(name);
  return [t](std::span<const double> x) { return t(x[0]); };
}

Target1D target_1d(const std::string& name, const std::string& samples) {
  if (!samples.empty()) return load_samples_csv(samples);
  if (name == "x1") return make_target("x");
  if (name == "zero") {
    Target1D t;
    t.name = "zero";
    t.eval = [](double) { return 0.0; };
    t.lipschitz = 0.0;
    t.integral = [](double, double) { return 0.0; };
    t.cpwl = Cpwl1D::constant(0.0);
    return t;
  }
  return make_target(name);
}

Net read_net(const std::string& path) { return net_from_json(read_text_file(path)); }

std::string or_default(const std::string& value, const fs::path& fallback) {
  return value.empty() ? fallback.string() : value;
}

void write_output(RunManifest& manifest, const std::string& path, const std::string& text) {
  write_file_atomic(path, text);
  manifest.outputs.push_back(path);
}

std::vector<double> sample_point(std::uint64_t seed, std::size_t index, std::size_t dim) {
  std::vector<double> x(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    x[k] = counter_uniform(seed, streams::kEvaluationSamples, index * dim + k);
  }
  return x;
}

double max_abs_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
  return g;
}

bool below(const std::vector<L1Report>& reports, double eps) {
  return std::all_of(reports.begin(), reports.end(), [eps](const L1Report& r) { return r.upper() < eps; });
}

Json parse_json(const std::string& text) { return Json::parse(text); }

int cmd_build(const BuildArgs& a, RunManifest& manifest, std::ostream& out) {
  const std::string cert_path = or_default(a.cert, sibling(a.out, ".cert.json"));
  if (!a.spec.empty()) {
    const IndicatorSpec spec = spec_from_json(read_text_file(a.spec));
    const SoftmaxIndicatorBuild b = build_softmax_indicator_net(spec, a.eps);
    write_output(manifest, a.out, net_to_json(b.net));
    write_output(manifest, cert_path, certificate_to_json(b.certificate));
    out << "hidden_units " << b.net.hidden_count() << "\n";
    for (std::size_t i = 0; i < b.per_class.size(); ++i) {
      out << "class_" << i + 1 << "_l1 " << format_double(b.per_class[i].value) << "\n";
    }
    return below(b.per_class, a.eps) ? kExitOk : kExitPrecondition;
  }
  if (a.target.empty() && a.samples.empty()) throw InvalidInputError("build needs --target, --samples or --spec");
  Approx1DOptions options;
  options.max_cells = a.max_cells;
  const Approx1DResult r = build_relu_approx_1d(target_1d(a.target, a.samples), a.eps, options);
  write_output(manifest, a.out, net_to_json(r.net));
  write_output(manifest, cert_path, certificate_to_json(r.certificate));
  out << "cells " << r.cells << "\n"
      << "hidden_units " << r.net.hidden_count() << "\n"
      << "certified_total " << format_double(r.certificate.total_achieved()) << "\n"
      << "measured_l1 " << format_double(r.measured.value) << "\n";
  const bool ok = r.measured.upper() < a.eps && r.certificate.total_achieved() < a.eps;
  return ok ? kExitOk : kExitPrecondition;
}

int cmd_transform(const TransformArgs& a, RunManifest& manifest, std::ostream& out, std::ostream& err) {
  const Net in = read_net(a.in);
  Net result = in;
  std::optional<Net> other;
  if (a.op == "expand") {
    result = sigma1_expand_to_relu(in);
  } else if (a.op == "stack") {
    if (a.with.empty()) throw InvalidInputError("stack needs --with");
    other = read_net(a.with);
    result = stack_outputs(in, *other);
  } else if (a.op == "softmax-wrap") {
    if (in.output_count() < 2) throw InvalidInputError("softmax-wrap needs a net with at least 2 outputs");
    if (in.softmax_head()) throw InvalidInputError("softmax-wrap: net already has a softmax head");
    result = in.with_softmax_head(true);
  } else {
    throw InvalidInputError("unknown --op '" + a.op + "' (expand, stack, softmax-wrap)");
  }
  write_output(manifest, a.out, net_to_json(result));
  out << "input_dim " << result.input_dim() << "\n"
      << "hidden_count " << result.hidden_count() << "\n"
      << "output_count " << result.output_count() << "\n";
  if (!a.verify) return kExitOk;

  double worst = 0.0;
  for (std::size_t i = 0; i < a.points; ++i) {
    const std::vector<double> x = sample_point(a.seed, i, in.input_dim());
    std::vector<double> expected;
    if (a.op == "softmax-wrap") {
      expected = softmax(eval_logits(in, x));
    } else {
      expected = eval_net(in, x);
      if (other) {
        const auto second = eval_net(*other, x);
        expected.insert(expected.end(), second.begin(), second.end());
      }
    }
    worst = std::max(worst, max_abs_gap(expected, eval_net(result, x)));
  }
  out << "verify_max_deviation " << format_double(worst) << " over " << a.points << " points\n";
  if (!(worst <= kEquivalenceTolerance)) {
    err << "uat transform: verification failed, max deviation " << format_double(worst) << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

int cmd_fit(const FitArgs& a, RunManifest& manifest, std::ostream& out) {
  const std::string report_path = or_default(a.report, sibling(a.out, ".report.json"));
  if (!a.spec.empty()) {
    if (!(a.eps > 0.0)) throw DomainError("fit --spec needs --eps > 0");
    const IndicatorSpec spec = spec_from_json(read_text_file(a.spec));
    const IndicatorFit fit = fit_indicator_softmax(spec, a.eps, a.config);
    Json report;
    report["success"] = fit.success;
    report["eps"] = a.eps;
    report["ridge_used"] = fit.ridge_used;
    report["per_class"] = parse_json(reports_to_json(fit.per_class));
    report["fit_stage"] = parse_json(reports_to_json(fit.fit_stage));
    write_output(manifest, a.out, net_to_json(fit.net));
    write_output(manifest, report_path, canonical_json(report.dump()));
    for (std::size_t i = 0; i < fit.per_class.size(); ++i) {
      out << "class_" << i + 1 << "_l1 " << format_double(fit.per_class[i].value) << " +- "
          << format_double(fit.per_class[i].ci_halfwidth.value_or(0.0)) << "\n";
    }
    out << "success " << (fit.success ? "true" : "false") << "\n";
    return fit.success ? kExitOk : kExitPrecondition;
  }
  if (a.target.empty()) throw InvalidInputError("fit needs --target or --spec");
  const FitResult r = fit_random_features(named_field(a.target, a.dim), a.dim, a.config);
  Json report;
  report["ridge_used"] = r.ridge_used;
  report["gradient_sup"] = r.gradient_sup;
  report["reports"] = parse_json(reports_to_json(r.reports));
  write_output(manifest, a.out, net_to_json(r.net));
  write_output(manifest, report_path, canonical_json(report.dump()));
  for (const auto& rep : r.reports) {
    out << "l1 " << format_double(rep.value) << " +- " << format_double(rep.ci_halfwidth.value_or(0.0)) << "\n";
  }
  if (a.eps > 0.0 && !below(r.reports, a.eps)) return kExitPrecondition;
  return kExitOk;
}

int cmd_verify(const VerifyArgs& a, RunManifest& manifest, std::ostream& out) {
  const Net net = read_net(a.net);
  const std::size_t d = net.input_dim();
  std::string method = a.method;
  if (method == "auto") method = d == 1 ? "exact" : "mc";
  if (method != "exact" && method != "grid" && method != "mc") {
    throw InvalidInputError("unknown --method '" + a.method + "' (auto, exact, grid, mc)");
  }
  if (method == "exact" && d != 1) {
    throw InvalidInputError("--method exact needs a net with input_dim 1 (got " + std::to_string(d) +
                            "); use grid or mc");
  }
  const int sources = !a.target.empty() + !a.samples.empty() + !a.spec.empty();
  if (sources != 1) throw InvalidInputError("verify needs exactly one of --target, --samples, --spec");

  std::vector<L1Report> reports;
  if (!a.spec.empty()) {
    const IndicatorSpec spec = spec_from_json(read_text_file(a.spec));
    if (spec.input_dim() != d) throw ShapeError("spec and net have different input dimensions");
    if (!net.softmax_head()) throw InvalidInputError("verify --spec needs a net with a softmax head");
    if (method == "exact") {
      reports = l1_softmax_vs_indicator_1d(net, spec);
    } else {
      const VectorField model = [&net](std::span<const double> x) { return eval_net(net, x); };
      const VectorField onehot = [&spec](std::span<const double> x) { return spec.indicator(x); };
      reports = method == "grid" ? grid_l1_distance(model, onehot, d, spec.class_count(), a.resolution)
                                 : mc_l1_distance(model, onehot, d, spec.class_count(), a.n, a.seed);
    }
  } else {
    if (a.output >= net.output_count()) throw ShapeError("--output is out of range");
    if (method == "exact") {
      const Target1D f = target_1d(a.target, a.samples);
      reports.push_back(l1_distance_1d(f, net_to_cpwl_1d(net, a.output)));
    } else {
      Field f;
      if (!a.samples.empty()) {
        if (d != 1) throw InvalidInputError("--samples targets are one-dimensional");
        const Target1D t = load_samples_csv(a.samples);
        f = [t](std::span<const double> x) { return t(x[0]); };
      } else {
        f = named_field(a.target, d);
      }
      const std::size_t o = a.output;
      const Field g = [&net, o](std::span<const double> x) { return eval_net(net, x)[o]; };
      reports.push_back(method == "grid" ? grid_l1_distance(f, g, d, a.resolution)
                                         : mc_l1_distance(f, g, d, a.n, a.seed));
    }
  }
  const std::string text = reports.size() == 1 ? report_to_json(reports[0]) : reports_to_json(reports);
  out << text;
  if (!a.out.empty()) write_output(manifest, a.out, text);
  if (a.eps > 0.0 && !below(reports, a.eps)) return kExitPrecondition;
  return kExitOk;
}

std::string csv_number(std::optional<double> v) { return v ? format_double(*v) : std::string(); }

struct SweepRow {
  std::string target;
  double eps = 0.0;
  std::string method;
  std::optional<double> value;
  std::optional<double> ci;
  double seconds = 0.0;
  std::optional<std::size_t> m;
  std::optional<double> closed_form;
  std::optional<double> tail_bound;
  double half_eps = 0.0;
  std::optional<std::size_t> hidden_units;
  std::string status = "ok";
};

std::string csv_line(const SweepRow& r) {
  std::ostringstream s;
  s << r.target << ',' << format_double(r.eps) << ',' << r.method << ',' << csv_number(r.value) << ','
    << csv_number(r.ci) << ',' << std::fixed << std::setprecision(6) << r.seconds << ','
    << (r.m ? std::to_string(*r.m) : "") << ',' << csv_number(r.closed_form) << ','
    << csv_number(r.tail_bound) << ',' << format_double(r.half_eps) << ','
    << (r.hidden_units ? std::to_string(*r.hidden_units) : "") << ',' << r.status;
  return s.str();
}

template <class Fn>
double timed(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Runs one sweep configuration, turning library failures into a status.
void guarded(SweepRow& row, const std::function<void()>& body) {
  try {
    row.seconds = timed(body);
  } catch (const BudgetInfeasibleError& e) {
    row.status = "budget_infeasible";
    row.value = e.achieved();
  } catch (const Error&) {
    row.status = "error";
  }
}

IndicatorSpec uniform_spec(std::size_t m) {
  std::vector<double> cuts;
  std::vector<int> labels;
  for (std::size_t i = 1; i < m; ++i) cuts.push_back(static_cast<double>(i) / static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i) labels.push_back(static_cast<int>(i + 1));
  return IndicatorSpec(1, m, {cuts}, labels);
}

int cmd_sweep(const SweepArgs& a, RunManifest& manifest, std::ostream& out) {
  if (a.eps.empty()) throw InvalidInputError("sweep needs a non-empty --eps grid");
  if (a.targets.empty() && a.classes.empty()) throw InvalidInputError("sweep needs --targets and/or --m");
  if (a.method != "exact" && a.method != "mc") throw InvalidInputError("sweep --method is exact or mc");
  if (a.method == "mc" && a.seeds.empty()) throw InvalidInputError("sweep --method mc needs --seeds");

  std::vector<SweepRow> rows;
  for (const std::string& name : a.targets) {
    const Target1D f = make_target(name);
    for (double eps : a.eps) {
      SweepRow base;
      base.target = name;
      base.eps = eps;
      base.half_eps = 0.5 * eps;
      std::optional<Approx1DResult> built;
      guarded(base, [&] { built = build_relu_approx_1d(f, eps); });
      if (!built || a.method == "exact") {
        base.method = built ? std::string(to_string(built->measured.method)) : "exact_cpwl";
        if (built) {
          base.value = built->measured.value;
          base.hidden_units = built->net.hidden_count();
        }
        rows.push_back(base);
        continue;
      }
      const Net& net = built->net;
      const Field fx = [&f](std::span<const double> x) { return f(x[0]); };
      const Field gx = [&net](std::span<const double> x) { return eval_net(net, x)[0]; };
      for (std::uint64_t seed : a.seeds) {
        SweepRow row = base;
        row.method = "monte_carlo";
        L1Report rep;
        row.seconds += timed([&] { rep = mc_l1_distance(fx, gx, 1, a.n, seed); });
        row.value = rep.value;
        row.ci = rep.ci_halfwidth;
        row.hidden_units = net.hidden_count();
        rows.push_back(row);
      }
    }
  }
  for (std::size_t m : a.classes) {
    for (double eps : a.eps) {
      SweepRow row;
      row.target = "indicator";
      row.eps = eps;
      row.m = m;
      row.half_eps = 0.5 * eps;
      row.method = "exact_cpwl";
      guarded(row, [&] {
        const IndicatorSpec spec = uniform_spec(m);
        const std::vector<double> closed = indicator_error_closed_form(spec, eps);
        row.closed_form = *std::max_element(closed.begin(), closed.end());
        row.tail_bound = softmax_tail_bound(m, eps).tail_bound;
        const SoftmaxIndicatorBuild b = build_softmax_indicator_net(spec, eps);
        double worst = 0.0;
        for (const auto& r : b.per_class) {
          if (r.value >= worst) {
            worst = r.value;
            row.method = std::string(to_string(r.method));
          }
        }
        row.value = worst;
        row.hidden_units = b.net.hidden_count();
      });
      rows.push_back(row);
    }
  }

  std::string csv = "target,eps,method,value,ci,seconds,m,closed_form,tail_bound,half_eps,hidden_units,status\n";
  for (const auto& r : rows) csv += csv_line(r) + "\n";
  write_output(manifest, a.out, csv);
  out << rows.size() << " rows written to " << a.out << "\n";
  return kExitOk;
}

int cmd_bound(const BoundArgs& a, std::ostream& out) {
  if (a.classes.empty() || a.eps.empty()) throw InvalidInputError("bound needs non-empty --m and --eps");
  out << "m,eps,tail_bound,half_eps,inverted_exponent_bound,holds\n";
  for (std::size_t m : a.classes) {
    for (double eps : a.eps) {
      const SoftmaxTailBound b = softmax_tail_bound(m, eps);
      out << m << ',' << format_double(eps) << ',' << format_double(b.tail_bound) << ','
          << format_double(b.guarantee) << ',' << format_double(b.inverted_exponent_bound) << ','
          << (b.tail_bound <= b.guarantee ? "true" : "false") << "\n";
    }
  }
  return kExitOk;
}

void record_flags(const CLI::App& sub, RunManifest& manifest) {
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->count() == 0 || opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    std::string joined;
    for (const std::string& v : opt->results()) {
      if (!joined.empty()) joined += ',';
      joined += v;
    }
    manifest.flags.emplace_back(name, joined);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constructive single-hidden-layer network approximation toolkit", "uat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("uat ") + UAT_VERSION);

  BuildArgs build_args;
  CLI::App* build = app.add_subcommand("build", "Build a certified 1-D ReLU approximation (or a softmax indicator net)");
  auto* b_target = build->add_option("--target", build_args.target, "Built-in target: x, x2, sin2pi, sign, rsqrt");
  auto* b_samples = build->add_option("--samples", build_args.samples, "CSV of x,value samples (piecewise-linear target)");
  auto* b_spec = build->add_option("--spec", build_args.spec, "Indicator spec JSON (d = 1) for a softmax net");
  b_target->excludes(b_samples)->excludes(b_spec);
  b_samples->excludes(b_spec);
  build->add_option("--eps", build_args.eps, "Requested L1 error")->required();
  build->add_option("--out", build_args.out, "Net JSON path")->capture_default_str();
  build->add_option("--cert", build_args.cert, "Certificate JSON path (default <out stem>.cert.json)");
  build->add_option("--manifest", build_args.manifest, "Manifest path (default <out stem>.manifest.json)");
  build->add_option("--max-cells", build_args.max_cells, "Cell cap of the doubling search")->capture_default_str();

  TransformArgs tr_args;
  CLI::App* transform = app.add_subcommand("transform", "Apply an exact network transformation");
  transform->add_option("--in", tr_args.in, "Input net JSON")->required();
  transform->add_option("--op", tr_args.op, "expand | stack | softmax-wrap")->required();
  transform->add_option("--with", tr_args.with, "Second operand for stack");
  transform->add_option("--out", tr_args.out, "Output net JSON")->capture_default_str();
  transform->add_option("--manifest", tr_args.manifest, "Manifest path");
  transform->add_flag("--verify", tr_args.verify, "Check pointwise equivalence at sampled points");
  transform->add_option("--seed", tr_args.seed, "Seed of the verification points")->capture_default_str();
  transform->add_option("--points", tr_args.points, "Verification points")->capture_default_str();

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "Random-feature least-squares fit");
  auto* f_target = fit->add_option("--target", fit_args.target, "x1, prod, mean, zero, or a 1-D target name");
  auto* f_spec = fit->add_option("--spec", fit_args.spec, "Indicator spec JSON: fit softmax logits");
  f_target->excludes(f_spec);
  fit->add_option("--dim", fit_args.dim, "Input dimension for --target")->capture_default_str();
  fit->add_option("--eps", fit_args.eps, "Error target (required with --spec)");
  fit->add_option("--n,--hidden", fit_args.config.hidden_count, "Hidden units")->capture_default_str();
  fit->add_option("--seed", fit_args.config.seed, "Seed")->capture_default_str();
  fit->add_option("--ridge", fit_args.config.ridge, "Ridge weight")->capture_default_str();
  fit->add_option("--samples", fit_args.config.train_samples, "Training samples")->capture_default_str();
  fit->add_option("--scale", fit_args.config.weight_scale, "Hidden weight scale")->capture_default_str();
  fit->add_option("--eval-samples", fit_args.config.eval_samples, "Monte Carlo evaluation samples")
      ->capture_default_str();
  fit->add_option("--out", fit_args.out, "Net JSON path")->capture_default_str();
  fit->add_option("--report", fit_args.report, "Report JSON path (default <out stem>.report.json)");
  fit->add_option("--manifest", fit_args.manifest, "Manifest path");

  VerifyArgs v_args;
  CLI::App* verify = app.add_subcommand("verify", "Measure the L1 distance between a net and a target");
  verify->add_option("--net", v_args.net, "Net JSON")->required();
  verify->add_option("--target", v_args.target, "Target name");
  verify->add_option("--samples", v_args.samples, "CSV target");
  verify->add_option("--spec", v_args.spec, "Indicator spec JSON (net must have a softmax head)");
  verify->add_option("--method", v_args.method, "auto | exact | grid | mc")->capture_default_str();
  verify->add_option("--n", v_args.n, "Monte Carlo samples")->capture_default_str();
  verify->add_option("--resolution", v_args.resolution, "Grid cells per axis")->capture_default_str();
  verify->add_option("--seed", v_args.seed, "Monte Carlo seed")->capture_default_str();
  verify->add_option("--output", v_args.output, "Net output index compared with a scalar target")
      ->capture_default_str();
  verify->add_option("--eps", v_args.eps, "Fail with exit 2 unless every value (+CI) is below eps");
  verify->add_option("--out", v_args.out, "Report JSON path");
  verify->add_option("--manifest", v_args.manifest, "Manifest path");

  SweepArgs s_args;
  CLI::App* sweep = app.add_subcommand("sweep", "Tabulate errors over target x eps x m grids");
  sweep->add_option("--targets", s_args.targets, "Comma-separated target names")->delimiter(',');
  sweep->add_option("--eps", s_args.eps, "Comma-separated eps values")->delimiter(',');
  sweep->add_option("--m", s_args.classes, "Comma-separated class counts (indicator rows)")->delimiter(',');
  sweep->add_option("--seeds", s_args.seeds, "Comma-separated Monte Carlo seeds")->delimiter(',');
  sweep->add_option("--method", s_args.method, "exact | mc for target rows")->capture_default_str();
  sweep->add_option("--n", s_args.n, "Monte Carlo samples")->capture_default_str();
  sweep->add_option("--out", s_args.out, "CSV path")->capture_default_str();
  sweep->add_option("--manifest", s_args.manifest, "Manifest path");

  BoundArgs bd_args;
  CLI::App* bound = app.add_subcommand("bound", "Print softmax tail bounds");
  bound->add_option("--m", bd_args.classes, "Comma-separated class counts")->delimiter(',')->required();
  bound->add_option("--eps", bd_args.eps, "Comma-separated eps values")->delimiter(',')->required();

  std::string replay_path;
  CLI::App* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", replay_path, "Manifest JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitPrecondition;
  }

  CLI::App* sub = app.get_subcommands().front();
  RunManifest manifest;
  manifest.command = sub->get_name();
  manifest.argv = args;
  manifest.tool_version = UAT_VERSION;
  manifest.started = utc_now();
  record_flags(*sub, manifest);

  std::string manifest_path;
  int code = kExitOk;
  try {
    if (sub == build) {
      manifest_path = or_default(build_args.manifest, sibling(build_args.out, ".manifest.json"));
      code = cmd_build(build_args, manifest, out);
    } else if (sub == transform) {
      manifest.seeds = {tr_args.seed};
      manifest_path = or_default(tr_args.manifest, sibling(tr_args.out, ".manifest.json"));
      code = cmd_transform(tr_args, manifest, out, err);
    } else if (sub == fit) {
      manifest.seeds = {fit_args.config.seed};
      manifest_path = or_default(fit_args.manifest, sibling(fit_args.out, ".manifest.json"));
      code = cmd_fit(fit_args, manifest, out);
    } else if (sub == verify) {
      manifest.seeds = {v_args.seed};
      if (!v_args.out.empty()) manifest_path = or_default(v_args.manifest, sibling(v_args.out, ".manifest.json"));
      code = cmd_verify(v_args, manifest, out);
    } else if (sub == sweep) {
      manifest.seeds = s_args.seeds;
      manifest_path = or_default(s_args.manifest, sibling(s_args.out, ".manifest.json"));
      code = cmd_sweep(s_args, manifest, out);
    } else if (sub == bound) {
      return cmd_bound(bd_args, out);
    } else if (sub == replay) {
      const RunManifest recorded = manifest_from_json(read_text_file(replay_path));
      if (!recorded.argv.empty() && recorded.argv.front() == "replay") {
        throw InvalidInputError("refusing to replay a replay manifest");
      }
      return run(recorded.argv, out, err);
    }
  } catch (const BudgetInfeasibleError& e) {
    err << "uat " << manifest.command << ": " << e.what() << "\n"
        << "achieved error " << format_double(e.achieved()) << "\n";
    code = kExitPrecondition;
  } catch (const PreconditionError& e) {
    err << "uat " << manifest.command << ": precondition failed: " << e.what() << "\n";
    code = kExitPrecondition;
  } catch (const std::exception& e) {
    err << "uat " << manifest.command << ": internal error: " << e.what() << "\n";
    return kExitInternal;
  }

  if (!manifest_path.empty() && !manifest.outputs.empty()) {
    manifest.finished = utc_now();
    manifest.exit_code = code;
    try {
      write_file_atomic(manifest_path, manifest_to_json(manifest));
    } catch (const std::exception& e) {
      err << "uat " << manifest.command << ": could not write manifest: " << e.what() << "\n";
      return kExitInternal;
    }
  }
  return code;
}

}  // namespace uat::cli
