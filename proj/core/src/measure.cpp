#include "uat/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detail/compensated.hpp"
#include "detail/parallel.hpp"
#include "detail/quadrature.hpp"
#include "uat/error.hpp"
#include "uat/random.hpp"

namespace uat {

std::string_view to_string(L1Method method) {
  switch (method) {
    case L1Method::ExactCpwl:
      return "exact_cpwl";
    case L1Method::AdaptiveQuadrature:
      return "adaptive_quadrature";
    case L1Method::GridQuadrature:
      return "grid_quadrature";
    case L1Method::MonteCarlo:
      return "monte_carlo";
  }
  return "unknown";
}

namespace {

constexpr double kQuadratureRelTol = 1e-10;
// Above this many (unit x node) products the CPWL nodes come from a sweep
// over kink events instead of direct evaluation.
constexpr double kDirectEvalBudget = 5e7;

void require_1d(const Net& net, const char* who) {
  if (net.input_dim() != 1) {
    throw InvalidInputError(std::string(who) + ": net must have input_dim 1");
  }
}

// Sorted points of (0,1), with neighbours closer than the merge tolerance
// (and points that close to 0 or 1) dropped.
std::vector<double> merge_interior(std::vector<double> points) {
  std::sort(points.begin(), points.end());
  std::vector<double> out;
  out.reserve(points.size());
  double last = 0.0;
  for (double p : points) {
    if (!(p > 0.0 && p < 1.0)) continue;
    if (p - last <= kKinkMergeTolerance) continue;
    if (1.0 - p <= kKinkMergeTolerance) continue;
    out.push_back(p);
    last = p;
  }
  return out;
}

// One ReLU piece alpha * relu(w x + b); sigma1 units contribute two.
struct ReluPiece {
  double alpha;
  double w;
  double b;
};

std::vector<ReluPiece> relu_pieces(const Net& net, std::size_t output) {
  std::vector<ReluPiece> pieces;
  pieces.reserve(net.hidden_count() * 2);
  for (std::size_t j = 0; j < net.hidden_count(); ++j) {
    const double a = net.output_weight(output, j);
    const double w = net.hidden_weight(j, 0);
    const double b = net.hidden_bias(j);
    if (net.activation() == ActivationKind::ReLU) {
      pieces.push_back({a, w, b});
    } else {
      pieces.push_back({a, w, b + 0.5});
      pieces.push_back({-a, w, b - 0.5});
    }
  }
  return pieces;
}

// Node values of one output by sweeping slope/intercept sums across kinks.
std::vector<double> sweep_values(const Net& net, std::size_t output,
                                 const std::vector<double>& nodes) {
  struct Event {
    double at;
    double slope;
    double intercept;
  };
  detail::CompensatedSum slope;
  detail::CompensatedSum intercept;
  std::vector<Event> events;
  for (const ReluPiece& p : relu_pieces(net, output)) {
    if (p.w == 0.0) {
      intercept += p.alpha * relu(p.b);
      continue;
    }
    const double kink = -p.b / p.w;
    const double ds = p.alpha * p.w;
    const double di = p.alpha * p.b;
    if (p.w > 0.0) {
      if (kink <= 0.0) {
        slope += ds;
        intercept += di;
      } else if (kink < 1.0) {
        events.push_back({kink, ds, di});
      }
    } else {
      if (kink >= 1.0) {
        slope += ds;
        intercept += di;
      } else if (kink > 0.0) {
        slope += ds;
        intercept += di;
        events.push_back({kink, -ds, -di});
      }
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& l, const Event& r) { return l.at < r.at; });

  std::vector<double> values(nodes.size());
  std::size_t e = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    // Node i is evaluated with the state of the segment to its right; the
    // last node uses the final segment.
    const double right_edge = i + 1 < nodes.size() ? nodes[i + 1] : 2.0;
    const double apply_until = i + 1 < nodes.size() ? 0.5 * (nodes[i] + right_edge) : 2.0;
    while (e < events.size() && events[e].at <= apply_until && i + 1 < nodes.size()) {
      slope += events[e].slope;
      intercept += events[e].intercept;
      ++e;
    }
    values[i] = slope.value() * nodes[i] + intercept.value();
  }
  return values;
}

struct CpwlTable {
  std::vector<double> nodes;
  std::vector<std::vector<double>> values;  // per output
};

CpwlTable cpwl_all_outputs(const Net& net) {
  require_1d(net, "net_to_cpwl_1d");
  CpwlTable table;
  table.nodes.push_back(0.0);
  for (double k : net_kinks_1d(net)) table.nodes.push_back(k);
  table.nodes.push_back(1.0);

  const std::size_t m = net.output_count();
  table.values.assign(m, std::vector<double>(table.nodes.size()));
  const double work = static_cast<double>(net.hidden_count()) * static_cast<double>(table.nodes.size());
  if (work <= kDirectEvalBudget) {
    const Net logits = net.softmax_head() ? net.with_softmax_head(false) : net;
    for (std::size_t i = 0; i < table.nodes.size(); ++i) {
      const double x = table.nodes[i];
      const auto g = eval_logits(logits, std::span<const double>(&x, 1));
      for (std::size_t o = 0; o < m; ++o) table.values[o][i] = g[o];
    }
  } else {
    detail::parallel_for(m, [&](std::size_t o) { table.values[o] = sweep_values(net, o, table.nodes); });
  }
  return table;
}

double segment_abs_integral(double d0, double d1, double width) {
  if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0)) {
    return 0.5 * (std::abs(d0) + std::abs(d1)) * width;
  }
  // Affine difference changes sign: two triangles meeting at the root.
  return 0.5 * width * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1));
}

std::vector<double> union_points(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Values of a CPWL at sorted query points that include all its breakpoints.
std::vector<double> sample_sorted(const Cpwl1D& c, const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  const auto& bp = c.breakpoints();
  const auto& v = c.values();
  std::size_t seg = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    while (seg + 1 < bp.size() - 1 && bp[seg + 1] <= x) ++seg;
    if (x == bp[seg]) {
      out[i] = v[seg];
    } else if (x == bp[seg + 1]) {
      out[i] = v[seg + 1];
    } else {
      const double s = (x - bp[seg]) / (bp[seg + 1] - bp[seg]);
      out[i] = v[seg] + s * (v[seg + 1] - v[seg]);
    }
  }
  return out;
}

bool contains(const std::vector<double>& sorted, double x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

// Reduces per-chunk partial results in chunk order.
template <class Fn>
detail::QuadResult chunked_sum(std::size_t count, Fn&& piece) {
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<detail::QuadResult> partial(chunks);
  detail::parallel_for(chunks, [&](std::size_t c) {
    detail::CompensatedSum value;
    detail::CompensatedSum error;
    const std::size_t end = std::min(count, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const detail::QuadResult r = piece(i);
      value += r.value;
      error += r.error;
    }
    partial[c] = {value.value(), error.value()};
  });
  detail::CompensatedSum value;
  detail::CompensatedSum error;
  for (const auto& p : partial) {
    value += p.value;
    error += p.error;
  }
  return {value.value(), error.value()};
}

std::vector<double> target_breaks(const Target1D& f) {
  std::vector<double> pts = f.kinks;
  pts.insert(pts.end(), f.singularities.begin(), f.singularities.end());
  std::sort(pts.begin(), pts.end());
  std::vector<double> out{0.0};
  for (double p : pts) {
    if (p > 0.0 && p < 1.0 && p != out.back()) out.push_back(p);
  }
  out.push_back(1.0);
  return out;
}

std::vector<double> sorted_singularities(const Target1D& f) {
  std::vector<double> s = f.singularities;
  std::sort(s.begin(), s.end());
  return s;
}

// |p_o - [o == label]|. For the labelled class 1 - p_o is summed from the
// other probabilities, which keeps it accurate when it is far below 1 ulp.
double onehot_gap(const std::vector<double>& p, std::size_t o, std::size_t label) {
  if (o != label) return p[o];
  double rest = 0.0;
  for (std::size_t q = 0; q < p.size(); ++q) {
    if (q != o) rest += p[q];
  }
  return rest;
}

}  // namespace

std::vector<double> net_kinks_1d(const Net& net) {
  require_1d(net, "net_kinks_1d");
  std::vector<double> kinks;
  kinks.reserve(net.hidden_count() * 2);
  for (std::size_t j = 0; j < net.hidden_count(); ++j) {
    const double w = net.hidden_weight(j, 0);
    const double b = net.hidden_bias(j);
    if (w == 0.0) continue;
    if (net.activation() == ActivationKind::ReLU) {
      kinks.push_back(-b / w);
    } else {
      kinks.push_back((-0.5 - b) / w);
      kinks.push_back((0.5 - b) / w);
    }
  }
  return merge_interior(std::move(kinks));
}

Cpwl1D net_to_cpwl_1d(const Net& net, std::size_t output) {
  if (net.softmax_head()) {
    throw InvalidInputError("net_to_cpwl_1d: softmax of a CPWL function is not CPWL");
  }
  if (output >= net.output_count()) throw ShapeError("net_to_cpwl_1d: output index out of range");
  CpwlTable table = cpwl_all_outputs(net);
  return Cpwl1D(std::move(table.nodes), std::move(table.values[output]));
}

L1Report exact_l1_distance_1d(const Cpwl1D& a, const Cpwl1D& b) {
  const std::vector<double> xs = union_points(a.breakpoints(), b.breakpoints());
  const std::vector<double> va = sample_sorted(a, xs);
  const std::vector<double> vb = sample_sorted(b, xs);
  detail::CompensatedSum total;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    total += segment_abs_integral(va[i] - vb[i], va[i + 1] - vb[i + 1], xs[i + 1] - xs[i]);
  }
  L1Report r;
  r.value = total.value();
  r.method = L1Method::ExactCpwl;
  r.n = xs.size() - 1;
  return r;
}

L1Report exact_l1_step_vs_cpwl(const StepFn1D& s, const Cpwl1D& c) {
  const std::vector<double> xs = union_points(s.cuts(), c.breakpoints());
  const std::vector<double> vc = sample_sorted(c, xs);
  detail::CompensatedSum total;
  std::size_t cell = 0;
  const auto& cuts = s.cuts();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    while (cuts[cell + 1] <= xs[i]) ++cell;
    const double v = s.values()[cell];
    total += segment_abs_integral(vc[i] - v, vc[i + 1] - v, xs[i + 1] - xs[i]);
  }
  L1Report r;
  r.value = total.value();
  r.method = L1Method::ExactCpwl;
  r.n = xs.size() - 1;
  return r;
}

L1Report l1_distance_1d(const Target1D& f, const Cpwl1D& c) {
  if (f.cpwl) return exact_l1_distance_1d(*f.cpwl, c);
  if (f.step) return exact_l1_step_vs_cpwl(*f.step, c);

  const std::vector<double> xs = union_points(c.breakpoints(), target_breaks(f));
  const std::vector<double> vc = sample_sorted(c, xs);
  const std::vector<double> singular = sorted_singularities(f);
  const detail::QuadResult q = chunked_sum(xs.size() - 1, [&](std::size_t i) {
    const double x0 = xs[i];
    const double x1 = xs[i + 1];
    const double y0 = vc[i];
    const double y1 = vc[i + 1];
    const auto h = [&f, x0, x1, y0, y1](double x) {
      const double s = (x - x0) / (x1 - x0);
      return f.eval(x) - (y0 + s * (y1 - y0));
    };
    const bool singular_end = contains(singular, x0) || contains(singular, x1);
    return detail::integrate_abs(h, x0, x1, kQuadratureRelTol, singular_end);
  });
  L1Report r;
  r.value = q.value;
  r.method = L1Method::AdaptiveQuadrature;
  r.n = xs.size() - 1;
  r.abs_error = q.error;
  return r;
}

L1Report l1_distance_1d(const Target1D& f, const StepFn1D& s) {
  if (f.cpwl) return exact_l1_step_vs_cpwl(s, *f.cpwl);
  if (f.step) {
    const std::vector<double> xs = union_points(s.cuts(), f.step->cuts());
    detail::CompensatedSum total;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double mid = 0.5 * (xs[i] + xs[i + 1]);
      total += std::abs((*f.step)(mid) - s(mid)) * (xs[i + 1] - xs[i]);
    }
    L1Report r;
    r.value = total.value();
    r.method = L1Method::ExactCpwl;
    r.n = xs.size() - 1;
    return r;
  }

  const std::vector<double> xs = union_points(s.cuts(), target_breaks(f));
  const std::vector<double> singular = sorted_singularities(f);
  const detail::QuadResult q = chunked_sum(xs.size() - 1, [&](std::size_t i) {
    const double x0 = xs[i];
    const double x1 = xs[i + 1];
    const double v = s(0.5 * (x0 + x1));
    const auto h = [&f, v](double x) { return f.eval(x) - v; };
    const bool singular_end = contains(singular, x0) || contains(singular, x1);
    return detail::integrate_abs(h, x0, x1, kQuadratureRelTol, singular_end);
  });
  L1Report r;
  r.value = q.value;
  r.method = L1Method::AdaptiveQuadrature;
  r.n = xs.size() - 1;
  r.abs_error = q.error;
  return r;
}

std::vector<L1Report> l1_softmax_vs_indicator_1d(const Net& net, const IndicatorSpec& spec) {
  require_1d(net, "l1_softmax_vs_indicator_1d");
  if (spec.input_dim() != 1) throw InvalidInputError("l1_softmax_vs_indicator_1d: spec must be 1-D");
  if (!net.softmax_head()) throw InvalidInputError("l1_softmax_vs_indicator_1d: net needs a softmax head");
  if (net.output_count() != spec.class_count()) {
    throw ShapeError("l1_softmax_vs_indicator_1d: net outputs and class count differ");
  }
  const std::size_t m = spec.class_count();
  const CpwlTable table = cpwl_all_outputs(net);

  std::vector<double> cuts{0.0};
  cuts.insert(cuts.end(), spec.axis_cuts()[0].begin(), spec.axis_cuts()[0].end());
  cuts.push_back(1.0);
  const std::vector<double> xs = union_points(table.nodes, cuts);

  std::vector<std::vector<double>> logits(m);
  for (std::size_t o = 0; o < m; ++o) logits[o] = sample_sorted(Cpwl1D(table.nodes, table.values[o]), xs);

  std::vector<detail::CompensatedSum> value(m);
  std::vector<detail::CompensatedSum> error(m);
  bool used_quadrature = false;
  std::vector<double> g0(m);
  std::vector<double> g1(m);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double x0 = xs[i];
    const double x1 = xs[i + 1];
    const double mid = 0.5 * (x0 + x1);
    const auto label = static_cast<std::size_t>(spec.label_at(std::span<const double>(&mid, 1)) - 1);
    bool constant = true;
    for (std::size_t o = 0; o < m; ++o) {
      g0[o] = logits[o][i];
      g1[o] = logits[o][i + 1];
      constant = constant && g0[o] == g1[o];
    }
    if (constant) {
      const std::vector<double> p = softmax(g0);
      for (std::size_t o = 0; o < m; ++o) {
        value[o] += onehot_gap(p, o, label) * (x1 - x0);
      }
      continue;
    }
    used_quadrature = true;
    for (std::size_t o = 0; o < m; ++o) {
      const auto integrand = [&, o, label](double x) {
        const double s = (x - x0) / (x1 - x0);
        std::vector<double> g(m);
        for (std::size_t q = 0; q < m; ++q) g[q] = g0[q] + s * (g1[q] - g0[q]);
        return onehot_gap(softmax(g), o, label);
      };
      const detail::QuadResult r = detail::integrate(integrand, x0, x1, kQuadratureRelTol);
      value[o] += r.value;
      error[o] += r.error;
    }
  }
  std::vector<L1Report> out(m);
  for (std::size_t o = 0; o < m; ++o) {
    out[o].value = value[o].value();
    out[o].n = xs.size() - 1;
    if (used_quadrature) {
      out[o].method = L1Method::AdaptiveQuadrature;
      out[o].abs_error = error[o].value();
    } else {
      out[o].method = L1Method::ExactCpwl;
    }
  }
  return out;
}

std::vector<L1Report> grid_l1_distance(const VectorField& f, const VectorField& g,
                                       std::size_t dim, std::size_t components,
                                       std::size_t resolution) {
  if (dim == 0) throw ShapeError("grid_l1_distance: dimension must be positive");
  if (dim > 3) throw UseMonteCarloError("grid_l1_distance: d > 3, use Monte Carlo");
  if (resolution < 2) throw DomainError("grid_l1_distance: resolution must be >= 2");
  const std::size_t r = resolution;
  std::size_t cells = 1;
  for (std::size_t k = 0; k < dim; ++k) cells *= r;

  // One slice per index along the first axis; reduced in slice order.
  std::vector<std::vector<double>> partial(r, std::vector<double>(components, 0.0));
  detail::parallel_for(r, [&](std::size_t slice) {
    std::vector<detail::CompensatedSum> sums(components);
    const std::size_t inner = cells / r;
    std::vector<double> x(dim);
    for (std::size_t c = 0; c < inner; ++c) {
      x[0] = (static_cast<double>(slice) + 0.5) / static_cast<double>(r);
      std::size_t rest = c;
      for (std::size_t k = dim; k-- > 1;) {
        x[k] = (static_cast<double>(rest % r) + 0.5) / static_cast<double>(r);
        rest /= r;
      }
      const std::vector<double> fv = f(x);
      const std::vector<double> gv = g(x);
      if (fv.size() != components || gv.size() != components) {
        throw ShapeError("grid_l1_distance: field returned wrong number of components");
      }
      for (std::size_t o = 0; o < components; ++o) sums[o] += std::abs(fv[o] - gv[o]);
    }
    for (std::size_t o = 0; o < components; ++o) partial[slice][o] = sums[o].value();
  });
  std::vector<L1Report> out(components);
  for (std::size_t o = 0; o < components; ++o) {
    detail::CompensatedSum total;
    for (std::size_t s = 0; s < r; ++s) total += partial[s][o];
    out[o].value = total.value() / static_cast<double>(cells);
    out[o].method = L1Method::GridQuadrature;
    out[o].n = r;
  }
  return out;
}

L1Report grid_l1_distance(const Field& f, const Field& g, std::size_t dim,
                          std::size_t resolution) {
  const VectorField vf = [&f](std::span<const double> x) { return std::vector<double>{f(x)}; };
  const VectorField vg = [&g](std::span<const double> x) { return std::vector<double>{g(x)}; };
  return grid_l1_distance(vf, vg, dim, 1, resolution).front();
}

std::vector<L1Report> mc_l1_distance(const VectorField& f, const VectorField& g, std::size_t dim,
                                     std::size_t components, std::uint64_t samples,
                                     std::uint64_t seed) {
  if (dim == 0) throw ShapeError("mc_l1_distance: dimension must be positive");
  if (samples < 100) throw DomainError("mc_l1_distance: need at least 100 samples");
  constexpr std::uint64_t kBlock = 4096;
  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::vector<detail::Moments>> partial(blocks,
                                                    std::vector<detail::Moments>(components));
  detail::parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> x(dim);
    const std::uint64_t end = std::min<std::uint64_t>(samples, (b + 1) * kBlock);
    auto& moments = partial[b];
    for (std::uint64_t i = b * kBlock; i < end; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        x[k] = counter_uniform(seed, streams::kMonteCarlo, i * dim + k);
      }
      const std::vector<double> fv = f(x);
      const std::vector<double> gv = g(x);
      if (fv.size() != components || gv.size() != components) {
        throw ShapeError("mc_l1_distance: field returned wrong number of components");
      }
      for (std::size_t o = 0; o < components; ++o) moments[o].push(std::abs(fv[o] - gv[o]));
    }
  });
  std::vector<L1Report> out(components);
  for (std::size_t o = 0; o < components; ++o) {
    detail::Moments total;
    for (const auto& block : partial) total.merge(block[o]);
    const double n = static_cast<double>(samples);
    const double variance = std::max(0.0, total.m2 / (n - 1.0));
    out[o].value = total.mean;
    out[o].method = L1Method::MonteCarlo;
    out[o].n = samples;
    out[o].ci_halfwidth = kZ99 * std::sqrt(variance) / std::sqrt(n);
    out[o].seed = seed;
  }
  return out;
}

L1Report mc_l1_distance(const Field& f, const Field& g, std::size_t dim, std::uint64_t samples,
                        std::uint64_t seed) {
  const VectorField vf = [&f](std::span<const double> x) { return std::vector<double>{f(x)}; };
  const VectorField vg = [&g](std::span<const double> x) { return std::vector<double>{g(x)}; };
  return mc_l1_distance(vf, vg, dim, 1, samples, seed).front();
}

ClassMeasures class_measures(const IndicatorSpec& spec) {
  std::vector<detail::CompensatedSum> sums(spec.class_count());
  for (std::size_t c = 0; c < spec.cell_count(); ++c) {
    sums[static_cast<std::size_t>(spec.cell_labels()[c] - 1)] += spec.cell_volume(c);
  }
  ClassMeasures out;
  for (const auto& s : sums) out.mu.push_back(s.value());
  return out;
}

}  // namespace uat
