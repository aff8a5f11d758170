#include "ctrace/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ctrace/channel.hpp"
#include "ctrace/cyclicstats.hpp"
#include "ctrace/distinguisher.hpp"
#include "ctrace/error.hpp"
#include "ctrace/lowerbound.hpp"
#include "ctrace/numfourier.hpp"

namespace ctrace::cli {

namespace {

using json = nlohmann::ordered_json;

// Thrown for malformed flag values; reported like a parse error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class F>
auto parse_flag(const std::string& flag, F&& parse) {
  try {
    return parse();
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

GapSequence gaps_flag(const std::string& flag, const std::string& text) {
  return parse_flag(flag, [&] { return parse_gap_list(text); });
}

std::vector<std::int64_t> int_list_flag(const std::string& flag, const std::string& text) {
  return parse_flag(flag, [&] {
    const auto g = parse_gap_list(text);
    return std::vector<std::int64_t>(g.begin(), g.end());
  });
}

std::string number(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

// A tabular result plus the configuration that produced it. Rendered as CSV
// with '#' comment lines, or as one JSON object with the same fields.
struct Report {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  std::vector<std::string> notes;
  json summary = json::object();
};

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + '"';
  }
  if (v.is_number_float()) return number(v.get<double>());
  return v.dump();
}

void render(const Report& r, const std::string& format, std::ostream& os) {
  if (format == "json") {
    json doc;
    doc["command"] = r.command;
    doc["version"] = kVersion;
    json cfg = json::object();
    for (const auto& [key, value] : r.config) cfg[key] = value;
    doc["config"] = cfg;
    json rows = json::array();
    for (const auto& row : r.rows) {
      json obj = json::object();
      for (std::size_t c = 0; c < r.columns.size(); ++c) obj[r.columns[c]] = row[c];
      rows.push_back(obj);
    }
    doc["rows"] = rows;
    doc["summary"] = r.summary;
    doc["notes"] = r.notes;
    os << doc.dump(2) << '\n';
    return;
  }
  os << "# ctrace " << kVersion << ' ' << r.command << '\n';
  for (const auto& [key, value] : r.config) os << "# " << key << '=' << value << '\n';
  if (!r.columns.empty()) {
    for (std::size_t c = 0; c < r.columns.size(); ++c) os << (c ? "," : "") << r.columns[c];
    os << '\n';
    for (const auto& row : r.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_cell(row[c]);
      os << '\n';
    }
  }
  for (const auto& [key, value] : r.summary.items()) os << "# " << key << '=' << csv_cell(value) << '\n';
  for (const auto& note : r.notes) os << "# " << note << '\n';
}

struct Output {
  std::string path;
  std::string format = "csv";
};

void add_output_flags(CLI::App* sub, Output& o) {
  sub->add_option("--out", o.path, "Write results to this file instead of stdout");
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const Report& r, const Output& o, std::ostream& out) {
  if (o.path.empty()) {
    render(r, o.format, out);
    return;
  }
  std::ofstream file(o.path);
  if (!file) throw Error("IoError", "cannot open '" + o.path + "' for writing");
  render(r, o.format, file);
  out << "wrote " << r.rows.size() << " rows to " << o.path << '\n';
  for (const auto& [key, value] : r.summary.items()) out << key << '=' << csv_cell(value) << '\n';
  for (const auto& note : r.notes) out << note << '\n';
}

// --- subcommands -----------------------------------------------------------

struct SampleArgs {
  std::string gaps;
  double p = 0.5;
  std::uint64_t seed = 1;
  std::int64_t count = 10;
  Output out;
};

void cmd_sample(const SampleArgs& a, std::ostream& out) {
  const GapSequence x = gaps_flag("--gaps", a.gaps);
  const ChannelParams params(a.p, a.seed);
  const BinaryString bits = to_binary(x);
  Report r{"sample", {{"gaps", format_gaps(x)}, {"p", number(a.p)}, {"seed", std::to_string(a.seed)},
                      {"count", std::to_string(a.count)}}, {"trace"}, {}, {}};
  Rng rng(a.seed);
  for (std::int64_t t = 0; t < a.count; ++t) r.rows.push_back({sample_trace(bits, params, rng).str()});
  emit(r, a.out, out);
}

struct ProbArgs {
  std::string gaps, trace_gaps, p = "1/2";
  Output out;
};

void cmd_prob(const ProbArgs& a, std::ostream& out) {
  const GapSequence x = gaps_flag("--gaps", a.gaps);
  const GapSequence t = gaps_flag("--trace-gaps", a.trace_gaps);
  const Rational p = parse_flag("--p", [&] { return parse_rational(a.p); });
  const Rational prob = exact_trace_prob(x, t, p);
  Report r{"prob", {{"gaps", format_gaps(x)}, {"trace_gaps", format_gaps(t)}, {"p", a.p}},
           {"exact", "decimal"}, {{prob.str(), to_decimal(prob)}}, {}};
  emit(r, a.out, out);
}

struct StatsArgs {
  std::string x, y;
  std::vector<std::string> indices;
  int ell = 1;
  int order = 0;
  int cap = kDefaultOrderCap;
  Output out;
};

void cmd_stats(const StatsArgs& a, std::ostream& out) {
  const GapSequence x = gaps_flag("--x", a.x);
  std::optional<GapSequence> y;
  if (!a.y.empty()) y = gaps_flag("--y", a.y);
  std::vector<StatIndex> idx;
  for (const auto& text : a.indices) idx.push_back(parse_flag("--index", [&] { return StatIndex::parse(text); }));
  if (a.order > 0) {
    for_each_nondecreasing_tuple(static_cast<int>(x.k()), a.order, a.ell, [&](std::span<const int> t) {
      idx.push_back(StatIndex{{t.begin(), t.end()}, a.ell});
      return true;
    });
  }
  Report r{"stats", {{"x", format_gaps(x)}}, {"index", "value_x"}, {}, {}};
  if (y) {
    r.config.emplace_back("y", format_gaps(*y));
    r.columns.push_back("value_y");
  }
  r.config.emplace_back("ell", std::to_string(a.ell));
  r.config.emplace_back("order", std::to_string(a.order));
  for (const auto& i : idx) {
    validate(i, x.k());
    std::vector<json> row{i.str(), stat(x, i).str()};
    if (y) row.push_back(stat(*y, i).str());
    r.rows.push_back(std::move(row));
  }
  if (y) {
    r.summary["matched_order"] = matched_order(x.gaps(), y->gaps(), a.ell, a.cap);
    const auto first = min_distinguishing_stat(x.gaps(), y->gaps(), a.ell, a.cap);
    r.summary["distinguishing"] = first ? first->str() : "none";
  }
  emit(r, a.out, out);
}

struct FourierArgs {
  std::string gaps;
  double tol = -1.0;
  std::string out_path;
};

void cmd_fourier(const FourierArgs& a, std::ostream& out) {
  const GapSequence x = gaps_flag("--gaps", a.gaps);
  const Spectrum spec = dft(x.gaps());
  const double tol = a.tol > 0.0 ? a.tol : default_zero_tolerance(spec);
  json doc;
  doc["command"] = "fourier";
  doc["version"] = kVersion;
  doc["config"] = {{"gaps", format_gaps(x)}, {"tol", tol}};
  json coeffs = json::array();
  for (std::size_t j = 1; j <= x.k(); ++j) {
    const auto c = spec.at(j);
    coeffs.push_back({{"j", j}, {"re", c.real()}, {"im", c.imag()}, {"abs", std::abs(c)}});
  }
  doc["coefficients"] = coeffs;
  json pattern = json::object();
  for (const auto& [alpha, cls] : zero_pattern(spec, tol)) pattern[std::to_string(alpha)] = to_string(cls);
  doc["zero_pattern"] = pattern;
  if (a.out_path.empty()) {
    out << doc.dump(2) << '\n';
  } else {
    std::ofstream file(a.out_path);
    if (!file) throw Error("IoError", "cannot open '" + a.out_path + "' for writing");
    file << doc.dump(2) << '\n';
    out << "wrote spectrum to " << a.out_path << '\n';
  }
}

struct VerifyArgs {
  int k = 3;
  int max_value = 2;
  int cap = kDefaultOrderCap;
  int threads = 1;
  Output out;
};

void cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const auto pairs = verify_characterization(a.k, a.max_value, a.cap, a.threads);
  Report r{"verify-char",
           {{"k", std::to_string(a.k)}, {"max_value", std::to_string(a.max_value)}, {"cap", std::to_string(a.cap)}},
           {"x", "y", "cap"}, {}, {}};
  for (const auto& p : pairs) r.rows.push_back({format_gaps(p.x), format_gaps(p.y), p.cap});
  r.notes.push_back(std::to_string(pairs.size()) + " counterexamples");
  emit(r, a.out, out);
}

struct DistinguishArgs {
  std::string x, y, source = "x";
  double p = 0.5;
  double C = kDefaultSeparation;
  std::int64_t traces = 100000;
  std::int64_t trials = 10;
  std::uint64_t seed = 1;
  int threads = 1;
  Output out;
};

void cmd_distinguish(const DistinguishArgs& a, std::ostream& out) {
  const DistinguishInstance inst(gaps_flag("--x", a.x), gaps_flag("--y", a.y), ChannelParams(a.p, a.seed),
                                 a.C, a.traces);
  const Verdict source = a.source == "x" ? Verdict::X : Verdict::Y;
  const auto layout = cluster_layout(inst);
  Report r{"distinguish",
           {{"x", format_gaps(inst.x())},
            {"y", format_gaps(inst.y())},
            {"p", number(a.p)},
            {"C", number(a.C)},
            {"traces", std::to_string(a.traces)},
            {"trials", std::to_string(a.trials)},
            {"seed", std::to_string(a.seed)},
            {"source", a.source}},
           {"trial", "verdict", "f_hat", "target_x", "target_y", "useful_count"}, {}, {}};
  const auto outcomes = run_distinguish_trials(inst, source, a.trials, a.seed, a.threads);
  std::int64_t correct = 0;
  for (const auto& o : outcomes) {
    if (!o.result) {
      r.rows.push_back({o.trial, o.error, nullptr, nullptr, nullptr, 0});
      continue;
    }
    const auto& res = *o.result;
    correct += res.verdict == source;
    if (res.similar_path) {
      r.rows.push_back({o.trial, to_string(res.verdict), res.f_hat, res.target_x, res.target_y, res.useful_count});
    } else {
      r.rows.push_back({o.trial, to_string(res.verdict), nullptr, nullptr, nullptr, res.useful_count});
    }
  }
  r.summary["path"] = layout.patterns_cyclically_distinct() ? "cyclic" : "similar";
  r.summary["clusters"] = layout.partition.cluster_count();
  for (const auto& o : outcomes) {
    if (o.result && o.result->statistic) {
      r.summary["statistic"] = o.result->statistic->str();
      break;
    }
  }
  r.summary["correct"] = std::to_string(correct) + "/" + std::to_string(a.trials);
  emit(r, a.out, out);
}

struct SweepArgs {
  std::string pair = "paper";
  double p = 0.5;
  std::string n_list = "64,128,256,512";
  std::int64_t samples = 10000;
  double window = 3.0;
  std::uint64_t seed = 1;
  int threads = 1;
  Output out;
};

LowerBoundPair load_pair(const std::string& spec) {
  if (spec == "paper") return paper_pair();
  std::ifstream file(spec);
  if (!file) throw UsageError("--pair: expected 'paper' or a readable file, got '" + spec + "'");
  std::string lx, ly;
  std::getline(file, lx);
  std::getline(file, ly);
  return make_lower_bound_pair(gaps_flag("--pair", lx), gaps_flag("--pair", ly));
}

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const LowerBoundPair pair = load_pair(a.pair);
  const auto ns = int_list_flag("--n-list", a.n_list);
  const auto table = ratio_deviation_sweep(pair, a.p, ns, a.samples, a.window, a.seed, a.threads);
  Report r{"ratio-sweep",
           {{"x", format_gaps(pair.x)},
            {"y", format_gaps(pair.y)},
            {"matched_order", std::to_string(pair.matched_order)},
            {"p", number(a.p)},
            {"n_list", a.n_list},
            {"samples", std::to_string(a.samples)},
            {"window", number(a.window)},
            {"seed", std::to_string(a.seed)}},
           {"n", "samples_kept", "max_dev", "q99_dev", "slope_so_far"}, {}, {}};
  for (const auto& row : table.rows) {
    r.rows.push_back({row.n, row.samples_kept, row.max_dev, row.q99_dev,
                      std::isnan(row.slope_so_far) ? json(nullptr) : json(row.slope_so_far)});
  }
  r.summary["slope"] = table.slope;
  r.summary["target_slope"] = -(pair.matched_order + 1) / 2.0;
  emit(r, a.out, out);
}

struct SearchArgs {
  int k = 3;
  int max_value = 3;
  int order = 2;
  bool complement = false;
  Output out;
};

void cmd_search(const SearchArgs& a, std::ostream& out) {
  const auto pairs = search_matching_pairs(a.k, a.max_value, a.order, {a.complement});
  Report r{"search-pairs",
           {{"k", std::to_string(a.k)},
            {"max_value", std::to_string(a.max_value)},
            {"order", std::to_string(a.order)},
            {"complement", a.complement ? "true" : "false"}},
           {"x", "y", "matched_order"}, {}, {}};
  for (const auto& p : pairs) r.rows.push_back({format_gaps(p.x), format_gaps(p.y), p.matched_order});
  r.summary["pairs"] = pairs.size();
  emit(r, a.out, out);
}

void cmd_pair_demo(const Output& o, std::ostream& out) {
  const LowerBoundPair pair = paper_pair();
  const int k = static_cast<int>(pair.x.k());
  Report r{"pair-demo", {{"x", format_gaps(pair.x)}, {"y", format_gaps(pair.y)}},
           {"order", "statistics_checked", "all_equal"}, {}, {}};
  for (int m = 1; m <= pair.matched_order; ++m) {
    std::int64_t checked = 0;
    bool equal = true;
    for_each_nondecreasing_tuple(k, m, 1, [&](std::span<const int> t) {
      const StatIndex idx{{t.begin(), t.end()}, 1};
      equal = equal && stat(pair.x, idx) == stat(pair.y, idx);
      ++checked;
      return true;
    });
    r.rows.push_back({m, checked, equal ? "true" : "false"});
  }
  r.summary["cyclically_distinct"] = !cyclically_equal(pair.x, pair.y);
  r.summary["matched_order"] = pair.matched_order;
  const auto first = min_distinguishing_stat(pair.x.gaps(), pair.y.gaps(), 1);
  if (first) {
    r.summary["distinguishing"] = first->str();
    r.summary["value_x"] = stat(pair.x, *first).str();
    r.summary["value_y"] = stat(pair.y, *first).str();
  }
  emit(r, o, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Circular deletion channel workbench for sparse strings", "ctrace"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::function<void()> action;

  SampleArgs sample;
  auto* s = app.add_subcommand("sample", "Draw traces of a gap sequence through the channel");
  s->add_option("--gaps", sample.gaps, "Source gaps, e.g. 1,0,2")->required();
  s->add_option("--p", sample.p, "Deletion probability");
  s->add_option("--seed", sample.seed, "RNG seed");
  s->add_option("--count", sample.count, "Number of traces")->check(CLI::NonNegativeNumber);
  add_output_flags(s, sample.out);
  s->callback([&] { action = [&] { cmd_sample(sample, out); }; });

  ProbArgs prob;
  auto* pr = app.add_subcommand("prob", "Exact probability of a trace (as a gap sequence)");
  pr->add_option("--gaps", prob.gaps, "Source gaps")->required();
  pr->add_option("--trace-gaps", prob.trace_gaps, "Trace gaps")->required();
  pr->add_option("--p", prob.p, "Deletion probability, decimal or a/b");
  add_output_flags(pr, prob.out);
  pr->callback([&] { action = [&] { cmd_prob(prob, out); }; });

  StatsArgs stats;
  auto* st = app.add_subcommand("stats", "Evaluate cyclic statistics");
  st->add_option("--x", stats.x, "Gap sequence")->required();
  st->add_option("--y", stats.y, "Second gap sequence to compare against");
  st->add_option("--index", stats.indices, "Statistic 'i1,...,im;ell' (repeatable)");
  st->add_option("--order", stats.order, "Also list every statistic of this order");
  st->add_option("--ell", stats.ell, "Modulus for --order and the comparison");
  st->add_option("--cap", stats.cap, "Highest order compared");
  add_output_flags(st, stats.out);
  st->callback([&] { action = [&] { cmd_stats(stats, out); }; });

  FourierArgs fourier;
  auto* fo = app.add_subcommand("fourier", "DFT and gcd-class zero pattern as JSON");
  fo->add_option("--gaps", fourier.gaps, "Gap sequence")->required();
  fo->add_option("--tol", fourier.tol, "Zero threshold (default scales with the input)");
  fo->add_option("--out", fourier.out_path, "Write JSON to this file");
  fo->callback([&] { action = [&] { cmd_fourier(fourier, out); }; });

  VerifyArgs verify;
  auto* ve = app.add_subcommand("verify-char", "Exhaustive check that statistics up to --cap identify rotation classes");
  ve->add_option("--k", verify.k, "Number of ones")->required();
  ve->add_option("--max-value", verify.max_value, "Largest gap value")->required();
  ve->add_option("--cap", verify.cap, "Highest statistic order");
  ve->add_option("--threads", verify.threads, "Worker threads")->check(CLI::PositiveNumber);
  add_output_flags(ve, verify.out);
  ve->callback([&] { action = [&] { cmd_verify(verify, out); }; });

  DistinguishArgs dist;
  auto* di = app.add_subcommand("distinguish", "Repeated distinguishing experiments");
  di->add_option("--x", dist.x, "Candidate x gaps")->required();
  di->add_option("--y", dist.y, "Candidate y gaps")->required();
  di->add_option("--p", dist.p, "Deletion probability");
  di->add_option("--C", dist.C, "Separation constant");
  di->add_option("--traces", dist.traces, "Trace budget per trial");
  di->add_option("--trials", dist.trials, "Number of trials")->check(CLI::NonNegativeNumber);
  di->add_option("--seed", dist.seed, "Master seed");
  di->add_option("--source", dist.source, "Which candidate feeds the channel")->check(CLI::IsMember({"x", "y"}));
  di->add_option("--threads", dist.threads, "Worker threads")->check(CLI::PositiveNumber);
  add_output_flags(di, dist.out);
  di->callback([&] { action = [&] { cmd_distinguish(dist, out); }; });

  SweepArgs sweep;
  auto* sw = app.add_subcommand("ratio-sweep", "Decay of the trace probability ratio with n");
  sw->add_option("--pair", sweep.pair, "'paper' or a file with x and y gap lines");
  sw->add_option("--p", sweep.p, "Deletion probability");
  sw->add_option("--n-list", sweep.n_list, "Increasing base gaps, e.g. 64,128");
  sw->add_option("--samples", sweep.samples, "Window-passing samples per n");
  sw->add_option("--window", sweep.window, "Window constant");
  sw->add_option("--seed", sweep.seed, "Master seed");
  sw->add_option("--threads", sweep.threads, "Worker threads")->check(CLI::PositiveNumber);
  add_output_flags(sw, sweep.out);
  sw->callback([&] { action = [&] { cmd_sweep(sweep, out); }; });

  SearchArgs search;
  auto* se = app.add_subcommand("search-pairs", "Find permutation pairs with matching statistics");
  se->add_option("--k", search.k, "Number of ones")->required();
  se->add_option("--max-value", search.max_value, "Largest gap value")->required();
  se->add_option("--order", search.order, "Exact matched order")->required();
  se->add_flag("--complement", search.complement, "Only pairs with y = max_value - x");
  add_output_flags(se, search.out);
  se->callback([&] { action = [&] { cmd_search(search, out); }; });

  Output demo;
  auto* pd = app.add_subcommand("pair-demo", "Show the order-4 matched pair");
  add_output_flags(pd, demo);
  pd->callback([&] { action = [&] { cmd_pair_demo(demo, out); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    action();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace ctrace::cli
