// esf: command-line front end. Samples are emitted as JSON lines, tables as
// CSV; --format overrides either. Replicate r of a sampling command draws from
// make_rng(derive_seed(seed, r)), so output bytes depend only on the flags.

#include "esf/esf.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using esf::ExactParams;
using esf::FloatParams;
using esf::Rational;
using Json = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 1;

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Parameter parsing

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  if (!text.empty() && text.back() == ',') out.emplace_back();
  return out;
}

bool is_rational_literal(const std::string& s) {
  try {
    esf::parse_rational(s);
    return true;
  } catch (const esf::InvalidInput&) {
    return false;
  }
}

double parse_decimal(const std::string& s, const std::string& flag) {
  double v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw UsageError(flag + ": cannot parse '" + s + "' as a number");
  return v;
}

/// A parameter vector given as rationals (exact backend) or with at least one
/// decimal entry (float backend only).
struct ParamList {
  std::optional<std::vector<Rational>> exact;
  std::vector<double> floating;

  int k() const { return static_cast<int>(floating.size()); }
  bool is_exact() const { return exact.has_value(); }
};

ParamList parse_params(const std::string& text, const std::string& flag) {
  ParamList out;
  std::vector<Rational> exact;
  bool all_exact = true;
  for (const auto& item : split_list(text)) {
    if (item.empty()) throw UsageError(flag + ": empty entry in '" + text + "'");
    if (is_rational_literal(item)) {
      exact.push_back(esf::parse_rational(item));
      out.floating.push_back(esf::to_double(exact.back()));
    } else {
      all_exact = false;
      out.floating.push_back(parse_decimal(item, flag));
    }
  }
  if (out.floating.empty()) throw UsageError(flag + ": no values given");
  if (all_exact)
    out.exact = std::move(exact);
  else
    std::cerr << "note: " << flag << " has decimal entries; using the floating-point backend\n";
  return out;
}

ExactParams require_exact(const ParamList& p, const std::string& flag, const std::string& why) {
  if (!p.is_exact()) throw UsageError(why + " needs exact " + flag + " (write entries as integers or p/q)");
  return ExactParams(*p.exact);
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
      throw UsageError(flag + ": cannot parse '" + item + "' as an integer");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(flag + ": no values given");
  return out;
}

esf::GroupTable parse_group(const std::string& spec) {
  if (spec == "trivial") return esf::GroupTable::trivial();
  if (spec == "s3") return esf::GroupTable::symmetric3();
  if (spec.size() > 1 && spec[0] == 'z' && spec.find_first_not_of("0123456789", 1) == std::string::npos)
    return esf::GroupTable::cyclic(std::stoi(spec.substr(1)));
  std::ifstream in(spec);
  if (!in) throw UsageError("--group: '" + spec + "' is not trivial, s3, z<m> or a readable JSON file");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError("--group: " + spec + ": " + e.what());
  }
  const Json& table = doc.is_object() ? doc.at("table") : doc;
  return esf::GroupTable(table.get<std::vector<std::vector<int>>>());
}

esf::WreathElement parse_element(const std::string& text) {
  try {
    const Json doc = Json::parse(text);
    return esf::WreathElement{doc.at("g").get<std::vector<int>>(), doc.at("s").get<std::vector<int>>()};
  } catch (const Json::exception& e) {
    throw UsageError(std::string("--element: expected {\"g\":[...],\"s\":[...]}: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Output

enum class Format { Json, Csv };

/// Emits records as JSON lines or as CSV with a header taken from the first record.
class Sink {
 public:
  Sink(std::ostream& out, Format format) : out_(out), format_(format) {}

  void emit(const Json& record) {
    if (format_ == Format::Json) {
      out_ << record.dump() << '\n';
      return;
    }
    if (!header_done_) {
      bool first = true;
      for (const auto& [key, value] : record.items()) {
        out_ << (first ? "" : ",") << csv_cell(key);
        first = false;
      }
      out_ << '\n';
      header_done_ = true;
    }
    bool first = true;
    for (const auto& [key, value] : record.items()) {
      out_ << (first ? "" : ",") << csv_cell(value.is_string() ? value.get<std::string>() : value.dump());
      first = false;
    }
    out_ << '\n';
  }

 private:
  static std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }

  std::ostream& out_;
  Format format_;
  bool header_done_ = false;
};

/// Runs make(r) for r in [0, reps) on `jobs` threads; results come back in replicate order.
template <class F>
std::vector<Json> run_reps(long reps, int jobs, F make) {
  std::vector<Json> out(static_cast<std::size_t>(reps));
  if (jobs <= 1 || reps <= 1) {
    for (long r = 0; r < reps; ++r) out[static_cast<std::size_t>(r)] = make(r);
    return out;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w)
    workers.emplace_back([&, w] {
      try {
        for (long r = w; r < reps; r += jobs) out[static_cast<std::size_t>(r)] = make(r);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

esf::Rng replicate_rng(std::uint64_t seed, long r) {
  return esf::make_rng(esf::derive_seed(seed, static_cast<std::uint64_t>(r)));
}

/// |Y_n^(k)| in floating point, for cost estimates.
double multipartition_count(int n, int k) {
  std::vector<double> p(static_cast<std::size_t>(n) + 1, 0.0);
  p[0] = 1;
  for (int part = 1; part <= n; ++part)
    for (int m = part; m <= n; ++m) p[static_cast<std::size_t>(m)] += p[static_cast<std::size_t>(m - part)];
  std::vector<double> acc(static_cast<std::size_t>(n) + 1, 0.0);
  acc[0] = 1;
  for (int c = 0; c < k; ++c) {
    std::vector<double> next(acc.size(), 0.0);
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b)
        next[static_cast<std::size_t>(a + b)] += acc[static_cast<std::size_t>(a)] * p[static_cast<std::size_t>(b)];
    acc = std::move(next);
  }
  return acc[static_cast<std::size_t>(n)];
}

void require_feasible(double cost, double limit, const std::string& unit, bool force) {
  if (cost <= limit || force) return;
  std::ostringstream msg;
  msg << "infeasible at this scale: about " << std::scientific << std::setprecision(2) << cost << ' ' << unit
      << " (limit " << limit << "); pass --force to run anyway";
  throw UsageError(msg.str());
}

Json set_partition_json(const esf::LabeledSetPartition& s) {
  Json blocks = Json::array();
  for (const auto& b : s.blocks()) blocks.push_back({{"label", b.label}, {"elements", b.elements}});
  return blocks;
}

// ---------------------------------------------------------------------------
// Subcommands

struct Common {
  std::string format;
  std::string output;
};

struct PmfArgs {
  std::string theta, partition, element, group = "z2", t, k_counts;
  int n = -1;
};

void cmd_pmf(const PmfArgs& a, Sink& sink) {
  const int modes = !a.partition.empty() + !a.element.empty() + !a.k_counts.empty();
  if (modes != 1) throw UsageError("pmf: give exactly one of --partition, --element, --k-counts");

  if (!a.partition.empty()) {
    if (a.theta.empty()) throw UsageError("pmf: --partition needs --theta");
    const ParamList theta = parse_params(a.theta, "--theta");
    const esf::MultiplePartition p = [&] {
      try {
        return esf::parse_multipartition(a.partition);
      } catch (const esf::ParseError& e) {
        std::cerr << "  " << a.partition << "\n  " << std::string(e.position(), ' ') << "^\n";
        throw;
      }
    }();
    if (p.k() != theta.k())
      throw UsageError("pmf: partition has " + std::to_string(p.k()) + " classes but --theta has " +
                       std::to_string(theta.k()));
    Json rec{{"partition", esf::to_string(p)}, {"n", p.size()}, {"k", p.k()}};
    if (theta.is_exact()) {
      const Rational r = esf::refined_esf_pmf(p, ExactParams(*theta.exact));
      rec["log_prob"] = esf::log_of(r);
      rec["rational"] = esf::to_fraction_string(r);
    } else {
      rec["log_prob"] = esf::refined_esf_log_pmf(p, FloatParams(theta.floating));
    }
    sink.emit(rec);
    return;
  }

  if (!a.element.empty()) {
    if (a.t.empty()) throw UsageError("pmf: --element needs --t (one weight per conjugacy class)");
    const esf::GroupTable group = parse_group(a.group);
    const esf::WreathElement x = parse_element(a.element);
    esf::validate(x, group);
    const ParamList t = parse_params(a.t, "--t");
    if (t.k() != group.class_count())
      throw UsageError("pmf: group has " + std::to_string(group.class_count()) + " classes but --t has " +
                       std::to_string(t.k()));
    Json rec = Json::parse(esf::to_json_string(x));
    rec["cycle_type"] = esf::to_string(esf::cycle_type(x, group).partition);
    if (t.is_exact()) {
      const Rational r = esf::pewens_pmf(x, group, esf::WreathParams<Rational>(*t.exact, group));
      rec["log_prob"] = esf::log_of(r);
      rec["rational"] = esf::to_fraction_string(r);
    } else {
      rec["log_prob"] = std::log(esf::pewens_pmf(x, group, esf::WreathParams<double>(t.floating, group)));
    }
    sink.emit(rec);
    return;
  }

  if (a.theta.empty()) throw UsageError("pmf: --k-counts needs --theta");
  if (a.n < 0) throw UsageError("pmf: --k-counts needs --n");
  const ExactParams theta = require_exact(parse_params(a.theta, "--theta"), "--theta", "the joint law of K_n");
  const std::vector<int> counts = parse_int_list(a.k_counts, "--k-counts");
  if (static_cast<int>(counts.size()) != theta.k())
    throw UsageError("pmf: --k-counts has " + std::to_string(counts.size()) + " entries but --theta has " +
                     std::to_string(theta.k()));
  const Rational r = esf::joint_k_pmf(a.n, theta, counts);
  Json rec{{"n", a.n}, {"k_counts", counts}};
  rec["log_prob"] = sgn(r) > 0 ? Json(esf::log_of(r)) : Json(nullptr);
  rec["rational"] = esf::to_fraction_string(r);
  sink.emit(rec);
}

struct EnumerateArgs {
  int n = 0, k = 0;
  std::string theta;
  bool force = false;
};

void cmd_enumerate(const EnumerateArgs& a, Sink& sink) {
  std::optional<ParamList> theta;
  int k = a.k;
  if (!a.theta.empty()) {
    theta = parse_params(a.theta, "--theta");
    if (k != 0 && k != theta->k()) throw UsageError("enumerate: --k disagrees with the length of --theta");
    k = theta->k();
  }
  if (k < 1) throw UsageError("enumerate: give --k or --theta");
  if (a.n < 0) throw UsageError("enumerate: --n must be >= 0");
  require_feasible(multipartition_count(a.n, k), 1e7, "multiple partitions", a.force);
  std::optional<ExactParams> exact;
  std::optional<FloatParams> floating;
  if (theta && theta->is_exact()) exact.emplace(*theta->exact);
  if (theta && !theta->is_exact()) floating.emplace(theta->floating);
  esf::for_each_multipartition(a.n, k, [&](const esf::MultiplePartition& p) {
    Json rec{{"partition", esf::to_string(p)}};
    if (exact) {
      const Rational r = esf::refined_esf_pmf(p, *exact);
      rec["log_prob"] = esf::log_of(r);
      rec["rational"] = esf::to_fraction_string(r);
    } else if (floating) {
      rec["log_prob"] = esf::refined_esf_log_pmf(p, *floating);
    }
    sink.emit(rec);
  });
}

struct SampleArgs {
  int n = 0;
  std::string theta, group = "z2", t;
  long reps = 1;
  std::uint64_t seed = kDefaultSeed;
  int jobs = 1;
  double eps = esf::kDefaultTruncation;
  int top = 10;
  int paintbox = 0;
};

void check_reps(const SampleArgs& a) {
  if (a.reps < 0) throw UsageError("--reps must be >= 0");
  if (a.jobs < 1) throw UsageError("--jobs must be >= 1");
}

void cmd_sample_urn(const SampleArgs& a, Sink& sink) {
  check_reps(a);
  if (a.theta.empty()) throw UsageError("sample-urn: --theta is required");
  const FloatParams theta(parse_params(a.theta, "--theta").floating);
  if (a.n < 1) throw UsageError("sample-urn: --n must be >= 1");
  require_feasible(static_cast<double>(a.n) * a.reps, 1e10, "urn draws", false);
  for (const auto& rec : run_reps(a.reps, a.jobs, [&](long r) {
         esf::Rng rng = replicate_rng(a.seed, r);
         const auto s = esf::hoppe_urn_sample(a.n, theta, rng);
         return Json{{"rep", r}, {"partition", esf::to_string(s.partition)}, {"set_partition", set_partition_json(s.set_partition)}};
       }))
    sink.emit(rec);
}

void cmd_sample_crp(const SampleArgs& a, Sink& sink) {
  check_reps(a);
  if (a.t.empty()) throw UsageError("sample-crp: --t is required (one weight per conjugacy class)");
  if (a.n < 1) throw UsageError("sample-crp: --n must be >= 1");
  const esf::GroupTable group = parse_group(a.group);
  const ParamList t = parse_params(a.t, "--t");
  const esf::WreathParams<double> params(t.floating, group);
  for (const auto& rec : run_reps(a.reps, a.jobs, [&](long r) {
         esf::Rng rng = replicate_rng(a.seed, r);
         const auto x = esf::crp_wreath_sample(a.n, group, params, rng);
         Json out{{"rep", r}, {"g", x.g}, {"s", x.s}};
         out["cycle_type"] = esf::to_string(esf::cycle_type(x, group).partition);
         return out;
       }))
    sink.emit(rec);
}

void cmd_sample_pd(const SampleArgs& a, Sink& sink) {
  check_reps(a);
  if (a.theta.empty()) throw UsageError("sample-pd: --theta is required");
  if (a.top < 0) throw UsageError("sample-pd: --top must be >= 0");
  if (a.paintbox < 0) throw UsageError("sample-pd: --paintbox must be >= 0");
  const FloatParams theta(parse_params(a.theta, "--theta").floating);
  for (const auto& rec : run_reps(a.reps, a.jobs, [&](long r) {
         esf::Rng rng = replicate_rng(a.seed, r);
         const auto f = esf::pd_sample(theta, a.eps, rng);
         Json freqs = Json::array();
         std::vector<std::size_t> atoms;
         for (const auto& x : f.frequencies) {
           atoms.push_back(x.size());
           const std::size_t keep = a.top == 0 ? x.size() : std::min(x.size(), static_cast<std::size_t>(a.top));
           freqs.push_back(std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(keep)));
         }
         Json out{{"rep", r}, {"weights", f.weights}, {"frequencies", freqs}, {"atoms", atoms}, {"remainders", f.remainders}};
         if (a.paintbox > 0) out["paintbox"] = esf::to_string(esf::paintbox_sample(a.paintbox, f, rng));
         return out;
       }))
    sink.emit(rec);
}

struct StatsArgs {
  std::string n, theta, alpha;
  std::optional<double> beta;
  long mc = 0;
  std::uint64_t seed = kDefaultSeed;
  bool force = false;
};

void cmd_stats_k(const StatsArgs& a, Sink& sink) {
  const std::vector<int> ns = parse_int_list(a.n, "--n");
  const bool fixed_mode = !a.beta && a.alpha.empty() && !a.theta.empty();
  const bool growth_mode = a.beta && !a.alpha.empty() && a.theta.empty();
  if (!fixed_mode && !growth_mode)
    throw UsageError("stats-k: give either --theta, or --beta with --alpha");
  if (a.mc < 0) throw UsageError("stats-k: --mc must be >= 0");
  std::optional<esf::RegimeSpec> regime;
  std::optional<FloatParams> fixed;
  if (a.beta) {
    regime.emplace(*a.beta, parse_params(a.alpha, "--alpha").floating);
  } else {
    fixed.emplace(parse_params(a.theta, "--theta").floating);
  }
  double cost = 0;
  for (int n : ns) {
    if (n < 1) throw UsageError("stats-k: every --n must be >= 1");
    cost += static_cast<double>(n) * a.mc;
  }
  require_feasible(cost, 2e10, "Bernoulli draws", a.force);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const int n = ns[i];
    const FloatParams theta = regime ? regime->theta_at(n) : *fixed;
    std::vector<double> mc_sum(static_cast<std::size_t>(theta.k()), 0.0), mc_sq(mc_sum.size(), 0.0);
    if (a.mc > 0) {
      esf::Rng rng = replicate_rng(a.seed, static_cast<long>(i));
      for (long r = 0; r < a.mc; ++r) {
        const auto counts = esf::simulate_k_counts(n, theta, rng);
        for (std::size_t l = 0; l < counts.size(); ++l) {
          mc_sum[l] += counts[l];
          mc_sq[l] += static_cast<double>(counts[l]) * counts[l];
        }
      }
    }
    for (int l = 0; l < theta.k(); ++l) {
      Json rec{{"n", n}, {"l", l}, {"theta", theta[l]}};
      rec["expected"] = esf::expected_k(n, theta, l);
      rec["variance"] = esf::var_k(n, theta, l);
      rec["var_over_mean_sq"] = esf::concentration_ratio(n, theta, l);
      if (regime) {
        const auto pred = esf::regime_prediction(*regime, l);
        rec["limit"] = pred.limit;
        rec["expected_over_norm"] = esf::expected_k(n, theta, l) / pred.norm(n, regime->beta);
      }
      if (a.mc > 0) {
        const auto L = static_cast<std::size_t>(l);
        const double mean = mc_sum[L] / static_cast<double>(a.mc);
        rec["mc_mean"] = mean;
        rec["mc_variance"] = a.mc > 1 ? (mc_sq[L] - mc_sum[L] * mean) / static_cast<double>(a.mc - 1) : 0.0;
      }
      sink.emit(rec);
    }
  }
}

struct PoissonArgs {
  std::string n, theta;
  int m = 1;
  bool force = false;
};

void cmd_poisson_tv(const PoissonArgs& a, Sink& sink) {
  const std::vector<int> ns = parse_int_list(a.n, "--n");
  if (a.theta.empty()) throw UsageError("poisson-tv: --theta is required");
  const ExactParams theta = require_exact(parse_params(a.theta, "--theta"), "--theta", "poisson-tv");
  for (int n : ns) require_feasible(multipartition_count(n, theta.k()), 2e5, "multiple partitions", a.force);
  for (int n : ns) sink.emit(Json{{"n", n}, {"m", a.m}, {"tv", esf::truncated_tv_distance(n, a.m, theta)}});
}

struct WfArgs {
  long N = 500;
  std::string theta;
  std::optional<long> gens, thin;
  int sample_size = 4;
  long reps = 1;
  std::uint64_t seed = kDefaultSeed;
  std::string dump_state;
  bool summary = false;
  bool force = false;
};

Json population_json(const esf::Population& pop) {
  std::map<esf::AlleleId, long> counts;
  for (esf::AlleleId g : pop.genes()) ++counts[g];
  Json alleles = Json::array();
  for (const auto& [id, c] : counts)
    alleles.push_back({{"class", esf::allele_class(id)}, {"serial", esf::allele_serial(id)}, {"count", c}});
  std::vector<std::uint64_t> serials;
  for (int l = 0; l < pop.k(); ++l) serials.push_back(pop.next_serial(l));
  return Json{{"generation", pop.generation()}, {"genes", pop.size()}, {"k", pop.k()}, {"next_serial", serials}, {"alleles", alleles}};
}

void cmd_wf_sim(const WfArgs& a, Sink& sink) {
  if (a.theta.empty()) throw UsageError("wf-sim: --theta is required");
  if (a.N < 1 || a.N > 500'000'000) throw UsageError("wf-sim: --N must lie in 1..5e8");
  const ParamList theta = parse_params(a.theta, "--theta");
  const int genes = static_cast<int>(2 * a.N);
  const long gens = a.gens.value_or(20 * a.N);
  const long thin = a.thin.value_or(a.N);
  if (gens < 0 || thin < 1 || a.reps < 0) throw UsageError("wf-sim: need --gens >= 0, --thin >= 1, --reps >= 0");
  if (a.sample_size < 1 || a.sample_size > genes) throw UsageError("wf-sim: --sample-size must lie in 1..2N");
  const double draws = static_cast<double>(genes) * (static_cast<double>(gens) + static_cast<double>(thin) * a.reps);
  require_feasible(draws, 2e10, "parent draws", a.force);

  esf::WrightFisher wf(esf::Population(genes, theta.k()), esf::MutationRates::from_theta(FloatParams(theta.floating), genes));
  esf::Rng rng = replicate_rng(a.seed, 0);
  wf.advance(static_cast<std::uint64_t>(gens), rng);
  std::map<esf::MultiplePartition, long> counts;
  for (long r = 0; r < a.reps; ++r) {
    wf.advance(static_cast<std::uint64_t>(thin), rng);
    const auto p = esf::sample_composition(wf.population(), a.sample_size, rng);
    if (a.summary)
      ++counts[p];
    else
      sink.emit(Json{{"rep", r}, {"generation", wf.population().generation()}, {"partition", esf::to_string(p)}});
  }
  if (a.summary) {
    std::map<esf::MultiplePartition, double> exact;
    esf::for_each_multipartition(a.sample_size, theta.k(), [&](const esf::MultiplePartition& p) {
      exact[p] = theta.is_exact() ? esf::to_double(esf::refined_esf_pmf(p, ExactParams(*theta.exact)))
                                  : std::exp(esf::refined_esf_log_pmf(p, FloatParams(theta.floating)));
    });
    for (const auto& [p, prob] : exact) {
      const auto it = counts.find(p);
      const long c = it == counts.end() ? 0 : it->second;
      sink.emit(Json{{"partition", esf::to_string(p)},
                     {"count", c},
                     {"empirical", a.reps > 0 ? static_cast<double>(c) / static_cast<double>(a.reps) : 0.0},
                     {"exact", prob}});
    }
    if (a.reps > 0) std::cerr << "tv=" << esf::tv_distance(counts, exact) << '\n';
  }
  if (!a.dump_state.empty()) {
    std::ofstream out(a.dump_state);
    if (!out) throw UsageError("wf-sim: cannot write " + a.dump_state);
    out << population_json(wf.population()).dump() << '\n';
  }
}

struct VerifyArgs {
  int n = 0, k = 0;
  std::string theta;
  bool force = false;
};

/// Exact identity sweeps over every size 1..n; exit status reflects the result.
bool cmd_verify(const VerifyArgs& a, Sink& sink) {
  int k = a.k;
  std::optional<ExactParams> parsed;
  if (!a.theta.empty()) {
    parsed = require_exact(parse_params(a.theta, "--theta"), "--theta", "verify");
    if (k != 0 && k != parsed->k()) throw UsageError("verify: --k disagrees with the length of --theta");
    k = parsed->k();
  }
  if (k == 0) k = 2;
  if (k < 1) throw UsageError("verify: --k must be >= 1");
  if (a.n < 1) throw UsageError("verify: --n must be >= 1");
  require_feasible(multipartition_count(a.n, k), 2e4, "multiple partitions at the top size", a.force);
  std::vector<Rational> defaults;
  for (int l = 1; l <= k; ++l) defaults.emplace_back(l);
  const ExactParams theta = parsed ? *parsed : ExactParams(defaults);
  const ExactParams merged{theta.w()};

  bool all_ok = true;
  auto report = [&](const std::string& name, const esf::CheckReport& r) {
    all_ok = all_ok && r.ok;
    sink.emit(Json{{"check", name},
                   {"n", a.n},
                   {"k", k},
                   {"checked", r.checked},
                   {"status", r.ok ? "pass" : "fail"},
                   {"first_violation", r.violations.empty() ? std::string() : r.violations.front()}});
  };

  auto merge = [](esf::CheckReport& into, const esf::CheckReport& part, const std::string& at) {
    into.checked += part.checked;
    into.ok = into.ok && part.ok;
    for (const auto& v : part.violations) into.violations.push_back(at + " " + v);
  };

  esf::CheckReport mass, reduction, factorized, consistency, unions, vandermonde, conditional, constraint, joint;
  for (int n = 0; n <= a.n; ++n) {
    const std::string at = "n=" + std::to_string(n);
    mass.record(esf::total_mass(n, theta) == 1, at);
    for (const auto& lambda : esf::partitions_of(n))
      reduction.record(esf::refined_esf_pmf(esf::MultiplePartition({lambda}), merged) ==
                           esf::classical_ewens_pmf(lambda, theta.w()),
                       esf::to_string(lambda));
    esf::for_each_multipartition(n, k, [&](const esf::MultiplePartition& p) {
      factorized.record(esf::refined_esf_pmf(p, theta) == esf::refined_esf_pmf_factorized(p, theta), esf::to_string(p));
    });
    vandermonde.record(esf::vandermonde_check(n, theta), at);
    constraint.record(esf::poisson_constraint_sum_check(n, theta), at);
    if (n >= 1) {
      merge(consistency, esf::check_consistency(n, theta), at);
      merge(unions, esf::union_marginal_check(n, theta), at);
      merge(conditional, esf::conditional_identity_check(n, theta), at);
    }
    // Joint law of (K^(1..k)): total mass and first two moments.
    Rational total(0);
    std::vector<Rational> m1(static_cast<std::size_t>(k), Rational(0)), m2(m1);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    std::function<void(int, int)> walk = [&](int l, int left) {
      if (l == k) {
        const Rational pr = esf::joint_k_pmf(n, theta, counts);
        total += pr;
        for (int j = 0; j < k; ++j) {
          const auto J = static_cast<std::size_t>(j);
          m1[J] += pr * counts[J];
          m2[J] += pr * counts[J] * counts[J];
        }
        return;
      }
      for (int c = 0; c <= left; ++c) {
        counts[static_cast<std::size_t>(l)] = c;
        walk(l + 1, left - c);
      }
    };
    walk(0, n);
    joint.record(total == 1, at + " mass");
    for (int l = 0; l < k; ++l) {
      const auto L = static_cast<std::size_t>(l);
      joint.record(m1[L] == esf::expected_k(n, theta, l), at + " mean l=" + std::to_string(l));
      joint.record(m2[L] - m1[L] * m1[L] == esf::var_k(n, theta, l), at + " variance l=" + std::to_string(l));
    }
  }
  report("total_mass", mass);
  report("single_class_reduction", reduction);
  report("factorized_form", factorized);
  report("consistency", consistency);
  report("union_marginal", unions);
  report("vandermonde", vandermonde);
  report("conditional_poisson", conditional);
  report("poisson_constraint_sum", constraint);
  report("joint_k_law", joint);
  return all_ok;
}

Format resolve_format(const std::string& requested, Format fallback) {
  if (requested.empty()) return fallback;
  return requested == "json" ? Format::Json : Format::Csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact evaluation, sampling and simulation for multi-class Ewens sampling formulas"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--format", common.format, "Output format (default: json for samples, csv for tables)")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("-o,--output", common.output, "Write records to this file instead of stdout");

  PmfArgs pmf;
  auto* pmf_cmd = app.add_subcommand("pmf", "Probability of a multiple partition, wreath element or K_n vector");
  pmf_cmd->add_option("--theta", pmf.theta, "Class mutation parameters, e.g. 1,2 or 1/2,3 (decimals use floats)");
  pmf_cmd->add_option("--partition", pmf.partition, "Multiple partition literal, e.g. [[2,1],[1]]");
  pmf_cmd->add_option("--element", pmf.element, "Wreath element as JSON {\"g\":[...],\"s\":[...]}");
  pmf_cmd->add_option("--group", pmf.group, "trivial, z<m>, s3, or a JSON file holding a Cayley table")->capture_default_str();
  pmf_cmd->add_option("--t", pmf.t, "Per-conjugacy-class weights for --element");
  pmf_cmd->add_option("--k-counts", pmf.k_counts, "Distinct-allele counts per class, with --n");
  pmf_cmd->add_option("--n", pmf.n, "Sample size for --k-counts");

  EnumerateArgs en;
  auto* en_cmd = app.add_subcommand("enumerate", "List every multiple partition of n with k classes");
  en_cmd->add_option("--n", en.n, "Sample size")->required();
  en_cmd->add_option("--k", en.k, "Number of classes (implied by --theta)");
  en_cmd->add_option("--theta", en.theta, "Also print probabilities under these parameters");
  en_cmd->add_flag("--force", en.force, "Skip the size guard");

  SampleArgs urn, crp, pd;
  auto* urn_cmd = app.add_subcommand("sample-urn", "Draw multiple partitions from the class-coloured Hoppe urn");
  auto* crp_cmd = app.add_subcommand("sample-crp", "Draw wreath-product elements from the restaurant process");
  auto* pd_cmd = app.add_subcommand("sample-pd", "Draw from the multiple Poisson-Dirichlet law");
  for (auto [cmd, args] : {std::pair{urn_cmd, &urn}, std::pair{crp_cmd, &crp}, std::pair{pd_cmd, &pd}}) {
    cmd->add_option("--reps", args->reps, "Number of replicates")->capture_default_str();
    cmd->add_option("--seed", args->seed, "Base seed; replicate r uses derive_seed(seed, r)")->capture_default_str();
    cmd->add_option("--jobs", args->jobs, "Worker threads (output order is unaffected)")->capture_default_str();
  }
  urn_cmd->add_option("--n", urn.n, "Sample size")->required();
  urn_cmd->add_option("--theta", urn.theta, "Class mutation parameters")->required();
  crp_cmd->add_option("--n", crp.n, "Number of customers")->required();
  crp_cmd->add_option("--group", crp.group, "trivial, z<m>, s3, or a JSON Cayley table file")->capture_default_str();
  crp_cmd->add_option("--t", crp.t, "Per-conjugacy-class weights")->required();
  pd_cmd->add_option("--theta", pd.theta, "Class mutation parameters")->required();
  pd_cmd->add_option("--eps", pd.eps, "Stick-breaking stops once the unbroken mass is below this")->capture_default_str();
  pd_cmd->add_option("--top", pd.top, "Frequencies printed per class (0 = all)")->capture_default_str();
  pd_cmd->add_option("--paintbox", pd.paintbox, "Also draw a paintbox sample of this size");

  StatsArgs st;
  auto* st_cmd = app.add_subcommand("stats-k", "Mean and variance of the number of distinct alleles per class");
  st_cmd->add_option("--n", st.n, "Comma-separated sample sizes")->required();
  st_cmd->add_option("--theta", st.theta, "Fixed class mutation parameters");
  st_cmd->add_option("--beta", st.beta, "Growth exponent: theta_l = alpha_l * n^beta");
  st_cmd->add_option("--alpha", st.alpha, "Growth prefactors, with --beta");
  st_cmd->add_option("--mc", st.mc, "Monte Carlo replicates per n (adds mc_mean, mc_variance)");
  st_cmd->add_option("--seed", st.seed, "Base seed; the i-th n uses derive_seed(seed, i)")->capture_default_str();
  st_cmd->add_flag("--force", st.force, "Skip the cost guard");

  PoissonArgs po;
  auto* po_cmd = app.add_subcommand("poisson-tv", "TV distance between small-count marginals and independent Poissons");
  po_cmd->add_option("--n", po.n, "Comma-separated sample sizes")->required();
  po_cmd->add_option("--m", po.m, "Largest multiplicity kept")->capture_default_str();
  po_cmd->add_option("--theta", po.theta, "Exact class mutation parameters")->required();
  po_cmd->add_flag("--force", po.force, "Skip the size guard");

  WfArgs wfa;
  auto* wf_cmd = app.add_subcommand("wf-sim", "Wright-Fisher population with class-tagged infinitely-many alleles");
  wf_cmd->add_option("--N", wfa.N, "Population has 2N genes")->capture_default_str();
  wf_cmd->add_option("--theta", wfa.theta, "Class mutation parameters; mu_l = theta_l / (4N)")->required();
  wf_cmd->add_option("--gens", wfa.gens, "Burn-in generations (default 20N)");
  wf_cmd->add_option("--thin", wfa.thin, "Generations between samples (default N)");
  wf_cmd->add_option("--sample-size", wfa.sample_size, "Genes drawn per sample")->capture_default_str();
  wf_cmd->add_option("--reps", wfa.reps, "Number of samples")->capture_default_str();
  wf_cmd->add_option("--seed", wfa.seed, "Seed; the chain uses derive_seed(seed, 0)")->capture_default_str();
  wf_cmd->add_option("--dump-state", wfa.dump_state, "Write a JSON snapshot of the final population here");
  wf_cmd->add_flag("--summary", wfa.summary, "Print the empirical law against the exact one instead of samples");
  wf_cmd->add_flag("--force", wfa.force, "Skip the cost guard");

  VerifyArgs ve;
  auto* ve_cmd = app.add_subcommand("verify", "Run the exact identity checks for all sizes up to n");
  ve_cmd->add_option("--n", ve.n, "Largest sample size")->required();
  ve_cmd->add_option("--k", ve.k, "Number of classes (default 2, or implied by --theta)");
  ve_cmd->add_option("--theta", ve.theta, "Exact class mutation parameters (default 1,2,...,k)");
  ve_cmd->add_flag("--force", ve.force, "Skip the size guard");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  std::ofstream file;
  if (!common.output.empty()) {
    file.open(common.output);
    if (!file) {
      std::cerr << "error: cannot write " << common.output << '\n';
      return 2;
    }
  }
  std::ostream& out = common.output.empty() ? std::cout : file;

  try {
    if (*pmf_cmd) {
      Sink sink(out, resolve_format(common.format, Format::Json));
      cmd_pmf(pmf, sink);
    } else if (*en_cmd) {
      Sink sink(out, resolve_format(common.format, Format::Json));
      cmd_enumerate(en, sink);
    } else if (*urn_cmd) {
      Sink sink(out, resolve_format(common.format, Format::Json));
      cmd_sample_urn(urn, sink);
    } else if (*crp_cmd) {
      Sink sink(out, resolve_format(common.format, Format::Json));
      cmd_sample_crp(crp, sink);
    } else if (*pd_cmd) {
      Sink sink(out, resolve_format(common.format, Format::Json));
      cmd_sample_pd(pd, sink);
    } else if (*st_cmd) {
      Sink sink(out, resolve_format(common.format, Format::Csv));
      cmd_stats_k(st, sink);
    } else if (*po_cmd) {
      Sink sink(out, resolve_format(common.format, Format::Csv));
      cmd_poisson_tv(po, sink);
    } else if (*wf_cmd) {
      Sink sink(out, resolve_format(common.format, wfa.summary ? Format::Csv : Format::Json));
      cmd_wf_sim(wfa, sink);
    } else if (*ve_cmd) {
      Sink sink(out, resolve_format(common.format, Format::Csv));
      return cmd_verify(ve, sink) ? 0 : 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const esf::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
