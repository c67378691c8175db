// tdelay: sample | exact | charfunc | verify
// Exit status: 0 success, 1 verification failure, 2 usage error, 3 runtime error.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tdelay/charfunc.hpp"
#include "tdelay/errors.hpp"
#include "tdelay/montecarlo.hpp"
#include "tdelay/oracles.hpp"
#include "tdelay/stats.hpp"
#include "tdelay/verify.hpp"

using namespace tdelay;
using nlohmann::json;

namespace {

constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int beta = 2;
  int channels = 1;
  std::optional<double> g;
  std::optional<double> transmission;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  int workers = 0;
  std::string bins = "log:1e-6:1e6:240";
  std::string grid;
  std::string output;
  std::string summary;
  std::string observable = "wigner";
  std::string rescale = "none";
  std::string dump;
  std::uint64_t dump_cap = 1000000;
  std::string quantity;
  std::optional<double> alpha;
  std::vector<double> p;
  bool perfect = false;
  std::string suite = "all";
  bool raw_g = false;
};

CouplingSpec coupling_of(const RunConfig& c) {
  if (c.g) return CouplingSpec::from_g(*c.g);
  if (c.transmission) return CouplingSpec::from_transmission(*c.transmission);
  return CouplingSpec::from_g(1.0);
}

int resolve_worker_count(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("TDELAY_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("TDELAY_WORKERS must be a positive integer, got '") + env + "'");
  }
  return 0;
}

// Writes to the named file, or to the fallback stream when the name is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
      out_ = file_.get();
    }
  }
  std::ostream& operator*() { return *out_; }
  void close() {
    out_->flush();
    if (file_ && !*file_) throw std::runtime_error("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

json coupling_json(const CouplingSpec& c) {
  return {{"g", c.g()},
          {"transmission", c.transmission()},
          {"gbar", c.gbar()},
          {"input", c.input_value()},
          {"input_kind", c.given_as_transmission() ? "T" : "g"}};
}

// ------------------------------------------------------------------- sample
int cmd_sample(const RunConfig& cfg) {
  SampleRequest req;
  try {
    req.observable = observable_from_string(cfg.observable);
    req.beta = cfg.beta;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  req.channels = cfg.channels;
  req.coupling = coupling_of(cfg);
  req.use_input_g = cfg.raw_g;
  req.samples = cfg.samples;
  req.seed = cfg.seed;
  req.bins = cfg.bins;
  if (cfg.rescale != "none") {
    TimeDelayBatch probe{delay_kind(req.observable), req.beta, req.channels, req.coupling.g(), {}};
    if (cfg.raw_g && !req.coupling.given_as_transmission()) probe.g = req.coupling.input_value();
    try {
      req.histogram_scale = rescale_factor(probe, cfg.rescale == "t" ? RescaleMode::t : RescaleMode::s);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
  const SampleResult r = run_parallel(req, resolve_worker_count(cfg.workers));

  Sink csv(cfg.output, std::cout);
  *csv << "# observable=" << to_string(req.observable) << " beta=" << req.beta << " channels=" << req.channels
       << " g=" << req.coupling.g() << " input=" << req.coupling.input_value()
       << (req.coupling.given_as_transmission() ? " (T)" : " (g)") << " samples=" << req.samples
       << " seed=" << req.seed << " rescale=" << cfg.rescale << "\n";
  *csv << "bin_lo,bin_hi,count,pdf,cdf,ccdf\n" << std::setprecision(17);
  for (const HistogramRow& row : r.histogram.table())
    *csv << row.lo << ',' << row.hi << ',' << row.count << ',' << row.pdf << ',' << row.cdf << ',' << row.ccdf << '\n';
  csv.close();

  json summary{{"observable", to_string(req.observable)},
               {"beta", req.beta},
               {"channels", req.channels},
               {"coupling", coupling_json(req.coupling)},
               {"samples", req.samples},
               {"values", r.batch.values.size()},
               {"seed", req.seed},
               {"batches", r.batches},
               {"rescale", cfg.rescale},
               {"histogram_scale", req.histogram_scale},
               {"counters", {{"underflow", r.histogram.underflow()}, {"overflow", r.histogram.overflow()}, {"rejected", 0}}}};
  const std::vector<double>& v = r.batch.values;
  if (v.size() >= 100) {
    const Summary s = summarize(v, cfg.seed);
    summary["mean"] = s.mean;
    summary["variance"] = s.variance;
    summary["se_mean"] = s.se_mean;
    summary["se_variance"] = s.se_variance;
  } else {
    MomentAccumulator m;
    for (double x : v) m.add(x);
    summary["mean"] = m.mean;
    summary["variance"] = m.variance();
    summary["se_mean"] = nullptr;
    summary["se_variance"] = nullptr;
  }
  if (!cfg.dump.empty()) {
    Sink dump(cfg.dump, std::cout);
    const std::size_t count = std::min<std::size_t>(v.size(), cfg.dump_cap);
    *dump << std::setprecision(17);
    for (std::size_t i = 0; i < count; ++i) *dump << v[i] << '\n';
    dump.close();
    summary["dumped"] = count;
    summary["dump_truncated"] = count < v.size();
  }
  Sink sum(cfg.summary, std::cerr);
  *sum << summary.dump(2) << '\n';
  sum.close();
  return 0;
}

// -------------------------------------------------------------------- exact
int cmd_exact(const RunConfig& cfg) {
  const std::string& q = cfg.quantity;
  const CouplingSpec c = coupling_of(cfg);
  const int beta = cfg.beta;
  const int n = cfg.channels;
  auto require_beta2 = [&](const std::string& why) {
    if (beta != 2) throw UsageError("quantity '" + q + "' is available for beta = 2 only: " + why);
  };
  auto require_grid = [&]() {
    if (cfg.grid.empty()) throw UsageError("quantity '" + q + "' needs --grid (log:lo:hi:count or lin:lo:hi:count)");
    return parse_grid_spec(cfg.grid);
  };
  try {
    (void)SymmetryClass(beta, BetaContext::formula);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }

  std::vector<std::pair<std::string, double>> rows;
  auto grid_rows = [&](const std::function<double(double)>& f) {
    for (double x : require_grid()) {
      std::ostringstream os;
      os << std::setprecision(17) << x;
      rows.emplace_back(os.str(), f(x));
    }
  };
  const double gbar = c.gbar();
  if (q == "var-wigner" || q == "var-partial" || q == "cov-partial") {
    const double t = c.transmission();
    double value = 0.0;
    if (c.perfect()) {
      value = q == "var-wigner" ? var_wigner_perfect(beta, n) : q == "var-partial" ? var_partial_perfect(beta, n)
                                                                                 : cov_partial_perfect(beta, n);
    } else {
      require_beta2("the arbitrary-coupling moment formulas are derived for broken time-reversal symmetry");
      value = q == "var-wigner" ? var_wigner_unitary(n, t) : q == "var-partial" ? var_partial_unitary(n, t)
                                                                               : cov_partial_unitary(n, t);
    }
    std::ostringstream os;
    os << std::setprecision(17) << t;
    rows.emplace_back(os.str(), value);
  } else if (q == "pdf-partial") {
    grid_rows([&](double tau) { return pdf_partial(beta, n, gbar, tau); });
  } else if (q == "pdf-partial-weak") {
    grid_rows([&](double t) { return pdf_partial_weak(beta, n, t); });
  } else if (q == "pdf-partial-exact") {
    require_beta2("the derivative formula exists only for the unitary class");
    grid_rows([&](double tau) { return pdf_partial_unitary_exact(n, gbar, tau); });
  } else if (q == "pdf-proper-exact") {
    require_beta2("the exact proper-time marginal is known only for the unitary class");
    grid_rows([&](double tau) { return pdf_proper_unitary_exact(n, gbar, tau); });
  } else if (q == "pdf-perfect") {
    grid_rows([&](double tau) { return pdf_partial_perfect(beta, n, tau); });
  } else if (q == "width-pdf") {
    grid_rows([&](double y) { return resonance_width_pdf(beta, n, y); });
  } else if (q == "tail-coeffs") {
    const TailCoefficients tc = tail_coefficients(beta, n);
    rows = {{"a", tc.a}, {"b", tc.b}, {"c_tilde", tc.c_tilde}};
    if (tc.c) rows.emplace_back("c", *tc.c);
  } else if (q == "cutoffs") {
    const Cutoffs co = cutoffs(beta, n, gbar);
    rows = {{"t_low", co.t_low}, {"t_low_partial", co.t_low_partial}, {"t_up", co.t_up}};
    if (!c.perfect()) rows.emplace_back("tau_star", wigner_crossover(n, c.g()));
  } else if (q == "selberg") {
    const double alpha = cfg.alpha.value_or(n);
    rows = {{std::to_string(n), selberg_cauchy_norm(n, alpha, beta)}};
  } else {
    throw UsageError("unknown quantity '" + q +
                     "' (var-wigner, var-partial, cov-partial, pdf-partial, pdf-partial-weak, pdf-partial-exact, "
                     "pdf-proper-exact, pdf-perfect, tail-coeffs, cutoffs, width-pdf, selberg)");
  }

  Sink out(cfg.output, std::cout);
  *out << "# quantity=" << q << " beta=" << beta << " channels=" << n << " g=" << c.g() << " T=" << c.transmission()
       << " gbar=" << gbar << "\n";
  *out << "x,value\n" << std::setprecision(17);
  for (const auto& [x, v] : rows) *out << x << ',' << v << '\n';
  out.close();
  return 0;
}

// ----------------------------------------------------------------- charfunc
int cmd_charfunc(const RunConfig& cfg) {
  if (cfg.beta != 2) throw UsageError("charfunc supports beta = 2 only");
  if (cfg.p.empty()) throw UsageError("charfunc needs --p");
  const CouplingSpec c = coupling_of(cfg);
  std::vector<ZEstimate> z;
  if (cfg.perfect) {
    for (double p : cfg.p) {
      ZEstimate e;
      e.p = p;
      e.z_ratio = z_perfect_hankel(cfg.channels, p);
      e.method = "hankel";
      z.push_back(e);
    }
  } else {
    const double g = cfg.raw_g && !c.given_as_transmission() ? c.input_value() : c.g();
    z = z_ratio_mc(cfg.channels, g, cfg.p, cfg.samples, cfg.seed, resolve_worker_count(cfg.workers));
  }
  json recs = json::array();
  for (const ZEstimate& e : z)
    recs.push_back({{"p", e.p},
                    {"z_ratio", e.z_ratio},
                    {"se", e.se},
                    {"method", e.method},
                    {"samples", e.samples},
                    {"rejected", e.rejected},
                    {"resampled", e.resampled}});
  json doc{{"channels", cfg.channels}, {"coupling", coupling_json(c)}, {"seed", cfg.seed}, {"records", recs}};
  Sink out(cfg.output, std::cout);
  *out << doc.dump(2) << '\n';
  out.close();
  return 0;
}

// ------------------------------------------------------------------- verify
int cmd_verify(const RunConfig& cfg) {
  if (!known_suite(cfg.suite)) throw UsageError("unknown suite '" + cfg.suite + "' (core, tails, charfunc, all)");
  VerifyOptions opt;
  opt.seed = cfg.seed;
  opt.workers = resolve_worker_count(cfg.workers);
  opt.log = &std::cerr;
  const VerificationReport rep = run_suite(cfg.suite, opt);
  Sink out(cfg.output, std::cout);
  *out << rep.to_json().dump(2) << '\n';
  out.close();
  return rep.pass() ? 0 : kExitVerify;
}

void add_physics(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--beta", cfg.beta, "Dyson index (1 or 2; 4 for formulas)");
  sub->add_option("--channels,-N", cfg.channels, "channel count N")->check(CLI::PositiveNumber);
  auto* g = sub->add_option("--coupling,-g", cfg.g, "coupling constant g > 0 (g and 1/g are equivalent)");
  auto* t = sub->add_option("--transmission,-T", cfg.transmission, "transmission coefficient T in (0, 1]");
  g->excludes(t);
  t->excludes(g);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-delay statistics of chaotic cavities: sampling, exact densities and checks"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* sample = app.add_subcommand("sample", "Monte Carlo histogram (CSV) and summary (JSON)");
  add_physics(sample, cfg);
  sample->add_option("--observable", cfg.observable, "wigner | proper | partial | partial-matrix | heuristic");
  sample->add_option("--samples,-M", cfg.samples, "number of draws")->check(CLI::PositiveNumber);
  sample->add_option("--seed", cfg.seed, "64-bit seed");
  sample->add_option("--workers", cfg.workers, "threads (default: TDELAY_WORKERS or all cores)");
  sample->add_option("--bins", cfg.bins, "log:lo:hi:count or lin:lo:hi:count");
  sample->add_option("--rescale", cfg.rescale, "none | t | s (histogram variable)")
      ->check(CLI::IsMember({"none", "t", "s"}));
  sample->add_option("--output,-o", cfg.output, "CSV file (default stdout)");
  sample->add_option("--summary", cfg.summary, "summary JSON file (default stderr)");
  sample->add_option("--dump", cfg.dump, "write raw values to this file");
  sample->add_option("--dump-cap", cfg.dump_cap, "maximum number of dumped values");
  sample->add_flag("--raw-g", cfg.raw_g, "Wigner only: draw at the given g instead of min(g, 1/g)");

  auto* exact = app.add_subcommand("exact", "exact formulas on a grid (CSV x,value)");
  add_physics(exact, cfg);
  exact->add_option("--quantity", cfg.quantity, "quantity name")->required();
  exact->add_option("--grid", cfg.grid, "log:lo:hi:count or lin:lo:hi:count");
  exact->add_option("--alpha", cfg.alpha, "selberg: exponent alpha (default N)");
  exact->add_option("--output,-o", cfg.output, "CSV file (default stdout)");

  auto* charfunc = app.add_subcommand("charfunc", "Z(p)/Z(0) of the rescaled Wigner time (beta = 2)");
  add_physics(charfunc, cfg);
  charfunc->add_option("--p", cfg.p, "comma-separated p values")->delimiter(',')->required();
  charfunc->add_option("--samples,-M", cfg.samples, "Monte Carlo draws")->check(CLI::PositiveNumber);
  charfunc->add_option("--seed", cfg.seed, "64-bit seed");
  charfunc->add_option("--workers", cfg.workers, "threads");
  charfunc->add_flag("--perfect", cfg.perfect, "perfect coupling via the Hankel determinant");
  charfunc->add_flag("--raw-g", cfg.raw_g, "use the given g instead of min(g, 1/g)");
  charfunc->add_option("--output,-o", cfg.output, "JSON file (default stdout)");

  auto* verify = app.add_subcommand("verify", "run acceptance checks (JSON report)");
  verify->add_option("--suite", cfg.suite, "core | tails | charfunc | all");
  verify->add_option("--seed", cfg.seed, "64-bit seed");
  verify->add_option("--workers", cfg.workers, "threads");
  verify->add_option("--output,-o", cfg.output, "report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sample) return cmd_sample(cfg);
    if (*exact) return cmd_exact(cfg);
    if (*charfunc) return cmd_charfunc(cfg);
    if (*verify) return cmd_verify(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
