// sfield command-line front end. Talks to the library only through sfield.h.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sfield/sfield.h"

namespace {

enum ExitCode : int {
  exit_ok = 0,
  exit_internal = 1,
  exit_usage = 2,
  exit_parse = 3,
  exit_config = 4,
  exit_numerical = 5,
  exit_io = 6,
  exit_input = 7,
};

int exit_for(sfield_status s) {
  switch (s) {
    case SFIELD_OK: return exit_ok;
    case SFIELD_ERR_PARSE: return exit_parse;
    case SFIELD_ERR_INVALID_CONFIG:
    case SFIELD_ERR_ARGUMENT: return exit_config;
    case SFIELD_ERR_NUMERICAL:
    case SFIELD_ERR_DOMAIN: return exit_numerical;
    case SFIELD_ERR_IO: return exit_io;
    case SFIELD_ERR_INVALID_INPUT: return exit_input;
    default: return exit_internal;
  }
}

struct Failure {
  int code;
};

void check(sfield_status s) {
  if (s == SFIELD_OK) return;
  std::fprintf(stderr, "sfield: %s: %s\n", sfield_status_string(s), sfield_last_error());
  throw Failure{exit_for(s)};
}

void usage_error(const std::string& msg) {
  std::fprintf(stderr, "sfield: %s\n", msg.c_str());
  throw Failure{exit_config};
}

std::vector<size_t> parse_dims(const std::string& text) {
  std::vector<size_t> dims;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',' || c == 'x' || c == 'X') {
      if (cur.empty()) usage_error("malformed --dims '" + text + "'");
      try {
        std::size_t used = 0;
        const long v = std::stol(cur, &used);
        if (used != cur.size() || v <= 0) throw std::invalid_argument(cur);
        dims.push_back(static_cast<size_t>(v));
      } catch (const std::exception&) {
        usage_error("malformed --dims '" + text + "'");
      }
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (dims.empty() || dims.size() > 3) usage_error("--dims takes one to three extents");
  return dims;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) {
    std::fprintf(stderr, "sfield: cannot open '%s' for writing\n", out.c_str());
    throw Failure{exit_io};
  }
  f << text;
  if (!f) {
    std::fprintf(stderr, "sfield: write to '%s' failed\n", out.c_str());
    throw Failure{exit_io};
  }
}

std::string take(char* s) {
  std::string r = s ? s : "";
  sfield_free_string(s);
  return r;
}

struct SampleArgs {
  std::string input;
  std::string dims;
  std::string basis;
  size_t k = 0;
};

struct TuningArgs {
  std::vector<double> q;
  size_t grid_t = 0;
  long l = -1;
  long l_prime = -1;
  size_t p = 0;
  double var_threshold = 0.85;
  double weight_threshold = 0.95;
  std::string weight = "bartlett";
  bool strict_boundary = false;
  bool strict_variance = false;
};

void add_sample_flags(CLI::App* cmd, SampleArgs& a) {
  cmd->add_option("input,--in", a.input, "sample CSV")->required();
  cmd->add_option("--dims", a.dims, "grid extents, e.g. 25x25 (default: from the CSV header)");
  cmd->add_option("--basis", a.basis, "fourier or bspline (default: from the CSV header)")
      ->check(CLI::IsMember({"fourier", "bspline"}));
  cmd->add_option("--k", a.k, "basis dimension (default: from the CSV)")->check(CLI::PositiveNumber);
}

void add_tuning_flags(CLI::App* cmd, TuningArgs& t) {
  cmd->add_option("--q", t.q, "Bartlett window per axis (default sqrt(n_i))")->delimiter(',');
  cmd->add_option("--grid-t", t.grid_t, "frequency points per axis (odd)");
  cmd->add_option("--l", t.l, "filter truncation lag L")->check(CLI::NonNegativeNumber);
  cmd->add_option("--l-prime", t.l_prime, "score autocovariance range L'")->check(CLI::NonNegativeNumber);
  cmd->add_option("--p", t.p, "number of SFPC levels")->check(CLI::PositiveNumber);
  cmd->add_option("--var-threshold", t.var_threshold, "variance share used to choose p")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--weight-threshold", t.weight_threshold, "filter weight share used to choose L")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--weight", t.weight, "lag window: bartlett or bartlett-product")
      ->check(CLI::IsMember({"bartlett", "bartlett-product"}));
  cmd->add_flag("--strict-boundary", t.strict_boundary, "drop scores whose filter reaches past the grid");
  cmd->add_flag("--strict-variance", t.strict_variance, "fail instead of flooring a non-positive varS");
}

sfield_test_options to_options(const TuningArgs& t) {
  sfield_test_options o;
  sfield_test_options_init(&o);
  if (t.q.size() > 3) usage_error("--q takes at most three values");
  o.nq = t.q.size();
  for (size_t i = 0; i < t.q.size(); ++i) o.q[i] = t.q[i];
  o.grid_points = t.grid_t;
  o.truncation = t.l;
  o.score_max_lag = t.l_prime;
  o.levels = t.p;
  o.var_threshold = t.var_threshold;
  o.weight_threshold = t.weight_threshold;
  o.weight = t.weight == "bartlett-product" ? SFIELD_WEIGHT_BARTLETT_PRODUCT : SFIELD_WEIGHT_BARTLETT;
  o.strict_boundary = t.strict_boundary;
  o.strict_variance = t.strict_variance;
  return o;
}

struct Sample {
  sfield_sample* ptr = nullptr;
  ~Sample() { sfield_sample_free(ptr); }
};

void load(const SampleArgs& a, Sample& s) {
  std::vector<size_t> dims;
  if (!a.dims.empty()) dims = parse_dims(a.dims);
  sfield_basis_kind basis = SFIELD_BASIS_FROM_FILE;
  if (a.basis == "fourier") basis = SFIELD_BASIS_FOURIER;
  if (a.basis == "bspline") basis = SFIELD_BASIS_BSPLINE;
  check(sfield_sample_read_csv(a.input.c_str(), dims.empty() ? nullptr : dims.data(), dims.size(), basis, a.k,
                               &s.ptr));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normality test for spatially indexed functional data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sfield_version());
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker thread cap (0 = all cores)")->check(CLI::NonNegativeNumber);

  std::string out;
  uint64_t seed = 20240917;

  auto* sim = app.add_subcommand("simulate", "simulate a SAR functional field and write it as CSV");
  std::string sim_dims = "25x25";
  std::string dist = "gaussian";
  size_t sim_k = 15;
  size_t burnin = 50;
  sim->add_option("--dims", sim_dims, "grid extents n1xn2")->capture_default_str();
  sim->add_option("--k", sim_k, "Fourier basis dimension")->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--dist", dist, "innovation law: gaussian or su(tau,kappa)")->capture_default_str();
  sim->add_option("--burnin", burnin, "discarded border width")->capture_default_str();
  sim->add_option("--seed", seed, "random seed")->capture_default_str();
  sim->add_option("--out", out, "output CSV")->required();

  auto* test = app.add_subcommand("test", "run the normality test on a sample CSV");
  SampleArgs test_sample;
  TuningArgs test_tuning;
  std::string format = "table";
  double alpha = 0.05;
  add_sample_flags(test, test_sample);
  add_tuning_flags(test, test_tuning);
  test->add_option("--format", format, "table, csv or jsonl")->check(CLI::IsMember({"table", "csv", "jsonl"}));
  test->add_option("--alpha", alpha, "significance level for the decision line")->check(CLI::Range(0.0, 1.0));
  test->add_option("--out", out, "write the report here instead of stdout");

  auto* mc = app.add_subcommand("mc-study", "Monte Carlo size/power table");
  std::string mc_config;
  std::optional<uint64_t> mc_seed;
  std::optional<double> mc_alpha;
  size_t mc_reps = 0;
  mc->add_option("config", mc_config, "study config (key=value lines)")->required()->check(CLI::ExistingFile);
  mc->add_option("--seed", mc_seed, "override the config seed");
  mc->add_option("--alpha", mc_alpha, "override the config level")->check(CLI::Range(0.0, 1.0));
  mc->add_option("--replications", mc_reps, "override the replication count");
  mc->add_option("--out", out, "output CSV (default stdout)");

  auto* spec = app.add_subcommand("spectrum", "dump eigenvalue curves of the spectral density estimate");
  SampleArgs spec_sample;
  TuningArgs spec_tuning;
  add_sample_flags(spec, spec_sample);
  add_tuning_flags(spec, spec_tuning);
  spec->add_option("--out", out, "output CSV (default stdout)");

  auto* filt = app.add_subcommand("filters", "dump the SFPC filter bank");
  SampleArgs filt_sample;
  TuningArgs filt_tuning;
  add_sample_flags(filt, filt_sample);
  add_tuning_flags(filt, filt_tuning);
  filt->add_option("--out", out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  sfield_set_threads(threads);

  try {
    if (*sim) {
      const auto dims = parse_dims(sim_dims);
      if (dims.size() != 2) usage_error("simulate supports two-dimensional grids only");
      sfield_sim_options o;
      sfield_sim_options_init(&o);
      o.dims[0] = dims[0];
      o.dims[1] = dims[1];
      o.k = sim_k;
      o.distribution = dist.c_str();
      o.burnin = burnin;
      o.seed = seed;
      Sample s;
      check(sfield_sample_simulate(&o, &s.ptr));
      check(sfield_sample_write_csv(s.ptr, out.c_str()));
    } else if (*test) {
      Sample s;
      load(test_sample, s);
      const auto opts = to_options(test_tuning);
      sfield_report* report = nullptr;
      check(sfield_run_test(s.ptr, &opts, &report));
      const sfield_format fmt = format == "csv"     ? SFIELD_FORMAT_CSV
                                : format == "jsonl" ? SFIELD_FORMAT_JSONL
                                                    : SFIELD_FORMAT_TABLE;
      char* text = nullptr;
      const sfield_status st = sfield_report_render(report, fmt, &text);
      std::string body = take(text);
      if (fmt == SFIELD_FORMAT_TABLE && st == SFIELD_OK) {
        char line[128];
        std::snprintf(line, sizeof line, "decision at alpha=%g: %s\n", alpha,
                      sfield_report_pvalue(report) < alpha ? "reject normality" : "do not reject");
        body += line;
      }
      sfield_report_free(report);
      check(st);
      emit(body, out);
    } else if (*mc) {
      sfield_mc_overrides ov{};
      if (mc_seed) {
        ov.has_seed = 1;
        ov.seed = *mc_seed;
      }
      ov.alpha = mc_alpha.value_or(0.0);
      ov.replications = mc_reps;
      sfield_mc_table* table = nullptr;
      check(sfield_mc_study_run_file(mc_config.c_str(), &ov, &table));
      char* text = nullptr;
      const sfield_status st = sfield_mc_table_render_csv(table, &text);
      sfield_mc_table_free(table);
      const std::string body = take(text);
      check(st);
      emit(body, out);
    } else if (*spec || *filt) {
      const bool is_spec = spec->parsed();
      Sample s;
      load(is_spec ? spec_sample : filt_sample, s);
      const auto opts = to_options(is_spec ? spec_tuning : filt_tuning);
      char* text = nullptr;
      check(is_spec ? sfield_spectrum_csv(s.ptr, &opts, &text) : sfield_filters_csv(s.ptr, &opts, &text));
      emit(take(text), out);
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return exit_ok;
}
