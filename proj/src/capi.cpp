#include "sfield/sfield.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "sfield/csv_io.hpp"
#include "sfield/error.hpp"
#include "sfield/parallel.hpp"
#include "sfield/pipeline.hpp"
#include "sfield/simulate.hpp"

struct sfield_sample {
  sfield::FunctionalGridSample value;
};

struct sfield_report {
  sfield::NormalityTestReport value;
};

struct sfield_mc_table {
  sfield::McStudyTable value;
};

namespace {

thread_local std::string t_last_error;
thread_local std::size_t t_last_row = 0;

sfield_status map_kind(sfield::ErrorKind kind) {
  switch (kind) {
    case sfield::ErrorKind::invalid_input: return SFIELD_ERR_INVALID_INPUT;
    case sfield::ErrorKind::invalid_config: return SFIELD_ERR_INVALID_CONFIG;
    case sfield::ErrorKind::parse: return SFIELD_ERR_PARSE;
    case sfield::ErrorKind::numerical: return SFIELD_ERR_NUMERICAL;
    case sfield::ErrorKind::domain: return SFIELD_ERR_DOMAIN;
    case sfield::ErrorKind::io: return SFIELD_ERR_IO;
  }
  return SFIELD_ERR_INTERNAL;
}

template <typename F>
sfield_status guarded(F&& f) {
  t_last_error.clear();
  t_last_row = 0;
  try {
    f();
    return SFIELD_OK;
  } catch (const sfield::ParseError& e) {
    t_last_error = e.what();
    t_last_row = e.row();
    return SFIELD_ERR_PARSE;
  } catch (const sfield::Error& e) {
    t_last_error = e.what();
    return map_kind(e.kind());
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
  } catch (const std::exception& e) {
    t_last_error = e.what();
  } catch (...) {
    t_last_error = "unknown failure";
  }
  return SFIELD_ERR_INTERNAL;
}

sfield_status bad_argument(const char* what) {
  t_last_error = what;
  t_last_row = 0;
  return SFIELD_ERR_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sfield::TestOptions to_options(const sfield_test_options* o) {
  sfield::TestOptions t;
  if (o == nullptr) return t;
  if (o->nq > 3) sfield::fail(sfield::ErrorKind::invalid_config, "at most three window sizes");
  if (o->nq > 0) t.q = std::vector<double>(o->q, o->q + o->nq);
  if (o->grid_points > 0) t.grid_points = o->grid_points;
  if (o->truncation >= 0) t.truncation = o->truncation;
  if (o->score_max_lag >= 0) t.score_max_lag = o->score_max_lag;
  if (o->levels > 0) t.levels = o->levels;
  t.var_threshold = o->var_threshold;
  t.weight_threshold = o->weight_threshold;
  t.weight_kind = o->weight == SFIELD_WEIGHT_BARTLETT_PRODUCT ? sfield::WeightKind::bartlett_product
                                                                : sfield::WeightKind::bartlett;
  t.strict_boundary = o->strict_boundary != 0;
  t.strict_variance = o->strict_variance != 0;
  return t;
}

sfield::BasisSpec make_basis(sfield_basis_kind kind, std::size_t k) {
  return kind == SFIELD_BASIS_BSPLINE ? sfield::BasisSpec::bspline(k) : sfield::BasisSpec::fourier(k);
}

void apply_overrides(sfield::McStudyConfig& cfg, const sfield_mc_overrides* o) {
  if (o == nullptr) return;
  if (o->has_seed) cfg.seed = o->seed;
  if (o->alpha > 0.0) {
    if (!(o->alpha < 1.0)) sfield::fail(sfield::ErrorKind::invalid_config, "alpha must lie in (0,1)");
    cfg.alpha = o->alpha;
  }
  if (o->replications > 0) cfg.replications = o->replications;
}

}  // namespace

extern "C" {

const char* sfield_version(void) { return "1.0.0"; }

const char* sfield_status_string(sfield_status status) {
  switch (status) {
    case SFIELD_OK: return "ok";
    case SFIELD_ERR_ARGUMENT: return "invalid argument";
    case SFIELD_ERR_INVALID_INPUT: return "invalid input";
    case SFIELD_ERR_INVALID_CONFIG: return "invalid configuration";
    case SFIELD_ERR_PARSE: return "parse error";
    case SFIELD_ERR_NUMERICAL: return "numerical failure";
    case SFIELD_ERR_DOMAIN: return "domain error";
    case SFIELD_ERR_IO: return "i/o error";
    case SFIELD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* sfield_last_error(void) { return t_last_error.c_str(); }
size_t sfield_last_error_row(void) { return t_last_row; }
void sfield_free_string(char* s) { std::free(s); }
void sfield_set_threads(unsigned threads) { sfield::set_max_threads(threads); }

sfield_status sfield_chisq_sf(double x, int df, double* out) {
  if (out == nullptr) return bad_argument("null output pointer");
  return guarded([&] { *out = sfield::chisq_sf(x, df); });
}

sfield_status sfield_sample_create(const size_t* dims, size_t ndims, const double* coeffs, size_t k,
                                   sfield_basis_kind basis, sfield_sample** out) {
  if (dims == nullptr || coeffs == nullptr || out == nullptr) return bad_argument("null pointer argument");
  *out = nullptr;
  return guarded([&] {
    sfield::Dims d(dims, dims + ndims);
    sfield::validate_dims(d);
    const std::size_t n = sfield::grid_size(d);
    sfield::RealMatrix m(n, k);
    std::copy(coeffs, coeffs + n * k, m.data().begin());
    *out = new sfield_sample{sfield::FunctionalGridSample(d, std::move(m), make_basis(basis, k))};
  });
}

sfield_status sfield_sample_read_csv(const char* path, const size_t* dims, size_t ndims, sfield_basis_kind basis,
                                     size_t k, sfield_sample** out) {
  if (path == nullptr || out == nullptr) return bad_argument("null pointer argument");
  *out = nullptr;
  return guarded([&] {
    std::optional<sfield::Dims> d;
    if (dims != nullptr && ndims > 0) d = sfield::Dims(dims, dims + ndims);
    std::optional<sfield::BasisChoice> choice;
    if (basis != SFIELD_BASIS_FROM_FILE || k > 0) {
      sfield::BasisChoice c;
      c.kind = basis == SFIELD_BASIS_BSPLINE ? sfield::BasisKind::bspline : sfield::BasisKind::fourier;
      c.dimension = k;
      choice = c;
    }
    *out = new sfield_sample{sfield::ingest_csv(path, d, choice)};
  });
}

sfield_status sfield_sample_write_csv(const sfield_sample* sample, const char* path) {
  if (sample == nullptr || path == nullptr) return bad_argument("null pointer argument");
  return guarded([&] { sfield::write_sample_csv(sample->value, std::string(path)); });
}

size_t sfield_sample_ndims(const sfield_sample* s) { return s ? s->value.dims().size() : 0; }
size_t sfield_sample_extent(const sfield_sample* s, size_t axis) {
  return s && axis < s->value.dims().size() ? s->value.dims()[axis] : 0;
}
size_t sfield_sample_size(const sfield_sample* s) { return s ? s->value.size() : 0; }
size_t sfield_sample_basis_dimension(const sfield_sample* s) { return s ? s->value.dimension() : 0; }

sfield_status sfield_sample_coeffs(const sfield_sample* sample, double* out, size_t count) {
  if (sample == nullptr || out == nullptr) return bad_argument("null pointer argument");
  const auto data = sample->value.coeffs().data();
  if (count < data.size()) return bad_argument("output buffer too small");
  std::copy(data.begin(), data.end(), out);
  return SFIELD_OK;
}

void sfield_sample_free(sfield_sample* sample) { delete sample; }

void sfield_sim_options_init(sfield_sim_options* o) {
  if (o == nullptr) return;
  o->dims[0] = 25;
  o->dims[1] = 25;
  o->k = 15;
  o->distribution = "gaussian";
  o->burnin = 50;
  o->seed = 20240917;
  o->norm_a = 0.6;
  o->norm_b = 0.35;
}

sfield_status sfield_sample_simulate(const sfield_sim_options* o, sfield_sample** out) {
  if (o == nullptr || out == nullptr) return bad_argument("null pointer argument");
  *out = nullptr;
  return guarded([&] {
    const auto innovation = sfield::InnovationSpec::parse(o->distribution ? o->distribution : "gaussian");
    const auto ops = sfield::generate_operators(sfield::derive_seed(o->seed, 0xa11ce), o->k, o->norm_a, o->norm_b);
    *out = new sfield_sample{sfield::simulate_sar({o->dims[0], o->dims[1]}, ops, innovation, o->burnin,
                                                  sfield::derive_seed(o->seed, 1, 1, 1))};
  });
}

void sfield_test_options_init(sfield_test_options* o) {
  if (o == nullptr) return;
  *o = sfield_test_options{};
  o->truncation = -1;
  o->score_max_lag = -1;
  o->var_threshold = 0.85;
  o->weight_threshold = 0.95;
  o->weight = SFIELD_WEIGHT_BARTLETT;
}

sfield_status sfield_run_test(const sfield_sample* sample, const sfield_test_options* options, sfield_report** out) {
  if (sample == nullptr || out == nullptr) return bad_argument("null pointer argument");
  *out = nullptr;
  return guarded([&] { *out = new sfield_report{sfield::run_test_pipeline(sample->value, to_options(options))}; });
}

size_t sfield_report_levels(const sfield_report* r) { return r ? r->value.levels.size() : 0; }

sfield_status sfield_report_level(const sfield_report* r, size_t index, sfield_level_stats* out) {
  if (r == nullptr || out == nullptr) return bad_argument("null pointer argument");
  if (index >= r->value.levels.size()) return bad_argument("level index out of range");
  const auto& l = r->value.levels[index];
  *out = sfield_level_stats{l.level, l.skew, l.kurt, l.var_s, l.var_k, l.j, l.var_s_floored ? 1 : 0};
  return SFIELD_OK;
}

double sfield_report_statistic(const sfield_report* r) { return r ? r->value.statistic : 0.0; }
int sfield_report_df(const sfield_report* r) { return r ? r->value.df : 0; }
double sfield_report_pvalue(const sfield_report* r) { return r ? r->value.p_value : 1.0; }

sfield_status sfield_report_tuning(const sfield_report* r, sfield_tuning* out) {
  if (r == nullptr || out == nullptr) return bad_argument("null pointer argument");
  const auto& t = r->value.tuning;
  *out = sfield_tuning{};
  out->nq = std::min<std::size_t>(t.q.size(), 3);
  for (std::size_t i = 0; i < out->nq; ++i) out->q[i] = t.q[i];
  out->grid_points = t.grid_points;
  out->truncation = t.truncation;
  out->score_max_lag = t.score_max_lag;
  out->levels = t.levels;
  out->var_threshold = t.var_threshold;
  out->weight_threshold = t.weight_threshold;
  out->variance_captured = t.variance_captured;
  out->filter_weight = t.filter_weight;
  return SFIELD_OK;
}

sfield_status sfield_report_render(const sfield_report* r, sfield_format format, char** out) {
  if (r == nullptr || out == nullptr) return bad_argument("null pointer argument");
  *out = nullptr;
  return guarded([&] {
    switch (format) {
      case SFIELD_FORMAT_CSV: *out = copy_string(sfield::format_csv(r->value)); break;
      case SFIELD_FORMAT_JSONL: *out = copy_string(sfield::format_jsonl(r->value)); break;
      default: *out = copy_string(sfield::format_table(r->value)); break;
    }
  });
}

void sfield_report_free(sfield_report* r) { delete r; }

sfield_status sfield_spectrum_csv(const sfield_sample* sample, const sfield_test_options* options, char** out) {
  if (sample == nullptr || out == nullptr) return bad_argument("null pointer argument");
  *out = nullptr;
  return guarded([&] {
    sfield::TestOptions t = to_options(options);
    const auto centered = sfield::center(sample->value);
    const auto q = t.q ? *t.q : sfield::window_rule_of_thumb(centered.dims());
    const std::size_t pts = t.grid_points ? *t.grid_points : sfield::default_grid_points(q);
    const auto spec = sfield::estimate_spectral_density(
        centered, q, sfield::FrequencyGrid(centered.dims().size(), pts), t.weight_kind);
    *out = copy_string(sfield::format_spectrum_csv(sfield::eigendecompose_field(spec, 1)));
  });
}

sfield_status sfield_filters_csv(const sfield_sample* sample, const sfield_test_options* options, char** out) {
  if (sample == nullptr || out == nullptr) return bad_argument("null pointer argument");
  *out = nullptr;
  return guarded([&] {
    const auto stages = sfield::run_pipeline_stages(sample->value, to_options(options));
    *out = copy_string(sfield::format_filters_csv(stages.bank));
  });
}

sfield_status sfield_mc_study_run(const char* config_text, const sfield_mc_overrides* overrides,
                                  sfield_mc_table** out) {
  if (config_text == nullptr || out == nullptr) return bad_argument("null pointer argument");
  *out = nullptr;
  return guarded([&] {
    auto cfg = sfield::parse_mc_config(config_text);
    apply_overrides(cfg, overrides);
    *out = new sfield_mc_table{sfield::run_mc_study(cfg)};
  });
}

sfield_status sfield_mc_study_run_file(const char* config_path, const sfield_mc_overrides* overrides,
                                       sfield_mc_table** out) {
  if (config_path == nullptr || out == nullptr) return bad_argument("null pointer argument");
  *out = nullptr;
  return guarded([&] {
    auto cfg = sfield::load_mc_config(config_path);
    apply_overrides(cfg, overrides);
    *out = new sfield_mc_table{sfield::run_mc_study(cfg)};
  });
}

size_t sfield_mc_table_cells(const sfield_mc_table* t) { return t ? t->value.cells.size() : 0; }

sfield_status sfield_mc_table_cell(const sfield_mc_table* t, size_t index, sfield_mc_cell* out) {
  if (t == nullptr || out == nullptr) return bad_argument("null pointer argument");
  if (index >= t->value.cells.size()) return bad_argument("cell index out of range");
  const auto& c = t->value.cells[index];
  *out = sfield_mc_cell{};
  out->ndims = std::min<std::size_t>(c.dims.size(), 3);
  for (std::size_t i = 0; i < out->ndims; ++i) out->dims[i] = c.dims[i];
  out->distribution = c.distribution.c_str();
  out->levels = c.levels;
  out->rejections = c.rejections;
  out->completed = c.completed;
  out->failures = c.failures;
  out->rate = c.rate;
  out->standard_error = c.standard_error;
  return SFIELD_OK;
}

sfield_status sfield_mc_table_render_csv(const sfield_mc_table* t, char** out) {
  if (t == nullptr || out == nullptr) return bad_argument("null pointer argument");
  *out = nullptr;
  return guarded([&] { *out = copy_string(sfield::format_mc_csv(t->value)); });
}

void sfield_mc_table_free(sfield_mc_table* t) { delete t; }

}  // extern "C"
