#include "forks/forks.h"

#include <algorithm>
#include <new>
#include <string>
#include <variant>

#include "baselines.hpp"
#include "data.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "learner.hpp"

struct forks_dataset {
  forks::Dataset ds;
};

struct forks_run_result {
  forks::RunResult result;
};

struct forks_learner {
  std::variant<forks::ForksLearner, forks::KogdBudgetLearner, forks::FogdLearner> impl;
};

namespace {

thread_local std::string last_error;

forks_status fail(forks_status code, const char* what) {
  last_error = what;
  return code;
}

template <typename F>
forks_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return FORKS_OK;
  } catch (const forks::InputError& e) {
    return fail(FORKS_ERR_INPUT, e.what());
  } catch (const forks::ConfigError& e) {
    return fail(FORKS_ERR_CONFIG, e.what());
  } catch (const forks::IoError& e) {
    return fail(FORKS_ERR_IO, e.what());
  } catch (const forks::NumericError& e) {
    return fail(FORKS_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FORKS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FORKS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FORKS_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw forks::InputError(what);
}

std::optional<std::size_t> size_or_default(size_t v) {
  return v == 0 ? std::nullopt : std::optional<std::size_t>(v);
}

forks::RunConfig to_core(const forks_run_config* c) {
  require(c != nullptr, "null config");
  forks::RunConfig r;
  switch (c->algorithm) {
    case FORKS_ALGO_FORKS: r.algorithm = forks::Algorithm::forks; break;
    case FORKS_ALGO_KOGD: r.algorithm = forks::Algorithm::kogd; break;
    case FORKS_ALGO_FOGD: r.algorithm = forks::Algorithm::fogd; break;
    default: throw forks::ConfigError("unknown algorithm");
  }
  switch (c->loss) {
    case FORKS_LOSS_HINGE: r.loss = forks::LossFamily::hinge; break;
    case FORKS_LOSS_SQUARED_HINGE: r.loss = forks::LossFamily::squared_hinge; break;
    default: throw forks::ConfigError("unknown loss");
  }
  switch (c->stream) {
    case FORKS_STREAM_PERMUTE: r.stream = forks::StreamMode::permute; break;
    case FORKS_STREAM_ADVERSARIAL: r.stream = forks::StreamMode::adversarial; break;
    case FORKS_STREAM_AS_IS: r.stream = forks::StreamMode::as_is; break;
    default: throw forks::ConfigError("unknown stream mode");
  }
  switch (c->cycle_basis) {
    case FORKS_CYCLE_STREAM: r.cycle_basis = forks::CycleBasis::stream; break;
    case FORKS_CYCLE_AFTER_BUDGET: r.cycle_basis = forks::CycleBasis::after_budget; break;
    default: throw forks::ConfigError("unknown cycle basis");
  }
  switch (c->ordering) {
    case FORKS_ONS_CURRENT_INVERSE: r.ordering = forks::OnsOrdering::current_inverse; break;
    case FORKS_ONS_UPDATED_INVERSE: r.ordering = forks::OnsOrdering::updated_inverse; break;
    default: throw forks::ConfigError("unknown ONS ordering");
  }
  switch (c->projection) {
    case FORKS_PROJECT_CURRENT: r.projection = forks::ProjectionPoint::current_example; break;
    case FORKS_PROJECT_NEXT: r.projection = forks::ProjectionPoint::next_example; break;
    default: throw forks::ConfigError("unknown projection point");
  }
  r.bandwidth = c->bandwidth;
  r.budget = c->budget;
  r.sketch_size = size_or_default(c->sketch_size);
  r.sample_size = size_or_default(c->sample_size);
  r.gamma = c->gamma;
  r.rank = size_or_default(c->rank);
  r.blocks = size_or_default(c->blocks);
  r.update_cycle = size_or_default(c->update_cycle);
  r.theta = c->theta;
  r.alpha = c->alpha;
  r.sigma_w = c->sigma_w;
  r.eta_w = c->eta_w;
  r.kogd_eta = c->kogd_eta;
  r.clip = c->clip;
  if (c->pinv_tol >= 0.0) r.pinv_tol = c->pinv_tol;
  r.fogd_features = size_or_default(c->fogd_features);
  r.fogd_eta = c->fogd_eta;
  r.adv_blocks = c->adv_blocks;
  r.adv_repeats = c->adv_repeats;
  r.seed = c->seed;
  return r;
}

forks_resolved resolved_sizes(const forks::RunConfig& cfg, std::size_t stream_length) {
  forks_resolved out{};
  out.budget = cfg.budget;
  out.fogd_features = cfg.fogd_features.value_or(4 * cfg.budget);
  if (cfg.algorithm == forks::Algorithm::forks) {
    const forks::ForksConfig f = forks::resolve_forks(cfg, stream_length);
    out.sketch_size = f.sketch_size;
    out.sample_size = f.sample_size;
    out.rank = f.rank;
    out.blocks = f.blocks;
    out.update_cycle = f.update_cycle;
  }
  return out;
}

template <typename F>
forks_status make_dataset(forks_dataset** out, F&& build) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = nullptr;
    *out = new forks_dataset{build()};
  });
}

}  // namespace

extern "C" {

const char* forks_last_error(void) { return last_error.c_str(); }
const char* forks_version(void) { return FORKS_VERSION_STRING; }

forks_status forks_dataset_load(const char* path, forks_dataset** out) {
  return make_dataset(out, [&] {
    require(path != nullptr, "null path");
    return forks::load_libsvm(path);
  });
}

forks_status forks_dataset_parse(const char* text, size_t length, forks_dataset** out) {
  return make_dataset(out, [&] {
    require(text != nullptr || length == 0, "null text");
    return forks::parse_libsvm(std::string_view(text ? text : "", length));
  });
}

forks_status forks_dataset_save(const forks_dataset* ds, const char* path) {
  return guarded([&] {
    require(ds != nullptr && path != nullptr, "null argument");
    forks::save_libsvm(ds->ds, path);
  });
}

forks_status forks_dataset_permute(const forks_dataset* ds, uint64_t seed, forks_dataset** out) {
  return make_dataset(out, [&] {
    require(ds != nullptr, "null dataset");
    return forks::permute(ds->ds, seed);
  });
}

forks_status forks_dataset_adversarial(const forks_dataset* ds, size_t blocks, size_t repeats,
                                       uint64_t seed, forks_dataset** out) {
  return make_dataset(out, [&] {
    require(ds != nullptr, "null dataset");
    return forks::adversarial_stream(ds->ds, blocks, repeats, seed);
  });
}

forks_status forks_dataset_minmax(const forks_dataset* ds, double lo, double hi, forks_dataset** out) {
  return make_dataset(out, [&] {
    require(ds != nullptr, "null dataset");
    return forks::minmax_scale(ds->ds, lo, hi);
  });
}

size_t forks_dataset_size(const forks_dataset* ds) { return ds ? ds->ds.size() : 0; }
size_t forks_dataset_dim(const forks_dataset* ds) { return ds ? ds->ds.dim : 0; }

int forks_dataset_label(const forks_dataset* ds, size_t i) {
  if (ds == nullptr || i >= ds->ds.size()) return 0;
  return ds->ds.examples[i].y;
}

void forks_dataset_free(forks_dataset* ds) { delete ds; }

void forks_run_config_init(forks_run_config* cfg) {
  if (cfg == nullptr) return;
  const forks::RunConfig d;
  *cfg = forks_run_config{};
  cfg->algorithm = FORKS_ALGO_FORKS;
  cfg->loss = FORKS_LOSS_HINGE;
  cfg->bandwidth = d.bandwidth;
  cfg->budget = d.budget;
  cfg->gamma = d.gamma;
  cfg->theta = d.theta;
  cfg->cycle_basis = FORKS_CYCLE_STREAM;
  cfg->alpha = d.alpha;
  cfg->sigma_w = d.sigma_w;
  cfg->eta_w = d.eta_w;
  cfg->kogd_eta = d.kogd_eta;
  cfg->clip = d.clip;
  cfg->ordering = FORKS_ONS_UPDATED_INVERSE;
  cfg->projection = FORKS_PROJECT_CURRENT;
  cfg->pinv_tol = -1.0;
  cfg->fogd_eta = d.fogd_eta;
  cfg->stream = FORKS_STREAM_PERMUTE;
  cfg->adv_blocks = d.adv_blocks;
  cfg->adv_repeats = d.adv_repeats;
  cfg->seed = d.seed;
}

forks_status forks_resolve(const forks_run_config* cfg, size_t stream_length, forks_resolved* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = resolved_sizes(to_core(cfg), stream_length);
  });
}

forks_status forks_run(const forks_run_config* cfg, const forks_dataset* ds, forks_run_result** out) {
  return guarded([&] {
    require(out != nullptr && ds != nullptr, "null argument");
    *out = nullptr;
    const forks::RunConfig core = to_core(cfg);
    *out = new forks_run_result{forks::run(core, ds->ds)};
  });
}

size_t forks_result_rounds(const forks_run_result* res) { return res ? res->result.rounds.size() : 0; }

forks_status forks_result_round(const forks_run_result* res, size_t t, forks_round* out) {
  return guarded([&] {
    require(res != nullptr && out != nullptr, "null argument");
    require(t < res->result.rounds.size(), "round index out of range");
    const auto& r = res->result.rounds[t];
    out->label = r.label;
    out->prediction = r.prediction;
    out->score = r.score;
    out->kind = static_cast<forks_round_kind>(r.kind);
    out->cumulative_mistakes = r.cumulative_mistakes;
  });
}

void forks_result_summary(const forks_run_result* res, forks_run_summary* out) {
  if (res == nullptr || out == nullptr) return;
  const auto& r = res->result;
  *out = forks_run_summary{};
  out->rounds = r.rounds.size();
  out->mistakes = r.mistakes;
  out->mistake_rate = r.mistake_rate;
  out->seconds_filling = r.seconds_filling;
  out->seconds_update = r.seconds_update;
  out->seconds_regular = r.seconds_regular;
  out->anchors = r.anchors;
  out->resolved.budget = r.resolved.budget;
  out->resolved.sketch_size = r.resolved.sketch_size;
  out->resolved.sample_size = r.resolved.sample_size;
  out->resolved.rank = r.resolved.rank;
  out->resolved.blocks = r.resolved.blocks;
  out->resolved.update_cycle = r.resolved.update_cycle;
  out->resolved.fogd_features = r.fogd_features;
}

void forks_result_free(forks_run_result* res) { delete res; }

size_t forks_default_bandwidth_grid(double* out, size_t capacity) {
  const auto grid = forks::default_bandwidth_grid();
  if (out != nullptr) std::copy_n(grid.begin(), std::min(capacity, grid.size()), out);
  return grid.size();
}

forks_status forks_select_bandwidth(const forks_run_config* cfg, const forks_dataset* ds,
                                    const double* grid, size_t n, double* best, double* rates) {
  return guarded([&] {
    require(ds != nullptr && best != nullptr && (grid != nullptr || n == 0), "null argument");
    const auto choice = forks::select_bandwidth(to_core(cfg), ds->ds, std::vector<double>(grid, grid + n));
    *best = choice.bandwidth;
    if (rates != nullptr) std::copy(choice.rates.begin(), choice.rates.end(), rates);
  });
}

forks_status forks_learner_create(const forks_run_config* cfg, size_t stream_length, size_t dim,
                                  forks_learner** out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = nullptr;
    const forks::RunConfig c = to_core(cfg);
    const forks::KernelConfig kernel{forks::KernelFamily::gaussian, c.bandwidth};
    const forks::LossSpec loss{c.loss};
    switch (c.algorithm) {
      case forks::Algorithm::forks:
        *out = new forks_learner{forks::ForksLearner(forks::resolve_forks(c, stream_length))};
        break;
      case forks::Algorithm::kogd:
        *out = new forks_learner{forks::KogdBudgetLearner(c.budget, kernel, c.kogd_eta, loss)};
        break;
      case forks::Algorithm::fogd:
        *out = new forks_learner{forks::FogdLearner(dim, c.fogd_features.value_or(4 * c.budget),
                                                    kernel, c.fogd_eta, loss,
                                                    forks::learner_seed(c.seed))};
        break;
    }
  });
}

forks_status forks_learner_step(forks_learner* learner, const uint32_t* indices, const double* values,
                                size_t nnz, int label, int* prediction, double* score) {
  return guarded([&] {
    require(learner != nullptr, "null learner");
    require(nnz == 0 || (indices != nullptr && values != nullptr), "null feature arrays");
    require(label == 1 || label == -1, "label must be -1 or +1");
    forks::SparseVector x;
    x.index.assign(indices, indices + nnz);
    x.value.assign(values, values + nnz);
    for (size_t i = 1; i < nnz; ++i) require(x.index[i - 1] < x.index[i], "indices must increase");
    const forks::RoundResult r = std::visit([&](auto& l) { return l.round(x, label); }, learner->impl);
    if (prediction != nullptr) *prediction = r.prediction;
    if (score != nullptr) *score = r.score;
  });
}

size_t forks_learner_anchors(const forks_learner* learner) {
  if (learner == nullptr) return 0;
  if (const auto* f = std::get_if<forks::ForksLearner>(&learner->impl)) return f->anchor_count();
  if (const auto* k = std::get_if<forks::KogdBudgetLearner>(&learner->impl)) return k->buffer().size();
  return 0;
}

void forks_learner_free(forks_learner* learner) { delete learner; }

forks_status forks_bench_tisvd(size_t sketch_size, size_t rank, size_t steps, uint64_t seed,
                               forks_tisvd_bench* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    const forks::TisvdBench b = forks::bench_tisvd(sketch_size, rank, steps, seed);
    *out = forks_tisvd_bench{b.sketch_size, b.rank, b.steps, b.tisvd_us, b.dense_us,
                             b.tisvd_error, b.dense_error};
  });
}

}  // extern "C"
