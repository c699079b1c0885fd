/*
 * Copyright 2026 The spose Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "spose/spose.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "complexity/complexity.hpp"
#include "model/checkpoint.hpp"
#include "model/model.hpp"
#include "numerics/error.hpp"
#include "synth/dataset.hpp"
#include "train/attention_export.hpp"
#include "train/trainer.hpp"
#include "util/log.hpp"

struct sp_model {
    spose::ModelConfig config;
    spose::ParameterSet params;
};

struct sp_dataset {
    spose::Dataset data;
};

namespace {

thread_local std::string g_last_error;

sp_status status_of(spose::ErrorKind kind) {
    switch (kind) {
        case spose::ErrorKind::dimension: return SP_ERR_DIMENSION;
        case spose::ErrorKind::config: return SP_ERR_CONFIG;
        case spose::ErrorKind::numeric: return SP_ERR_NUMERIC;
        case spose::ErrorKind::io: return SP_ERR_IO;
        case spose::ErrorKind::checksum: return SP_ERR_CHECKSUM;
        case spose::ErrorKind::internal: return SP_ERR_INTERNAL;
    }
    return SP_ERR_INTERNAL;
}

template <class F>
sp_status guarded(F &&body) {
    g_last_error.clear();
    try {
        body();
        return SP_OK;
    } catch (const spose::Error &e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc &) {
        g_last_error = "out of memory";
        return SP_ERR_INTERNAL;
    } catch (const std::exception &e) {
        g_last_error = e.what();
        return SP_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return SP_ERR_INTERNAL;
    }
}

#define SP_REQUIRE_ARG(cond, msg)        \
    do {                                 \
        if (!(cond)) {                   \
            g_last_error = msg;          \
            return SP_ERR_ARGUMENT;      \
        }                                \
    } while (0)

char *dup_string(const std::string &s) {
    char *out = static_cast<char *>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

spose::MetricReport metrics_of(const sp_model *m, const sp_dataset *ds, bool flip) {
    return spose::evaluate(m->config, m->params, ds->data, flip);
}

}  // namespace

extern "C" {

const char *sp_last_error(void) { return g_last_error.c_str(); }

const char *sp_status_name(sp_status status) {
    switch (status) {
        case SP_OK: return "ok";
        case SP_ERR_ARGUMENT: return "argument";
        case SP_ERR_DIMENSION: return "dimension";
        case SP_ERR_CONFIG: return "config";
        case SP_ERR_NUMERIC: return "numeric";
        case SP_ERR_IO: return "io";
        case SP_ERR_CHECKSUM: return "checksum";
        case SP_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char *sp_version(void) { return "0.1.0"; }

void sp_set_log_level(sp_log_level level) {
    spose::log::set_level(static_cast<spose::log::Level>(level));
}

void sp_string_free(char *s) { std::free(s); }

void sp_complexity_input_default(sp_complexity_input *in) {
    if (!in) return;
    const spose::ComplexityInput d;
    *in = {d.N, d.T, d.D, d.S, d.K};
}

sp_status sp_complexity_report(const sp_complexity_input *in, const char *config_json, int as_csv, char **out_text) {
    SP_REQUIRE_ARG(in && out_text, "sp_complexity_report: null argument");
    return guarded([&] {
        spose::ComplexityInput ci{in->layers, in->frames, in->dim, in->stride, in->kernel};
        const spose::ComplexityReport r =
            config_json ? spose::complexity_report(ci, spose::train_config_from_json(config_json).model)
                        : spose::complexity_report(ci);
        std::ostringstream os;
        if (as_csv)
            spose::write_report_csv(os, r);
        else
            spose::write_report_text(os, r);
        *out_text = dup_string(os.str());
    });
}

sp_status sp_model_create(const char *config_json, uint64_t seed, sp_model **out) {
    SP_REQUIRE_ARG(config_json && out, "sp_model_create: null argument");
    return guarded([&] {
        auto m = std::make_unique<sp_model>();
        m->config = spose::config_from_json(config_json);
        m->params = spose::init_params(m->config, seed);
        *out = m.release();
    });
}

sp_status sp_model_load(const char *path, sp_model **out) {
    SP_REQUIRE_ARG(path && out, "sp_model_load: null argument");
    return guarded([&] {
        spose::Checkpoint ck = spose::load_checkpoint(path);
        *out = new sp_model{std::move(ck.config), std::move(ck.params)};
    });
}

sp_status sp_model_save(const sp_model *model, const char *path) {
    SP_REQUIRE_ARG(model && path, "sp_model_save: null argument");
    return guarded([&] { spose::save_checkpoint(model->config, model->params, path); });
}

void sp_model_free(sp_model *model) { delete model; }

sp_status sp_model_param_count(const sp_model *model, uint64_t *out) {
    SP_REQUIRE_ARG(model && out, "sp_model_param_count: null argument");
    return guarded([&] { *out = model->params.count(); });
}

sp_status sp_model_dims(const sp_model *model, size_t *frames, size_t *joints) {
    SP_REQUIRE_ARG(model, "sp_model_dims: null model");
    if (frames) *frames = model->config.T;
    if (joints) *joints = model->config.J;
    return SP_OK;
}

sp_status sp_model_config_json(const sp_model *model, char **out_json) {
    SP_REQUIRE_ARG(model && out_json, "sp_model_config_json: null argument");
    return guarded([&] { *out_json = dup_string(spose::config_to_json(model->config)); });
}

sp_status sp_model_predict(const sp_model *model, const float *input, size_t batch, double *out) {
    SP_REQUIRE_ARG(model && input && out, "sp_model_predict: null argument");
    SP_REQUIRE_ARG(batch > 0, "sp_model_predict: batch must be positive");
    return guarded([&] {
        const std::size_t T = model->config.T, J = model->config.J;
        spose::Grid in({batch, T, J, 2});
        for (std::size_t i = 0; i < in.size(); ++i) in.data()[i] = input[i];
        const spose::Grid pred = spose::predict(model->config, model->params, in).target3d;
        for (std::size_t i = 0; i < pred.size(); ++i) out[i] = pred.data()[i] * spose::kMillimetersPerModelUnit;
    });
}

void sp_gen_options_default(sp_gen_options *opt) {
    if (!opt) return;
    const spose::GenOptions d;
    opt->seed = d.seed;
    opt->sequences = static_cast<uint32_t>(d.sequences);
    opt->frames = static_cast<uint32_t>(d.frames);
    opt->window = static_cast<uint32_t>(d.T);
    opt->sigma_px = d.sigma_px;
    opt->threads = 0;
}

sp_status sp_dataset_generate(const sp_gen_options *opt, sp_dataset **out) {
    SP_REQUIRE_ARG(opt && out, "sp_dataset_generate: null argument");
    return guarded([&] {
        spose::GenOptions g;
        g.seed = opt->seed;
        g.sequences = opt->sequences;
        g.frames = opt->frames;
        g.T = opt->window;
        g.sigma_px = opt->sigma_px;
        g.threads = opt->threads ? opt->threads : spose::worker_count();
        *out = new sp_dataset{spose::generate_dataset(g)};
    });
}

sp_status sp_dataset_load(const char *path, sp_dataset **out) {
    SP_REQUIRE_ARG(path && out, "sp_dataset_load: null argument");
    return guarded([&] { *out = new sp_dataset{spose::read_dataset(path)}; });
}

sp_status sp_dataset_save(const sp_dataset *ds, const char *path) {
    SP_REQUIRE_ARG(ds && path, "sp_dataset_save: null argument");
    return guarded([&] { spose::write_dataset(ds->data, path); });
}

void sp_dataset_free(sp_dataset *ds) { delete ds; }

sp_status sp_dataset_size(const sp_dataset *ds, size_t *samples, size_t *frames, size_t *joints) {
    SP_REQUIRE_ARG(ds, "sp_dataset_size: null dataset");
    if (samples) *samples = ds->data.samples.size();
    if (frames) *frames = ds->data.T;
    if (joints) *joints = ds->data.J;
    return SP_OK;
}

sp_status sp_train(const char *train_config_json, const sp_dataset *train, const sp_dataset *heldout,
                   const char *checkpoint_path, const char *log_csv_path, sp_epoch_callback callback, void *user,
                   sp_model **out_best) {
    SP_REQUIRE_ARG(train_config_json && train && checkpoint_path, "sp_train: null argument");
    bool aborted = false;
    std::string diagnostic;
    const sp_status st = guarded([&] {
        const spose::TrainConfig cfg = spose::train_config_from_json(train_config_json);
        spose::EpochCallback cb;
        if (callback) {
            cb = [&](const spose::EpochLog &e) {
                const sp_epoch_info info{e.epoch,         e.lr,           e.loss_total,     e.loss_first_mm,
                                         e.loss_second_mm, e.eval.mpjpe,  e.eval.p_mpjpe,   e.eval.mpjve,
                                         e.seconds};
                callback(&info, user);
            };
        }
        spose::TrainResult r =
            spose::train(cfg, train->data, heldout ? &heldout->data : nullptr, spose::SkeletonSpec::human17(), cb);
        // On abort the best-so-far parameters are the last good ones that were scored.
        spose::save_checkpoint(cfg.model, r.best_params, checkpoint_path);
        if (log_csv_path) {
            std::ofstream os(log_csv_path);
            if (!os) spose::fail(spose::ErrorKind::io, std::string("cannot open ") + log_csv_path + " for writing");
            spose::write_run_log_csv(os, r.log);
            if (!os) spose::fail(spose::ErrorKind::io, std::string("failed writing ") + log_csv_path);
        }
        aborted = r.aborted;
        diagnostic = r.log.diagnostic;
        if (out_best) *out_best = new sp_model{cfg.model, std::move(r.best_params)};
    });
    if (st == SP_OK && aborted) {
        g_last_error = "training aborted: " + diagnostic;
        return SP_ERR_NUMERIC;
    }
    return st;
}

sp_status sp_evaluate(const sp_model *model, const sp_dataset *ds, int flip_averaging, sp_metrics *out,
                      char **out_csv) {
    SP_REQUIRE_ARG(model && ds, "sp_evaluate: null argument");
    return guarded([&] {
        const spose::MetricReport r = metrics_of(model, ds, flip_averaging != 0);
        if (out) *out = {r.mpjpe, r.p_mpjpe, r.mpjve};
        if (out_csv) {
            std::ostringstream os;
            spose::write_metric_csv(os, r);
            *out_csv = dup_string(os.str());
        }
    });
}

sp_status sp_export_attention(const sp_model *model, const sp_dataset *ds, size_t index, const char *out_dir,
                              size_t *files_written) {
    SP_REQUIRE_ARG(model && ds && out_dir, "sp_export_attention: null argument");
    SP_REQUIRE_ARG(index < ds->data.samples.size(), "sp_export_attention: sample index out of range");
    return guarded([&] {
        const auto files = spose::export_attention(model->config, model->params, ds->data.samples[index], out_dir);
        if (files_written) *files_written = files.size();
    });
}

}  // extern "C"
