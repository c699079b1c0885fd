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

// Command-line front end. Exit codes: 0 success, 1 usage, 2 runtime error.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "spose/spose.h"

namespace {

constexpr int kExitRuntime = 2;

int report(sp_status st) {
    if (st == SP_OK) return 0;
    std::cerr << "error (" << sp_status_name(st) << "): " << sp_last_error() << '\n';
    return kExitRuntime;
}

bool read_text(const std::string &path, std::string &out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return false;
    std::ostringstream ss;
    ss << is.rdbuf();
    out = ss.str();
    return true;
}

struct ModelHandle {
    sp_model *p = nullptr;
    ~ModelHandle() { sp_model_free(p); }
};
struct DatasetHandle {
    sp_dataset *p = nullptr;
    ~DatasetHandle() { sp_dataset_free(p); }
};

void print_epoch(const sp_epoch_info *e, void *) {
    std::fprintf(stderr, "epoch %zu  lr %.6g  loss %.6g  (first %.3f mm, final %.3f mm)  eval mpjpe %.3f  p-mpjpe %.3f  mpjve %.3f  [%.1fs]\n",
                 e->epoch, e->lr, e->loss_total, e->loss_first_mm, e->loss_second_mm, e->mpjpe, e->p_mpjpe, e->mpjve,
                 e->seconds);
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Strided transformer pose lifting: data generation, training, evaluation, complexity"};
    app.require_subcommand(1);
    bool verbose = false, quiet = false;
    app.add_flag("-v,--verbose", verbose, "Log progress to stderr");
    app.add_flag("-q,--quiet", quiet, "Suppress warnings");

    // gen-data
    auto *gen = app.add_subcommand("gen-data", "Generate a synthetic 2D/3D pose dataset");
    sp_gen_options gopt;
    sp_gen_options_default(&gopt);
    std::string gen_out;
    gen->add_option("--seed", gopt.seed, "Random seed")->capture_default_str();
    gen->add_option("--sequences", gopt.sequences, "Number of motion clips")->capture_default_str();
    gen->add_option("--frames", gopt.frames, "Frames per clip")->capture_default_str();
    gen->add_option("--sigma", gopt.sigma_px, "2D Gaussian noise std-dev in pixels")->capture_default_str();
    gen->add_option("--window", gopt.window, "Window length T (odd)")->capture_default_str();
    gen->add_option("--threads", gopt.threads, "Worker threads (0: SL_THREADS or all cores)");
    gen->add_option("--out", gen_out, "Output dataset file")->required();

    // train
    auto *tr = app.add_subcommand("train", "Train a model");
    std::string tr_config, tr_data, tr_heldout, tr_out, tr_log;
    tr->add_option("--config", tr_config, "Training config JSON")->required();
    tr->add_option("--data", tr_data, "Training dataset")->required();
    tr->add_option("--heldout", tr_heldout, "Held-out dataset for checkpoint selection");
    tr->add_option("--out", tr_out, "Checkpoint path for the best epoch")->required();
    tr->add_option("--log", tr_log, "Per-epoch CSV log");

    // eval
    auto *ev = app.add_subcommand("eval", "Evaluate a checkpoint");
    std::string ev_ckpt, ev_data;
    bool ev_no_flip = false, ev_csv = false;
    ev->add_option("--checkpoint", ev_ckpt, "Checkpoint file")->required();
    ev->add_option("--data", ev_data, "Dataset file")->required();
    ev->add_flag("--no-flip", ev_no_flip, "Disable test-time flip averaging");
    ev->add_flag("--csv", ev_csv, "Print the per-action table as CSV");

    // flops
    auto *fl = app.add_subcommand("flops", "Print the complexity report");
    sp_complexity_input cin;
    sp_complexity_input_default(&cin);
    std::string fl_config;
    bool fl_csv = false;
    fl->add_option("--frames", cin.frames, "Input frames T")->capture_default_str();
    fl->add_option("--dim", cin.dim, "Model width D")->capture_default_str();
    fl->add_option("--layers", cin.layers, "Layers per encoder N")->capture_default_str();
    fl->add_option("--stride", cin.stride, "Strided factor S")->capture_default_str();
    fl->add_option("--kernel", cin.kernel, "Strided kernel size K")->capture_default_str();
    fl->add_option("--config", fl_config, "Model config JSON; adds parameter and measured MAC counts");
    fl->add_flag("--csv", fl_csv, "CSV output");

    // attn
    auto *at = app.add_subcommand("attn", "Export attention maps for one sample");
    std::string at_ckpt, at_data, at_out;
    std::size_t at_index = 0;
    at->add_option("--checkpoint", at_ckpt, "Checkpoint file")->required();
    at->add_option("--data", at_data, "Dataset file")->required();
    at->add_option("--index", at_index, "Sample index")->capture_default_str();
    at->add_option("--out", at_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    sp_set_log_level(quiet ? SP_LOG_QUIET : verbose ? SP_LOG_INFO : SP_LOG_WARN);

    if (*gen) {
        DatasetHandle ds;
        if (int rc = report(sp_dataset_generate(&gopt, &ds.p))) return rc;
        if (int rc = report(sp_dataset_save(ds.p, gen_out.c_str()))) return rc;
        std::size_t n = 0;
        sp_dataset_size(ds.p, &n, nullptr, nullptr);
        std::cout << "wrote " << n << " samples to " << gen_out << '\n';
        return 0;
    }
    if (*tr) {
        std::string text;
        if (!read_text(tr_config, text)) {
            std::cerr << "error: cannot read config " << tr_config << '\n';
            return kExitRuntime;
        }
        DatasetHandle train, held;
        if (int rc = report(sp_dataset_load(tr_data.c_str(), &train.p))) return rc;
        if (!tr_heldout.empty())
            if (int rc = report(sp_dataset_load(tr_heldout.c_str(), &held.p))) return rc;
        const sp_status st = sp_train(text.c_str(), train.p, held.p, tr_out.c_str(),
                                      tr_log.empty() ? nullptr : tr_log.c_str(), print_epoch, nullptr, nullptr);
        if (st == SP_OK) std::cout << "wrote " << tr_out << '\n';
        return report(st);
    }
    if (*ev) {
        ModelHandle model;
        DatasetHandle ds;
        if (int rc = report(sp_model_load(ev_ckpt.c_str(), &model.p))) return rc;
        if (int rc = report(sp_dataset_load(ev_data.c_str(), &ds.p))) return rc;
        sp_metrics m{};
        char *csv = nullptr;
        if (int rc = report(sp_evaluate(model.p, ds.p, ev_no_flip ? 0 : 1, &m, ev_csv ? &csv : nullptr))) return rc;
        if (csv) {
            std::cout << csv;
            sp_string_free(csv);
        } else {
            std::printf("MPJPE %.3f mm\nP-MPJPE %.3f mm\nMPJVE %.3f mm\n", m.mpjpe, m.p_mpjpe, m.mpjve);
        }
        return 0;
    }
    if (*fl) {
        std::string config_text;
        if (!fl_config.empty() && !read_text(fl_config, config_text)) {
            std::cerr << "error: cannot read config " << fl_config << '\n';
            return kExitRuntime;
        }
        char *text = nullptr;
        if (int rc = report(sp_complexity_report(&cin, fl_config.empty() ? nullptr : config_text.c_str(), fl_csv ? 1 : 0,
                                                 &text)))
            return rc;
        std::cout << text;
        sp_string_free(text);
        return 0;
    }
    if (*at) {
        ModelHandle model;
        DatasetHandle ds;
        if (int rc = report(sp_model_load(at_ckpt.c_str(), &model.p))) return rc;
        if (int rc = report(sp_dataset_load(at_data.c_str(), &ds.p))) return rc;
        std::size_t files = 0;
        if (int rc = report(sp_export_attention(model.p, ds.p, at_index, at_out.c_str(), &files))) return rc;
        std::cout << "wrote " << files << " files to " << at_out << '\n';
        return 0;
    }
    return 1;
}
