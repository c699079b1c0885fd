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

#include "train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <thread>

#include <json.hpp>

#include "metrics/losses.hpp"
#include "model/model.hpp"
#include "numerics/error.hpp"
#include "train/optimizer.hpp"
#include "util/hash.hpp"
#include "util/log.hpp"

namespace spose {

using json = nlohmann::json;

void TrainConfig::validate() const {
    model.validate();
    require(lr0 > 0.0 && std::isfinite(lr0), ErrorKind::config, "lr0 must be positive");
    require(lr_decay > 0.0 && lr_decay <= 1.0, ErrorKind::config, "lr_decay must be in (0, 1]");
    require(epochs >= 1, ErrorKind::config, "epochs must be at least 1");
    require(batch_size >= 1, ErrorKind::config, "batch_size must be at least 1");
    require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, ErrorKind::config,
            "optimizer betas must be in [0, 1)");
    require(adam_eps > 0.0, ErrorKind::config, "adam_eps must be positive");
}

double TrainConfig::lr_at(std::size_t epoch) const { return lr0 * std::pow(lr_decay, static_cast<double>(epoch)); }

namespace {

const char *const kTrainKeys[] = {"lr0",  "lr_decay",     "epochs",    "batch_size", "seed",
                                  "flip_augment", "eval_flip", "beta1",      "beta2", "adam_eps"};

bool is_train_key(const std::string &k) {
    return std::find(std::begin(kTrainKeys), std::end(kTrainKeys), k) != std::end(kTrainKeys);
}

}  // namespace

TrainConfig train_config_from_json(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception &e) {
        fail(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
    }
    require(doc.is_object(), ErrorKind::config, "config must be a JSON object");

    json model = json::object();
    TrainConfig cfg;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!is_train_key(it.key())) model[it.key()] = it.value();
    }
    cfg.model = config_from_json(model.dump());
    try {
        if (doc.contains("lr0")) cfg.lr0 = doc["lr0"].get<double>();
        if (doc.contains("lr_decay")) cfg.lr_decay = doc["lr_decay"].get<double>();
        if (doc.contains("epochs")) cfg.epochs = doc["epochs"].get<std::size_t>();
        if (doc.contains("batch_size")) cfg.batch_size = doc["batch_size"].get<std::size_t>();
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("flip_augment")) cfg.flip_augment = doc["flip_augment"].get<bool>();
        if (doc.contains("eval_flip")) cfg.eval_flip = doc["eval_flip"].get<bool>();
        if (doc.contains("beta1")) cfg.beta1 = doc["beta1"].get<double>();
        if (doc.contains("beta2")) cfg.beta2 = doc["beta2"].get<double>();
        if (doc.contains("adam_eps")) cfg.adam_eps = doc["adam_eps"].get<double>();
    } catch (const json::exception &e) {
        fail(ErrorKind::config, std::string("bad training field: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

std::string train_config_to_json(const TrainConfig &cfg) {
    json doc = json::parse(config_to_json(cfg.model));
    doc["lr0"] = cfg.lr0;
    doc["lr_decay"] = cfg.lr_decay;
    doc["epochs"] = cfg.epochs;
    doc["batch_size"] = cfg.batch_size;
    doc["seed"] = cfg.seed;
    doc["flip_augment"] = cfg.flip_augment;
    doc["eval_flip"] = cfg.eval_flip;
    doc["beta1"] = cfg.beta1;
    doc["beta2"] = cfg.beta2;
    doc["adam_eps"] = cfg.adam_eps;
    return doc.dump(2);
}

void write_run_log_csv(std::ostream &os, const RunLog &log, bool include_time) {
    const auto flags = os.flags();
    const auto prec = os.precision();
    os << std::setprecision(17);
    os << "epoch,lr,loss_first,loss_second,loss_total,loss_first_mm,loss_second_mm,mpjpe,p_mpjpe,mpjve";
    if (include_time) os << ",seconds";
    os << '\n';
    for (const EpochLog &e : log.epochs) {
        os << e.epoch << ',' << e.lr << ',' << e.loss_first << ',' << e.loss_second << ',' << e.loss_total << ','
           << e.loss_first_mm << ',' << e.loss_second_mm << ',' << e.eval.mpjpe << ',' << e.eval.p_mpjpe << ','
           << e.eval.mpjve;
        if (include_time) os << ',' << e.seconds;
        os << '\n';
    }
    os.flags(flags);
    os.precision(prec);
}

std::size_t worker_count() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("SL_THREADS")) {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1)
            n = static_cast<std::size_t>(v);
        else
            log::warn_once("SL_THREADS", std::string("ignoring SL_THREADS=") + env);
    }
    return n;
}

namespace {

void check_dataset(const ModelConfig &cfg, const Dataset &ds, const char *what) {
    require(!ds.samples.empty(), ErrorKind::config, std::string(what) + " dataset is empty");
    require(ds.T == cfg.T && ds.J == cfg.J, ErrorKind::config,
            std::string(what) + " dataset has T=" + std::to_string(ds.T) + ", J=" + std::to_string(ds.J) +
                " but the model expects T=" + std::to_string(cfg.T) + ", J=" + std::to_string(cfg.J));
}

// Stacks samples[idx[begin..end)] into [B, T, J, C] arrays.
struct Batch {
    Grid input;     // [B, T, J, 2]
    Grid seq3d;     // [B, T, J, 3] model units
    Grid center3d;  // [B, J, 3] model units
};

Batch assemble(const Dataset &ds, const std::vector<std::size_t> &idx, std::size_t begin, std::size_t end,
               const std::vector<bool> *flips, const SkeletonSpec &spec) {
    const std::size_t B = end - begin, T = ds.T, J = ds.J;
    Batch b;
    b.input = Grid({B, T, J, 2});
    b.seq3d = Grid({B, T, J, 3});
    b.center3d = Grid({B, J, 3});
    const double inv = 1.0 / kMillimetersPerModelUnit;
    for (std::size_t i = 0; i < B; ++i) {
        const PoseSequenceSample *s = &ds.samples[idx[begin + i]];
        PoseSequenceSample flipped;
        if (flips && (*flips)[begin + i]) {
            flipped = horizontal_flip(*s, spec);
            s = &flipped;
        }
        std::copy(s->input2d.data().begin(), s->input2d.data().end(), b.input.data().begin() + i * T * J * 2);
        for (std::size_t k = 0; k < T * J * 3; ++k) b.seq3d.data()[i * T * J * 3 + k] = s->target3d_seq.data()[k] * inv;
        const std::size_t c = T / 2;
        for (std::size_t k = 0; k < J * 3; ++k)
            b.center3d.data()[i * J * 3 + k] = s->target3d_seq.data()[c * J * 3 + k] * inv;
    }
    return b;
}

struct HeadLoss {
    Var value;
    double weight = 0.0;
    std::size_t joint_frames = 0;  // number of supervised joint positions
};

std::optional<HeadLoss> head_loss(const ModelConfig &cfg, const HeadPlan &plan, const std::optional<Var> &head,
                                  const Batch &b) {
    if (!plan.present || !head) return std::nullopt;
    HeadLoss out;
    out.weight = plan.weight;
    const std::size_t B = b.input.dim(0);
    const std::size_t len = head->shape()[1];
    if (plan.kind == HeadKind::sequence && len == cfg.T) {
        out.value = sequence_loss(*head, b.seq3d);
        out.joint_frames = B * cfg.T * cfg.J;
    } else {
        Var center = ag::take_frame(*head, len == 1 ? 0 : cfg.target_index());
        out.value = single_frame_loss(center, b.center3d);
        out.joint_frames = B * cfg.J;
    }
    return out;
}

}  // namespace

TrainResult train(const TrainConfig &cfg, const Dataset &train_set, const Dataset *eval_set, const SkeletonSpec &spec,
                  const EpochCallback &on_epoch) {
    cfg.validate();
    const ModelConfig &mc = cfg.model;
    check_dataset(mc, train_set, "training");
    const Dataset &held = eval_set ? *eval_set : train_set;
    check_dataset(mc, held, "evaluation");
    if (mc.mode == Mode::full || mc.mode == Mode::single)
        (void)effective_weights(mc.lambda_f, mc.lambda_s, mc.mode);
    const LossPlan plan = plan_losses(mc);
    require(plan.head1.weight > 0.0 || plan.head2.weight > 0.0, ErrorKind::config,
            "every supervised head has zero loss weight");

    TrainResult result;
    ParameterSet params = init_params(mc, cfg.seed);
    result.best_params = params;
    AmsGrad opt(cfg.beta1, cfg.beta2, cfg.adam_eps);
    const RngStream root(cfg.seed);
    double best = std::numeric_limits<double>::infinity();

    const std::size_t N = train_set.samples.size();
    std::vector<std::size_t> order(N);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        EpochLog e;
        e.epoch = epoch;
        e.lr = cfg.lr_at(epoch);

        RngStream shuffle = root.fork(fnv1a64("shuffle")).fork(epoch);
        for (std::size_t i = 0; i < N; ++i) order[i] = i;
        for (std::size_t i = N; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);
        std::vector<bool> flips(N, false);
        if (cfg.flip_augment) {
            RngStream coin = root.fork(fnv1a64("flip")).fork(epoch);
            for (std::size_t i = 0; i < N; ++i) flips[i] = coin.below(2) == 1;
        }
        RngStream drop = root.fork(fnv1a64("dropout")).fork(epoch);

        std::size_t first_count = 0, second_count = 0;
        for (std::size_t begin = 0; begin < N && !result.aborted; begin += cfg.batch_size) {
            const std::size_t end = std::min(N, begin + cfg.batch_size);
            const Batch b = assemble(train_set, order, begin, end, &flips, spec);
            const auto saved_stats = params.norm_stats;  // restored if the step is not finite
            double total = 0.0, lf = 0.0, ls = 0.0;
            Gradients grads;
            try {
                Tape tape;
                ParamBinder binder(tape, params);
                ForwardOptions fo;
                fo.train = true;
                fo.rng = &drop;
                const GraphOutput g = forward_graph(binder, mc, tape.constant(b.input), fo);
                auto l1 = head_loss(mc, plan.head1, g.head1, b);
                auto l2 = head_loss(mc, plan.head2, g.head2, b);
                std::optional<Var> loss;
                auto accumulate = [&](const std::optional<HeadLoss> &h, double &sum, std::size_t &count) {
                    if (!h) return;
                    sum = h->value.value()[0];
                    count += h->joint_frames;
                    if (h->weight == 0.0) return;
                    Var term = ag::scale(h->value, h->weight);
                    loss = loss ? ag::add(*loss, term) : term;
                };
                accumulate(l1, lf, first_count);
                accumulate(l2, ls, second_count);
                total = loss->value()[0];
                if (std::isfinite(total)) grads = tape.backward(*loss);
            } catch (const Error &err) {
                if (err.kind() != ErrorKind::numeric) throw;
                total = std::numeric_limits<double>::quiet_NaN();
                result.log.diagnostic = err.what();
            }
            bool finite = std::isfinite(total);
            for (const auto &[path, g] : grads) finite = finite && g.all_finite();
            if (!finite) {
                if (result.log.diagnostic.empty())
                    result.log.diagnostic = "non-finite loss at epoch " + std::to_string(epoch) + ", batch starting " +
                                            std::to_string(begin);
                log::warn("training aborted: " + result.log.diagnostic);
                params.norm_stats = saved_stats;
                result.aborted = true;
                break;
            }
            opt.step(params, grads, e.lr);
            e.loss_first += lf;
            e.loss_second += ls;
            e.loss_total += total;
        }
        if (result.aborted) break;

        if (first_count) e.loss_first_mm = e.loss_first / first_count * kMillimetersPerModelUnit;
        if (second_count) e.loss_second_mm = e.loss_second / second_count * kMillimetersPerModelUnit;
        e.eval = evaluate(mc, params, held, cfg.eval_flip, spec);
        e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!std::isfinite(e.eval.mpjpe)) {
            result.log.diagnostic = "non-finite evaluation error at epoch " + std::to_string(epoch);
            log::warn("training aborted: " + result.log.diagnostic);
            result.aborted = true;
            break;
        }
        if (e.eval.mpjpe < best) {
            best = e.eval.mpjpe;
            result.best_params = params;
            result.log.best_epoch = epoch;
        }
        log::info("epoch " + std::to_string(epoch) + " lr " + std::to_string(e.lr) + " loss " +
                  std::to_string(e.loss_total) + " eval mpjpe " + std::to_string(e.eval.mpjpe));
        if (on_epoch) on_epoch(e);
        result.log.epochs.push_back(std::move(e));
    }
    result.final_params = std::move(params);
    return result;
}

Grid predict_centers(const ModelConfig &cfg, const ParameterSet &params, const Dataset &ds, bool flip_averaging,
                     const SkeletonSpec &spec) {
    check_dataset(cfg, ds, "evaluation");
    const std::size_t N = ds.samples.size(), J = cfg.J;
    constexpr std::size_t kChunk = 256;
    const std::size_t chunks = (N + kChunk - 1) / kChunk;
    Grid out({N, J, 3});
    std::vector<std::size_t> idx(N);
    for (std::size_t i = 0; i < N; ++i) idx[i] = i;

    auto run_chunk = [&](std::size_t c) {
        const std::size_t begin = c * kChunk, end = std::min(N, begin + kChunk);
        const Batch b = assemble(ds, idx, begin, end, nullptr, spec);
        Grid pred = predict(cfg, params, b.input).target3d;  // [B, J, 3]
        if (flip_averaging) {
            Grid flipped_pred = flip_poses(predict(cfg, params, flip_poses(b.input, spec)).target3d, spec);
            for (std::size_t k = 0; k < pred.size(); ++k) pred.data()[k] = 0.5 * (pred.data()[k] + flipped_pred.data()[k]);
        }
        for (std::size_t k = 0; k < pred.size(); ++k)
            out.data()[begin * J * 3 + k] = pred.data()[k] * kMillimetersPerModelUnit;
    };

    const std::size_t workers = std::min(worker_count(), chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t c = w; c < chunks; c += workers) run_chunk(c);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto &t : pool) t.join();
        for (auto &e : errors)
            if (e) std::rethrow_exception(e);
    }
    return out;
}

MetricReport score_predictions(const Grid &centers_mm, const Dataset &ds) {
    const std::size_t N = ds.samples.size(), J = ds.J;
    require(centers_mm.shape() == Shape{N, J, 3}, ErrorKind::dimension,
            "score_predictions: expected [" + std::to_string(N) + ", " + std::to_string(J) + ", 3], got " +
                shape_str(centers_mm.shape()));

    struct Acc {
        double mpjpe = 0.0, p_mpjpe = 0.0, vel = 0.0;
        std::size_t frames = 0, vel_frames = 0;
    };
    std::map<std::string, Acc> acc;
    std::map<std::uint32_t, std::vector<std::size_t>> by_sequence;
    ProcrustesInfo info_total;

    auto frame_of = [&](const Grid &g, std::size_t i) {
        Grid f({J, 3});
        std::copy(g.data().begin() + i * J * 3, g.data().begin() + (i + 1) * J * 3, f.data().begin());
        return f;
    };
    for (std::size_t i = 0; i < N; ++i) {
        const PoseSequenceSample &s = ds.samples[i];
        const Grid gt = s.target3d_center();
        const Grid pr = frame_of(centers_mm, i);
        Acc &a = acc[s.action];
        ProcrustesInfo info;
        a.mpjpe += mpjpe(pr, gt);
        a.p_mpjpe += p_mpjpe(pr, gt, &info);
        info_total.degenerate_frames += info.degenerate_frames;
        a.frames += 1;
        by_sequence[s.sequence_id].push_back(i);
    }
    if (info_total.degenerate_frames)
        log::warn(std::to_string(info_total.degenerate_frames) + " frame(s) aligned by translation only");

    for (auto &[seq, members] : by_sequence) {
        if (members.size() < 2) continue;
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return ds.samples[a].frame_index < ds.samples[b].frame_index;
        });
        const std::size_t F = members.size();
        Grid pr({F, J, 3}), gt({F, J, 3});
        for (std::size_t f = 0; f < F; ++f) {
            const Grid g = ds.samples[members[f]].target3d_center();
            std::copy(g.data().begin(), g.data().end(), gt.data().begin() + f * J * 3);
            std::copy(centers_mm.data().begin() + members[f] * J * 3,
                      centers_mm.data().begin() + (members[f] + 1) * J * 3, pr.data().begin() + f * J * 3);
        }
        Acc &a = acc[ds.samples[members[0]].action];
        a.vel += mpjve(pr, gt) * static_cast<double>(F - 1);
        a.vel_frames += F - 1;
    }

    MetricReport report;
    for (const auto &[action, a] : acc) {
        ActionMetrics m;
        m.frames = a.frames;
        m.mpjpe = a.mpjpe / static_cast<double>(a.frames);
        m.p_mpjpe = a.p_mpjpe / static_cast<double>(a.frames);
        m.mpjve = a.vel_frames ? a.vel / static_cast<double>(a.vel_frames) : 0.0;
        report.per_action[action] = m;
    }
    report.finalize_average();
    return report;
}

MetricReport evaluate(const ModelConfig &cfg, const ParameterSet &params, const Dataset &ds, bool flip_averaging,
                      const SkeletonSpec &spec) {
    return score_predictions(predict_centers(cfg, params, ds, flip_averaging, spec), ds);
}

}  // namespace spose
