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

#include "metrics/metrics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <iomanip>

#include "util/log.hpp"

namespace spose {

namespace {

void check_pose_pair(const Grid &pred, const Grid &gt, const char *what) {
    require(pred.shape() == gt.shape(), ErrorKind::dimension,
            std::string(what) + ": shapes " + shape_str(pred.shape()) + " and " + shape_str(gt.shape()) + " differ");
    require(pred.rank() >= 2 && pred.shape().back() == 3, ErrorKind::dimension,
            std::string(what) + ": expected [..., J, 3], got " + shape_str(pred.shape()));
}

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

Points frame_points(const Grid &g, std::size_t frame, std::size_t joints) {
    Points p(joints, 3);
    for (std::size_t j = 0; j < joints; ++j)
        for (std::size_t c = 0; c < 3; ++c) p(j, c) = g[(frame * joints + j) * 3 + c];
    return p;
}

// Returns a * pred * R + t, the similarity transform of pred closest to gt.
Points align(const Points &pred, const Points &gt, bool &degenerate) {
    const Eigen::RowVector3d mu_gt = gt.colwise().mean();
    const Eigen::RowVector3d mu_pred = pred.colwise().mean();
    Points x0 = gt.rowwise() - mu_gt;
    Points y0 = pred.rowwise() - mu_pred;
    const double norm_x = x0.norm();
    const double norm_y = y0.norm();
    degenerate = norm_x < 1e-12 || norm_y < 1e-12;
    if (degenerate) {
        Points out = pred.rowwise() + (mu_gt - mu_pred);
        return out;
    }
    x0 /= norm_x;
    y0 /= norm_y;
    const Eigen::Matrix3d h = x0.transpose() * y0;
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d v = svd.matrixV();
    const Eigen::Matrix3d u = svd.matrixU();
    Eigen::Vector3d s = svd.singularValues();
    Eigen::Matrix3d r = v * u.transpose();
    if (r.determinant() < 0.0) {
        // Exclude reflections: flip the axis of the smallest singular value.
        v.col(2) *= -1.0;
        s(2) *= -1.0;
        r = v * u.transpose();
    }
    const double a = s.sum() * norm_x / norm_y;
    const Eigen::RowVector3d t = mu_gt - a * mu_pred * r;
    Points out = (a * pred * r).rowwise() + t;
    return out;
}

}  // namespace

double mpjpe(const Grid &pred, const Grid &gt) {
    check_pose_pair(pred, gt, "mpjpe");
    const std::size_t rows = rows_of(pred);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            const double d = pred[r * 3 + c] - gt[r * 3 + c];
            s += d * d;
        }
        total += std::sqrt(s);
    }
    return total / static_cast<double>(rows);
}

Grid procrustes_align(const Grid &pred, const Grid &gt, bool *degenerate) {
    check_pose_pair(pred, gt, "procrustes_align");
    require(pred.rank() == 2, ErrorKind::dimension, "procrustes_align expects one frame [J, 3]");
    const std::size_t joints = pred.dim(0);
    bool degen = false;
    Points aligned = align(frame_points(pred, 0, joints), frame_points(gt, 0, joints), degen);
    if (degenerate) *degenerate = degen;
    Grid out(pred.shape());
    for (std::size_t j = 0; j < joints; ++j)
        for (std::size_t c = 0; c < 3; ++c) out[j * 3 + c] = aligned(j, c);
    return out;
}

double p_mpjpe(const Grid &pred, const Grid &gt, ProcrustesInfo *info) {
    check_pose_pair(pred, gt, "p_mpjpe");
    const std::size_t joints = pred.shape()[pred.rank() - 2];
    const std::size_t frames = pred.size() / (joints * 3);
    double total = 0.0;
    std::size_t degenerate_frames = 0;
    for (std::size_t f = 0; f < frames; ++f) {
        const Points g = frame_points(gt, f, joints);
        bool degen = false;
        const Points a = align(frame_points(pred, f, joints), g, degen);
        if (degen) ++degenerate_frames;
        total += (a - g).rowwise().norm().sum();
    }
    if (degenerate_frames > 0)
        log::warn("p_mpjpe: " + std::to_string(degenerate_frames) +
                  " degenerate frame(s) aligned by translation only");
    if (info) *info = {frames, degenerate_frames};
    return total / static_cast<double>(frames * joints);
}

double mpjve(const Grid &pred_seq, const Grid &gt_seq) {
    check_pose_pair(pred_seq, gt_seq, "mpjve");
    require(pred_seq.rank() == 3, ErrorKind::dimension, "mpjve expects [F, J, 3]");
    const std::size_t frames = pred_seq.dim(0), joints = pred_seq.dim(1);
    require(frames >= 2, ErrorKind::dimension, "mpjve needs at least two frames");
    Grid dp({frames - 1, joints, 3}), dg({frames - 1, joints, 3});
    const std::size_t stride = joints * 3;
    for (std::size_t i = 0; i < dp.size(); ++i) {
        dp[i] = pred_seq[i + stride] - pred_seq[i];
        dg[i] = gt_seq[i + stride] - gt_seq[i];
    }
    return mpjpe(dp, dg);
}

void MetricReport::finalize_average() {
    mpjpe = p_mpjpe = mpjve = 0.0;
    if (per_action.empty()) return;
    for (const auto &[tag, m] : per_action) {
        mpjpe += m.mpjpe;
        p_mpjpe += m.p_mpjpe;
        mpjve += m.mpjve;
    }
    const double n = static_cast<double>(per_action.size());
    mpjpe /= n;
    p_mpjpe /= n;
    mpjve /= n;
}

void write_metric_csv(std::ostream &os, const MetricReport &report) {
    const auto old_flags = os.flags();
    const auto old_prec = os.precision();
    os << std::setprecision(17);
    os << "action,mpjpe,p_mpjpe,mpjve,frames\n";
    std::size_t total_frames = 0;
    for (const auto &[tag, m] : report.per_action) {
        os << tag << ',' << m.mpjpe << ',' << m.p_mpjpe << ',' << m.mpjve << ',' << m.frames << '\n';
        total_frames += m.frames;
    }
    os << "Avg.," << report.mpjpe << ',' << report.p_mpjpe << ',' << report.mpjve << ',' << total_frames << '\n';
    os.flags(old_flags);
    os.precision(old_prec);
}

}  // namespace spose
