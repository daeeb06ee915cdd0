// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "olat/relight.hpp"

namespace olat {

// Static-pose reflectance fields plus their relit frames under the
// calibrated interview lighting. Fields here are already linearized (the
// dual gamma is applied at load time), so relight(field, w) == relit.
struct ExemplarSet {
    struct Pose {
        ReflectanceField field;
        ImageF relit;
    };
    std::vector<Pose> poses;

    int count() const { return int(poses.size()); }
    void validate() const;
};

enum class EstimateSolver {
    Ridge,
    Iterative,
};

struct EstimationConfig {
    double lambda_prior = 0.1;
    double blend_temperature = 0.0; // <= 0: auto, 0.01 * mean masked energy
    int iterations = 200;           // iterative solver only
    double step_size = 0.0;         // <= 0: auto, near-optimal for the quadratic
    EstimateSolver solver = EstimateSolver::Ridge;
    LossWeights loss_weights;

    void validate() const;
};

// Softmax over poses of -masked_mse(frame, relit_p) / temperature.
// Weights are positive and sum to one.
std::vector<double> exemplar_blend(const ImageF& frame, const ExemplarSet& ex,
                                   const MaskImage& mask, double temperature);

double auto_blend_temperature(const ImageF& frame, const MaskImage& mask);

// Convex combination of the exemplar fields under the blend weights.
ReflectanceField prior_field(const std::vector<double>& blend, const ExemplarSet& ex);

// Closed-form per-pixel ridge update. Per pixel and channel, with w_c the
// N-vector of channel weights, i the frame value, and r0 the prior:
//   r = r0 + w_c * (i - w_c . r0) / (|w_c|^2 + lambda)
// the unique minimizer of (w_c . r - i)^2 + lambda * |r - r0|^2.
// Pixels with zero mask weight return r0 unchanged.
ReflectanceField estimate_field_ridge(const ImageF& frame, const LightingWeights& w,
                                      const ReflectanceField& r0,
                                      const MaskImage& mask, double lambda_prior);

struct IterativeResult {
    ReflectanceField field;
    std::vector<double> loss_trace; // objective before step 0, then per step
};

// Fixed-step gradient descent from r0 on the per-pixel objective, summed over
// pixels with m(p) > 0 (masked-out pixels stay frozen at r0):
//   lambda2 * sum_c (w_c . r - i)^2
//   + lambda_prior * |r - r0|^2
//   + lambda1 * |r - gt|^2                           (lambda1 term if gt given)
// The mask gates rather than scales, so the lambda1 == 0 minimizer coincides
// with estimate_field_ridge. Aborts if the loss rises five steps in a row.
IterativeResult estimate_field_iterative(const ImageF& frame, const LightingWeights& w,
                                         const ReflectanceField& r0,
                                         const MaskImage& mask,
                                         const EstimationConfig& cfg,
                                         const std::optional<ReflectanceField>& gt = {});

struct FrameEstimate {
    ReflectanceField field;
    std::vector<double> blend;
    double temperature = 0.0;
    double residual_before = 0.0; // masked MSE of relight(prior) vs frame
    double residual_after = 0.0;  // masked MSE of relight(estimate) vs frame
    std::vector<double> loss_trace; // iterative solver only
};

// Blend -> prior -> solve for one frame.
FrameEstimate estimate_frame(const ImageF& frame, const MaskImage& mask,
                             const LightingWeights& w, const ExemplarSet& ex,
                             const EstimationConfig& cfg);

// Per-frame pipeline over an image sequence; frames are independent and may
// run on up to `jobs` threads. Errors carry the failing frame index.
std::vector<FrameEstimate> estimate_video(const std::vector<ImageF>& frames,
                                          const std::vector<MaskImage>& masks,
                                          const LightingWeights& w,
                                          const ExemplarSet& ex,
                                          const EstimationConfig& cfg, int jobs = 1);

} // namespace olat
