// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "olat/image.hpp"
#include "olat/probe.hpp"
#include "olat/relight.hpp"

namespace olat {

// Two-exponent camera linearization curve:
//   I' = (1 - I) * I^g1 + I * I^g2
// g1 shapes the lower range, g2 the upper; the blend weight is the raw
// per-channel value. Fixes 0 and 1 exactly and is monotone on [0,1] for
// exponents in [0.2, 5].
struct DualGamma {
    double gamma1 = 1.0;
    double gamma2 = 1.0;

    void validate() const;
    double evaluate(double v) const;
};

struct GammaFitOptions {
    double lo = 0.2;
    double hi = 5.0;
    int grid = 11;           // coarse grid points per axis
    int max_iterations = 200; // Nelder-Mead refinement budget
    double tolerance = 1e-4;  // simplex diameter termination
};

struct GammaFitResult {
    DualGamma gamma;
    double residual = 0.0; // masked MSE at the optimum
};

// Per-pixel, per-channel curve evaluation. Inputs above 1 clamp first (the
// over-range counter tracks how many).
ImageF apply_dual_gamma(const ImageF& img, const DualGamma& g);

ReflectanceField apply_dual_gamma(const ReflectanceField& field, const DualGamma& g);

// Minimizes the masked MSE between relight(apply_dual_gamma(olats, g), w)
// and target over (g1, g2): coarse grid search then Nelder-Mead refinement.
GammaFitResult fit_dual_gamma(const ReflectanceField& olats,
                              const LightingWeights& w, const ImageF& target,
                              const MaskImage& mask,
                              const GammaFitOptions& opts = {});

// Masked mean squared error over pixels and channels; shared by the gamma
// fit and the exemplar blend.
double masked_mse(const ImageF& a, const ImageF& b, const MaskImage& mask);

} // namespace olat
