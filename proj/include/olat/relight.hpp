// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "olat/image.hpp"
#include "olat/probe.hpp"

namespace olat {

struct DualGamma; // gamma.hpp

// Ordered stack of N OLAT images sharing dimensions; basis id k is index k.
struct ReflectanceField {
    std::vector<ImageF> olats;

    int count() const { return int(olats.size()); }
    ImageDims dims() const { return olats.empty() ? ImageDims{} : olats[0].dims(); }

    void validate() const;
};

// Pluggable feature space for the losses. Extractors must be deterministic
// and preserve image dimensions; the identity extractor always ships.
class FeatureExtractor {
public:
    virtual ~FeatureExtractor() = default;
    virtual int layer_count() const = 0;
    virtual std::vector<ImageF> extract(const ImageF& img) const = 0;
};

class IdentityExtractor final : public FeatureExtractor {
public:
    int layer_count() const override { return 1; }
    std::vector<ImageF> extract(const ImageF& img) const override { return {img}; }
};

const FeatureExtractor& identity_extractor();

struct LossWeights {
    double lambda1 = 1.0; // reconstruction
    double lambda2 = 1.0; // rendering

    void validate() const;
};

// Per-pixel, per-channel weighted sum over basis images:
//   out(p,c) = sum_k w[k][c] * olat_k(p,c)
// A one-hot weight vector reproduces the corresponding OLAT bit-exactly.
ImageF relight(const ReflectanceField& field, const LightingWeights& w);

// Sum over feature layers of the mask-weighted L2 norm of the feature
// difference, divided by total mask mass.
double rendering_loss(const ImageF& relit, const ImageF& target,
                      const MaskImage& mask,
                      const FeatureExtractor& fx = identity_extractor());

// Smooth variant used for gradients and the iterative estimator:
//   (1/mass) * sum_p m(p) * |relit(p) - target(p)|^2
double rendering_loss_squared(const ImageF& relit, const ImageF& target,
                              const MaskImage& mask);

// Sum of rendering_loss over the N OLAT pairs.
double reconstruction_loss(const ReflectanceField& pred, const ReflectanceField& gt,
                           const MaskImage& mask,
                           const FeatureExtractor& fx = identity_extractor());

// lambda1 * L_rec + lambda2 * L_render; the rendering term compares
// relight(pred, w) against frame. gt may be absent only when lambda1 == 0.
double combined_loss(const ReflectanceField& pred,
                     const std::optional<ReflectanceField>& gt, const ImageF& frame,
                     const LightingWeights& w, const MaskImage& mask,
                     const LossWeights& lw,
                     const FeatureExtractor& fx = identity_extractor());

// Analytic gradient of rendering_loss_squared with respect to each basis
// image (identity features):
//   g_k(p,c) = (2/mass) * m(p) * (relit(p,c) - target(p,c)) * w[k][c]
std::vector<ImageF> rendering_loss_gradient(const ReflectanceField& field,
                                            const LightingWeights& w,
                                            const ImageF& target,
                                            const MaskImage& mask);

// relight(apply_dual_gamma(exemplar, g), w): an exemplar pose rendered under
// the calibrated interview lighting.
ImageF synth_tracking_frame(const ReflectanceField& exemplar,
                            const LightingWeights& w, const DualGamma& g);

} // namespace olat
