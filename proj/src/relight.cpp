// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#include "olat/relight.hpp"

#include <cmath>
#include <string>

#include "olat/gamma.hpp"

namespace olat {

void ReflectanceField::validate() const
{
    if (olats.empty())
        fail(ErrorCode::InvalidArgument, "reflectance field needs >= 1 OLAT");
    for (const ImageF& img : olats)
        if (img.dims() != olats[0].dims())
            fail(ErrorCode::DimensionMismatch,
                 "reflectance field OLATs have mixed dims");
}

const FeatureExtractor& identity_extractor()
{
    static const IdentityExtractor fx;
    return fx;
}

void LossWeights::validate() const
{
    if (lambda1 < 0.0 || lambda2 < 0.0)
        fail(ErrorCode::InvalidArgument, "loss weights must be >= 0");
    if (lambda1 == 0.0 && lambda2 == 0.0)
        fail(ErrorCode::InvalidArgument, "loss weights cannot both be zero");
}

ImageF relight(const ReflectanceField& field, const LightingWeights& w)
{
    field.validate();
    if (w.basis_count() != field.count())
        fail(ErrorCode::DimensionMismatch,
             "relight: " + std::to_string(w.basis_count()) + " weights vs " +
                 std::to_string(field.count()) + " OLATs");

    const ImageDims dims = field.dims();
    ImageF out(dims.width, dims.height, 0.0);
    double* acc = out.data();
    for (int k = 0; k < field.count(); ++k) {
        const double* src = field.olats[std::size_t(k)].data();
        const double wr = w.values[std::size_t(k)][0];
        const double wg = w.values[std::size_t(k)][1];
        const double wb = w.values[std::size_t(k)][2];
        const std::size_t n = out.pixel_count();
        for (std::size_t p = 0; p < n; ++p) {
            acc[p * 3 + 0] += wr * src[p * 3 + 0];
            acc[p * 3 + 1] += wg * src[p * 3 + 1];
            acc[p * 3 + 2] += wb * src[p * 3 + 2];
        }
    }
    return out;
}

namespace {

double require_mask_mass(const MaskImage& mask)
{
    const double mass = mask_mass(mask);
    if (mass <= 0.0)
        fail(ErrorCode::InvalidArgument, "mask mass is zero");
    return mass;
}

void require_same_dims(ImageDims a, ImageDims b, const char* who)
{
    if (a != b)
        fail(ErrorCode::DimensionMismatch, std::string(who) + ": dims differ");
}

} // namespace

double rendering_loss(const ImageF& relit, const ImageF& target,
                      const MaskImage& mask, const FeatureExtractor& fx)
{
    require_same_dims(relit.dims(), target.dims(), "rendering_loss");
    require_same_dims(relit.dims(), mask.dims(), "rendering_loss");
    const double mass = require_mask_mass(mask);

    const auto fr = fx.extract(relit);
    const auto ft = fx.extract(target);
    double loss = 0.0;
    for (std::size_t j = 0; j < fr.size(); ++j) {
        require_same_dims(fr[j].dims(), mask.dims(), "rendering_loss features");
        double sq = 0.0;
        for (int y = 0; y < mask.height(); ++y)
            for (int x = 0; x < mask.width(); ++x) {
                const double m = mask.at(x, y);
                if (m == 0.0)
                    continue;
                for (int c = 0; c < 3; ++c) {
                    const double d = fr[j].at(x, y, c) - ft[j].at(x, y, c);
                    sq += m * d * d;
                }
            }
        loss += std::sqrt(sq);
    }
    return loss / mass;
}

double rendering_loss_squared(const ImageF& relit, const ImageF& target,
                              const MaskImage& mask)
{
    require_same_dims(relit.dims(), target.dims(), "rendering_loss_squared");
    require_same_dims(relit.dims(), mask.dims(), "rendering_loss_squared");
    const double mass = require_mask_mass(mask);

    double sq = 0.0;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            const double m = mask.at(x, y);
            if (m == 0.0)
                continue;
            for (int c = 0; c < 3; ++c) {
                const double d = relit.at(x, y, c) - target.at(x, y, c);
                sq += m * d * d;
            }
        }
    return sq / mass;
}

double reconstruction_loss(const ReflectanceField& pred, const ReflectanceField& gt,
                           const MaskImage& mask, const FeatureExtractor& fx)
{
    if (pred.count() != gt.count())
        fail(ErrorCode::DimensionMismatch, "reconstruction_loss: OLAT counts differ");
    double loss = 0.0;
    for (int i = 0; i < pred.count(); ++i)
        loss += rendering_loss(pred.olats[std::size_t(i)], gt.olats[std::size_t(i)],
                               mask, fx);
    return loss;
}

double combined_loss(const ReflectanceField& pred,
                     const std::optional<ReflectanceField>& gt, const ImageF& frame,
                     const LightingWeights& w, const MaskImage& mask,
                     const LossWeights& lw, const FeatureExtractor& fx)
{
    lw.validate();
    if (lw.lambda1 > 0.0 && !gt.has_value())
        fail(ErrorCode::InvalidArgument,
             "combined_loss: lambda1 > 0 requires ground truth");
    double loss = 0.0;
    if (lw.lambda1 > 0.0)
        loss += lw.lambda1 * reconstruction_loss(pred, *gt, mask, fx);
    if (lw.lambda2 > 0.0)
        loss += lw.lambda2 * rendering_loss(relight(pred, w), frame, mask, fx);
    return loss;
}

std::vector<ImageF> rendering_loss_gradient(const ReflectanceField& field,
                                            const LightingWeights& w,
                                            const ImageF& target,
                                            const MaskImage& mask)
{
    field.validate();
    if (w.basis_count() != field.count())
        fail(ErrorCode::DimensionMismatch, "rendering_loss_gradient: weight count");
    require_same_dims(field.dims(), target.dims(), "rendering_loss_gradient");
    require_same_dims(field.dims(), mask.dims(), "rendering_loss_gradient");
    const double mass = require_mask_mass(mask);

    const ImageF relit = relight(field, w);
    const ImageDims dims = field.dims();
    std::vector<ImageF> grad;
    grad.reserve(std::size_t(field.count()));
    for (int k = 0; k < field.count(); ++k)
        grad.emplace_back(dims.width, dims.height, 0.0);

    for (int y = 0; y < dims.height; ++y)
        for (int x = 0; x < dims.width; ++x) {
            const double m = mask.at(x, y);
            if (m == 0.0)
                continue;
            for (int c = 0; c < 3; ++c) {
                const double r = (2.0 / mass) * m *
                                 (relit.at(x, y, c) - target.at(x, y, c));
                for (int k = 0; k < field.count(); ++k)
                    grad[std::size_t(k)].at(x, y, c) =
                        r * w.values[std::size_t(k)][std::size_t(c)];
            }
        }
    return grad;
}

ImageF synth_tracking_frame(const ReflectanceField& exemplar,
                            const LightingWeights& w, const DualGamma& g)
{
    return relight(apply_dual_gamma(exemplar, g), w);
}

} // namespace olat
