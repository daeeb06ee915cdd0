// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#include "olat/gamma.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace olat {

void DualGamma::validate() const
{
    if (!(gamma1 >= 0.2 && gamma1 <= 5.0 && gamma2 >= 0.2 && gamma2 <= 5.0))
        fail(ErrorCode::InvalidArgument, "gamma exponents must lie in [0.2, 5]");
}

double DualGamma::evaluate(double v) const
{
    // v in [0,1]; pow(0, g) = 0 and pow(1, g) = 1, so the endpoints are fixed.
    return (1.0 - v) * std::pow(v, gamma1) + v * std::pow(v, gamma2);
}

ImageF apply_dual_gamma(const ImageF& img, const DualGamma& g)
{
    g.validate();
    ImageF out(img.width(), img.height());
    const double* src = img.data();
    double* dst = out.data();
    std::uint64_t clamped = 0;
    const std::size_t n = img.value_count();
    for (std::size_t i = 0; i < n; ++i) {
        double v = src[i];
        if (v > 1.0) {
            v = 1.0;
            ++clamped;
        }
        dst[i] = g.evaluate(v);
    }
    if (clamped)
        diag::add_over_range_clamps(clamped);
    return out;
}

ReflectanceField apply_dual_gamma(const ReflectanceField& field, const DualGamma& g)
{
    ReflectanceField out;
    out.olats.reserve(field.olats.size());
    for (const ImageF& img : field.olats)
        out.olats.push_back(apply_dual_gamma(img, g));
    return out;
}

double masked_mse(const ImageF& a, const ImageF& b, const MaskImage& mask)
{
    if (a.dims() != b.dims() || a.dims() != mask.dims())
        fail(ErrorCode::DimensionMismatch, "masked_mse: dims differ");
    const double mass = mask_mass(mask);
    if (mass <= 0.0)
        fail(ErrorCode::InvalidArgument, "masked_mse: mask mass is zero");
    double sq = 0.0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            const double m = mask.at(x, y);
            if (m == 0.0)
                continue;
            for (int c = 0; c < 3; ++c) {
                const double d = a.at(x, y, c) - b.at(x, y, c);
                sq += m * d * d;
            }
        }
    return sq / (3.0 * mass);
}

namespace {

struct Simplex2 {
    std::array<std::array<double, 2>, 3> x;
    std::array<double, 3> f;
};

double simplex_diameter(const Simplex2& s)
{
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            d = std::max(d, std::hypot(s.x[std::size_t(i)][0] - s.x[std::size_t(j)][0],
                                       s.x[std::size_t(i)][1] - s.x[std::size_t(j)][1]));
    return d;
}

} // namespace

GammaFitResult fit_dual_gamma(const ReflectanceField& olats,
                              const LightingWeights& w, const ImageF& target,
                              const MaskImage& mask, const GammaFitOptions& opts)
{
    olats.validate();
    if (olats.dims() != target.dims() || olats.dims() != mask.dims())
        fail(ErrorCode::DimensionMismatch, "fit_dual_gamma: dims differ");
    if (mask_mass(mask) <= 0.0)
        fail(ErrorCode::InvalidArgument, "fit_dual_gamma: mask mass is zero");
    if (opts.grid < 2 || opts.hi <= opts.lo || opts.lo < 0.2 || opts.hi > 5.0)
        fail(ErrorCode::InvalidArgument, "fit_dual_gamma: bad search options");

    const auto clamp_param = [&](double v) {
        return std::clamp(v, opts.lo, opts.hi);
    };
    const auto objective = [&](double g1, double g2) {
        const DualGamma g{clamp_param(g1), clamp_param(g2)};
        const double loss = masked_mse(relight(apply_dual_gamma(olats, g), w), target, mask);
        if (!std::isfinite(loss))
            fail(ErrorCode::Numeric, "fit_dual_gamma: non-finite loss");
        return loss;
    };

    // Coarse candidates: a uniform grid, plus the identity curve since it is
    // the exact optimum for linearly captured footage yet falls between grid
    // nodes for most grid sizes.
    struct Candidate {
        double g1, g2, loss;
    };
    std::vector<Candidate> coarse;
    const double step = (opts.hi - opts.lo) / (opts.grid - 1);
    for (int i = 0; i < opts.grid; ++i)
        for (int j = 0; j < opts.grid; ++j) {
            const double g1 = opts.lo + i * step;
            const double g2 = opts.lo + j * step;
            coarse.push_back({g1, g2, objective(g1, g2)});
        }
    const double id1 = clamp_param(1.0), id2 = clamp_param(1.0);
    coarse.push_back({id1, id2, objective(id1, id2)});
    std::sort(coarse.begin(), coarse.end(),
              [](const Candidate& a, const Candidate& b) { return a.loss < b.loss; });

    // Nelder-Mead refinement around one start.
    const double h = 0.5 * step;
    const auto refine = [&](const Candidate& start) {
        Simplex2 s;
        s.x[0] = {start.g1, start.g2};
        s.x[1] = {clamp_param(start.g1 + h), start.g2};
        s.x[2] = {start.g1, clamp_param(start.g2 + h)};
        for (int i = 0; i < 3; ++i)
            s.f[std::size_t(i)] = objective(s.x[std::size_t(i)][0], s.x[std::size_t(i)][1]);

        constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
        for (int it = 0; it < opts.max_iterations; ++it) {
            // Order: s.x[0] best, s.x[2] worst.
            std::array<int, 3> idx = {0, 1, 2};
            std::sort(idx.begin(), idx.end(),
                      [&](int a, int b) { return s.f[std::size_t(a)] < s.f[std::size_t(b)]; });
            Simplex2 ordered;
            for (int i = 0; i < 3; ++i) {
                ordered.x[std::size_t(i)] = s.x[std::size_t(idx[std::size_t(i)])];
                ordered.f[std::size_t(i)] = s.f[std::size_t(idx[std::size_t(i)])];
            }
            s = ordered;
            if (simplex_diameter(s) < opts.tolerance)
                break;

            const double cx = 0.5 * (s.x[0][0] + s.x[1][0]);
            const double cy = 0.5 * (s.x[0][1] + s.x[1][1]);
            const auto try_point = [&](double t) {
                std::array<double, 2> p = {clamp_param(cx + t * (cx - s.x[2][0])),
                                           clamp_param(cy + t * (cy - s.x[2][1]))};
                return std::pair(p, objective(p[0], p[1]));
            };

            auto [xr, fr] = try_point(kReflect);
            if (fr < s.f[0]) {
                auto [xe, fe] = try_point(kExpand);
                if (fe < fr) {
                    s.x[2] = xe;
                    s.f[2] = fe;
                } else {
                    s.x[2] = xr;
                    s.f[2] = fr;
                }
            } else if (fr < s.f[1]) {
                s.x[2] = xr;
                s.f[2] = fr;
            } else {
                auto [xc, fc] = try_point(fr < s.f[2] ? kContract : -kContract);
                if (fc < std::min(fr, s.f[2])) {
                    s.x[2] = xc;
                    s.f[2] = fc;
                } else {
                    for (int i = 1; i < 3; ++i) {
                        s.x[std::size_t(i)][0] =
                            s.x[0][0] + kShrink * (s.x[std::size_t(i)][0] - s.x[0][0]);
                        s.x[std::size_t(i)][1] =
                            s.x[0][1] + kShrink * (s.x[std::size_t(i)][1] - s.x[0][1]);
                        s.f[std::size_t(i)] =
                            objective(s.x[std::size_t(i)][0], s.x[std::size_t(i)][1]);
                    }
                }
            }
        }

        int best_idx = 0;
        for (int i = 1; i < 3; ++i)
            if (s.f[std::size_t(i)] < s.f[std::size_t(best_idx)])
                best_idx = i;
        return Candidate{s.x[std::size_t(best_idx)][0], s.x[std::size_t(best_idx)][1],
                         s.f[std::size_t(best_idx)]};
    };

    // A scene that only covers a narrow value range flattens the objective
    // into a curved valley with boundary-hugging local minima, so refine from
    // the few best starts instead of just the grid winner.
    Candidate best = coarse.front();
    const std::size_t starts = std::min<std::size_t>(3, coarse.size());
    for (std::size_t i = 0; i < starts; ++i) {
        const Candidate r = refine(coarse[i]);
        if (r.loss < best.loss)
            best = r;
    }
    GammaFitResult result;
    result.gamma = {best.g1, best.g2};
    result.residual = best.loss;
    return result;
}

} // namespace olat
