// SPDX-License-Identifier: Apache-2.0
//
// dualband-sim: dual-band MIMO channel estimation simulator
// Copyright (C) 2026 The dualband-sim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include "dualband/estimators.hpp"

#include "dualband/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dualband
{

namespace
{

// Steering vector parameterised directly by u = sin(angle).
ComplexVector steering_u(Eigen::Index m, double spacing, double u)
{
    ComplexVector a(m);
    const double step = -2.0 * std::numbers::pi * spacing * u;
    for (Eigen::Index i = 0; i < m; ++i)
        a(i) = std::polar(1.0, step * static_cast<double>(i));
    return a;
}

double objective_u(const ChannelTensor &h, double spacing, double u_rx, double u_tx)
{
    const ComplexVector a_rx = steering_u(h.rows(), spacing, u_rx);
    const ComplexVector a_tx = steering_u(h.cols(), spacing, u_tx);
    double j = 0.0;
    for (std::size_t n = 0; n < h.size(); ++n)
        j += std::norm(a_rx.dot(h[n] * a_tx));
    return j;
}

// Maximise f on [lo, hi]; returns the arg max found.
template <typename F>
double golden_section_max(F &&f, double lo, double hi, double tol = 1e-12)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol)
    {
        if (f1 < f2)
        {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        else
        {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

double angle_objective(const ChannelTensor &h, double spacing_in_wavelengths, double aoa, double aod)
{
    return objective_u(h, spacing_in_wavelengths, std::sin(aoa), std::sin(aod));
}

AngleEstimate estimate_angles(const ChannelTensor &h, double spacing, std::size_t grid_size)
{
    if (grid_size < 2)
        throw std::invalid_argument("estimate_angles: grid_size must be at least 2");
    if (h.empty())
        throw std::invalid_argument("estimate_angles: empty channel estimate");

    const auto g = static_cast<Eigen::Index>(grid_size);
    const Eigen::Index m_rx = h.rows();
    const Eigen::Index m_tx = h.cols();
    const auto num_sc = static_cast<Eigen::Index>(h.size());
    auto grid_u = [&](Eigen::Index i) { return -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(g - 1); };

    ComplexMatrix a_tx(m_tx, g), a_rx(m_rx, g);
    for (Eigen::Index i = 0; i < g; ++i)
    {
        a_tx.col(i) = steering_u(m_tx, spacing, grid_u(i));
        a_rx.col(i) = steering_u(m_rx, spacing, grid_u(i));
    }

    // Rows n*M_Rx .. n*M_Rx+M_Rx-1 hold H[n]; column k of (stacked * a_tx), viewed as an
    // M_Rx x N block, collects H[n] a_tx(u_k) for every n.
    ComplexMatrix stacked(m_rx * num_sc, m_tx);
    for (Eigen::Index n = 0; n < num_sc; ++n)
        stacked.middleRows(n * m_rx, m_rx) = h[static_cast<std::size_t>(n)];
    const ComplexMatrix beams = stacked * a_tx;

    Eigen::MatrixXd objective(g, g); // (aoa index, aod index)
    for (Eigen::Index k = 0; k < g; ++k)
    {
        Eigen::Map<const ComplexMatrix> block(beams.col(k).data(), m_rx, num_sc);
        const ComplexMatrix cov = block * block.adjoint();
        const ComplexMatrix proj = cov * a_rx;
        objective.col(k) = (a_rx.conjugate().cwiseProduct(proj)).colwise().sum().real().transpose();
    }

    Eigen::Index best_rx = 0, best_tx = 0;
    double best = objective(0, 0);
    for (Eigen::Index i = 0; i < g; ++i)
        for (Eigen::Index k = 0; k < g; ++k)
            if (objective(i, k) > best)
            {
                best = objective(i, k);
                best_rx = i;
                best_tx = k;
            }

    double u_rx = grid_u(best_rx);
    double u_tx = grid_u(best_tx);
    double j_best = objective_u(h, spacing, u_rx, u_tx);

    // J is periodic in u with period 1/spacing, so the search may step past +-1 at the grid
    // ends; the result is wrapped back (and clamped if the period leaves a gap).
    const double period = 1.0 / spacing;
    auto refine = [&](Eigen::Index idx, auto &&f) {
        double cand = golden_section_max(f, grid_u(idx - 1), grid_u(idx + 1));
        if (cand > 1.0)
            cand -= period;
        else if (cand < -1.0)
            cand += period;
        cand = std::clamp(cand, -1.0, 1.0);
        return std::make_pair(cand, f(cand));
    };

    // Along one axis J is a quadratic form a^H R a with R summed over subcarriers once.
    {
        const ComplexVector a_tx_fixed = steering_u(m_tx, spacing, u_tx);
        ComplexMatrix r = ComplexMatrix::Zero(m_rx, m_rx);
        for (std::size_t n = 0; n < h.size(); ++n)
        {
            const ComplexVector b = h[n] * a_tx_fixed;
            r.noalias() += b * b.adjoint();
        }
        auto [cand, j] = refine(best_rx, [&](double u) {
            const ComplexVector a = steering_u(m_rx, spacing, u);
            return a.dot(r * a).real();
        });
        j = objective_u(h, spacing, cand, u_tx);
        if (j > j_best * (1.0 + 1e-12))
        {
            u_rx = cand;
            j_best = j;
        }
    }
    {
        const ComplexVector a_rx_fixed = steering_u(m_rx, spacing, u_rx);
        ComplexMatrix r = ComplexMatrix::Zero(m_tx, m_tx);
        for (std::size_t n = 0; n < h.size(); ++n)
        {
            const ComplexVector b = h[n].adjoint() * a_rx_fixed;
            r.noalias() += b * b.adjoint();
        }
        auto [cand, j] = refine(best_tx, [&](double u) {
            const ComplexVector a = steering_u(m_tx, spacing, u);
            return a.dot(r * a).real();
        });
        j = objective_u(h, spacing, u_rx, cand);
        if (j > j_best * (1.0 + 1e-12))
        {
            u_tx = cand;
            j_best = j;
        }
    }

    return {std::asin(std::clamp(u_rx, -1.0, 1.0)), std::asin(std::clamp(u_tx, -1.0, 1.0)), j_best};
}

double estimate_k_factor(const ComplexVector &samples)
{
    const Eigen::Index count = samples.size();
    if (count < 8)
        throw std::invalid_argument("estimate_k_factor: need at least 8 samples");
    const Eigen::ArrayXd power = samples.array().abs2();
    const double m2 = power.mean();
    if (!(m2 > 0.0))
        return 0.0;
    const double var = (power - m2).square().mean();
    const double gamma = std::clamp(var / (m2 * m2), 1e-6, 1.0);
    const double root = std::sqrt(1.0 - gamma);
    if (root >= 1.0)
        return k_factor_max;
    return std::clamp(root / (1.0 - root), 0.0, k_factor_max);
}

double estimate_k_factor(const ChannelTensor &h)
{
    Eigen::Map<const ComplexVector> all(h.data().data(), static_cast<Eigen::Index>(h.data().size()));
    return estimate_k_factor(ComplexVector(all));
}

double mrc_weight(double k_factor_sub6, double noise_variance, std::size_t num_tx, std::size_t num_rx, double k_scale)
{
    if (!(k_factor_sub6 >= 0.0))
        throw std::invalid_argument("mrc_weight: K-factor must be non-negative");
    if (!(noise_variance >= 0.0))
        throw std::invalid_argument("mrc_weight: noise variance must be non-negative");
    if (noise_variance == 0.0)
        return 0.0;
    const double m = static_cast<double>(num_tx * num_rx);
    const double num = m * noise_variance;
    return num / (m / (1.0 + k_scale * k_factor_sub6) + (1.0 + m) * noise_variance);
}

double mrc_weight(double k_factor_sub6, double noise_variance, const DualBandConfig &cfg)
{
    return mrc_weight(k_factor_sub6, noise_variance, cfg.mmw.num_tx, cfg.mmw.num_rx, cfg.k_scale);
}

CombinedEstimate mrc_combine(const ChannelTensor &oob, const ChannelTensor &inband, double weight)
{
    if (!oob.same_shape(inband))
        throw std::invalid_argument("mrc_combine: estimate dimensions differ");
    if (!(weight >= 0.0 && weight <= 1.0))
        throw std::invalid_argument("mrc_combine: weight must lie in [0, 1]");
    ChannelTensor out(oob.size(), oob.rows(), oob.cols());
    for (std::size_t i = 0; i < out.data().size(); ++i)
        out.data()[i] = weight * oob.data()[i] + (1.0 - weight) * inband.data()[i];
    return {std::move(out), "mrc", weight};
}

CombinedEstimate baseline_inband(const ChannelTensor &inband) { return {inband, "non_ml", 0.0}; }

CombinedEstimate baseline_perfect(const ChannelTensor &truth) { return {truth, "perfect", 0.0}; }

} // namespace dualband
