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
#include "dualband/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dualband
{

namespace
{

// Orthogonalise v against the first `count` columns of basis (two passes).
void orthogonalize(ComplexVector &v, const ComplexMatrix &basis, Eigen::Index count)
{
    for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index k = 0; k < count; ++k)
            v -= basis.col(k).dot(v) * basis.col(k);
}

// Next canonical basis vector that is not (numerically) in the span of the first `count` columns.
ComplexVector completion_vector(const ComplexMatrix &basis, Eigen::Index count, Eigen::Index &next_canonical)
{
    const Eigen::Index dim = basis.rows();
    while (next_canonical < dim)
    {
        ComplexVector v = ComplexVector::Unit(dim, next_canonical++);
        orthogonalize(v, basis, count);
        const double norm = v.norm();
        if (norm > 0.5)
            return v / norm;
    }
    throw std::logic_error("svd_compact: basis completion failed");
}

void fix_phase(Eigen::Ref<ComplexVector> f)
{
    const double max_mag = f.cwiseAbs().maxCoeff();
    if (max_mag == 0.0)
        return;
    for (Eigen::Index r = 0; r < f.size(); ++r)
    {
        if (std::abs(f(r)) >= max_mag * (1.0 - 1e-12))
        {
            f *= std::conj(f(r)) / std::abs(f(r));
            f(r) = std::abs(f(r));
            return;
        }
    }
}

} // namespace

CompactSvd svd_compact(const ComplexMatrix &h)
{
    if (h.size() == 0)
        throw std::invalid_argument("svd_compact: empty matrix");
    const Eigen::Index m_rx = h.rows();
    const Eigen::Index m_tx = h.cols();
    const Eigen::Index l_max = std::min(m_rx, m_tx);

    CompactSvd out;
    out.q = ComplexMatrix::Zero(m_rx, l_max);
    out.f = ComplexMatrix::Zero(m_tx, l_max);
    out.sigma = RealVector::Zero(l_max);

    if (h.cwiseAbs2().sum() == 0.0)
    {
        out.q = ComplexMatrix::Identity(m_rx, l_max);
        out.f = ComplexMatrix::Identity(m_tx, l_max);
        return out;
    }

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h.adjoint() * h);
    const ComplexMatrix &v = eig.eigenvectors(); // ascending eigenvalues

    // Singular values recomputed as |H v|, which is accurate where sqrt(eigenvalue) is not.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m_tx));
    std::vector<double> mag(static_cast<std::size_t>(m_tx));
    for (Eigen::Index j = 0; j < m_tx; ++j)
    {
        order[static_cast<std::size_t>(j)] = m_tx - 1 - j;
        mag[static_cast<std::size_t>(m_tx - 1 - j)] = (h * v.col(m_tx - 1 - j)).norm();
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return mag[static_cast<std::size_t>(a)] > mag[static_cast<std::size_t>(b)]; });

    const double largest = mag[static_cast<std::size_t>(order.front())];
    const double zero_tol = largest * 64.0 * std::numeric_limits<double>::epsilon();
    Eigen::Index next_canonical = 0;
    for (Eigen::Index i = 0; i < l_max; ++i)
    {
        const Eigen::Index j = order[static_cast<std::size_t>(i)];
        out.f.col(i) = v.col(j);
        fix_phase(out.f.col(i));

        ComplexVector qi = h * out.f.col(i);
        const double s = mag[static_cast<std::size_t>(j)];
        bool usable = s > zero_tol;
        if (usable)
        {
            qi /= s;
            orthogonalize(qi, out.q, i);
            const double norm = qi.norm();
            usable = norm > 0.5;
            if (usable)
                qi /= norm;
        }
        if (!usable)
            qi = completion_vector(out.q, i, next_canonical);
        out.q.col(i) = qi;
        out.sigma(i) = usable ? s : 0.0;
    }
    return out;
}

WaterfillResult waterfill(const RealVector &sigma, double noise_variance, double total_power)
{
    if (!(total_power > 0.0))
        throw std::invalid_argument("waterfill: total power must be positive");
    if (!(noise_variance >= 0.0))
        throw std::invalid_argument("waterfill: noise variance must be non-negative");
    const Eigen::Index l = sigma.size();
    if (l == 0)
        throw std::invalid_argument("waterfill: no streams");
    if ((sigma.array() < 0.0).any())
        throw std::invalid_argument("waterfill: negative singular value");

    WaterfillResult out;
    out.power = RealVector::Zero(l);

    std::vector<double> threshold(static_cast<std::size_t>(l), std::numeric_limits<double>::infinity());
    double max_threshold = 0.0;
    bool any_active = false;
    for (Eigen::Index i = 0; i < l; ++i)
    {
        if (sigma(i) > 0.0)
        {
            const double t = noise_variance / (sigma(i) * sigma(i));
            if (std::isfinite(t))
            {
                threshold[static_cast<std::size_t>(i)] = t;
                max_threshold = std::max(max_threshold, t);
                any_active = true;
            }
        }
    }
    if (!any_active)
    {
        out.power.setConstant(total_power / static_cast<double>(l));
        out.degenerate = true;
        return out;
    }

    auto filled = [&](double level) {
        double sum = 0.0;
        for (double t : threshold)
            sum += std::max(0.0, level - t);
        return sum;
    };

    double lo = 0.0;
    double hi = total_power + max_threshold;
    for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter)
    {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        (filled(mid) > total_power ? hi : lo) = mid;
    }
    double level = 0.5 * (lo + hi);

    // Exact level on the active set found by bisection.
    double active_sum = 0.0;
    std::size_t active = 0;
    for (double t : threshold)
        if (t < level)
        {
            active_sum += t;
            ++active;
        }
    if (active > 0)
    {
        const double exact = (total_power + active_sum) / static_cast<double>(active);
        bool consistent = true;
        for (double t : threshold)
            if ((t < level) != (t < exact))
                consistent = false;
        if (consistent)
            level = exact;
    }

    out.water_level = level;
    for (Eigen::Index i = 0; i < l; ++i)
        out.power(i) = std::max(0.0, level - threshold[static_cast<std::size_t>(i)]);
    return out;
}

ComplexMatrix channel_gain(const ComplexMatrix &q, const ComplexMatrix &h, const ComplexMatrix &f,
                           const RealVector &power)
{
    if (q.rows() != h.rows() || f.rows() != h.cols() || q.cols() != f.cols() || power.size() != f.cols())
        throw std::invalid_argument("channel_gain: inconsistent dimensions");
    return q.adjoint() * h * f * power.cwiseSqrt().asDiagonal();
}

RealVector error_covariance(const ComplexMatrix &gain_est, const ComplexMatrix &gain_ideal)
{
    if (gain_est.rows() != gain_ideal.rows() || gain_est.cols() != gain_ideal.cols())
        throw std::invalid_argument("error_covariance: dimensions differ");
    const ComplexMatrix e = gain_est - gain_ideal;
    return e.cwiseAbs2().rowwise().sum() / static_cast<double>(e.cols());
}

RealVector sinr(const ComplexMatrix &gain, const RealVector &error_var, double noise_variance, const ComplexMatrix &q)
{
    const Eigen::Index l = gain.rows();
    if (l < 1 || gain.cols() != l || error_var.size() != l || q.cols() != l)
        throw std::invalid_argument("sinr: inconsistent dimensions");
    RealVector out(l);
    for (Eigen::Index mu = 0; mu < l; ++mu)
    {
        const double signal = std::norm(gain(mu, mu));
        const double interference = gain.row(mu).cwiseAbs2().sum() - signal;
        const double noise = (error_var(mu) + noise_variance) * q.col(mu).squaredNorm();
        const double denom = interference + noise;
        out(mu) = signal == 0.0 ? 0.0 : signal / denom;
    }
    return out;
}

double spectral_efficiency(std::span<const RealVector> per_subcarrier)
{
    if (per_subcarrier.empty())
        return 0.0;
    double total = 0.0;
    for (const auto &s : per_subcarrier)
        total += (1.0 + s.array()).log2().sum();
    return total / static_cast<double>(per_subcarrier.size());
}

IdealLink ideal_link(const ComplexMatrix &truth, double noise_variance, double total_power)
{
    IdealLink link;
    link.svd = svd_compact(truth);
    link.power = waterfill(link.svd.sigma, noise_variance, total_power);
    link.gain = channel_gain(link.svd.q, truth, link.svd.f, link.power.power);
    return link;
}

LinkEvaluation evaluate_link(const ComplexMatrix &estimate, const ComplexMatrix &truth, const IdealLink &ideal,
                             double noise_variance, double total_power)
{
    const CompactSvd svd = svd_compact(estimate);
    const WaterfillResult power = waterfill(svd.sigma, noise_variance, total_power);
    const ComplexMatrix gain = channel_gain(svd.q, truth, svd.f, power.power);
    const RealVector err = error_covariance(gain, ideal.gain);
    LinkEvaluation out;
    out.sinr = sinr(gain, err, noise_variance, svd.q);
    out.rate = (1.0 + out.sinr.array()).log2().sum();
    return out;
}

} // namespace dualband
