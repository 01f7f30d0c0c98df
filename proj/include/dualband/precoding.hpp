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
#pragma once

#include "dualband/types.hpp"

#include <span>
#include <vector>

namespace dualband
{

// Compact SVD H = Q diag(sigma) F^H with l_max = min(M_Rx, M_Tx) columns.
struct CompactSvd
{
    ComplexMatrix q;  // M_Rx x l_max, orthonormal columns
    RealVector sigma; // descending, >= 0
    ComplexMatrix f;  // M_Tx x l_max, orthonormal columns
};

// Computed from the Hermitian eigendecomposition of H^H H; each left vector is H f / |H f|
// followed by Gram-Schmidt completion, so H = Q Sigma F^H holds to rounding even for
// rank-deficient H. Phase convention: the first maximal-magnitude entry of every F column is
// real and non-negative. The all-zero matrix gives sigma = 0 and canonical basis vectors.
CompactSvd svd_compact(const ComplexMatrix &h);

struct WaterfillResult
{
    RealVector power;
    double water_level = 0.0;
    bool degenerate = false; // every singular value was zero; power split equally
};

// p_mu = max(0, nu - noise / sigma_mu^2), sum p = total_power. The water level is bracketed by
// bisection on [0, total_power + max threshold] and then solved exactly on the active set.
WaterfillResult waterfill(const RealVector &sigma, double noise_variance, double total_power);

// G = Q^H H F P^{1/2}
ComplexMatrix channel_gain(const ComplexMatrix &q, const ComplexMatrix &h, const ComplexMatrix &f,
                           const RealVector &power);

// Diagonal of (1/l) E E^H with E = G_est - G_ideal.
RealVector error_covariance(const ComplexMatrix &gain_est, const ComplexMatrix &gain_ideal);

// |G_mm|^2 / (sum_{n != m} |G_mn|^2 + (err_m + noise) |Q_:,m|^2)
RealVector sinr(const ComplexMatrix &gain, const RealVector &error_var, double noise_variance, const ComplexMatrix &q);

// (1/N) sum_n sum_mu log2(1 + SINR_mu[n]); one entry of `per_subcarrier` per subcarrier.
double spectral_efficiency(std::span<const RealVector> per_subcarrier);

// Everything above for one subcarrier: precoders from `estimate`, evaluated on `truth`.
struct LinkEvaluation
{
    RealVector sinr;
    double rate = 0.0; // sum_mu log2(1 + SINR_mu)
};

struct IdealLink
{
    CompactSvd svd;
    WaterfillResult power;
    ComplexMatrix gain;
};

IdealLink ideal_link(const ComplexMatrix &truth, double noise_variance, double total_power);
LinkEvaluation evaluate_link(const ComplexMatrix &estimate, const ComplexMatrix &truth, const IdealLink &ideal,
                             double noise_variance, double total_power);

} // namespace dualband
