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

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dualband
{

using cdouble = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Per-subcarrier sequence of equally sized complex matrices.
// Storage is one contiguous column-major block per subcarrier; slices are exposed as
// Eigen maps so their dimensions cannot be changed through the accessor.
class ChannelTensor
{
public:
    using SliceMap = Eigen::Map<ComplexMatrix>;
    using ConstSliceMap = Eigen::Map<const ComplexMatrix>;

    ChannelTensor() = default;
    ChannelTensor(std::size_t num_subcarriers, Eigen::Index rows, Eigen::Index cols);

    [[nodiscard]] std::size_t size() const { return num_subcarriers_; }
    [[nodiscard]] Eigen::Index rows() const { return rows_; }
    [[nodiscard]] Eigen::Index cols() const { return cols_; }
    [[nodiscard]] bool empty() const { return num_subcarriers_ == 0; }

    SliceMap operator[](std::size_t n);
    ConstSliceMap operator[](std::size_t n) const;

    // Copies `m` into slice n; throws if the dimensions differ.
    void set(std::size_t n, const ComplexMatrix &m);

    [[nodiscard]] bool same_shape(const ChannelTensor &other) const
    {
        return num_subcarriers_ == other.num_subcarriers_ && rows_ == other.rows_ && cols_ == other.cols_;
    }

    // Slices at the given subcarrier indices, in order.
    [[nodiscard]] ChannelTensor select(const std::vector<std::size_t> &indices) const;

    std::vector<cdouble> &data() { return data_; }
    [[nodiscard]] const std::vector<cdouble> &data() const { return data_; }

private:
    std::size_t num_subcarriers_ = 0;
    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
    std::vector<cdouble> data_;
};

} // namespace dualband
