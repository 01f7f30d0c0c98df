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
#include "dualband/types.hpp"

#include <algorithm>
#include <string>

namespace dualband
{

ChannelTensor::ChannelTensor(std::size_t num_subcarriers, Eigen::Index rows, Eigen::Index cols)
    : num_subcarriers_(num_subcarriers), rows_(rows), cols_(cols),
      data_(num_subcarriers * static_cast<std::size_t>(rows * cols), cdouble(0.0, 0.0))
{
    if (rows < 0 || cols < 0)
        throw std::invalid_argument("ChannelTensor: negative dimension");
}

ChannelTensor::SliceMap ChannelTensor::operator[](std::size_t n)
{
    return SliceMap(data_.data() + n * static_cast<std::size_t>(rows_ * cols_), rows_, cols_);
}

ChannelTensor::ConstSliceMap ChannelTensor::operator[](std::size_t n) const
{
    return ConstSliceMap(data_.data() + n * static_cast<std::size_t>(rows_ * cols_), rows_, cols_);
}

void ChannelTensor::set(std::size_t n, const ComplexMatrix &m)
{
    if (m.rows() != rows_ || m.cols() != cols_)
        throw std::invalid_argument("ChannelTensor::set: slice is " + std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) + ", tensor expects " + std::to_string(rows_) + "x" +
                                    std::to_string(cols_));
    if (n >= num_subcarriers_)
        throw std::out_of_range("ChannelTensor::set: subcarrier index out of range");
    (*this)[n] = m;
}

ChannelTensor ChannelTensor::select(const std::vector<std::size_t> &indices) const
{
    ChannelTensor out(indices.size(), rows_, cols_);
    const auto stride = static_cast<std::size_t>(rows_ * cols_);
    for (std::size_t i = 0; i < indices.size(); ++i)
    {
        if (indices[i] >= num_subcarriers_)
            throw std::out_of_range("ChannelTensor::select: subcarrier index out of range");
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(indices[i] * stride), stride,
                    out.data_.begin() + static_cast<std::ptrdiff_t>(i * stride));
    }
    return out;
}

} // namespace dualband
