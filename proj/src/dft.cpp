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
#include "dualband/dft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace dualband
{

namespace
{

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache
{
public:
    ~PlanCache()
    {
        for (auto &[key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    fftw_plan get(int n, int sign)
    {
        std::lock_guard lock(mutex_);
        auto it = plans_.find({n, sign});
        if (it != plans_.end())
            return it->second;
        auto *in = fftw_alloc_complex(static_cast<std::size_t>(n));
        auto *out = fftw_alloc_complex(static_cast<std::size_t>(n));
        fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        if (plan == nullptr)
            throw std::runtime_error("FFTW planning failed");
        plans_.emplace(std::make_pair(n, sign), plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache &plan_cache()
{
    static PlanCache cache;
    return cache;
}

ComplexVector transform(std::span<const cdouble> x, int sign, const char *name)
{
    if (x.empty())
        throw std::invalid_argument(std::string(name) + ": empty input");
    const int n = static_cast<int>(x.size());
    ComplexVector in(n);
    std::copy(x.begin(), x.end(), in.data());
    ComplexVector out(n);
    fftw_plan plan = plan_cache().get(n, sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex *>(in.data()), reinterpret_cast<fftw_complex *>(out.data()));
    out /= std::sqrt(static_cast<double>(n));
    return out;
}

} // namespace

ComplexVector freq_to_delay(std::span<const cdouble> h) { return transform(h, FFTW_BACKWARD, "freq_to_delay"); }

ComplexVector delay_to_freq(std::span<const cdouble> g) { return transform(g, FFTW_FORWARD, "delay_to_freq"); }

} // namespace dualband
