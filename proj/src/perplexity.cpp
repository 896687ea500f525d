// Copyright 2026 The mgte Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mgte/perplexity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mgte/errors.hpp"
#include "mgte/simd/kernels.hpp"

namespace mgte {

void softmax_into(std::span<const double> logits, std::span<double> out) {
    if (logits.empty()) throw NumericInputError("softmax of an empty vector");
    double max = logits[0];
    for (double v : logits) {
        if (!std::isfinite(v)) throw NumericInputError("softmax input contains NaN or infinity");
        max = std::max(max, v);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - max);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    softmax_into(logits, out);
    return out;
}

namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

Perplexity perplexity_of(std::string_view model_id, ScoreKind kind, std::span<const double> values,
                         std::size_t num_classes, std::span<const Label> labels, double clamp_eps) {
    if (!(clamp_eps > 0.0 && clamp_eps < 1.0)) {
        throw ConfigError("clamp_eps must lie in (0, 1), got " + std::to_string(clamp_eps));
    }
    const std::size_t n = labels.size();
    if (n == 0) throw EmptyInputError("perplexity of '" + std::string(model_id) + "' over zero samples");
    if (values.size() != n * num_classes) {
        throw ConfigError("scores of '" + std::string(model_id) + "' are not aligned with the label list");
    }

    std::vector<std::uint32_t> cls(n);
    for (std::size_t i = 0; i < n; ++i) {
        cls[i] = static_cast<std::uint32_t>(class_index(labels[i]));
        if (cls[i] >= num_classes) throw ConfigError("label class index exceeds score vector length");
    }

    std::vector<double> true_prob(n);
    if (kind == ScoreKind::Probs) {
        simd::active_kernels().gather_clamped(values, num_classes, cls, clamp_eps, true_prob);
    } else {
        std::vector<double> row(num_classes);
        for (std::size_t i = 0; i < n; ++i) {
            softmax_into(values.subspan(i * num_classes, num_classes), row);
            true_prob[i] = std::min(std::max(row[cls[i]], clamp_eps), 1.0);
        }
    }

    CompensatedSum log_sum;
    for (double p : true_prob) log_sum.add(std::log(p));
    const double mean_nll = -log_sum.value() / static_cast<double>(n);
    // mean_nll >= 0 because every p <= 1; max() only guards a -0.0.
    return Perplexity{std::string(model_id), std::exp(std::max(mean_nll, 0.0)), n};
}

}  // namespace

Perplexity compute_perplexity(const ModelScores& scores, std::span<const Label> labels, double clamp_eps) {
    return perplexity_of(scores.model_id(), scores.kind(), scores.values(), scores.num_classes(), labels, clamp_eps);
}

Perplexity compute_perplexity(const AlignedScores& aligned, std::size_t model, double clamp_eps) {
    return perplexity_of(aligned.model_ids.at(model), aligned.kinds.at(model), aligned.slab(model),
                         aligned.num_classes, aligned.labels, clamp_eps);
}

}  // namespace mgte
