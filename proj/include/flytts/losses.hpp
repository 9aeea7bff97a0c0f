#pragma once

#include <span>
#include <vector>

#include "flytts/tensor.hpp"
#include "flytts/weights.hpp"

namespace flytts {

struct GaussianParams {
    FrameTensor mean;
    FrameTensor logstd;  // same shape as mean
};

// Per-frame discriminator scores.
using ScoreSeq = std::vector<float>;

// Mean over elements of
//   logstd_p - logstd_q + (var_q + (mean_q - mean_p)^2) / (2 var_p) - 1/2.
double gaussian_kl(const GaussianParams& q, const GaussianParams& p);

// log_likelihood_term - kl_term; kl_term must be non-negative.
double elbo_lower_bound(double log_likelihood_term, double kl_term);

// mean((real - 1)^2) + mean(fake^2)
double lsgan_discriminator_loss(std::span<const float> real_scores, std::span<const float> fake_scores);

// mean((fake - 1)^2)
double lsgan_generator_loss(std::span<const float> fake_scores);

// Convolutional scorer over a pluggable feature sequence [D_f x T_f]:
// kernel-3 convolutions with Leaky ReLU between, then a per-frame scalar
// projection. Never mutates its inputs.
ScoreSeq prediction_head(const FrameTensor& features, const WeightStore& weights);

}  // namespace flytts
