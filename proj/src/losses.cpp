#include "flytts/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "flytts/nnkit.hpp"

namespace flytts {

double gaussian_kl(const GaussianParams& q, const GaussianParams& p) {
    if (!q.mean.same_shape(q.logstd) || !p.mean.same_shape(p.logstd) || !q.mean.same_shape(p.mean)) {
        throw std::invalid_argument("gaussian_kl: parameter shapes differ");
    }
    const size_t n = q.mean.data.size();
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double mq = q.mean.data[i];
        const double lq = q.logstd.data[i];
        const double mp = p.mean.data[i];
        const double lp = p.logstd.data[i];
        const double var_q = std::exp(2.0 * lq);
        const double var_p = std::exp(2.0 * lp);
        const double dm = mq - mp;
        acc += lp - lq + (var_q + dm * dm) / (2.0 * var_p) - 0.5;
    }
    return acc / static_cast<double>(n);
}

double elbo_lower_bound(double log_likelihood_term, double kl_term) {
    if (kl_term < 0.0) {
        throw std::invalid_argument("elbo_lower_bound: kl_term must be non-negative");
    }
    return log_likelihood_term - kl_term;
}

double lsgan_discriminator_loss(std::span<const float> real_scores, std::span<const float> fake_scores) {
    if (real_scores.empty() || fake_scores.empty()) {
        throw std::invalid_argument("lsgan_discriminator_loss: empty score sequence");
    }
    double real_acc = 0.0;
    for (float s : real_scores) {
        const double d = static_cast<double>(s) - 1.0;
        real_acc += d * d;
    }
    double fake_acc = 0.0;
    for (float s : fake_scores) {
        fake_acc += static_cast<double>(s) * static_cast<double>(s);
    }
    return real_acc / static_cast<double>(real_scores.size()) +
           fake_acc / static_cast<double>(fake_scores.size());
}

double lsgan_generator_loss(std::span<const float> fake_scores) {
    if (fake_scores.empty()) {
        throw std::invalid_argument("lsgan_generator_loss: empty score sequence");
    }
    double acc = 0.0;
    for (float s : fake_scores) {
        const double d = static_cast<double>(s) - 1.0;
        acc += d * d;
    }
    return acc / static_cast<double>(fake_scores.size());
}

ScoreSeq prediction_head(const FrameTensor& features, const WeightStore& weights) {
    if (features.rank() != 2) {
        throw std::invalid_argument("prediction_head: features must be [D_f x T_f], got " +
                                    shape_str(features));
    }
    FrameTensor h = conv1d(features, weights.at("disc.conv1.weight"), weights.at("disc.conv1.bias").flat(), 1);
    leaky_relu_inplace(h);
    h = conv1d(h, weights.at("disc.conv2.weight"), weights.at("disc.conv2.bias").flat(), 1);
    leaky_relu_inplace(h);
    h = conv1d(h, weights.at("disc.conv3.weight"), weights.at("disc.conv3.bias").flat(), 1);
    const FrameTensor scores =
        linear_frames(h, weights.at("disc.proj.weight"), weights.at("disc.proj.bias").flat());
    return {scores.data.begin(), scores.data.end()};
}

}  // namespace flytts
