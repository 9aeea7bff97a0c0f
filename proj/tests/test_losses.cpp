#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "flytts/losses.hpp"
#include "flytts/model.hpp"
#include "flytts/nnkit.hpp"
#include "flytts/rng.hpp"
#include "oracles.hpp"

using namespace flytts;

namespace {

GaussianParams gaussian(float mean, float std, std::vector<int> shape = {2, 3}) {
    GaussianParams g;
    g.mean = FrameTensor(shape, mean);
    g.logstd = FrameTensor(shape, std::log(std));
    return g;
}

}  // namespace

TEST_CASE("KL of identical distributions is exactly zero") {
    Rng rng(1);
    GaussianParams q;
    q.mean = FrameTensor({3, 4});
    q.logstd = FrameTensor({3, 4});
    for (float& v : q.mean.data) v = rng.next_normal();
    for (float& v : q.logstd.data) v = rng.next_symmetric(1.0f);
    CHECK(gaussian_kl(q, q) == 0.0);
}

TEST_CASE("KL golden value for N(1,1) vs N(0,1)") {
    CHECK(gaussian_kl(gaussian(1.0f, 1.0f), gaussian(0.0f, 1.0f)) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("KL is non-negative for random parameter pairs") {
    Rng rng(2);
    for (int it = 0; it < 200; ++it) {
        GaussianParams q, p;
        q.mean = FrameTensor({2, 5});
        q.logstd = FrameTensor({2, 5});
        p.mean = FrameTensor({2, 5});
        p.logstd = FrameTensor({2, 5});
        for (auto* t : {&q.mean, &q.logstd, &p.mean, &p.logstd}) {
            for (float& v : t->data) v = rng.next_symmetric(1.5f);
        }
        REQUIRE(gaussian_kl(q, p) >= 0.0);
    }
}

TEST_CASE("KL rejects shape mismatch") {
    CHECK_THROWS_AS(gaussian_kl(gaussian(0, 1, {2, 3}), gaussian(0, 1, {3, 2})), std::invalid_argument);
    GaussianParams broken;
    broken.mean = FrameTensor({2, 3});
    broken.logstd = FrameTensor({2, 4});
    CHECK_THROWS_AS(gaussian_kl(broken, gaussian(0, 1, {2, 3})), std::invalid_argument);
}

TEST_CASE("ELBO arithmetic and bound direction") {
    CHECK(elbo_lower_bound(0.0, 0.0) == 0.0);
    CHECK(elbo_lower_bound(-1.5, 0.5) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(elbo_lower_bound(0.0, -0.1), std::invalid_argument);

    Rng rng(3);
    for (int it = 0; it < 50; ++it) {
        const double ll = rng.next_symmetric(10.0f);
        const double kl = rng.next_uniform() * 5.0;
        REQUIRE(elbo_lower_bound(ll, kl) <= ll);
    }
}

TEST_CASE("LSGAN discriminator loss fixed points") {
    const std::vector<float> ones(6, 1.0f);
    const std::vector<float> zeros(4, 0.0f);
    const std::vector<float> halves(5, 0.5f);
    CHECK(lsgan_discriminator_loss(ones, zeros) == 0.0);
    CHECK(lsgan_discriminator_loss(zeros, ones) == doctest::Approx(2.0));
    CHECK(lsgan_discriminator_loss(halves, halves) == doctest::Approx(0.5));
}

TEST_CASE("LSGAN generator loss fixed points") {
    CHECK(lsgan_generator_loss(std::vector<float>(3, 1.0f)) == 0.0);
    CHECK(lsgan_generator_loss(std::vector<float>(3, 0.0f)) == doctest::Approx(1.0));
    CHECK(lsgan_generator_loss(std::vector<float>(3, 0.5f)) == doctest::Approx(0.25));
}

TEST_CASE("LSGAN losses reject empty sequences and stay non-negative") {
    CHECK_THROWS_AS(lsgan_generator_loss({}), std::invalid_argument);
    CHECK_THROWS_AS(lsgan_discriminator_loss({}, std::vector<float>{1.0f}), std::invalid_argument);
    CHECK_THROWS_AS(lsgan_discriminator_loss(std::vector<float>{1.0f}, {}), std::invalid_argument);

    Rng rng(4);
    for (int it = 0; it < 100; ++it) {
        std::vector<float> real(5), fake(7);
        for (float& v : real) v = rng.next_symmetric(3.0f);
        for (float& v : fake) v = rng.next_symmetric(3.0f);
        REQUIRE(lsgan_discriminator_loss(real, fake) >= 0.0);
        REQUIRE(lsgan_generator_loss(fake) >= 0.0);
    }
}

TEST_CASE("losses are permutation invariant over the score axis") {
    Rng rng(5);
    std::vector<float> real(9), fake(9);
    for (float& v : real) v = rng.next_symmetric(2.0f);
    for (float& v : fake) v = rng.next_symmetric(2.0f);

    std::vector<float> real_shuffled = real;
    std::vector<float> fake_shuffled = fake;
    std::mt19937 gen(17);
    std::shuffle(real_shuffled.begin(), real_shuffled.end(), gen);
    std::shuffle(fake_shuffled.begin(), fake_shuffled.end(), gen);

    CHECK(lsgan_discriminator_loss(real, fake) ==
          doctest::Approx(lsgan_discriminator_loss(real_shuffled, fake_shuffled)).epsilon(1e-12));
    CHECK(lsgan_generator_loss(fake) ==
          doctest::Approx(lsgan_generator_loss(fake_shuffled)).epsilon(1e-12));
}

TEST_CASE("prediction head scores one frame per input frame") {
    WeightStore store;
    init_prediction_head_weights(store, 24, 32, 6);
    Rng rng(6);
    FrameTensor features({24, 15});
    for (float& v : features.data) v = rng.next_normal();
    CHECK(prediction_head(features, store).size() == 15);
}

TEST_CASE("prediction head with zero weights scores zero") {
    WeightStore store;
    init_prediction_head_weights(store, 8, 16, 6);
    std::vector<std::string> names;
    for (const auto& [name, t] : store.storages()) names.push_back(name);
    for (const auto& name : names) {
        for (float& v : store.storage(name).data) v = 0.0f;
    }
    FrameTensor features({8, 5}, 1.0f);
    for (float s : prediction_head(features, store)) CHECK(s == 0.0f);
}

TEST_CASE("prediction head matches a reference composition and keeps inputs intact") {
    WeightStore store;
    init_prediction_head_weights(store, 10, 12, 61);
    Rng rng(7);
    FrameTensor features({10, 9});
    for (float& v : features.data) v = rng.next_normal();
    const std::vector<float> input_copy = features.data;

    const ScoreSeq got = prediction_head(features, store);
    CHECK(features.data == input_copy);

    FrameTensor h = oracle::conv1d_ref(features, store.at("disc.conv1.weight"),
                                       store.at("disc.conv1.bias").flat(), 1, 1);
    for (float& v : h.data) v = leaky_relu(v);
    h = oracle::conv1d_ref(h, store.at("disc.conv2.weight"), store.at("disc.conv2.bias").flat(), 1, 1);
    for (float& v : h.data) v = leaky_relu(v);
    h = oracle::conv1d_ref(h, store.at("disc.conv3.weight"), store.at("disc.conv3.bias").flat(), 1, 1);
    const FrameTensor& w = store.at("disc.proj.weight");
    for (int t = 0; t < h.dim(1); ++t) {
        double acc = store.at("disc.proj.bias").data[0];
        for (int c = 0; c < h.dim(0); ++c) acc += static_cast<double>(w.at(0, c)) * h.at(c, t);
        REQUIRE(std::abs(got[static_cast<size_t>(t)] - acc) < 1e-5);
    }
}
