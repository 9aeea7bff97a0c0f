#include "doctest.h"

#include <cmath>

#include "flytts/flow.hpp"
#include "flytts/model.hpp"
#include "flytts/rng.hpp"
#include "oracles.hpp"

using namespace flytts;

namespace {

ModelConfig small_flow_config(int g2, int m2) {
    ModelConfig cfg = preset_config("fly-tts");
    cfg.g2 = g2;
    cfg.m2 = m2;
    cfg.latent_dim = 12;
    cfg.flow_hidden_dim = 16;
    cfg.flow_wn_layers = 3;
    cfg.validate();
    return cfg;
}

FrameTensor random_latent(Rng& rng, int d, int t) {
    FrameTensor z({d, t});
    for (float& v : z.data) v = rng.next_normal();
    return z;
}

}  // namespace

TEST_CASE("coupling step with zero shift weights is the identity") {
    const ModelConfig cfg = small_flow_config(2, 2);
    WeightStore store;
    init_flow_weights(store, cfg, 7);
    for (int step = 0; step < cfg.flow_steps(); ++step) {
        auto& w = store.storage(store.storage_name_of(flow_step_slot(step, "post.weight")));
        for (float& v : w.data) v = 0.0f;
    }

    Rng rng(1);
    const FrameTensor z = random_latent(rng, cfg.latent_dim, 13);
    for (auto dir : {FlowDirection::kForward, FlowDirection::kInverse}) {
        const FrameTensor y = coupling_step(z, store, 0, cfg, dir);
        CHECK(oracle::max_abs_diff(y, z) == 0.0f);
    }
}

TEST_CASE("coupling step leaves the pass-through half bitwise unchanged") {
    const ModelConfig cfg = small_flow_config(2, 2);
    WeightStore store;
    init_flow_weights(store, cfg, 11);

    Rng rng(2);
    const FrameTensor z = random_latent(rng, cfg.latent_dim, 21);
    const FrameTensor y = coupling_step(z, store, 1, cfg, FlowDirection::kForward);
    const int half = cfg.latent_dim / 2;
    for (int c = 0; c < half; ++c) {
        for (int t = 0; t < 21; ++t) {
            REQUIRE(y.at(c, t) == z.at(c, t));
        }
    }
}

TEST_CASE("coupling step inverse undoes forward") {
    const ModelConfig cfg = small_flow_config(2, 2);
    WeightStore store;
    init_flow_weights(store, cfg, 13);

    Rng rng(3);
    for (int it = 0; it < 30; ++it) {
        const int t = 1 + static_cast<int>(rng.next_u64() % 40);
        const FrameTensor z = random_latent(rng, cfg.latent_dim, t);
        const FrameTensor y = coupling_step(z, store, 2, cfg, FlowDirection::kForward);
        const FrameTensor back = coupling_step(y, store, 2, cfg, FlowDirection::kInverse);
        REQUIRE(oracle::max_abs_diff(back, z) < 1e-5f);
    }
}

TEST_CASE("coupling step rejects odd channel counts") {
    const ModelConfig cfg = small_flow_config(1, 1);
    WeightStore store;
    init_flow_weights(store, cfg, 17);
    const FrameTensor z({11, 4});
    CHECK_THROWS_AS(coupling_step(z, store, 0, cfg, FlowDirection::kForward), std::invalid_argument);
}

TEST_CASE("shift depends only on the pass-through half") {
    // Translation structure: same x_a with different x_b must produce the
    // same y_b - x_b, which is why the log-determinant is identically zero.
    const ModelConfig cfg = small_flow_config(1, 2);
    WeightStore store;
    init_flow_weights(store, cfg, 19);

    Rng rng(4);
    const int t = 9;
    const int half = cfg.latent_dim / 2;
    FrameTensor z1 = random_latent(rng, cfg.latent_dim, t);
    FrameTensor z2 = z1;
    for (int c = half; c < cfg.latent_dim; ++c) {
        for (int tt = 0; tt < t; ++tt) z2.at(c, tt) = rng.next_normal();
    }

    const FrameTensor y1 = coupling_step(z1, store, 0, cfg, FlowDirection::kForward);
    const FrameTensor y2 = coupling_step(z2, store, 0, cfg, FlowDirection::kForward);
    for (int c = half; c < cfg.latent_dim; ++c) {
        for (int tt = 0; tt < t; ++tt) {
            REQUIRE(y1.at(c, tt) - z1.at(c, tt) ==
                    doctest::Approx(y2.at(c, tt) - z2.at(c, tt)).epsilon(1e-6));
        }
    }
}

TEST_CASE("channel flip is an involution") {
    Rng rng(5);
    const FrameTensor z = random_latent(rng, 10, 17);
    const FrameTensor flipped = channel_flip(z);
    CHECK(flipped.at(0, 0) == z.at(9, 0));
    CHECK(oracle::max_abs_diff(channel_flip(flipped), z) == 0.0f);
}

TEST_CASE("flow round trip recovers the input") {
    Rng rng(6);
    for (auto [g2, m2] : {std::pair{2, 2}, std::pair{1, 4}, std::pair{4, 1}}) {
        const ModelConfig cfg = small_flow_config(g2, m2);
        WeightStore store;
        init_flow_weights(store, cfg, 100 + g2 * 10 + m2);
        const FlowPlan plan{cfg.g2, cfg.m2};

        for (int it = 0; it < 20; ++it) {
            const int t = 1 + static_cast<int>(rng.next_u64() % 64);
            const FrameTensor z = random_latent(rng, cfg.latent_dim, t);
            const FrameTensor fwd = flow_apply(z, plan, store, cfg, FlowDirection::kForward);
            const FrameTensor back = flow_apply(fwd, plan, store, cfg, FlowDirection::kInverse);
            REQUIRE(oracle::max_abs_diff(back, z) < 1e-5f);
        }
    }
}

TEST_CASE("WaveNet storages match the group count, pre/post stay per step") {
    SUBCASE("fly-tts plan") {
        const ModelConfig cfg = preset_config("fly-tts");
        WeightStore store;
        init_flow_weights(store, cfg, 8);

        std::vector<std::string> wn_slots, pre_slots;
        for (int k = 0; k < cfg.flow_steps(); ++k) {
            wn_slots.push_back(flow_step_slot(k, "wn.in0.weight"));
            pre_slots.push_back(flow_step_slot(k, "pre.weight"));
        }
        CHECK(cfg.flow_steps() == 4);
        CHECK(store.distinct_storage_count(wn_slots) == 2);
        CHECK(store.distinct_storage_count(pre_slots) == 4);
    }
    SUBCASE("full sharing plan") {
        const ModelConfig cfg = preset_config("mini-fly-tts");
        WeightStore store;
        init_flow_weights(store, cfg, 8);

        std::vector<std::string> wn_slots;
        for (int k = 0; k < cfg.flow_steps(); ++k) {
            wn_slots.push_back(flow_step_slot(k, "wn.in0.weight"));
        }
        CHECK(store.distinct_storage_count(wn_slots) == 1);
        for (int k = 1; k < cfg.flow_steps(); ++k) {
            CHECK(store.storage_name_of(flow_step_slot(k, "wn.in0.weight")) ==
                  store.storage_name_of(flow_step_slot(0, "wn.in0.weight")));
        }
    }
}

TEST_CASE("flow_apply rejects a store that disagrees with the plan") {
    const ModelConfig cfg = small_flow_config(2, 2);
    WeightStore store;
    init_flow_weights(store, cfg, 23);
    Rng rng(7);
    const FrameTensor z = random_latent(rng, cfg.latent_dim, 5);
    CHECK_THROWS_AS(flow_apply(z, FlowPlan{1, 4}, store, cfg, FlowDirection::kForward),
                    std::invalid_argument);
}

TEST_CASE("flow application is deterministic") {
    const ModelConfig cfg = small_flow_config(2, 2);
    WeightStore store;
    init_flow_weights(store, cfg, 29);
    Rng rng(8);
    const FrameTensor z = random_latent(rng, cfg.latent_dim, 33);
    const FlowPlan plan{cfg.g2, cfg.m2};
    const FrameTensor a = flow_apply(z, plan, store, cfg, FlowDirection::kInverse);
    const FrameTensor b = flow_apply(z, plan, store, cfg, FlowDirection::kInverse);
    CHECK(a.data == b.data);
}
