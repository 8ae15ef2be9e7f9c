#include <doctest.h>

#include "support/helpers.hpp"
#include "support/synthetic.hpp"
#include "vseg/trainer.hpp"

using namespace vseg;
using vseg::testing::TempDir;

namespace {

NetConfig tiny_net() {
    NetConfig cfg;
    cfg.enc_channels = {4, 8};
    cfg.bottleneck_channels = 16;
    cfg.dropout_rate = 0.1;
    return cfg;
}

TrainConfig tiny_train(int epochs, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.initial_lr = 0.02;
    cfg.lr_halve_period = 100;
    cfg.batch_size = 4;
    cfg.patch = 16;
    cfg.stride = 16;
    cfg.seed = seed;
    cfg.augment_enabled = true;
    cfg.aug.noise_sigma = 0.01;
    cfg.class_weights.w = {1, 2, 4, 2, 4};
    cfg.checkpoint_every = 2;
    return cfg;
}

std::vector<TrainSample> tiny_data(int n, std::uint64_t seed) {
    // 32x32 synthetic images cut into 16x16 patches by the trainer
    return vseg::testing::make_train_samples(n, 32, seed);
}

}  // namespace

TEST_CASE("a short run reduces the training loss") {
    UNet net(tiny_net());
    net.init(1);
    auto data = tiny_data(2, 5);
    TrainConfig cfg = tiny_train(12, 3);
    TrainResult res = train(net, data, cfg);
    REQUIRE(res.log.records.size() == 12);
    CHECK(res.log.records.back().total < 0.8 * res.log.records.front().total);
    for (const auto& r : res.log.records) {
        CHECK(r.sides.size() == 2);
        CHECK(std::isfinite(r.total));
    }
}

TEST_CASE("empty train split is an argument error") {
    UNet net(tiny_net());
    net.init(1);
    CHECK_THROWS_AS(train(net, {}, tiny_train(1, 0)), ArgumentError);
}

TEST_CASE("identical seeds give bit-identical logs") {
    auto data = tiny_data(2, 6);
    TrainConfig cfg = tiny_train(4, 17);

    UNet a(tiny_net());
    a.init(17);
    TrainResult ra = train(a, data, cfg);
    UNet b(tiny_net());
    b.init(17);
    TrainResult rb = train(b, data, cfg);

    REQUIRE(ra.log.records.size() == rb.log.records.size());
    for (std::size_t i = 0; i < ra.log.records.size(); ++i) {
        CHECK(ra.log.records[i].total == rb.log.records[i].total);
        CHECK(ra.log.records[i].fused == rb.log.records[i].fused);
        CHECK(ra.log.records[i].sides == rb.log.records[i].sides);
    }
    CHECK(ra.final_checkpoint.tensors == rb.final_checkpoint.tensors);
}

TEST_CASE("resuming from a checkpoint replays the uninterrupted trajectory exactly") {
    TempDir dir("resume");
    auto data = tiny_data(2, 7);
    TrainConfig cfg = tiny_train(4, 23);

    UNet full(tiny_net());
    full.init(23);
    TrainResult uninterrupted = train(full, data, cfg);

    // capture state at epoch 2 via the trainer's own checkpoint file
    Checkpoint mid;
    {
        UNet tmp(tiny_net());
        tmp.init(23);
        TrainConfig two = cfg;
        two.checkpoint_every = 2;
        train(tmp, data, two, dir.file("run"));
        mid = read_checkpoint(dir.file("run") + "/ckpt_00002.vseg");
    }
    UNet part(tiny_net());
    TrainResult resumed = train(part, data, cfg, "", &mid);

    REQUIRE(resumed.log.records.size() == 2);  // epochs 2 and 3
    CHECK(resumed.log.records[0].total == uninterrupted.log.records[2].total);
    CHECK(resumed.log.records[1].total == uninterrupted.log.records[3].total);
    CHECK(resumed.final_checkpoint.tensors == uninterrupted.final_checkpoint.tensors);
}

TEST_CASE("digest mismatch on resume is rejected") {
    auto data = tiny_data(1, 8);
    TrainConfig cfg = tiny_train(2, 1);
    UNet net(tiny_net());
    net.init(1);
    Checkpoint wrong = make_checkpoint(net.params, OptimizerState{}, 1, "bogus");
    CHECK_THROWS_AS(train(net, data, cfg, "", &wrong), ValidationError);
}

TEST_CASE("exploding updates abort with a diagnostic") {
    UNet net(tiny_net());
    net.init(2);
    auto data = tiny_data(1, 9);
    TrainConfig cfg = tiny_train(40, 2);
    cfg.initial_lr = 1e4;  // drives activations to overflow
    try {
        train(net, data, cfg);
        // a run this hot may still survive; only a non-finite loss must abort
    } catch (const Error& e) {
        std::string msg = e.what();
        CHECK(msg.find("non-finite") != std::string::npos);
        CHECK(msg.find("epoch") != std::string::npos);
    }
}

TEST_CASE("one small gradient step never increases the batch loss (20 micro nets)") {
    for (int trial = 0; trial < 20; ++trial) {
        NetConfig nc;
        nc.enc_channels = {3};
        nc.bottleneck_channels = 6;
        nc.dropout_rate = 0.0;
        UNet net(nc);
        net.init(100 + std::uint64_t(trial));

        Rng rng(200 + std::uint64_t(trial));
        Tensor x({2, 1, 8, 8});
        for (auto& v : x.v) v = float(rng.uniform01());
        LabelBatch labels(2, 8, 8);
        for (auto& v : labels.v) v = std::uint8_t(rng.uniform_index(5));
        std::vector<double> w = {1, 2, 4, 2, 4};

        net.params.zero_grads();
        SideOutputSet outs = net.forward(x, Mode::Train);
        LossParts before = total_loss_and_grads(net, outs, labels, w, 1e-4);

        OptimizerState st;
        st.init_from(net.params);
        sgd_step(net.params, st, 1e-4f, 0.f);

        SideOutputSet outs2 = net.forward(x, Mode::Train);
        double after = total_loss_value(outs2, labels, w, net.params, 1e-4).total;
        CHECK(after <= before.total + 1e-7);
    }
}

TEST_CASE("train log CSV has the documented columns") {
    TempDir dir("log");
    UNet net(tiny_net());
    net.init(3);
    auto data = tiny_data(1, 10);
    TrainConfig cfg = tiny_train(2, 4);
    train(net, data, cfg, dir.file("out"));

    std::ifstream in(dir.file("out") + "/trainlog.csv");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "epoch,lr,total,fused,side1,side2,seconds");
    std::string row;
    std::getline(in, row);
    CHECK(row.substr(0, 2) == "0,");
}
