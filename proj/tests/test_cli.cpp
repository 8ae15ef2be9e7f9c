#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "support/helpers.hpp"
#include "support/synthetic.hpp"
#include "vseg/image_io.hpp"
#include "vseg/trainer.hpp"

namespace fs = std::filesystem;
using namespace vseg;
using vseg::testing::TempDir;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(VSEG_CLI_PATH) + " " + args + " 2>&1";
    std::FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult res;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) res.output += buf;
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string tiny_net_flags() {
    return "--set net.enc_channels=2,2,2,2 --set net.bottleneck=4 --set net.dropout=0";
}

int count_files(const fs::path& dir, const std::string& suffix) {
    int n = 0;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().string().ends_with(suffix)) ++n;
    return n;
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("cli: prepare writes one class map per entry plus a weights file") {
    TempDir dir("cli_prepare");
    std::string manifest =
        vseg::testing::write_corpus(dir.file("data"), 4, 96, 3, /*seed=*/41);

    CliResult res = run_cli("prepare --manifest " + manifest + " --out " + dir.file("out"));
    INFO(res.output);
    CHECK(res.exit_code == 0);
    CHECK(count_files(dir.file("out"), "_classes.png") == 4);
    CHECK(fs::exists(dir.file("out") + "/weights.txt"));
    CHECK(res.output.find("class pixel histogram") != std::string::npos);

    // histogram percentages must cover every pixel: 4 images of 96*96
    CHECK(res.output.find(std::to_string(4 * 96 * 96)) != std::string::npos);
}

TEST_CASE("cli: prepare on an empty manifest fails with a one-line diagnostic") {
    TempDir dir("cli_prepare_empty");
    vseg::testing::write_bytes(dir.file("empty.csv"), "# nothing here\n");
    CliResult res = run_cli("prepare --manifest " + dir.file("empty.csv") + " --out " +
                            dir.file("out"));
    CHECK(res.exit_code != 0);
    CHECK(res.output.find("error:") != std::string::npos);
}

TEST_CASE("cli: unknown --set keys are rejected") {
    TempDir dir("cli_set");
    std::string manifest = vseg::testing::write_corpus(dir.file("data"), 1, 96, 1, 42);
    CliResult res = run_cli("prepare --manifest " + manifest + " --out " + dir.file("out") +
                            " --set bogus.key=1");
    CHECK(res.exit_code != 0);
    CHECK(res.output.find("unknown key") != std::string::npos);
}

TEST_CASE("cli: train/predict/evaluate/report round-trip on a tiny corpus") {
    TempDir dir("cli_train");
    std::string manifest = vseg::testing::write_corpus(dir.file("data"), 3, 96, 2, 43);

    CliResult tr = run_cli("train --manifest " + manifest + " --out " + dir.file("run") + " " +
                           tiny_net_flags() +
                           " --set train.epochs=1 --set train.batch=4 --set train.augment=0"
                           " --seed 7");
    INFO(tr.output);
    REQUIRE(tr.exit_code == 0);
    CHECK(fs::exists(dir.file("run") + "/ckpt_final.vseg"));
    CHECK(fs::exists(dir.file("run") + "/trainlog.csv"));

    std::string ckpt = dir.file("run") + "/ckpt_final.vseg";

    CliResult pr = run_cli("predict --manifest " + manifest + " --checkpoint " + ckpt +
                           " --out " + dir.file("pred") + " " + tiny_net_flags());
    INFO(pr.output);
    REQUIRE(pr.exit_code == 0);
    CHECK(count_files(dir.file("pred"), "_prob.png") == 1);  // one test image
    CHECK(count_files(dir.file("pred"), "_mask.png") == 1);

    CliResult ev = run_cli("evaluate --manifest " + manifest + " --checkpoint " + ckpt +
                           " --out " + dir.file("eval") + " " + tiny_net_flags());
    INFO(ev.output);
    REQUIRE(ev.exit_code == 0);
    CHECK(fs::exists(dir.file("eval") + "/metrics.csv"));
    std::string csv = read_all(dir.file("eval") + "/metrics.csv");
    CHECK(csv.find("image,Acc,Sp,Se,AUC,AUC_thick,AUC_thin") != std::string::npos);

    CliResult rp = run_cli("report --manifest " + manifest + " --checkpoint " + ckpt +
                           " --out " + dir.file("report") + " " + tiny_net_flags());
    INFO(rp.output);
    REQUIRE(rp.exit_code == 0);
    // 4 side maps + fused + mask + overlay = 7 files
    CHECK(count_files(dir.file("report"), ".png") == 7);

    // idempotence: a second predict run reproduces the same bytes
    std::string before = read_all(dir.file("pred") + "/img002_prob.png");
    CliResult pr2 = run_cli("predict --manifest " + manifest + " --checkpoint " + ckpt +
                            " --out " + dir.file("pred") + " " + tiny_net_flags());
    REQUIRE(pr2.exit_code == 0);
    CHECK(read_all(dir.file("pred") + "/img002_prob.png") == before);
}

TEST_CASE("cli: report on a perfect all-background case paints no error pixels") {
    TempDir dir("cli_report_perfect");

    // one image with an all-black ground truth
    fs::create_directories(dir.file("data"));
    FundusImage img = vseg::testing::make_vessel_image(96, 44).image;
    save_image(img, dir.file("data") + "/img.png");
    FundusImage gt_img(96, 96);  // zeros: no vessels
    save_image(gt_img, dir.file("data") + "/gt.png");
    vseg::testing::write_bytes(dir.file("data") + "/m.csv", "img.png,gt.png,test\n");

    // zero parameters with a fused bias favoring class 0: argmax background
    NetConfig nc;
    nc.enc_channels = {2, 2, 2, 2};
    nc.bottleneck_channels = 4;
    nc.dropout_rate = 0;
    UNet net(nc);
    for (auto& [name, p] : net.params.entries()) p.value.fill(0.f);
    net.params.at("fuse.b").value.v[0] = 5.f;
    OptimizerState opt;
    opt.init_from(net.params);
    write_checkpoint(make_checkpoint(net.params, opt, 0, "x"), dir.file("perfect.vseg"));

    CliResult rp = run_cli("report --manifest " + dir.file("data") + "/m.csv --checkpoint " +
                           dir.file("perfect.vseg") + " --out " + dir.file("rep") + " " +
                           tiny_net_flags());
    INFO(rp.output);
    REQUIRE(rp.exit_code == 0);

    FundusImage overlay = load_image(dir.file("rep") + "/overlay.png");
    FundusImage src = load_image(dir.file("data") + "/img.png");
    CHECK(overlay.data == src.data);  // no red, no blue
}

TEST_CASE("cli: all-zero checkpoint gives a uniform heatmap") {
    TempDir dir("cli_uniform");
    std::string manifest = vseg::testing::write_corpus(dir.file("data"), 2, 96, 1, 45);

    NetConfig nc;
    nc.enc_channels = {2, 2, 2, 2};
    nc.bottleneck_channels = 4;
    nc.dropout_rate = 0;
    UNet net(nc);
    for (auto& [name, p] : net.params.entries()) p.value.fill(0.f);
    OptimizerState opt;
    opt.init_from(net.params);
    write_checkpoint(make_checkpoint(net.params, opt, 0, "x"), dir.file("zero.vseg"));

    CliResult rp = run_cli("report --manifest " + manifest + " --checkpoint " +
                           dir.file("zero.vseg") + " --out " + dir.file("rep") + " " +
                           tiny_net_flags());
    REQUIRE(rp.exit_code == 0);
    FundusImage heat = load_image(dir.file("rep") + "/fused_prob.png");
    for (std::size_t i = 3; i < heat.data.size(); i += 3)
        CHECK(heat.data[i] == heat.data[0]);
}

TEST_CASE("cli: missing checkpoint file is an I/O error") {
    TempDir dir("cli_missing");
    std::string manifest = vseg::testing::write_corpus(dir.file("data"), 1, 96, 0, 46);
    CliResult res = run_cli("predict --manifest " + manifest + " --checkpoint " +
                            dir.file("nope.vseg") + " --out " + dir.file("out"));
    CHECK(res.exit_code != 0);
    CHECK(res.output.find("error:") != std::string::npos);
}
