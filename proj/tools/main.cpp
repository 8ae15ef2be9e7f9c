#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "commands.hpp"
#include "vseg/common.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Retinal vessel segmentation: edge-aware multi-class relabeling + "
                 "residual U-net with deep supervision"};
    app.require_subcommand(1);

    vseg::cli::RunOptions opt;
    auto add_shared = [&](CLI::App* sub) {
        sub->add_option("--manifest", opt.manifest,
                        "dataset manifest CSV, or a DRIVE-style directory");
        sub->add_option("--config", opt.config, "key=value config file");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--seed", opt.seed, "seed for all randomness");
        sub->add_option("--set", opt.overrides, "config override key=value (repeatable)");
        sub->add_option("--split", opt.split, "manifest split to use (train|test)");
    };

    CLI::App* prepare = app.add_subcommand("prepare", "write 5-class label maps and weights");
    add_shared(prepare);
    CLI::App* train = app.add_subcommand("train", "train on the train split");
    add_shared(train);
    CLI::App* predict = app.add_subcommand("predict", "write probability/mask images");
    add_shared(predict);
    predict->add_option("--checkpoint", opt.checkpoint, "trained checkpoint")->required();
    CLI::App* evaluate = app.add_subcommand("evaluate", "metrics on a split");
    add_shared(evaluate);
    evaluate->add_option("--checkpoint", opt.checkpoint, "trained checkpoint")->required();
    CLI::App* report = app.add_subcommand("report", "side-output and overlay figures");
    add_shared(report);
    report->add_option("--checkpoint", opt.checkpoint, "trained checkpoint")->required();
    report->add_option("--index", opt.index, "entry index within the split");

    CLI11_PARSE(app, argc, argv);

    try {
        if (prepare->parsed()) return vseg::cli::cmd_prepare(opt);
        if (train->parsed()) return vseg::cli::cmd_train(opt);
        if (predict->parsed()) return vseg::cli::cmd_predict(opt);
        if (evaluate->parsed()) return vseg::cli::cmd_evaluate(opt);
        if (report->parsed()) return vseg::cli::cmd_report(opt);
    } catch (const vseg::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
