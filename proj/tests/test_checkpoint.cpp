#include <doctest.h>

#include "support/helpers.hpp"
#include "vseg/checkpoint.hpp"

using namespace vseg;
using vseg::testing::TempDir;
using vseg::testing::write_bytes;

TEST_CASE("checkpoint with one tensor round-trips bit-exactly") {
    TempDir dir("ckpt");
    Checkpoint c;
    c.epoch = 7;
    c.config_digest = "abc123";
    c.tensors["layer.w"] = TensorBlob{{2}, {1.0f, -2.5f}};

    write_checkpoint(c, dir.file("c.vseg"));
    Checkpoint back = read_checkpoint(dir.file("c.vseg"));
    CHECK(back == c);
}

TEST_CASE("empty tensor map round-trips") {
    TempDir dir("ckpt_empty");
    Checkpoint c;
    write_checkpoint(c, dir.file("c.vseg"));
    Checkpoint back = read_checkpoint(dir.file("c.vseg"));
    CHECK(back == c);
    CHECK(back.tensors.empty());
}

TEST_CASE("wrong magic is a format error") {
    TempDir dir("ckpt_magic");
    write_bytes(dir.file("bad.vseg"), std::string("XXXX") + std::string(16, '\0'));
    try {
        read_checkpoint(dir.file("bad.vseg"));
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("magic") != std::string::npos);
    }
}

TEST_CASE("version above supported is rejected") {
    TempDir dir("ckpt_ver");
    Checkpoint c;
    c.version = kCheckpointVersion + 3;
    write_checkpoint(c, dir.file("v.vseg"));
    try {
        read_checkpoint(dir.file("v.vseg"));
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("version") != std::string::npos);
    }
}

TEST_CASE("truncated payload is a length error") {
    TempDir dir("ckpt_trunc");
    Checkpoint c;
    c.tensors["t"] = TensorBlob{{4}, {1, 2, 3, 4}};
    write_checkpoint(c, dir.file("t.vseg"));

    std::ifstream in(dir.file("t.vseg"), std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    write_bytes(dir.file("cut.vseg"), bytes.substr(0, bytes.size() - 6));
    try {
        read_checkpoint(dir.file("cut.vseg"));
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("truncated") != std::string::npos);
    }
}

TEST_CASE("writer validates tensor shapes") {
    TempDir dir("ckpt_shape");
    Checkpoint c;
    c.tensors["bad"] = TensorBlob{{0, 3}, {}};
    CHECK_THROWS_AS(write_checkpoint(c, dir.file("x.vseg")), ArgumentError);
    c.tensors.clear();
    c.tensors["bad2"] = TensorBlob{{2}, {1.f, 2.f, 3.f}};  // count mismatch
    CHECK_THROWS_AS(write_checkpoint(c, dir.file("x.vseg")), ArgumentError);
}

TEST_CASE("property: random checkpoints round-trip exactly") {
    TempDir dir("ckpt_prop");
    Rng rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        Checkpoint c;
        c.epoch = std::uint32_t(rng.uniform_index(1000));
        c.config_digest = std::string(rng.uniform_index(20), 'd');
        int n = int(rng.uniform_index(6));
        for (int t = 0; t < n; ++t) {
            TensorBlob blob;
            int rank = 1 + int(rng.uniform_index(4));
            std::size_t numel = 1;
            for (int r = 0; r < rank; ++r) {
                blob.shape.push_back(1 + std::uint32_t(rng.uniform_index(5)));
                numel *= blob.shape.back();
            }
            for (std::size_t i = 0; i < numel; ++i)
                blob.values.push_back(float(rng.normal() * 100));
            c.tensors["t" + std::to_string(t)] = std::move(blob);
        }
        write_checkpoint(c, dir.file("p.vseg"));
        CHECK(read_checkpoint(dir.file("p.vseg")) == c);
    }
}
