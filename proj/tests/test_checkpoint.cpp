#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <fstream>

#include "fcnscape/checkpoint.hpp"
#include "temp_dir.hpp"

using namespace fcnscape;
using fcnscape::testing::read_file;
using fcnscape::testing::TempDir;

namespace {

Checkpoint sample(Architecture id) {
    Checkpoint c;
    c.spec.id = id;
    c.spec.depth = 2;
    c.spec.base_channels = 4;
    c.seed = 42;
    c.params = init_params(c.spec, 42);
    c.provenance = {{"epoch", 3}, {"train_loss", 0.125}};
    return c;
}

}  // namespace

TEST(Checkpoint, RoundTripIsBitExact) {
    TempDir dir;
    for (auto id : {Architecture::FCN16s, Architecture::UNet, Architecture::ResidualSkip}) {
        Checkpoint c = sample(id);
        c.params.values()[0] = 0.1 + 0.2;
        c.params.values()[1] = -0.0;
        c.params.values()[2] = 5e-324;
        save_checkpoint(dir / "model.json", c);
        const Checkpoint back = load_checkpoint(dir / "model.json");
        EXPECT_EQ(back.spec, c.spec);
        EXPECT_EQ(back.seed, c.seed);
        EXPECT_EQ(back.provenance, c.provenance);
        ASSERT_EQ(back.params.size(), c.params.size());
        EXPECT_TRUE(back.params.same_layout(c.params));
        EXPECT_EQ(std::memcmp(back.params.values().data(), c.params.values().data(), 8 * c.params.size()), 0);
    }
}

TEST(Checkpoint, BlobIsLittleEndianDoublesInGroupOrder) {
    TempDir dir;
    const Checkpoint c = sample(Architecture::UNet);
    save_checkpoint(dir / "m.json", c);
    const std::string blob = read_file(blob_path(dir / "m.json"));
    ASSERT_EQ(blob.size(), 8 * c.params.size());
    for (std::size_t i : {std::size_t{0}, c.params.size() / 2, c.params.size() - 1}) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(blob[8 * i + b]);
        EXPECT_EQ(std::bit_cast<double>(bits), c.params.values()[i]);
    }
}

TEST(Checkpoint, SavingTwiceIsByteIdentical) {
    TempDir dir;
    const Checkpoint c = sample(Architecture::FCN8s);
    save_checkpoint(dir / "a.json", c);
    save_checkpoint(dir / "b.json", c);
    EXPECT_EQ(read_file(blob_path(dir / "a.json")), read_file(blob_path(dir / "b.json")));
    std::string a = read_file(dir / "a.json"), b = read_file(dir / "b.json");
    EXPECT_EQ(a.replace(a.find("a.json.bin"), 10, "b.json.bin"), b);
}

TEST(Checkpoint, MissingManifestNamesPath) {
    TempDir dir;
    try {
        load_checkpoint(dir / "absent.json");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("absent.json"), std::string::npos);
    }
}

TEST(Checkpoint, TruncatedBlobIsRejected) {
    TempDir dir;
    save_checkpoint(dir / "m.json", sample(Architecture::UNet));
    const std::string blob = read_file(blob_path(dir / "m.json"));
    std::ofstream(blob_path(dir / "m.json"), std::ios::binary | std::ios::trunc) << blob.substr(0, blob.size() - 8);
    EXPECT_THROW(load_checkpoint(dir / "m.json"), std::runtime_error);
}

TEST(Checkpoint, MismatchedLayoutIsRejected) {
    Checkpoint c = sample(Architecture::UNet);
    c.spec.id = Architecture::FCN16s;
    TempDir dir;
    EXPECT_THROW(save_checkpoint(dir / "m.json", c), std::invalid_argument);
}
