#include "ibeetfa/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "gtest/gtest.h"
#include "ibeetfa/params.hpp"
#include "ibeetfa/random.hpp"
#include "ibeetfa/serialize.hpp"

namespace ibeetfa {
namespace {

namespace fs = std::filesystem;

std::vector<uint8_t> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::vector<uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("ibeetfa_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    // Every verb but params validate reads pp.ibfa from the temp dir.
    if (args[0] != "params" && args[0] != "setup") args.insert(args.end(), {"--pp", path("pp.ibfa")});
    return run_command(args, out_, err_);
  }

  void setup_system(const std::string& seed = "01") {
    ASSERT_EQ(run({"setup", "--seed", seed, "--pp", path("pp.ibfa"), "--msk", path("msk.ibfa")}), kExitOk)
        << err_.str();
  }
  void extract(const std::string& id, const std::string& seed = "02") {
    ASSERT_EQ(run({"extract", "--seed", seed, "--msk", path("msk.ibfa"), "--id", id, "--out", path(id + ".sk")}),
              kExitOk)
        << err_.str();
  }
  void encrypt(const std::string& id, const std::string& msg_file, const std::string& out,
               const std::string& seed = "03") {
    ASSERT_EQ(run({"encrypt", "--seed", seed, "--id", id, "--in", path(msg_file), "--out", path(out)}), kExitOk)
        << err_.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, EncryptDecryptRestoresFile) {
  setup_system();
  extract("alice");
  spit(path("msg"), {'h', 'e', 'l', 'l', 'o'});
  encrypt("alice", "msg", "msg.ct");
  ASSERT_EQ(run({"decrypt", "--sk", path("alice.sk"), "--in", path("msg.ct"), "--out", path("msg.out")}), kExitOk)
      << err_.str();
  EXPECT_EQ(slurp(path("msg.out")), slurp(path("msg")));
}

TEST_F(CliTest, SetupWarnsForPresets) {
  setup_system();
  EXPECT_NE(err_.str().find("warning"), std::string::npos);
  EXPECT_EQ(peek_file(slurp(path("pp.ibfa"))).kind, FileKind::kPP);
  EXPECT_EQ(peek_file(slurp(path("msk.ibfa"))).kind, FileKind::kMSK);
}

TEST_F(CliTest, Type1EqualAndNotEqual) {
  setup_system();
  extract("alice", "0a");
  extract("bob", "0b");
  spit(path("m1"), {'s', 'a', 'm', 'e'});
  spit(path("m2"), {'o', 't', 'h', 'r'});
  encrypt("alice", "m1", "a.ct", "10");
  encrypt("bob", "m1", "b.ct", "11");
  encrypt("bob", "m2", "c.ct", "12");
  ASSERT_EQ(run({"td", "--type", "1", "--sk", path("alice.sk"), "--out", path("a.td")}), kExitOk);
  ASSERT_EQ(run({"td", "--type", "1", "--sk", path("bob.sk"), "--out", path("b.td")}), kExitOk);
  EXPECT_EQ(run({"test", "--type", "1", "--td-i", path("a.td"), "--td-j", path("b.td"), "--ct-i", path("a.ct"),
                 "--ct-j", path("b.ct")}),
            kExitOk);
  EXPECT_EQ(out_.str(), "EQUAL\n");
  EXPECT_EQ(run({"test", "--type", "1", "--td-i", path("a.td"), "--td-j", path("b.td"), "--ct-i", path("a.ct"),
                 "--ct-j", path("c.ct")}),
            kExitNotEqual);
  EXPECT_EQ(out_.str(), "NOT-EQUAL\n");
}

TEST_F(CliTest, Type2AndType3) {
  setup_system();
  extract("alice", "0a");
  extract("bob", "0b");
  spit(path("m"), {'x'});
  encrypt("alice", "m", "a.ct", "10");
  encrypt("bob", "m", "b.ct", "11");
  ASSERT_EQ(run({"td", "--type", "2", "--sk", path("alice.sk"), "--ct", path("a.ct"), "--out", path("a.td2")}),
            kExitOk);
  ASSERT_EQ(run({"td", "--type", "2", "--sk", path("bob.sk"), "--ct", path("b.ct"), "--out", path("b.td2")}),
            kExitOk);
  EXPECT_EQ(run({"test", "--type", "2", "--td-i", path("a.td2"), "--td-j", path("b.td2"), "--ct-i", path("a.ct"),
                 "--ct-j", path("b.ct")}),
            kExitOk);
  // A type-2 trapdoor used against a ciphertext it was not issued for.
  EXPECT_EQ(run({"test", "--type", "2", "--td-i", path("a.td2"), "--td-j", path("b.td2"), "--ct-i", path("b.ct"),
                 "--ct-j", path("a.ct")}),
            kExitReject);
  EXPECT_EQ(out_.str(), "REJECT\n");

  ASSERT_EQ(run({"td", "--type", "3", "--sk", path("alice.sk"), "--out", path("a.td3")}), kExitOk);
  ASSERT_EQ(run({"td", "--type", "3", "--sk", path("bob.sk"), "--ct", path("b.ct"), "--out", path("b.td3")}),
            kExitOk);
  EXPECT_EQ(run({"test", "--type", "3", "--td-i", path("a.td3"), "--td-j", path("b.td3"), "--ct-i", path("a.ct"),
                 "--ct-j", path("b.ct")}),
            kExitOk);
  EXPECT_EQ(run({"td", "--type", "2", "--sk", path("alice.sk"), "--out", path("x")}), kExitUsage);
}

TEST_F(CliTest, TamperedCiphertextIsRejected) {
  setup_system();
  extract("alice");
  spit(path("msg"), {'a', 'b'});
  encrypt("alice", "msg", "msg.ct");
  auto bytes = slurp(path("msg.ct"));
  const ParamSet p = preset("toy");
  // Bit 17 of the first c1 residue; the result stays below q.
  bytes[kHeaderBytes + kParamBytes + kCtPrefixBytes + 8 * p.m * p.m + 2] ^= 0x02;
  spit(path("bad.ct"), bytes);
  EXPECT_EQ(run({"decrypt", "--sk", path("alice.sk"), "--in", path("bad.ct"), "--out", path("o")}), kExitReject);
  EXPECT_EQ(out_.str(), "REJECT\n");
  EXPECT_FALSE(fs::exists(path("o")));
  EXPECT_EQ(run({"td", "--type", "2", "--sk", path("alice.sk"), "--ct", path("bad.ct"), "--out", path("o")}),
            kExitReject);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"frobnicate"}), kExitUsage);
  EXPECT_EQ(run({"extract", "--msk", path("msk.ibfa")}), kExitUsage);
  EXPECT_EQ(run({"params", "validate", "--params", "no-such-preset"}), kExitUsage);
  EXPECT_EQ(run({"setup", "--seed", "xyz", "--pp", path("pp"), "--msk", path("msk")}), kExitUsage);
  setup_system();
  spit(path("big"), std::vector<uint8_t>(9, 'x'));
  EXPECT_EQ(run({"encrypt", "--id", "alice", "--in", path("big"), "--out", path("big.ct")}), kExitUsage);
}

TEST_F(CliTest, LoadErrors) {
  EXPECT_EQ(run({"encrypt", "--id", "alice", "--in", path("missing"), "--out", path("x")}), kExitLoad);
  setup_system();
  auto bytes = slurp(path("msk.ibfa"));
  bytes[0] = 'X';
  spit(path("bad.msk"), bytes);
  EXPECT_EQ(run({"extract", "--msk", path("bad.msk"), "--id", "alice", "--out", path("a.sk")}), kExitLoad);
  // A key file passed where a ciphertext belongs.
  extract("alice");
  EXPECT_EQ(run({"decrypt", "--sk", path("alice.sk"), "--in", path("alice.sk"), "--out", path("o")}), kExitLoad);
}

TEST_F(CliTest, ParameterSetMismatch) {
  setup_system();
  const ParamSet p = preset("toy");
  std::ofstream(path("p.json")) << "{\"lambda\":" << p.lambda << ",\"n\":" << p.n << ",\"m\":" << p.m
                                << ",\"q\":" << p.q << ",\"t\":" << p.t << ",\"ell\":" << p.ell
                                << ",\"sigma\":" << p.sigma << ",\"alpha\":" << p.alpha
                                << ",\"q_bound\":" << (p.q_bound + 1) << "}";
  spit(path("msg"), {'a'});
  EXPECT_EQ(run({"encrypt", "--params", path("p.json"), "--id", "alice", "--in", path("msg"), "--out", path("c")}),
            kExitLoad);
}

TEST_F(CliTest, ParamsValidate) {
  EXPECT_EQ(run({"params", "validate", "--params", "toy"}), kExitOk);
  EXPECT_NE(out_.str().find("VALID"), std::string::npos);
  std::ofstream(path("bad.json"))
      << R"({"lambda":128,"n":2,"m":10,"q":18593824439,"t":64,"ell":8,"sigma":67266,"alpha":1.9e-10,"q_bound":1048576})";
  EXPECT_EQ(run({"params", "validate", "--params", path("bad.json")}), kExitInvalidParams);
  EXPECT_NE(out_.str().find("INVALID"), std::string::npos);
  EXPECT_NE(out_.str().find("violated"), std::string::npos);
  EXPECT_EQ(run({"setup", "--params", path("bad.json"), "--pp", path("pp"), "--msk", path("msk")}),
            kExitInvalidParams);
}

TEST_F(CliTest, FixedSeedsGiveIdenticalFiles) {
  std::vector<std::vector<uint8_t>> first;
  for (int round = 0; round < 2; ++round) {
    setup_system("c0ffee");
    extract("alice", "11");
    spit(path("msg"), {'d', 'e', 't'});
    encrypt("alice", "msg", "msg.ct", "22");
    ASSERT_EQ(run({"td", "--type", "2", "--seed", "33", "--sk", path("alice.sk"), "--ct", path("msg.ct"), "--out",
                   path("t2")}),
              kExitOk);
    std::vector<std::vector<uint8_t>> files;
    for (const char* f : {"pp.ibfa", "msk.ibfa", "alice.sk", "msg.ct", "t2"}) files.push_back(slurp(path(f)));
    if (round == 0) {
      first = files;
      for (const char* f : {"pp.ibfa", "msk.ibfa", "alice.sk", "msg.ct", "t2"}) fs::remove(path(f));
    } else {
      EXPECT_EQ(files, first);
    }
  }
}

TEST_F(CliTest, MatchesLibraryCalls) {
  setup_system("abcd");
  const uint8_t seed[] = {0xab, 0xcd};
  RandomSource rng{std::span<const uint8_t>(seed)};
  const auto [pp, msk] = ibeetfa::setup(preset("toy"), rng);
  EXPECT_EQ(slurp(path("pp.ibfa")), serialize(pp));
  EXPECT_EQ(slurp(path("msk.ibfa")), serialize(pp.params, msk));

  spit(path("msg"), {0x01, 0x02});
  encrypt("carol", "msg", "c.ct", "05");
  const uint8_t enc_seed[] = {0x05};
  RandomSource enc_rng{std::span<const uint8_t>(enc_seed)};
  std::vector<uint8_t> padded = {0x01, 0x02};
  padded.resize(pp.params.t / 8);
  const auto ct = ibeetfa::encrypt(pp, identity_from_name("carol", pp.params.ell),
                                   BitString::from_bytes(padded, pp.params.t), enc_rng);
  EXPECT_EQ(slurp(path("c.ct")), serialize(pp.params, ct, 16));
}

}  // namespace
}  // namespace ibeetfa
