#include "ibeetfa/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>

#include "ibeetfa/authz.hpp"
#include "ibeetfa/error.hpp"
#include "ibeetfa/params.hpp"
#include "ibeetfa/random.hpp"
#include "ibeetfa/scheme.hpp"
#include "ibeetfa/serialize.hpp"

namespace ibeetfa {
namespace {

namespace fs = std::filesystem;

// Raised for bad command lines and unreadable inputs; carries the exit code.
struct CliFailure {
  int code;
  std::string message;
};

[[noreturn]] void usage(const std::string& msg) { throw CliFailure{kExitUsage, msg}; }

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliFailure{kExitLoad, "cannot open " + path};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const uint8_t> bytes) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kInvalidArgument, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

ParamSet params_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) usage("--params: '" + path + "' is neither a preset nor a readable file");
  try {
    const auto j = nlohmann::json::parse(in);
    ParamSet p;
    p.lambda = j.at("lambda").get<uint64_t>();
    p.n = j.at("n").get<uint64_t>();
    p.m = j.at("m").get<uint64_t>();
    p.q = j.at("q").get<uint64_t>();
    p.t = j.at("t").get<uint64_t>();
    p.ell = j.at("ell").get<uint64_t>();
    p.sigma = j.at("sigma").get<double>();
    p.alpha = j.at("alpha").get<double>();
    p.q_bound = j.at("q_bound").get<uint64_t>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    usage("--params " + path + ": " + e.what());
  }
}

ParamSet resolve_params(const std::string& spec) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), spec) != names.end()) return preset(spec);
  return params_from_json(spec);
}

RandomSource make_rng(const std::string& seed_hex) {
  if (seed_hex.empty()) return RandomSource::from_entropy();
  if (seed_hex.size() % 2 != 0) usage("--seed must have an even number of hex digits");
  std::vector<uint8_t> bytes;
  for (size_t i = 0; i < seed_hex.size(); i += 2) {
    const std::string pair = seed_hex.substr(i, 2);
    if (!std::all_of(pair.begin(), pair.end(), [](unsigned char c) { return std::isxdigit(c); })) {
      usage("--seed must be hexadecimal");
    }
    bytes.push_back(static_cast<uint8_t>(std::stoul(pair, nullptr, 16)));
  }
  return RandomSource(std::span<const uint8_t>(bytes));
}

BitString message_from_bytes(std::span<const uint8_t> bytes, uint64_t t) {
  if (bytes.size() * 8 > t) {
    usage("message is " + std::to_string(bytes.size() * 8) + " bits; at most " + std::to_string(t) +
          " fit in one ciphertext");
  }
  std::vector<uint8_t> padded(bytes.begin(), bytes.end());
  padded.resize((t + 7) / 8, 0);
  return BitString::from_bytes(padded, t);
}

struct Common {
  std::string params = "toy";
  std::string seed;
  std::string pp = "pp.ibfa";
};

void add_common(CLI::App* cmd, Common& c, bool with_pp = true) {
  cmd->add_option("--params", c.params, "preset name or JSON parameter file")->capture_default_str();
  cmd->add_option("--seed", c.seed, "hex seed for reproducible randomness");
  if (with_pp) cmd->add_option("--pp", c.pp, "public parameter file")->capture_default_str();
}

// Loads the public parameters and checks them against --params.
PublicParams load_pp(const Common& c) {
  const ParamSet wanted = resolve_params(c.params);
  PublicParams pp = deserialize_pp(read_file(c.pp));
  if (params_fingerprint(pp.params) != params_fingerprint(wanted)) {
    throw CliFailure{kExitLoad, "public parameters in " + c.pp + " were made with a different parameter set"};
  }
  return pp;
}

void warn_insecure(std::ostream& err) {
  err << "warning: preset parameter sets are for testing and provide no cryptographic security\n";
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Identity-based encryption with equality test and flexible authorization"};
  app.name("ibeetfa");
  app.require_subcommand(1);

  Common common;

  auto* setup_cmd = app.add_subcommand("setup", "generate public parameters and master key");
  std::string msk_path = "msk.ibfa";
  add_common(setup_cmd, common);
  setup_cmd->add_option("--msk", msk_path)->capture_default_str();

  auto* extract_cmd = app.add_subcommand("extract", "derive a user secret key");
  std::string id_name, sk_path = "sk.ibfa";
  add_common(extract_cmd, common);
  extract_cmd->add_option("--msk", msk_path)->capture_default_str();
  extract_cmd->add_option("--id", id_name, "identity string")->required();
  extract_cmd->add_option("--out", sk_path)->capture_default_str();

  auto* encrypt_cmd = app.add_subcommand("encrypt", "encrypt a message file to an identity");
  std::string in_path, out_path;
  add_common(encrypt_cmd, common);
  encrypt_cmd->add_option("--id", id_name, "recipient identity")->required();
  encrypt_cmd->add_option("--in", in_path, "message file")->required();
  encrypt_cmd->add_option("--out", out_path, "ciphertext file")->required();

  auto* decrypt_cmd = app.add_subcommand("decrypt", "decrypt a ciphertext file");
  add_common(decrypt_cmd, common);
  decrypt_cmd->add_option("--sk", sk_path)->capture_default_str();
  decrypt_cmd->add_option("--in", in_path, "ciphertext file")->required();
  decrypt_cmd->add_option("--out", out_path, "message file")->required();

  auto* td_cmd = app.add_subcommand("td", "issue an equality-test trapdoor");
  int td_type = 0;
  std::string ct_path;
  add_common(td_cmd, common);
  td_cmd->add_option("--type", td_type)->required()->check(CLI::Range(1, 3));
  td_cmd->add_option("--sk", sk_path)->capture_default_str();
  td_cmd->add_option("--ct", ct_path, "ciphertext to bind (type 2; type 3 ciphertext side)");
  td_cmd->add_option("--out", out_path, "trapdoor file")->required();

  auto* test_cmd = app.add_subcommand("test", "test two ciphertexts for equal messages");
  int test_type = 0;
  std::string td_i, td_j, ct_i, ct_j;
  add_common(test_cmd, common);
  test_cmd->add_option("--type", test_type)->required()->check(CLI::Range(1, 3));
  test_cmd->add_option("--td-i", td_i)->required();
  test_cmd->add_option("--td-j", td_j)->required();
  test_cmd->add_option("--ct-i", ct_i)->required();
  test_cmd->add_option("--ct-j", ct_j)->required();

  auto* params_cmd = app.add_subcommand("params", "parameter set tools");
  params_cmd->require_subcommand(1);
  auto* validate_cmd = params_cmd->add_subcommand("validate", "check a parameter set against the constraints");
  add_common(validate_cmd, common, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const bool is_preset = [&] {
      const auto names = preset_names();
      return std::find(names.begin(), names.end(), common.params) != names.end();
    }();

    if (validate_cmd->parsed()) {
      const ParamSet p = resolve_params(common.params);
      out << describe(p) << "\n";
      const auto violations = validate_params(p);
      for (const auto& v : violations) out << "violated " << constraint_name(v.constraint) << ": " << v.detail << "\n";
      out << (violations.empty() ? "VALID" : "INVALID") << "\n";
      return violations.empty() ? kExitOk : kExitInvalidParams;
    }

    RandomSource rng = make_rng(common.seed);

    if (setup_cmd->parsed()) {
      const ParamSet p = resolve_params(common.params);
      if (is_preset) warn_insecure(err);
      auto [pp, msk] = setup(p, rng);
      write_file(common.pp, serialize(pp));
      write_file(msk_path, serialize(p, msk));
      return kExitOk;
    }

    const PublicParams pp = load_pp(common);

    if (extract_cmd->parsed()) {
      const MasterSecretKey msk = deserialize_msk(read_file(msk_path), pp.params);
      const UserSecretKey sk = extract(pp, msk, identity_from_name(id_name, pp.params.ell), rng);
      write_file(sk_path, serialize(pp.params, sk));
      return kExitOk;
    }
    if (encrypt_cmd->parsed()) {
      const auto bytes = read_file(in_path);
      const BitString msg = message_from_bytes(bytes, pp.params.t);
      const Ciphertext ct = encrypt(pp, identity_from_name(id_name, pp.params.ell), msg, rng);
      write_file(out_path, serialize(pp.params, ct, bytes.size() * 8));
      return kExitOk;
    }
    if (decrypt_cmd->parsed()) {
      const UserSecretKey sk = deserialize_sk(read_file(sk_path), pp.params);
      const StoredCiphertext stored = deserialize_ct(read_file(in_path), pp.params);
      const auto msg = decrypt(pp, sk, stored.ct, rng);
      if (!msg) {
        out << "REJECT\n";
        return kExitReject;
      }
      auto bytes = msg->to_bytes();
      bytes.resize(stored.message_bits / 8);
      write_file(out_path, bytes);
      return kExitOk;
    }
    if (td_cmd->parsed()) {
      const UserSecretKey sk = deserialize_sk(read_file(sk_path), pp.params);
      if (td_type == 1) {
        write_file(out_path, serialize(pp.params, td1(sk, sk.id)));
        return kExitOk;
      }
      if (td_type == 2 && ct_path.empty()) usage("td --type 2 needs --ct");
      if (td_type == 3 && ct_path.empty()) {
        write_file(out_path, serialize(pp.params, td3_basis(sk, sk.id)));
        return kExitOk;
      }
      const StoredCiphertext stored = deserialize_ct(read_file(ct_path), pp.params);
      if (td_type == 2) {
        const auto td = td2(pp, sk, sk.id, stored.ct, rng);
        if (!td) {
          out << "REJECT\n";
          return kExitReject;
        }
        write_file(out_path, serialize(pp.params, *td));
      } else {
        const auto td = td3_ct(pp, sk, sk.id, stored.ct, rng);
        if (!td) {
          out << "REJECT\n";
          return kExitReject;
        }
        write_file(out_path, serialize(pp.params, *td));
      }
      return kExitOk;
    }
    if (test_cmd->parsed()) {
      const Ciphertext cti = deserialize_ct(read_file(ct_i), pp.params).ct;
      const Ciphertext ctj = deserialize_ct(read_file(ct_j), pp.params).ct;
      std::optional<bool> result;
      if (test_type == 1) {
        result = test1(deserialize_td1(read_file(td_i), pp.params), deserialize_td1(read_file(td_j), pp.params),
                       cti, ctj, pp, rng);
      } else if (test_type == 2) {
        result = test2(deserialize_td2(read_file(td_i), pp.params), deserialize_td2(read_file(td_j), pp.params),
                       cti, ctj);
      } else {
        result = test3(deserialize_td3(read_file(td_i), pp.params), deserialize_td3(read_file(td_j), pp.params),
                       cti, ctj, pp, rng);
      }
      if (!result) {
        out << "REJECT\n";
        return kExitReject;
      }
      out << (*result ? "EQUAL" : "NOT-EQUAL") << "\n";
      return *result ? kExitOk : kExitNotEqual;
    }
    usage("no command given");
  } catch (const CliFailure& f) {
    err << "error: " << f.message << "\n";
    return f.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kFormat:
        return kExitLoad;
      case ErrorCode::kInvalidParams:
        return kExitInvalidParams;
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kDimensionMismatch:
        return kExitUsage;
      default:
        return kExitInternal;
    }
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace ibeetfa
