#include "subshift/family_io.hpp"

#include <fstream>
#include <sstream>

#include "subshift/errors.hpp"
#include "subshift/serialize.hpp"

namespace subshift {

namespace {

constexpr const char* kFormat = "subshift-family/1";

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open family file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string alphabet_hash(const Alphabet& alphabet) {
  return sha256_hex("alphabet:" + std::to_string(alphabet.size()));
}

std::string family_file_text(const BlockFamily& family, const std::string& parent_hash) {
  if (family.level() == 0) throw ArgumentError("the alphabet level has no family file");
  json members = json::array();
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto tuple = family.member(i);
    members.push_back(json(std::vector<std::uint32_t>(tuple.begin(), tuple.end())));
  }
  json j{{"format", kFormat},
         {"level", family.level()},
         {"N_k", family.block_length()},
         {"alphabet", family.alphabet().size()},
         {"multiplier", family.multiplier()},
         {"parent_hash", parent_hash},
         {"members", std::move(members)},
         {"gamma", gamma_to_json(family.gamma())},
         {"build_meta", meta_to_json(family.meta())}};
  return j.dump() + "\n";
}

std::string write_family_file(const BlockFamily& family, const std::string& parent_hash,
                              const std::filesystem::path& path) {
  const std::string text = family_file_text(family, parent_hash);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write " + tmp);
    out << text;
    if (!out) throw ArgumentError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
  return sha256_hex(text);
}

FamilyChain load_family_chain(const std::vector<std::filesystem::path>& paths) {
  FamilyChain chain;
  for (std::size_t k = 1; k <= paths.size(); ++k) {
    const auto& path = paths[k - 1];
    const std::string text = read_all(path);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw IntegrityError(path.string() + ": not valid JSON");
    }
    try {
      if (j.at("format").get<std::string>() != kFormat) {
        throw IntegrityError(path.string() + ": unknown format");
      }
      const Alphabet alphabet(j.at("alphabet").get<std::uint32_t>());
      if (chain.levels.empty()) {
        chain.levels.push_back(BlockFamily::alphabet_level(alphabet));
        chain.hashes.push_back(alphabet_hash(alphabet));
      } else if (!(chain.levels.back()->alphabet() == alphabet)) {
        throw IntegrityError(path.string() + ": alphabet differs from the parent level");
      }
      if (j.at("level").get<std::uint64_t>() != k) {
        throw IntegrityError(path.string() + ": expected level " + std::to_string(k));
      }
      if (j.at("parent_hash").get<std::string>() != chain.hashes.back()) {
        throw IntegrityError(path.string() + ": parent_hash does not match level " +
                             std::to_string(k - 1));
      }
      const auto m = j.at("multiplier").get<std::uint64_t>();
      std::vector<std::uint32_t> flat;
      for (const auto& member : j.at("members")) {
        if (member.size() != m) throw IntegrityError(path.string() + ": member of wrong arity");
        for (const auto& v : member) flat.push_back(v.get<std::uint32_t>());
      }
      auto family = std::make_shared<const BlockFamily>(chain.levels.back(), m, std::move(flat),
                                                        gamma_from_json(j.at("gamma")),
                                                        meta_from_json(j.at("build_meta")));
      if (j.at("N_k").get<std::size_t>() != family->block_length()) {
        throw IntegrityError(path.string() + ": N_k inconsistent with the chain");
      }
      chain.levels.push_back(std::move(family));
      chain.hashes.push_back(sha256_hex(text));
    } catch (const json::exception& e) {
      throw IntegrityError(path.string() + ": malformed family file (" + e.what() + ")");
    } catch (const std::invalid_argument& e) {
      throw IntegrityError(path.string() + ": " + e.what());
    } catch (const std::out_of_range& e) {
      throw IntegrityError(path.string() + ": " + e.what());
    }
  }
  return chain;
}

std::filesystem::path family_path(const std::filesystem::path& dir, std::uint64_t level) {
  return dir / ("family_" + std::to_string(level) + ".json");
}

}  // namespace subshift
