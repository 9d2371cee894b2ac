#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "subshift/construction.hpp"

namespace subshift {

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

// Hash standing in for the (implicit) level-0 family file.
std::string alphabet_hash(const Alphabet& alphabet);

// Canonical file contents for a family whose parent file hashes to parent_hash.
std::string family_file_text(const BlockFamily& family, const std::string& parent_hash);

// Writes the family file and returns the SHA-256 of its bytes.
std::string write_family_file(const BlockFamily& family, const std::string& parent_hash,
                              const std::filesystem::path& path);

struct FamilyChain {
  std::vector<FamilyPtr> levels;   // levels[0] is the alphabet
  std::vector<std::string> hashes;  // hashes[k] of level k (hashes[0] = alphabet_hash)
};

// Loads family files for levels 1..K in order, verifying each parent_hash
// against the previous file. Throws IntegrityError on a broken chain.
FamilyChain load_family_chain(const std::vector<std::filesystem::path>& paths);

// Conventional file name for level k inside an output directory.
std::filesystem::path family_path(const std::filesystem::path& dir, std::uint64_t level);

}  // namespace subshift
