#pragma once

#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vericode/dsl/expr.hpp"
#include "vericode/util/error.hpp"

namespace vericode {

struct Criterion {
  std::string id;
  std::string card_id;
  std::string rule;         // DSL source text
  std::string description;  // what players see
  PredicateExpr expr;
  CodeSet extension;        // cached extension(expr)
};

struct VerifierCard {
  std::string id;
  std::string name;
  std::vector<Criterion> criteria;
};

/// A catalog document failed validation.
class CatalogError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Immutable, validated set of verifier cards.
class Catalog {
 public:
  static constexpr std::size_t kMinCriteria = 2;
  static constexpr std::size_t kMaxCriteria = 9;

  Catalog(std::string version, std::vector<VerifierCard> cards);

  const std::string& version() const { return version_; }
  /// crc32 over card ids and rule texts; changes whenever semantics could.
  const std::string& checksum() const { return checksum_; }
  /// "<version>@<checksum>", recorded in setups and transcripts.
  std::string fingerprint() const { return version_ + "@" + checksum_; }

  std::span<const VerifierCard> cards() const { return cards_; }
  const VerifierCard& card(std::string_view id) const;  // throws CatalogError
  const VerifierCard* find(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;       // throws CatalogError

 private:
  std::string version_;
  std::string checksum_;
  std::vector<VerifierCard> cards_;
};

/// Validates and builds a catalog from its JSON document:
///
///   {"version": "...", "cards": [{"id": "...", "name": "...",
///     "criteria": [{"id": "...", "rule": "<DSL>", "description": "..."}]}]}
Catalog load_catalog(const nlohmann::json& document);
Catalog load_catalog_file(const std::filesystem::path& path);

/// The 48-card catalog shipped with the library.
const Catalog& default_catalog();

}  // namespace vericode
