#include "vericode/dsl/catalog.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "vericode/dsl/parser.hpp"
#include "vericode/util/assets.hpp"
#include "vericode/util/checksum.hpp"

namespace vericode {

Catalog::Catalog(std::string version, std::vector<VerifierCard> cards)
    : version_(std::move(version)), cards_(std::move(cards)) {
  std::set<std::string, std::less<>> ids;
  std::string canon;
  for (const auto& card : cards_) {
    if (!ids.insert(card.id).second) throw CatalogError("duplicate card id '" + card.id + "'");
    const auto n = card.criteria.size();
    if (n < kMinCriteria || n > kMaxCriteria) {
      throw CatalogError("card '" + card.id + "' has " + std::to_string(n) +
                         " criteria; expected 2 to 9");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (card.criteria[i].extension == card.criteria[j].extension) {
          throw CatalogError("card '" + card.id + "': criteria '" + card.criteria[i].rule +
                             "' and '" + card.criteria[j].rule + "' have identical extensions");
        }
      }
    }
    canon += card.id;
    for (const auto& c : card.criteria) canon += "|" + c.id + ":" + render(c.expr);
    canon += "\n";
  }
  checksum_ = hex32(crc32(canon));
}

const VerifierCard* Catalog::find(std::string_view id) const {
  for (const auto& card : cards_) {
    if (card.id == id) return &card;
  }
  return nullptr;
}

const VerifierCard& Catalog::card(std::string_view id) const {
  if (const auto* c = find(id)) return *c;
  throw CatalogError("unknown card id '" + std::string(id) + "'");
}

std::size_t Catalog::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < cards_.size(); ++i) {
    if (cards_[i].id == id) return i;
  }
  throw CatalogError("unknown card id '" + std::string(id) + "'");
}

Catalog load_catalog(const nlohmann::json& document) {
  try {
    std::vector<VerifierCard> cards;
    for (const auto& jc : document.at("cards")) {
      VerifierCard card;
      card.id = jc.at("id").get<std::string>();
      card.name = jc.at("name").get<std::string>();
      for (const auto& jr : jc.at("criteria")) {
        Criterion c;
        c.id = jr.at("id").get<std::string>();
        c.card_id = card.id;
        c.rule = jr.at("rule").get<std::string>();
        c.description = jr.value("description", c.rule);
        try {
          c.expr = parse_rule(c.rule);
        } catch (const RuleSyntaxError& e) {
          throw CatalogError("card '" + card.id + "' criterion '" + c.id + "': " + e.what());
        }
        c.extension = extension(c.expr);
        card.criteria.push_back(std::move(c));
      }
      cards.push_back(std::move(card));
    }
    return Catalog(document.at("version").get<std::string>(), std::move(cards));
  } catch (const nlohmann::json::exception& e) {
    throw CatalogError(std::string("catalog schema violation: ") + e.what());
  }
}

Catalog load_catalog_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open catalog file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw CatalogError("catalog file " + path.string() + " is not valid JSON: " + e.what());
  }
  return load_catalog(doc);
}

const Catalog& default_catalog() {
  static const Catalog catalog =
      load_catalog(nlohmann::json::parse(embedded_asset("default_catalog.json")));
  return catalog;
}

}  // namespace vericode
