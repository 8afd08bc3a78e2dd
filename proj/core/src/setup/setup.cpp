#include "vericode/setup/setup.hpp"

#include "vericode/util/checksum.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "vericode/setup/generator.hpp"

namespace vericode {

std::string_view mode_name(Mode mode) {
  return mode == Mode::kClassic ? "classic" : "nightmare";
}

std::string_view difficulty_name(Difficulty level) {
  switch (level) {
    case Difficulty::kEasy: return "easy";
    case Difficulty::kMedium: return "medium";
    case Difficulty::kHard: return "hard";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "classic") return Mode::kClassic;
  if (text == "nightmare") return Mode::kNightmare;
  return std::nullopt;
}

std::optional<Difficulty> parse_difficulty(std::string_view text) {
  for (auto d : kDifficulties) {
    if (difficulty_name(d) == text) return d;
  }
  return std::nullopt;
}

std::size_t verifier_count(Difficulty level) {
  return 4 + static_cast<std::size_t>(level);
}

PublicSetupView public_view(const GameSetup& setup) {
  return {setup.id, setup.mode, setup.difficulty, setup.card_ids, setup.catalog};
}

const Criterion& active_criterion(const GameSetup& setup, const Catalog& catalog,
                                  std::size_t slot) {
  const auto& card = catalog.card(setup.card_ids.at(slot));
  return card.criteria.at(setup.active.at(slot));
}

void validate_setup(const GameSetup& setup, const Catalog& catalog) {
  auto fail = [&](const std::string& why) {
    throw FormatError("setup '" + setup.id + "': " + why);
  };
  if (setup.catalog != catalog.fingerprint()) {
    fail("catalog " + setup.catalog + " does not match loaded catalog " + catalog.fingerprint());
  }
  const std::size_t n = setup.slots();
  if (n != verifier_count(setup.difficulty)) fail("wrong verifier count for difficulty");
  if (setup.active.size() != n || setup.permutation.size() != n) fail("slot count mismatch");
  if (!setup.secret.valid()) fail("secret out of range");

  std::vector<bool> seen(n, false);
  for (std::size_t q = 0; q < n; ++q) {
    const auto p = setup.permutation[q];
    if (p >= n || seen[p]) fail("permutation is not a bijection");
    seen[p] = true;
    if (setup.mode == Mode::kClassic && p != q) fail("classic setup with non-identity permutation");
  }

  std::vector<CodeSet> ext;
  for (std::size_t s = 0; s < n; ++s) {
    const auto* card = catalog.find(setup.card_ids[s]);
    if (card == nullptr) fail("unknown card " + setup.card_ids[s]);
    if (setup.active[s] >= card->criteria.size()) fail("active index out of range");
    ext.push_back(card->criteria[setup.active[s]].extension);
  }
  const auto check = check_extensions(ext);
  if (!check.valid()) fail("active criteria violate uniqueness or necessity");
  if (!check.solutions.test(static_cast<std::size_t>(setup.secret.index()))) {
    fail("secret does not satisfy the active criteria");
  }
}


nlohmann::json public_view_json(const PublicSetupView& view) {
  return {{"id", view.id},
          {"mode", mode_name(view.mode)},
          {"difficulty", difficulty_name(view.difficulty)},
          {"cards", view.card_ids},
          {"catalog", view.catalog}};
}

nlohmann::json setup_to_json(const GameSetup& setup) {
  auto j = public_view_json(public_view(setup));
  j["seed"] = hex64(setup.seed);
  std::vector<std::size_t> perm1;
  for (auto p : setup.permutation) perm1.push_back(p + 1);
  j["secret"] = {{"active", setup.active}, {"code", to_compact(setup.secret)}, {"permutation", perm1}};
  return j;
}

PublicSetupView public_view_from_json(const nlohmann::json& record) {
  try {
    PublicSetupView v;
    v.id = record.at("id").get<std::string>();
    const auto mode = parse_mode(record.at("mode").get<std::string>());
    const auto diff = parse_difficulty(record.at("difficulty").get<std::string>());
    if (!mode || !diff) throw FormatError("setup record has unknown mode or difficulty");
    v.mode = *mode;
    v.difficulty = *diff;
    v.card_ids = record.at("cards").get<std::vector<std::string>>();
    v.catalog = record.at("catalog").get<std::string>();
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed setup record: ") + e.what());
  }
}

GameSetup setup_from_json(const nlohmann::json& record) {
  const auto view = public_view_from_json(record);
  try {
    GameSetup s;
    s.id = view.id;
    s.mode = view.mode;
    s.difficulty = view.difficulty;
    s.card_ids = view.card_ids;
    s.catalog = view.catalog;
    const auto seed = record.at("seed").get<std::string>();
    const auto parsed = parse_hex64(seed);
    if (!parsed) throw FormatError("bad seed '" + seed + "'");
    s.seed = *parsed;
    const auto& secret = record.at("secret");
    s.active = secret.at("active").get<std::vector<std::size_t>>();
    const auto code = parse_compact(secret.at("code").get<std::string>());
    if (!code) throw FormatError("bad secret code in setup " + s.id);
    s.secret = *code;
    for (auto p : secret.at("permutation").get<std::vector<std::size_t>>()) {
      if (p == 0) throw FormatError("permutation entries are 1-based in setup " + s.id);
      s.permutation.push_back(p - 1);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed setup record: ") + e.what());
  }
}

std::string serialize_batch(std::span<const GameSetup> setups) {
  std::string out;
  for (const auto& s : setups) {
    out += setup_to_json(s).dump();
    out += '\n';
  }
  return out;
}

std::vector<GameSetup> parse_batch(std::string_view text) {
  std::vector<GameSetup> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError("setup batch line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(setup_from_json(j));
  }
  return out;
}

void write_batch(const std::filesystem::path& path, std::span<const GameSetup> setups) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_batch(setups);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<GameSetup> read_batch(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_batch(ss.str());
}

}  // namespace vericode
