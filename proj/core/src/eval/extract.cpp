#include "vericode/eval/extract.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

#include "vericode/dsl/parser.hpp"
#include "vericode/protocol/templates.hpp"

namespace vericode {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(" \t\r") - b + 1));
}

/// Normalized DSL text, or nullopt if the text is not a rule.
std::optional<std::string> as_rule(std::string_view text) {
  try {
    return render(parse_rule(trim(text)));
  } catch (const Error&) {
    return std::nullopt;
  }
}

const std::map<std::string, std::string>& relation_words() {
  static const std::map<std::string, std::string> m{
      {"=", "="},
      {"==", "="},
      {"is", "="},
      {"equals", "="},
      {"equal to", "="},
      {"is equal to", "="},
      {"the same as", "="},
      {"!=", "!="},
      {"not equal to", "!="},
      {"different from", "!="},
      {"<", "<"},
      {"less than", "<"},
      {"smaller than", "<"},
      {"lower than", "<"},
      {">", ">"},
      {"greater than", ">"},
      {"larger than", ">"},
      {"bigger than", ">"},
      {"higher than", ">"},
      {"more than", ">"},
      {"<=", "<="},
      {"at most", "<="},
      {"less than or equal to", "<="},
      {">=", ">="},
      {"at least", ">="},
      {"greater than or equal to", ">="},
  };
  return m;
}

std::string operand(const std::string& word) {
  static const std::map<std::string, std::string> m{{"one", "1"},  {"two", "2"},   {"three", "3"},
                                                    {"four", "4"}, {"five", "5"}};
  if (auto it = m.find(word); it != m.end()) return it->second;
  if (word.size() == 1 && std::isdigit(static_cast<unsigned char>(word[0]))) return word;
  std::string up = word;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  return up;
}

struct Relation {
  long begin = 0;
  long end = 0;
  std::string rule;
  bool operator<(const Relation& o) const { return begin < o.begin; }
};

// Every comparison or parity phrase in a lower-cased sentence.
std::vector<Relation> read_relations(const std::string& clause) {
  static const std::regex compare(
      R"((blue|yellow|purple)\s+(?:is\s+|must be\s+|should be\s+)?)"
      R"((less than or equal to|greater than or equal to|not equal to|is equal to|equal to|equals|the same as|)"
      R"(different from|less than|smaller than|lower than|greater than|larger than|bigger than|higher than|)"
      R"(more than|at least|at most|!=|<=|>=|==|=|<|>|is)\s+)"
      R"((blue|yellow|purple|[1-5]|one|two|three|four|five)\b)");
  static const std::regex parity(R"((blue|yellow|purple|the sum|sum)\s+(?:is\s+|must be\s+)?(even|odd)\b)");
  std::vector<Relation> found;
  for (auto it = std::sregex_iterator(clause.begin(), clause.end(), compare); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const auto rule = operand(m[1]) + " " + relation_words().at(m[2]) + " " + operand(m[3]);
    if (auto r = as_rule(rule)) found.push_back({m.position(0), m.position(0) + m.length(0), *r});
  }
  for (auto it = std::sregex_iterator(clause.begin(), clause.end(), parity); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const std::string what = m[1].str().find("sum") != std::string::npos ? "SUM" : operand(m[1]);
    if (auto r = as_rule("PARITY(" + what + ") = " + operand(m[2]))) {
      found.push_back({m.position(0), m.position(0) + m.length(0), *r});
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

}  // namespace

std::vector<Conclusion> extract_claims(std::string_view reasoning) {
  static const std::regex claim_line(R"(^\s*\[claim\]\s*verifier\s+(\d+)\s*:\s*(.*?)\s*$)", std::regex::icase);
  std::vector<Conclusion> out;

  std::string text(reasoning);
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;

    std::smatch m;
    if (std::regex_match(line, m, claim_line)) {
      Conclusion c;
      c.verifier = std::stoi(m[1]);
      c.text = trim(line);
      c.extractor = "pattern";
      const std::string body = m[2];
      std::size_t b = 0;
      bool ok = true;
      while (b <= body.size()) {
        auto bar = body.find('|', b);
        if (bar == std::string::npos) bar = body.size();
        auto r = as_rule(body.substr(b, bar - b));
        if (!r) ok = false;
        else c.rules.push_back(*r);
        b = bar + 1;
      }
      if (!ok) c.rules.clear();  // left for a model judge
      out.push_back(std::move(c));
      continue;
    }

    // Sentences: split on . ; ! ? then give each relation to the verifier
    // mentioned before it, or to a following "for verifier N".
    static const std::regex mention_re(R"(\b(for|by|from|of|to)?\s*\bverifier\s+#?(\d+)\b)", std::regex::icase);
    const std::string low = lower(line);
    std::size_t s = 0;
    while (s < low.size()) {
      auto e = low.find_first_of(".;!?", s);
      if (e == std::string::npos) e = low.size();
      const std::string sentence = low.substr(s, e - s);
      const std::string original = line.substr(s, e - s);
      s = e + 1;
      struct Mention {
        long begin, end;
        int verifier;
        bool back;  // "for verifier N" points back at what came before
      };
      std::vector<Mention> mentions;
      for (auto it = std::sregex_iterator(sentence.begin(), sentence.end(), mention_re);
           it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        mentions.push_back({m.position(0), m.position(0) + m.length(0), std::stoi(m[2]), m[1].matched});
      }
      if (mentions.empty()) continue;
      std::vector<std::vector<Relation>> owned(mentions.size());
      for (const auto& r : read_relations(sentence)) {
        std::optional<std::size_t> owner;
        for (std::size_t k = 0; k < mentions.size(); ++k) {
          if (mentions[k].begin >= r.end) {
            if (mentions[k].back) owner = k;
            break;
          }
          if (mentions[k].end <= r.begin) owner = k;
        }
        if (owner) owned[*owner].push_back(r);
      }
      for (std::size_t k = 0; k < mentions.size(); ++k) {
        auto& rel = owned[k];
        if (rel.empty()) continue;  // a mention without a claim
        Conclusion c;
        c.verifier = mentions[k].verifier;
        c.text = trim(original);
        c.extractor = "pattern";
        // "x or y" lists alternatives; otherwise the first relation is the claim.
        const auto span = sentence.substr(static_cast<std::size_t>(rel.front().begin),
                                          static_cast<std::size_t>(rel.back().end - rel.front().begin));
        if (rel.size() > 1 && span.find(" or ") != std::string::npos) {
          for (const auto& r : rel) c.rules.push_back(r.rule);
        } else {
          c.rules.push_back(rel.front().rule);
        }
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

std::vector<Conclusion> extract_pattern(const Transcript& transcript) {
  std::vector<Conclusion> out;
  for (const auto& e : transcript.events) {
    const auto* a = std::get_if<ActionEvent>(&e.body);
    if (a == nullptr || !a->reasoning) continue;
    for (auto& c : extract_claims(*a->reasoning)) {
      c.game = transcript.header.setup_id;
      c.seq = e.seq;
      c.round = e.round;
      out.push_back(std::move(c));
    }
  }
  return out;
}

ExternalExtractor::ExternalExtractor(std::shared_ptr<CompletionClient> client, std::string model,
                                     const Catalog& catalog)
    : client_(std::move(client)), model_(std::move(model)), catalog_(&catalog) {}

std::vector<Conclusion> ExternalExtractor::extract(const Transcript& transcript, const PublicSetupView& view,
                                                   std::vector<ExchangeLog>* log) const {
  const std::string instructions =
      "You read a player's reasoning from a deduction game and list every conclusion it states about "
      "which rule a verifier is checking. Write rules in this syntax: COLOR OP VALUE, where COLOR is BLUE, "
      "YELLOW or PURPLE, OP is one of < <= = >= > !=, and VALUE is a digit or a COLOR; PARITY(COLOR) = EVEN|ODD; "
      "SUM OP n. Reply with JSON only: {\"conclusions\": [{\"verifier\": N, \"rules\": [\"...\"], "
      "\"text\": \"quoted sentence\"}]}. List several rules for one verifier only when the reasoning leaves "
      "them open. Reply {\"conclusions\": []} if there are none.\n\nVerifiers:\n" +
      describe_verifiers(view, *catalog_);
  std::vector<Conclusion> out;
  for (const auto& e : transcript.events) {
    const auto* a = std::get_if<ActionEvent>(&e.body);
    if (a == nullptr || !a->reasoning) continue;
    const std::vector<ChatMessage> msgs{{"system", instructions}, {"user", *a->reasoning}};
    ExchangeLog entry{*a->reasoning, "", ""};
    const auto reply = client_->complete(msgs);
    entry.reply = reply.text;
    try {
      auto body = reply.text;
      const auto open = body.find('{');
      const auto close = body.rfind('}');
      if (open == std::string::npos || close == std::string::npos) throw FormatError("no JSON object in reply");
      const auto j = nlohmann::json::parse(body.substr(open, close - open + 1));
      for (const auto& item : j.at("conclusions")) {
        Conclusion c;
        c.game = transcript.header.setup_id;
        c.seq = e.seq;
        c.round = e.round;
        c.verifier = item.at("verifier").get<int>();
        c.text = item.value("text", "");
        c.extractor = identity();
        for (const auto& r : item.at("rules")) {
          // Models are loose about keyword case; the DSL is not.
          std::string up = r.get<std::string>();
          std::transform(up.begin(), up.end(), up.begin(), [](unsigned char ch) { return std::toupper(ch); });
          if (auto rule = as_rule(up)) c.rules.push_back(*rule);
          else c.text += (c.text.empty() ? "" : " / ") + r.get<std::string>();
        }
        if (c.verifier < 1 || c.verifier > static_cast<int>(view.card_ids.size())) continue;
        if (c.rules.empty() && c.text.empty()) continue;
        out.push_back(std::move(c));
      }
    } catch (const std::exception& ex) {
      entry.error = ex.what();
    }
    if (log != nullptr) log->push_back(std::move(entry));
  }
  return out;
}

}  // namespace vericode
