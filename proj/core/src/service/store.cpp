#include "vericode/service/store.hpp"

#include <algorithm>

#include "vericode/util/checksum.hpp"
#include "vericode/util/fs.hpp"

namespace vericode {

namespace fs = std::filesystem;

Store::Store(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  for (const auto& d : {root_ / "setups", runs_dir(), sessions_dir()}) {
    fs::create_directories(d, ec);
    if (ec) throw IoError("cannot create " + d.string() + ": " + ec.message());
  }
}

std::string Store::batch_id(std::string_view content) {
  // Two differently seeded crc32s: 64 bits is plenty for a few thousand batches.
  return "b" + hex32(crc32(content)) + hex32(crc32(content, 0x9e3779b9u));
}

std::string Store::put_batch(std::span<const GameSetup> setups) {
  const auto text = serialize_batch(setups);
  const auto id = batch_id(text);
  const auto path = root_ / "setups" / (id + ".jsonl");
  if (!fs::exists(path)) write_file_atomic(path, text);
  index_batch(std::vector<GameSetup>(setups.begin(), setups.end()));
  return id;
}

std::vector<GameSetup> Store::load_batch(const std::string& id) const {
  if (id.empty() || id.find_first_of("/\\.") != std::string::npos) throw NotFound("no setup batch " + id);
  const auto path = root_ / "setups" / (id + ".jsonl");
  if (!fs::exists(path)) throw NotFound("no setup batch " + id);
  const auto text = read_file(path);
  if (batch_id(text) != id) throw FormatError("setup batch " + id + " fails its checksum");
  return parse_batch(text);
}

std::vector<std::string> Store::list_batches() const {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(root_ / "setups")) {
    if (e.path().extension() == ".jsonl") out.push_back(e.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Store::index_batch(const std::vector<GameSetup>& setups) const {
  std::lock_guard lock(mu_);
  for (const auto& s : setups) setups_.emplace(s.id, s);
}

std::optional<GameSetup> Store::find_setup(const std::string& setup_id) const {
  {
    std::lock_guard lock(mu_);
    if (!indexed_) {
      indexed_ = true;
      for (const auto& id : list_batches()) {
        for (auto& s : load_batch(id)) setups_.emplace(s.id, std::move(s));
      }
    }
    if (auto it = setups_.find(setup_id); it != setups_.end()) return it->second;
  }
  return std::nullopt;
}

}  // namespace vericode
