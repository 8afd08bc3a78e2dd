#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "vericode/setup/setup.hpp"

namespace vericode {

/// A requested id does not exist.
class NotFound : public Error {
 public:
  using Error::Error;
};

/// Files under one data directory:
///
///   setups/<batch-id>.jsonl       setup batches, named by content checksum
///   runs/<run-id>/                benchmark runs (see runner.hpp)
///   sessions/<session-id>.jsonl   transcripts of interactive sessions
///
/// Safe for concurrent use.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  /// Stores a batch under its content id; storing the same batch twice is a no-op.
  std::string put_batch(std::span<const GameSetup> setups);
  /// Throws NotFound, or FormatError when the file no longer matches its id.
  std::vector<GameSetup> load_batch(const std::string& id) const;
  std::vector<std::string> list_batches() const;
  /// Looks a setup up across all stored batches.
  std::optional<GameSetup> find_setup(const std::string& setup_id) const;

  std::filesystem::path runs_dir() const { return root_ / "runs"; }
  std::filesystem::path sessions_dir() const { return root_ / "sessions"; }

  static std::string batch_id(std::string_view content);

 private:
  void index_batch(const std::vector<GameSetup>& setups) const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
  mutable bool indexed_ = false;
  mutable std::unordered_map<std::string, GameSetup> setups_;
};

}  // namespace vericode
