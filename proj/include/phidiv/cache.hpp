// Copyright 2026 The phidiv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PHIDIV_CACHE_HPP_
#define PHIDIV_CACHE_HPP_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <thread>
#include <tuple>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>
#include "phidiv/error.hpp"
#include "phidiv/nulldist.hpp"
#include "phidiv/random.hpp"

namespace phidiv {

struct CalibrationKey {
  std::uint64_t n = 0;
  double s = 0.0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::string rng_id{kRngId};

  static CalibrationKey of(const CalibrationTable& t) {
    return {t.n, t.s, t.reps, t.seed, t.rng_id};
  }

  // s compares by bit pattern so that -0.0 and 0.0 are distinct keys, like
  // their file names.
  auto tie() const { return std::tuple(n, bits_of(s), reps, seed, rng_id); }
  bool operator<(const CalibrationKey& o) const { return tie() < o.tie(); }
  bool operator==(const CalibrationKey& o) const { return tie() == o.tie(); }
};

namespace detail {

inline std::uint64_t string_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = digits[x & 0xf];
    x >>= 4;
  }
  return out;
}

inline std::uint64_t table_checksum(const CalibrationTable& t) {
  std::uint64_t h = hash_words({static_cast<std::uint64_t>(t.version), t.n, bits_of(t.s),
                                t.reps, t.seed, string_hash(t.rng_id),
                                t.sorted_stats.size()});
  for (double x : t.sorted_stats) h = splitmix64(h ^ bits_of(x));
  return h;
}

// Unique per process, thread and call, so concurrent writers never share a
// temporary file.
inline std::filesystem::path temp_sibling(const std::filesystem::path& target) {
  static std::atomic<std::uint64_t> counter{0};
  const std::uint64_t tag =
      hash_words({static_cast<std::uint64_t>(::getpid()),
                  std::hash<std::thread::id>{}(std::this_thread::get_id()), counter++});
  return target.parent_path() / (target.filename().string() + ".tmp-" + hex64(tag));
}

}  // namespace detail

// Writes `contents` to `path` via a temporary file and rename, so readers
// see either the old file or the complete new one.
inline void atomic_write_file(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  const fs::path tmp = detail::temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

inline std::string cache_file_name(const CalibrationKey& key) {
  const std::uint64_t h =
      hash_words({static_cast<std::uint64_t>(kCalibrationVersion), key.n, bits_of(key.s),
                  key.reps, key.seed, detail::string_hash(key.rng_id)});
  return "calib-" + detail::hex64(h) + ".json";
}

inline std::string table_to_json(const CalibrationTable& t) {
  nlohmann::json doc;
  doc["version"] = t.version;
  doc["n"] = t.n;
  doc["s"] = t.s;
  doc["reps"] = t.reps;
  doc["seed"] = t.seed;
  doc["rng_id"] = t.rng_id;
  doc["sorted_stats"] = t.sorted_stats;
  doc["checksum"] = detail::hex64(detail::table_checksum(t));
  return doc.dump() + "\n";
}

// Parses a cache document. Anything malformed is a CorruptionError; the
// caller decides what a key or version mismatch means.
inline CalibrationTable table_from_json(std::string_view text, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError(origin + ": not a valid calibration document (" + e.what() + ")");
  }
  CalibrationTable t;
  std::string checksum;
  try {
    t.version = doc.at("version").get<int>();
    t.n = doc.at("n").get<std::uint64_t>();
    t.s = doc.at("s").get<double>();
    t.reps = doc.at("reps").get<std::uint64_t>();
    t.seed = doc.at("seed").get<std::uint64_t>();
    t.rng_id = doc.at("rng_id").get<std::string>();
    t.sorted_stats = doc.at("sorted_stats").get<std::vector<double>>();
    checksum = doc.at("checksum").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError(origin + ": missing or mistyped field (" + e.what() + ")");
  }
  if (t.sorted_stats.size() != t.reps) {
    throw CorruptionError(origin + ": table length does not match reps");
  }
  if (!std::is_sorted(t.sorted_stats.begin(), t.sorted_stats.end())) {
    throw CorruptionError(origin + ": table is not sorted");
  }
  if (checksum != detail::hex64(detail::table_checksum(t))) {
    throw CorruptionError(origin + ": checksum mismatch");
  }
  return t;
}

inline void cache_store(const std::filesystem::path& dir, const CalibrationTable& table) {
  atomic_write_file(dir / cache_file_name(CalibrationKey::of(table)), table_to_json(table));
}

// Absent when no file exists for the key or the file was written for another
// key or format version. Damaged files throw CorruptionError.
inline std::optional<CalibrationTable> cache_load(const std::filesystem::path& dir,
                                                  const CalibrationKey& key) {
  const auto path = dir / cache_file_name(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    throw IoError("cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  auto table = table_from_json(buffer.str(), path.string());
  if (table.version != kCalibrationVersion) return std::nullopt;
  if (!(CalibrationKey::of(table) == key)) return std::nullopt;
  return table;
}

// Memoizes tables in memory and, when given a directory, on disk. Concurrent
// requests for the same key build it once.
class CalibrationStore {
 public:
  CalibrationStore() = default;
  explicit CalibrationStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::optional<std::filesystem::path>& directory() const { return dir_; }

  CalibrationTable get(std::uint64_t n, double s, std::uint64_t reps, std::uint64_t seed,
                       unsigned workers = 1) {
    const double one[] = {s};
    return std::move(get_many(n, one, reps, seed, workers).front());
  }

  // Missing tables for several s are built together from shared replicates;
  // each equals the table a single-s build would give.
  std::vector<CalibrationTable> get_many(std::uint64_t n, std::span<const double> s_values,
                                         std::uint64_t reps, std::uint64_t seed,
                                         unsigned workers = 1) {
    std::vector<std::shared_ptr<Slot>> slots;
    std::vector<std::unique_lock<std::mutex>> locks;
    std::map<CalibrationKey, std::size_t> seen;
    for (double s : s_values) {
      const CalibrationKey key{n, s, reps, seed, std::string(kRngId)};
      if (seen.contains(key)) continue;
      seen.emplace(key, slots.size());
      slots.push_back(slot_for(key));
    }
    // Lock in key order so overlapping batches cannot deadlock.
    for (const auto& [key, index] : seen) locks.emplace_back(slots[index]->mutex);

    std::vector<double> missing;
    std::vector<std::size_t> missing_slots;
    for (const auto& [key, index] : seen) {
      Slot& slot = *slots[index];
      if (slot.table) continue;
      if (dir_) {
        if (auto loaded = cache_load(*dir_, key)) {
          slot.table = std::move(*loaded);
          continue;
        }
      }
      missing.push_back(key.s);
      missing_slots.push_back(index);
    }
    if (!missing.empty()) {
      auto built = mc_null_tables(n, missing, reps, seed, workers);
      for (std::size_t k = 0; k < built.size(); ++k) {
        if (dir_) cache_store(*dir_, built[k]);
        slots[missing_slots[k]]->table = std::move(built[k]);
      }
    }

    std::vector<CalibrationTable> out;
    out.reserve(s_values.size());
    for (double s : s_values) {
      const CalibrationKey key{n, s, reps, seed, std::string(kRngId)};
      out.push_back(*slots[seen.at(key)]->table);
    }
    return out;
  }

 private:
  struct Slot {
    std::mutex mutex;
    std::optional<CalibrationTable> table;
  };

  std::shared_ptr<Slot> slot_for(const CalibrationKey& key) {
    std::lock_guard lock(map_mutex_);
    auto& slot = slots_[key];
    if (!slot) slot = std::make_shared<Slot>();
    return slot;
  }

  std::optional<std::filesystem::path> dir_;
  std::mutex map_mutex_;
  std::map<CalibrationKey, std::shared_ptr<Slot>> slots_;
};

}  // namespace phidiv

#endif  // PHIDIV_CACHE_HPP_
