#ifndef S2GEN_SHARD_HPP
#define S2GEN_SHARD_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>

#include "s2gen/generator.hpp"

namespace s2gen {

inline constexpr char kShardMagic[4] = {'S', '2', 'S', 'H'};
inline constexpr std::uint16_t kShardVersion = 1;

/// Little-endian binary shard. Header: magic "S2SH", u16 version. Records:
/// u8 m, u8 n, u16 length, f32 x[m*length], f32 y[n*length], u32 text_len,
/// UTF-8 expression block of n '\n'-terminated lines.
class ShardWriter {
  public:
    explicit ShardWriter(const std::filesystem::path& path);
    void append(const SeriesPair& pair);
    std::int64_t count() const { return count_; }

  private:
    std::ofstream out_;
    std::int64_t count_ = 0;
};

/// Streams records one at a time; throws ShardFormatError with the record
/// index on truncation or header mismatch.
class ShardReader {
  public:
    explicit ShardReader(const std::filesystem::path& path);
    std::optional<SeriesPair> next();
    std::int64_t index() const { return index_; }

  private:
    std::ifstream in_;
    std::int64_t index_ = 0;
};

}  // namespace s2gen

#endif
