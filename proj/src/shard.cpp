#include "s2gen/shard.hpp"

#include <bit>
#include <cstring>
#include <string>

static_assert(std::endian::native == std::endian::little,
              "shard format is little-endian; big-endian hosts are unsupported");

namespace s2gen {

namespace {

template <typename T>
void write_pod(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
bool read_pod(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return in.gcount() == static_cast<std::streamsize>(sizeof v);
}

void write_f32_block(std::ofstream& out, const Matrix& m) {
    std::vector<float> buf(m.data.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(m.data[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

bool read_f32_block(std::ifstream& in, Matrix& m) {
    std::vector<float> buf(m.data.size());
    const std::streamsize bytes = static_cast<std::streamsize>(buf.size() * sizeof(float));
    in.read(reinterpret_cast<char*>(buf.data()), bytes);
    if (in.gcount() != bytes) return false;
    for (std::size_t i = 0; i < buf.size(); ++i) m.data[i] = static_cast<double>(buf[i]);
    return true;
}

}  // namespace

ShardWriter::ShardWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open shard for writing: " + path.string());
    out_.write(kShardMagic, 4);
    write_pod(out_, kShardVersion);
}

void ShardWriter::append(const SeriesPair& pair) {
    if (pair.m < 1 || pair.m > 255 || pair.n < 1 || pair.n > 255)
        throw std::invalid_argument("shard: m and n must fit u8");
    if (pair.x.cols > 65535) throw std::invalid_argument("shard: length must fit u16");
    write_pod(out_, static_cast<std::uint8_t>(pair.m));
    write_pod(out_, static_cast<std::uint8_t>(pair.n));
    write_pod(out_, static_cast<std::uint16_t>(pair.x.cols));
    write_f32_block(out_, pair.x);
    write_f32_block(out_, pair.y);
    std::string text;
    for (const auto& line : pair.expr_texts) {
        text += line;
        text += '\n';
    }
    write_pod(out_, static_cast<std::uint32_t>(text.size()));
    out_.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out_) throw std::runtime_error("shard write failed");
    ++count_;
}

ShardReader::ShardReader(const std::filesystem::path& path)
    : in_(path, std::ios::binary) {
    if (!in_) throw ShardFormatError("cannot open shard: " + path.string());
    char magic[4] = {};
    in_.read(magic, 4);
    if (in_.gcount() != 4 || std::memcmp(magic, kShardMagic, 4) != 0)
        throw ShardFormatError("bad shard magic in " + path.string());
    std::uint16_t version = 0;
    if (!read_pod(in_, version) || version != kShardVersion)
        throw ShardFormatError("unsupported shard version in " + path.string());
}

std::optional<SeriesPair> ShardReader::next() {
    std::uint8_t m8 = 0;
    in_.read(reinterpret_cast<char*>(&m8), 1);
    if (in_.gcount() == 0) return std::nullopt;  // clean end of shard

    const auto truncated = [this] {
        return ShardFormatError("truncated shard record", index_);
    };

    std::uint8_t n8 = 0;
    std::uint16_t len = 0;
    if (!read_pod(in_, n8)) throw truncated();
    if (!read_pod(in_, len)) throw truncated();
    if (m8 == 0 || n8 == 0 || len == 0)
        throw ShardFormatError("invalid record header", index_);

    SeriesPair pair;
    pair.m = m8;
    pair.n = n8;
    pair.x = Matrix(m8, len);
    pair.y = Matrix(n8, len);
    if (!read_f32_block(in_, pair.x)) throw truncated();
    if (!read_f32_block(in_, pair.y)) throw truncated();

    std::uint32_t text_len = 0;
    if (!read_pod(in_, text_len)) throw truncated();
    std::string text(text_len, '\0');
    in_.read(text.data(), text_len);
    if (in_.gcount() != static_cast<std::streamsize>(text_len)) throw truncated();

    std::size_t start = 0;
    while (start < text.size()) {
        const std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos)
            throw ShardFormatError("expression block not newline-terminated", index_);
        pair.expr_texts.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    if (pair.expr_texts.size() != static_cast<std::size_t>(pair.n))
        throw ShardFormatError("expression block line count != n", index_);

    ++index_;
    return pair;
}

}  // namespace s2gen
