#include "pptx/zip.hpp"

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>

#include "support/error.hpp"

namespace deckhand::zip {
namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEocdSig = 0x06054b50;

std::uint16_t rd16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t rd32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void wr16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void wr32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string inflate_raw(const unsigned char* src, std::size_t src_len,
                        std::size_t expected_len) {
  std::string out(expected_len, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK)
    raise(Errc::internal, "inflateInit2 failed");
  zs.next_in = const_cast<Bytef*>(src);
  zs.avail_in = static_cast<uInt>(src_len);
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != expected_len)
    raise(Errc::malformed_package, "deflate stream corrupt");
  return out;
}

std::string deflate_raw(std::string_view src) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -15, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK)
    raise(Errc::internal, "deflateInit2 failed");
  std::string out(deflateBound(&zs, static_cast<uLong>(src.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(src.data()));
  zs.avail_in = static_cast<uInt>(src.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) raise(Errc::internal, "deflate failed");
  out.resize(zs.total_out);
  return out;
}

std::uint32_t crc_of(std::string_view data) {
  return static_cast<std::uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(data.data()),
            static_cast<uInt>(data.size())));
}

}  // namespace

std::vector<Entry> read_archive_bytes(std::string_view bytes) {
  const auto* buf = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < 22 || !(rd32(buf) == kLocalSig || rd32(buf) == kEocdSig))
    raise(Errc::not_a_zip, "missing ZIP signature");

  // End-of-central-directory record: scan backwards over the trailing
  // comment (max 64 KiB).
  std::size_t eocd = std::string_view::npos;
  std::size_t scan_limit = n >= 22 + 65535 ? n - 22 - 65535 : 0;
  for (std::size_t i = n - 22; ; --i) {
    if (rd32(buf + i) == kEocdSig) {
      eocd = i;
      break;
    }
    if (i == scan_limit) break;
  }
  if (eocd == std::string_view::npos)
    raise(Errc::not_a_zip, "no end-of-central-directory record");

  std::uint16_t count = rd16(buf + eocd + 10);
  std::uint32_t cd_size = rd32(buf + eocd + 12);
  std::uint32_t cd_offset = rd32(buf + eocd + 16);
  if (cd_offset == 0xFFFFFFFF || count == 0xFFFF)
    raise(Errc::malformed_package, "zip64 archives are not supported");
  if (static_cast<std::size_t>(cd_offset) + cd_size > n)
    raise(Errc::malformed_package, "central directory out of bounds");

  std::vector<Entry> entries;
  entries.reserve(count);
  std::size_t pos = cd_offset;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (pos + 46 > n || rd32(buf + pos) != kCentralSig)
      raise(Errc::malformed_package, "central directory entry corrupt");
    std::uint16_t method = rd16(buf + pos + 10);
    std::uint32_t crc = rd32(buf + pos + 16);
    std::uint32_t comp_size = rd32(buf + pos + 20);
    std::uint32_t uncomp_size = rd32(buf + pos + 24);
    std::uint16_t name_len = rd16(buf + pos + 28);
    std::uint16_t extra_len = rd16(buf + pos + 30);
    std::uint16_t comment_len = rd16(buf + pos + 32);
    std::uint32_t local_offset = rd32(buf + pos + 42);
    if (pos + 46 + name_len > n)
      raise(Errc::malformed_package, "entry name out of bounds");
    std::string name(reinterpret_cast<const char*>(buf + pos + 46), name_len);
    pos += 46u + name_len + extra_len + comment_len;

    if (static_cast<std::size_t>(local_offset) + 30 > n ||
        rd32(buf + local_offset) != kLocalSig)
      raise(Errc::malformed_package, "local header corrupt for " + name);
    std::uint16_t lf_name = rd16(buf + local_offset + 26);
    std::uint16_t lf_extra = rd16(buf + local_offset + 28);
    std::size_t data_at = static_cast<std::size_t>(local_offset) + 30 + lf_name + lf_extra;
    if (data_at + comp_size > n)
      raise(Errc::malformed_package, "entry data out of bounds for " + name);

    if (!name.empty() && name.back() == '/') continue;  // directory entry

    std::string data;
    if (method == 0) {
      if (comp_size != uncomp_size)
        raise(Errc::malformed_package, "stored entry size mismatch: " + name);
      data.assign(reinterpret_cast<const char*>(buf + data_at), comp_size);
    } else if (method == 8) {
      data = inflate_raw(buf + data_at, comp_size, uncomp_size);
    } else {
      raise(Errc::malformed_package,
            "unsupported compression method for " + name);
    }
    if (crc_of(data) != crc)
      raise(Errc::malformed_package, "CRC mismatch for " + name);
    entries.push_back({std::move(name), std::move(data)});
  }
  return entries;
}

std::vector<Entry> read_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) raise(Errc::io, "read failed: " + path.string());
  return read_archive_bytes(bytes);
}

std::string write_archive_bytes(const std::vector<Entry>& entries) {
  std::string out;
  struct CdRecord {
    std::string name;
    std::uint16_t method;
    std::uint32_t crc, comp_size, uncomp_size, offset;
  };
  std::vector<CdRecord> cd;
  cd.reserve(entries.size());

  for (const Entry& e : entries) {
    std::uint32_t offset = static_cast<std::uint32_t>(out.size());
    std::uint32_t crc = crc_of(e.data);
    std::string deflated = deflate_raw(e.data);
    std::uint16_t method = deflated.size() < e.data.size() ? 8 : 0;
    const std::string& payload = method == 8 ? deflated : e.data;

    wr32(out, kLocalSig);
    wr16(out, 20);      // version needed
    wr16(out, 0x0800);  // UTF-8 names
    wr16(out, method);
    wr16(out, 0);       // mod time (fixed for determinism)
    wr16(out, 0x0021);  // mod date: 1980-01-01
    wr32(out, crc);
    wr32(out, static_cast<std::uint32_t>(payload.size()));
    wr32(out, static_cast<std::uint32_t>(e.data.size()));
    wr16(out, static_cast<std::uint16_t>(e.name.size()));
    wr16(out, 0);  // extra
    out += e.name;
    out += payload;

    cd.push_back({e.name, method, crc,
                  static_cast<std::uint32_t>(payload.size()),
                  static_cast<std::uint32_t>(e.data.size()), offset});
  }

  std::uint32_t cd_offset = static_cast<std::uint32_t>(out.size());
  for (const CdRecord& r : cd) {
    wr32(out, kCentralSig);
    wr16(out, 20);      // version made by
    wr16(out, 20);      // version needed
    wr16(out, 0x0800);
    wr16(out, r.method);
    wr16(out, 0);
    wr16(out, 0x0021);
    wr32(out, r.crc);
    wr32(out, r.comp_size);
    wr32(out, r.uncomp_size);
    wr16(out, static_cast<std::uint16_t>(r.name.size()));
    wr16(out, 0);  // extra
    wr16(out, 0);  // comment
    wr16(out, 0);  // disk number
    wr16(out, 0);  // internal attrs
    wr32(out, 0);  // external attrs
    wr32(out, r.offset);
    out += r.name;
  }
  std::uint32_t cd_size = static_cast<std::uint32_t>(out.size()) - cd_offset;

  wr32(out, kEocdSig);
  wr16(out, 0);
  wr16(out, 0);
  wr16(out, static_cast<std::uint16_t>(cd.size()));
  wr16(out, static_cast<std::uint16_t>(cd.size()));
  wr32(out, cd_size);
  wr32(out, cd_offset);
  wr16(out, 0);  // comment length
  return out;
}

void write_archive(const std::filesystem::path& path,
                   const std::vector<Entry>& entries) {
  std::string bytes = write_archive_bytes(entries);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) raise(Errc::io, "cannot write " + path.string());
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  file.flush();
  if (!file.good()) raise(Errc::io, "write failed: " + path.string());
}

}  // namespace deckhand::zip
