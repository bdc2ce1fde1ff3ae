#include "vscreen/net/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace vscreen::net {

namespace {

constexpr char kMagic[8] = {'V', 'S', 'C', 'K', 'P', 'T', '0', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_doubles(std::ostream& out, const std::vector<double>& v) {
  for (double x : v) {
    const std::uint64_t u = std::bit_cast<std::uint64_t>(x);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
  }
}

void read_doubles(std::istream& in, std::vector<double>& v) {
  for (double& x : v) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    x = std::bit_cast<double>(u);
  }
}

}  // namespace

void save_checkpoint(const MultitaskNetwork& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  nlohmann::json header = {
      {"config", nlohmann::json::parse(net.config.to_json())},
      {"step", net.step}};
  const std::string header_text = header.dump();
  write_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out.write(header_text.data(),
            static_cast<std::streamsize>(header_text.size()));
  for (const Layer& l : net.layers) {
    write_doubles(out, l.w.data());
    write_doubles(out, l.b);
  }
  for (const Matrix& h : net.heads) write_doubles(out, h.data());
  if (!out) throw DataError("short write on checkpoint: " + path);
}

MultitaskNetwork load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw DataError(path + ": not a checkpoint file");
  const std::uint32_t header_len = read_u32(in);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), header_len);
  if (!in) throw DataError(path + ": truncated checkpoint header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad checkpoint header: " + e.what());
  }
  MultitaskNetwork net = init(
      NetworkConfig::from_json(header.at("config").dump()));
  net.step = header.at("step").get<std::size_t>();
  for (Layer& l : net.layers) {
    read_doubles(in, l.w.data());
    read_doubles(in, l.b);
  }
  for (Matrix& h : net.heads) read_doubles(in, h.data());
  if (!in) throw DataError(path + ": truncated checkpoint tensors");
  return net;
}

}  // namespace vscreen::net
