#include <bit>
#include <cstring>

#include <fmt/format.h>

#include "nameproxy/bilstm.hpp"
#include "nameproxy/csv.hpp"
#include "nameproxy/error.hpp"

namespace nameproxy::nn {
namespace {

constexpr char kMagic[8] = {'N', 'P', 'X', 'B', 'L', 'S', 'T', 'M'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "parameter files are written little-endian");

class Writer {
 public:
  template <typename T>
  void put(T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    bytes_.append(buf, sizeof(T));
  }
  void put_bytes(std::string_view s) { bytes_.append(s); }
  std::string& bytes() { return bytes_; }

 private:
  std::string bytes_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string_view get_bytes(std::size_t n) {
    need(n);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail(ErrorCode::corrupt_file, "parameter file is truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string serialize_params(const NetworkParams& params) {
  params.validate_shapes();
  Writer w;
  w.put_bytes(std::string_view(kMagic, sizeof(kMagic)));
  w.put<std::uint32_t>(kVersion);
  const auto& s = params.shape;
  for (int dim : {s.vocab, s.embed_dim, s.hidden, s.layers, s.classes}) w.put<std::uint32_t>(static_cast<std::uint32_t>(dim));
  w.put<double>(s.dropout);
  std::uint64_t tensors = 0;
  for_each_tensor(params, [&](const std::string&, std::span<const double>) { ++tensors; });
  w.put<std::uint64_t>(tensors);
  for_each_tensor(params, [&](const std::string& name, std::span<const double> t) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    w.put_bytes(name);
    w.put<std::uint64_t>(t.size());
    w.put_bytes(std::string_view(reinterpret_cast<const char*>(t.data()), t.size_bytes()));
  });
  const std::uint64_t checksum = fnv1a(w.bytes());
  w.put<std::uint64_t>(checksum);
  return std::move(w.bytes());
}

NetworkParams deserialize_params(std::string_view bytes, const NetworkShape* expected) {
  Reader r(bytes);
  if (r.get_bytes(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    fail(ErrorCode::corrupt_file, "not a nameproxy parameter file");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) fail(ErrorCode::corrupt_file, fmt::format("unsupported parameter file version {}", version));
  NetworkShape shape;
  for (int* dim : {&shape.vocab, &shape.embed_dim, &shape.hidden, &shape.layers, &shape.classes}) {
    const auto v = r.get<std::uint32_t>();
    if (v == 0 || v > (1u << 20)) fail(ErrorCode::corrupt_file, "implausible dimension in parameter header");
    *dim = static_cast<int>(v);
  }
  shape.dropout = r.get<double>();
  if (expected && !(*expected == shape)) {
    fail(ErrorCode::shape_mismatch,
         fmt::format("parameter file holds embed={} hidden={} layers={} classes={}, expected embed={} hidden={} "
                     "layers={} classes={}",
                     shape.embed_dim, shape.hidden, shape.layers, shape.classes, expected->embed_dim,
                     expected->hidden, expected->layers, expected->classes));
  }
  NetworkParams params = NetworkParams::zeros(shape);
  std::uint64_t expected_tensors = 0;
  for_each_tensor(params, [&](const std::string&, std::span<double>) { ++expected_tensors; });
  if (r.get<std::uint64_t>() != expected_tensors) fail(ErrorCode::corrupt_file, "tensor count disagrees with header");
  for_each_tensor(params, [&](const std::string& name, std::span<double> t) {
    const auto len = r.get<std::uint32_t>();
    if (r.get_bytes(len) != name) fail(ErrorCode::corrupt_file, fmt::format("expected tensor '{}'", name));
    if (r.get<std::uint64_t>() != t.size()) fail(ErrorCode::corrupt_file, fmt::format("tensor '{}' has the wrong size", name));
    const auto raw = r.get_bytes(t.size_bytes());
    std::memcpy(t.data(), raw.data(), raw.size());
  });
  const std::uint64_t computed = fnv1a(bytes.substr(0, r.position()));
  if (r.get<std::uint64_t>() != computed) fail(ErrorCode::corrupt_file, "checksum mismatch");
  if (r.remaining() != 0) fail(ErrorCode::corrupt_file, "trailing bytes after checksum");
  params.validate();
  return params;
}

void save_params(const NetworkParams& params, const std::string& path) {
  csv::write_text_file(path, serialize_params(params));
}

NetworkParams load_params(const std::string& path, const NetworkShape* expected) {
  return deserialize_params(csv::read_text_file(path), expected);
}

}  // namespace nameproxy::nn
