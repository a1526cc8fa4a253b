#include "cadence/model_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "cadence/error.hpp"
#include "cadence/fileutil.hpp"

namespace cadence {

namespace {

constexpr char kMagic[4] = {'C', 'A', 'D', 'M'};

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
}

template <typename T>
void put(std::string& out, T v) {
  v = to_little(v);
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(v);
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw Error(ErrorCode::ChecksumMismatch, "model file is truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large payloads
  std::size_t pos = 0;
  while (pos < data.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(data.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + pos), n);
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::string serialize_model(const AutoencoderModel& model) {
  nlohmann::ordered_json header;
  header["input_dim"] = model.input_dim;
  header["latent_dim"] = model.latent_dim;
  header["encoder_depth"] = model.encoder_depth;
  auto shapes = nlohmann::ordered_json::array();
  for (const auto& l : model.layers) shapes.push_back({l.weight.rows(), l.weight.cols()});
  header["layers"] = std::move(shapes);
  header["linear_output"] = model.linear_output;
  header["frozen_gamma"] = model.frozen_gamma ? nlohmann::ordered_json(*model.frozen_gamma) : nlohmann::ordered_json(nullptr);
  header["meta"] = {{"window", model.meta.window},
                    {"channels", model.meta.channels},
                    {"kernel", std::string(to_string(model.meta.kernel))},
                    {"loss_variant", std::string(to_string(model.meta.loss_variant))},
                    {"config_hash", model.meta.config_hash}};
  header["checksum"] = "crc32";
  const std::string header_text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  put<std::uint16_t>(out, kModelFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(header_text.size()));
  out += header_text;
  for (const auto& l : model.layers) {
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) put<double>(out, l.weight.data()[i]);
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) put<double>(out, l.bias.data()[i]);
  }
  put<std::uint32_t>(out, crc_of(out));
  return out;
}

AutoencoderModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic) throw Error(ErrorCode::ChecksumMismatch, "model file is truncated");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw Error(ErrorCode::VersionMismatch, "not a model file (bad magic)");
  Reader r(bytes.substr(sizeof kMagic));
  const auto version = r.get<std::uint16_t>();
  if (version != kModelFormatVersion)
    throw Error(ErrorCode::VersionMismatch, "model format version " + std::to_string(version) +
                                                " is not supported (expected " +
                                                std::to_string(kModelFormatVersion) + ")");
  if (bytes.size() < sizeof kMagic + 2 + 4 + 4) throw Error(ErrorCode::ChecksumMismatch, "model file is truncated");
  const auto payload = bytes.substr(0, bytes.size() - 4);
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + payload.size(), 4);
  if (to_little(stored) != crc_of(payload)) throw Error(ErrorCode::ChecksumMismatch, "model file CRC mismatch");

  Reader body(payload.substr(sizeof kMagic + 2));
  const auto header_len = body.get<std::uint32_t>();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(body.take(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ChecksumMismatch, std::string("model header is not valid JSON: ") + e.what());
  }

  AutoencoderModel model;
  try {
    model.input_dim = header.at("input_dim").get<std::size_t>();
    model.latent_dim = header.at("latent_dim").get<std::size_t>();
    model.encoder_depth = header.at("encoder_depth").get<std::size_t>();
    model.linear_output = header.at("linear_output").get<bool>();
    if (!header.at("frozen_gamma").is_null()) model.frozen_gamma = header["frozen_gamma"].get<double>();
    const auto& meta = header.at("meta");
    model.meta.window = meta.at("window").get<std::size_t>();
    model.meta.channels = meta.at("channels").get<std::size_t>();
    model.meta.kernel = parse_kernel_family(meta.at("kernel").get<std::string>());
    model.meta.loss_variant = parse_loss_variant(meta.at("loss_variant").get<std::string>());
    model.meta.config_hash = meta.at("config_hash").get<std::string>();
    for (const auto& shape : header.at("layers")) {
      const auto rows = shape.at(0).get<Eigen::Index>();
      const auto cols = shape.at(1).get<Eigen::Index>();
      LayerParams l{Matrix(rows, cols), Vector(rows)};
      for (Eigen::Index i = 0; i < l.weight.size(); ++i) l.weight.data()[i] = body.get<double>();
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias.data()[i] = body.get<double>();
      model.layers.push_back(std::move(l));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ChecksumMismatch, std::string("model header is incomplete: ") + e.what());
  }
  if (body.position() != payload.size() - sizeof kMagic - 2)
    throw Error(ErrorCode::ChecksumMismatch, "trailing bytes after parameter blocks");
  return model;
}

void save_model(const AutoencoderModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

AutoencoderModel load_model(const std::filesystem::path& path) { return deserialize_model(read_file(path)); }

}  // namespace cadence
