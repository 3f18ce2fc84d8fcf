#pragma once

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hmclf/models/full_model.hpp"
#include "hmclf/nn/batch_norm.hpp"

namespace hmclf::models {

inline constexpr char kCheckpointMagic[8] = {'H', 'M', 'C', 'L', 'F', 'C', 'K', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline std::uint64_t get_le(const std::string& in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace detail

/// Serializes a model: magic, u32 version, u64 header length, JSON header,
/// then every parameter as little-endian float32 in declaration order.
inline std::string serialize_checkpoint(const Classifier& model, const nlohmann::json& metadata = nlohmann::json::object()) {
  const auto params = model.parameters();
  const auto names = model.parameter_names();
  nlohmann::json header;
  header["format_version"] = kCheckpointVersion;
  header["kind"] = to_string(model.kind());
  header["config"] = model.config();
  header["layers"] = model.layer_specs();
  header["vocab_hashes"] = model.vocab_hashes();
  const nn::BatchNormOptions bn;
  header["batch_norm"] = {{"epsilon", bn.epsilon}, {"momentum", bn.momentum}};
  header["params"] = nlohmann::json::array();
  for (std::size_t i = 0; i < params.size(); ++i) {
    header["params"].push_back(
        {{"name", names[i]}, {"shape", params[i]->tensor.shape()}, {"trainable", params[i]->trainable}});
  }
  header["metadata"] = metadata;
  if (const auto* full = dynamic_cast<const FullModel*>(&model)) header["manifest"] = full->manifest();

  const std::string text = header.dump();
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::put_u32(out, kCheckpointVersion);
  detail::put_u64(out, text.size());
  out += text;
  for (const auto* p : params) {
    for (Real v : p->tensor.data()) detail::put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

inline void save_checkpoint(const Classifier& model, const std::filesystem::path& path,
                            const nlohmann::json& metadata = nlohmann::json::object()) {
  const std::string bytes = serialize_checkpoint(model, metadata);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

struct LoadedCheckpoint {
  std::unique_ptr<Classifier> model;
  nlohmann::json header;
};

namespace detail {

inline std::unique_ptr<Classifier> build_from_config(ModelKind kind, const nlohmann::json& cfg) {
  switch (kind) {
    case ModelKind::kContent:
    case ModelKind::kAction: return std::make_unique<TextCnn>(TextCnnConfig::from_json(cfg), 0);
    case ModelKind::kSender: return std::make_unique<SenderCnn>(SenderCnnConfig::from_json(cfg), 0);
    case ModelKind::kSalutation: return std::make_unique<SalutationCnn>(SalutationCnnConfig::from_json(cfg), 0);
    case ModelKind::kFull:
      return std::make_unique<FullModel>(std::make_unique<TextCnn>(TextCnnConfig::from_json(cfg.at("content")), 0),
                                         std::make_unique<SenderCnn>(SenderCnnConfig::from_json(cfg.at("sender")), 0),
                                         std::make_unique<TextCnn>(TextCnnConfig::from_json(cfg.at("action")), 0),
                                         std::make_unique<SalutationCnn>(
                                             SalutationCnnConfig::from_json(cfg.at("salutation")), 0),
                                         cfg.at("q").get<double>(), 0);
  }
  throw DataError("unknown model kind");
}

}  // namespace detail

inline LoadedCheckpoint parse_checkpoint(const std::string& bytes, const std::string& what = "checkpoint") {
  constexpr std::size_t kPrefix = sizeof(kCheckpointMagic) + 4 + 8;
  if (bytes.size() < kPrefix || std::memcmp(bytes.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw DataError(what + ": not a checkpoint file");
  }
  const auto version = detail::get_le(bytes, 8, 4);
  if (version != kCheckpointVersion) {
    throw DataError(what + ": unsupported checkpoint version " + std::to_string(version));
  }
  const auto header_len = detail::get_le(bytes, 12, 8);
  if (header_len > bytes.size() - kPrefix) throw DataError(what + ": truncated header");
  LoadedCheckpoint out;
  try {
    out.header = nlohmann::json::parse(bytes.substr(kPrefix, header_len));
    const auto kind = model_kind_from_string(out.header.at("kind").get<std::string>());
    out.model = detail::build_from_config(kind, out.header.at("config"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(what + ": malformed header: " + e.what());
  }
  auto params = out.model->parameters();
  const auto names = out.model->parameter_names();
  const auto& entries = out.header.at("params");
  if (entries.size() != params.size()) throw DataError(what + ": parameter count does not match the model");
  std::size_t pos = kPrefix + header_len;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& e = entries[i];
    if (e.at("name").get<std::string>() != names[i] || e.at("shape").get<nn::Shape>() != params[i]->tensor.shape()) {
      throw DataError(what + ": parameter " + std::to_string(i) + " (" + e.at("name").get<std::string>() +
                      ") does not match the model layout");
    }
    auto data = params[i]->tensor.data();
    if (bytes.size() - pos < data.size() * 4) throw DataError(what + ": truncated parameter data");
    for (auto& v : data) {
      v = std::bit_cast<Real>(static_cast<std::uint32_t>(detail::get_le(bytes, pos, 4)));
      pos += 4;
    }
    params[i]->trainable = e.at("trainable").get<bool>();
  }
  if (pos != bytes.size()) throw DataError(what + ": trailing bytes after parameter data");
  if (auto* full = dynamic_cast<FullModel*>(out.model.get())) {
    full->verify_frozen();
    if (out.header.contains("manifest")) full->set_manifest(out.header.at("manifest"));
  }
  return out;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file_bytes(path), path.string());
}

/// Loads a checkpoint and checks that it holds a model of type M.
template <typename M>
std::unique_ptr<M> load_model(const std::filesystem::path& path) {
  auto loaded = load_checkpoint(path);
  auto* typed = dynamic_cast<M*>(loaded.model.get());
  if (!typed) throw DataError(path.string() + ": unexpected model kind " + to_string(loaded.model->kind()));
  loaded.model.release();
  return std::unique_ptr<M>(typed);
}

}  // namespace hmclf::models
