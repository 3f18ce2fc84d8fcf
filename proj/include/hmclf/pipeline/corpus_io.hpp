#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "hmclf/labels/email_record.hpp"

namespace hmclf::pipeline {

inline constexpr int kCorpusFormatVersion = 1;

/// One JSON object per record, keys in sorted order so the same record always
/// serializes to the same bytes.
inline std::string serialize_record(const EmailRecord& r) {
  nlohmann::json j;
  j["message_id"] = r.message_id;
  j["sender_address"] = r.sender_address;
  j["sender_name"] = r.sender_name;
  j["subject"] = r.subject;
  j["body"] = r.body;
  j["recipient_names"] = r.recipient_names;
  j["opened"] = r.opened;
  j["deleted"] = r.deleted;
  j["day"] = r.day ? nlohmann::json(r.day->iso()) : nlohmann::json(nullptr);
  j["gold_label"] = r.gold_label ? nlohmann::json(to_string(*r.gold_label)) : nlohmann::json(nullptr);
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline EmailRecord parse_record(std::string_view line) {
  EmailRecord r;
  try {
    const auto j = nlohmann::json::parse(line);
    r.message_id = j.at("message_id").get<std::string>();
    if (r.message_id.empty()) throw DataError("empty message_id");
    r.sender_address = j.at("sender_address").get<std::string>();
    r.sender_name = j.value("sender_name", std::string{});
    r.subject = j.value("subject", std::string{});
    r.body = j.value("body", std::string{});
    r.recipient_names = j.value("recipient_names", std::vector<std::string>{});
    r.opened = j.at("opened").get<bool>();
    r.deleted = j.at("deleted").get<bool>();
    if (j.contains("day") && !j.at("day").is_null()) r.day = Day::parse(j.at("day").get<std::string>());
    if (j.contains("gold_label") && !j.at("gold_label").is_null()) {
      r.gold_label = gold_from_string(j.at("gold_label").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed record: ") + e.what());
  }
  return r;
}

inline std::string corpus_header() {
  return nlohmann::json({{"format", "hmclf-corpus"}, {"version", kCorpusFormatVersion}}).dump();
}

struct CorpusReadResult {
  std::vector<EmailRecord> records;
  std::size_t malformed = 0;
  std::vector<std::string> errors;  ///< first few parse errors with line numbers
};

/// Reads a corpus file: a header line, then one record per line. Malformed
/// lines are counted; the read fails when they exceed `max_malformed_rate`
/// of the record lines. Duplicate message ids are malformed too.
inline CorpusReadResult read_corpus(const std::filesystem::path& path, double max_malformed_rate = 0.01) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty corpus file");
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.value("format", "") != "hmclf-corpus" || header.value("version", 0) != kCorpusFormatVersion) {
      throw DataError(path.string() + ": unsupported corpus format");
    }
  } catch (const nlohmann::json::exception&) {
    throw DataError(path.string() + ": missing corpus header line");
  }
  CorpusReadResult out;
  std::unordered_set<std::string> ids;
  std::size_t lines = 0, line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ++lines;
    try {
      auto r = parse_record(line);
      if (!ids.insert(r.message_id).second) throw DataError("duplicate message_id " + r.message_id);
      out.records.push_back(std::move(r));
    } catch (const DataError& e) {
      ++out.malformed;
      if (out.errors.size() < 5) out.errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (lines > 0 && static_cast<double>(out.malformed) > max_malformed_rate * static_cast<double>(lines)) {
    std::string msg = path.string() + ": " + std::to_string(out.malformed) + " of " + std::to_string(lines) +
                      " records are malformed";
    if (!out.errors.empty()) msg += " (" + out.errors.front() + ")";
    throw DataError(msg);
  }
  return out;
}

inline void write_corpus(const std::filesystem::path& path, std::span<const EmailRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write corpus " + path.string());
  out << corpus_header() << '\n';
  for (const auto& r : records) out << serialize_record(r) << '\n';
  if (!out) throw DataError("failed writing corpus " + path.string());
}

/// "message_id<TAB>label" lines.
inline void write_labels(const std::filesystem::path& path, std::span<const MessageLabel> labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write labels " + path.string());
  for (const auto& l : labels) out << l.message_id << '\t' << l.label << '\n';
}

inline std::vector<MessageLabel> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open labels " + path.string());
  std::vector<MessageLabel> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    const std::string label = tab == std::string::npos ? "" : line.substr(tab + 1);
    if (tab == std::string::npos || (label != "0" && label != "1")) {
      throw DataError(path.string() + ": malformed label line " + std::to_string(line_no));
    }
    out.push_back({line.substr(0, tab), label == "1" ? 1 : 0});
  }
  return out;
}

}  // namespace hmclf::pipeline
