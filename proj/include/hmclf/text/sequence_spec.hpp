#pragma once

#include <cstddef>

namespace hmclf::text {

/// Fixed input lengths. Words everywhere except `address`, which counts raw
/// characters of the sender address (before boundary markers).
struct SequenceSpec {
  std::size_t subject = 30;
  std::size_t content_train = 1000;
  std::size_t content_infer = 2000;
  std::size_t address = 1000;
  std::size_t name = 30;
  std::size_t salutation = 10;
};

}  // namespace hmclf::text
