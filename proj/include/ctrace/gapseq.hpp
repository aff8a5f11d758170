#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctrace {

using Gap = std::int64_t;

// A k-sparse circular binary string 10^{g_1}10^{g_2}...10^{g_k}, stored as
// its k gap lengths. Immutable once built.
class GapSequence {
 public:
  // Throws Error("InvalidGapSequence") if empty or any gap is negative.
  explicit GapSequence(std::vector<Gap> gaps);
  GapSequence(std::initializer_list<Gap> gaps)
      : GapSequence(std::vector<Gap>(gaps)) {}

  std::size_t k() const { return gaps_.size(); }
  Gap operator[](std::size_t j) const { return gaps_[j]; }
  std::span<const Gap> gaps() const { return gaps_; }
  const std::vector<Gap>& values() const { return gaps_; }

  // Number of zeros, i.e. sum of gaps.
  Gap zeros() const;
  // Length of the binary string: k + sum of gaps.
  Gap binary_length() const { return static_cast<Gap>(k()) + zeros(); }

  auto begin() const { return gaps_.begin(); }
  auto end() const { return gaps_.end(); }

  friend bool operator==(const GapSequence&, const GapSequence&) = default;
  friend auto operator<=>(const GapSequence&, const GapSequence&) = default;

 private:
  std::vector<Gap> gaps_;
};

// A plain 0/1 string; the empty string is legal (an all-deleted trace).
class BinaryString {
 public:
  BinaryString() = default;
  // Throws Error("InvalidBinaryString") on characters other than '0'/'1'.
  explicit BinaryString(std::string bits);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] == '1'; }
  const std::string& str() const { return bits_; }
  std::size_t ones() const;

  friend bool operator==(const BinaryString&, const BinaryString&) = default;
  friend auto operator<=>(const BinaryString&, const BinaryString&) = default;

 private:
  std::string bits_;
};

BinaryString to_binary(const GapSequence& g);

// Reads gaps cyclically starting at the first 1. Throws Error("NoOnes").
GapSequence parse_gaps(const BinaryString& b);

// result_j = g_{(j + c) mod k}; c may be negative.
GapSequence cyclic_shift(const GapSequence& g, long long c);

bool cyclically_equal(const GapSequence& g, const GapSequence& h);

// Lexicographically least rotation.
GapSequence canonical_rotation(const GapSequence& g);

// Generic forms over any integer sequence; used for cluster-id patterns and
// the enumeration code, where values are not gap lengths.
std::vector<Gap> rotate_left(std::span<const Gap> v, long long c);
bool cyclically_equal(std::span<const Gap> a, std::span<const Gap> b);
// Offset c with rotate_left(a, c) == b, or -1.
long long rotation_offset(std::span<const Gap> a, std::span<const Gap> b);
bool is_canonical_rotation(std::span<const Gap> v);

// Text forms: "0,2,3" for gaps, raw 0/1 characters for binary strings.
GapSequence parse_gap_list(std::string_view text);
std::string format_gaps(std::span<const Gap> gaps);
std::string format_gaps(const GapSequence& g);

}  // namespace ctrace
