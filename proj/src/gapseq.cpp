#include "ctrace/gapseq.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "ctrace/error.hpp"

namespace ctrace {

GapSequence::GapSequence(std::vector<Gap> gaps) : gaps_(std::move(gaps)) {
  if (gaps_.empty()) {
    throw Error("InvalidGapSequence", "a gap sequence needs k >= 1 entries");
  }
  for (Gap g : gaps_) {
    if (g < 0) {
      throw Error("InvalidGapSequence", "gap lengths must be nonnegative");
    }
  }
}

Gap GapSequence::zeros() const {
  return std::accumulate(gaps_.begin(), gaps_.end(), Gap{0});
}

BinaryString::BinaryString(std::string bits) : bits_(std::move(bits)) {
  for (char c : bits_) {
    if (c != '0' && c != '1') {
      throw Error("InvalidBinaryString",
                  std::string("unexpected character '") + c + "'");
    }
  }
}

std::size_t BinaryString::ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), '1'));
}

BinaryString to_binary(const GapSequence& g) {
  std::string bits;
  bits.reserve(static_cast<std::size_t>(g.binary_length()));
  for (Gap gap : g) {
    bits.push_back('1');
    bits.append(static_cast<std::size_t>(gap), '0');
  }
  return BinaryString(std::move(bits));
}

GapSequence parse_gaps(const BinaryString& b) {
  const std::string& s = b.str();
  const auto first = s.find('1');
  if (first == std::string::npos) {
    throw Error("NoOnes", "binary string '" + s + "' contains no 1");
  }
  std::vector<Gap> gaps;
  const std::size_t n = s.size();
  Gap run = 0;
  for (std::size_t step = 1; step <= n; ++step) {
    if (s[(first + step) % n] == '1') {
      gaps.push_back(run);
      run = 0;
    } else {
      ++run;
    }
  }
  return GapSequence(std::move(gaps));
}

std::vector<Gap> rotate_left(std::span<const Gap> v, long long c) {
  const auto k = static_cast<long long>(v.size());
  std::vector<Gap> out(v.size());
  if (k == 0) return out;
  const long long shift = ((c % k) + k) % k;
  for (long long j = 0; j < k; ++j) {
    out[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>((j + shift) % k)];
  }
  return out;
}

GapSequence cyclic_shift(const GapSequence& g, long long c) {
  return GapSequence(rotate_left(g.gaps(), c));
}

long long rotation_offset(std::span<const Gap> a, std::span<const Gap> b) {
  if (a.size() != b.size()) return -1;
  const std::size_t k = a.size();
  for (std::size_t c = 0; c < k; ++c) {
    bool match = true;
    for (std::size_t j = 0; j < k && match; ++j) {
      match = a[(j + c) % k] == b[j];
    }
    if (match) return static_cast<long long>(c);
  }
  return k == 0 ? 0 : -1;
}

bool cyclically_equal(std::span<const Gap> a, std::span<const Gap> b) {
  return rotation_offset(a, b) >= 0;
}

bool cyclically_equal(const GapSequence& g, const GapSequence& h) {
  return cyclically_equal(g.gaps(), h.gaps());
}

bool is_canonical_rotation(std::span<const Gap> v) {
  const std::size_t k = v.size();
  for (std::size_t c = 1; c < k; ++c) {
    for (std::size_t j = 0; j < k; ++j) {
      const Gap rotated = v[(j + c) % k];
      if (rotated < v[j]) return false;
      if (rotated > v[j]) break;
    }
  }
  return true;
}

GapSequence canonical_rotation(const GapSequence& g) {
  std::vector<Gap> best = g.values();
  for (std::size_t c = 1; c < g.k(); ++c) {
    auto candidate = rotate_left(g.gaps(), static_cast<long long>(c));
    if (candidate < best) best = std::move(candidate);
  }
  return GapSequence(std::move(best));
}

GapSequence parse_gap_list(std::string_view text) {
  std::vector<Gap> gaps;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    auto token = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                  : comma - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    Gap value = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || end != token.data() + token.size() || token.empty()) {
      throw Error("InvalidGapSequence", "cannot parse gap list '" + std::string(text) + "'");
    }
    gaps.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return GapSequence(std::move(gaps));
}

std::string format_gaps(std::span<const Gap> gaps) {
  std::string out;
  for (std::size_t j = 0; j < gaps.size(); ++j) {
    if (j) out.push_back(',');
    out += std::to_string(gaps[j]);
  }
  return out;
}

std::string format_gaps(const GapSequence& g) { return format_gaps(g.gaps()); }

}  // namespace ctrace
