#pragma once

#include <charconv>
#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ctxev {

/// Similarity score held as integer tenths, so 0.5 + 0.2 + 0.2 is exactly 0.9.
class Score {
 public:
  constexpr Score() = default;

  static constexpr Score from_tenths(int tenths) { return Score(tenths); }

  constexpr int tenths() const { return tenths_; }
  constexpr double value() const { return tenths_ / 10.0; }

  constexpr Score operator+(Score o) const { return Score(tenths_ + o.tenths_); }
  constexpr Score& operator+=(Score o) {
    tenths_ += o.tenths_;
    return *this;
  }
  constexpr auto operator<=>(const Score&) const = default;

  std::string to_string() const { return std::to_string(tenths_ / 10) + "." + std::to_string(tenths_ % 10); }

 private:
  constexpr explicit Score(int tenths) : tenths_(tenths) {}
  int tenths_ = 0;
};

/// Clustering/segmentation threshold in [0, 1], stored as thousandths so it
/// compares exactly against tenth-valued scores.
class Threshold {
 public:
  constexpr Threshold() = default;

  static constexpr Threshold from_milli(int milli) {
    if (milli < 0 || milli > 1000) throw std::invalid_argument("threshold must lie in [0, 1]");
    return Threshold(milli);
  }

  /// Accepts plain decimals with up to three fractional digits: "0.8", "1", "0.85".
  static Threshold parse(std::string_view text) {
    const std::size_t dot = text.find('.');
    const std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty() || whole.front() < '0' || whole.front() > '9' || frac.size() > 3 ||
        (dot != std::string_view::npos && frac.empty()))
      throw std::invalid_argument("invalid threshold '" + std::string(text) + "'");
    int w = 0;
    auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
    if (ec != std::errc{} || p != whole.data() + whole.size())
      throw std::invalid_argument("invalid threshold '" + std::string(text) + "'");
    int f = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      const char c = i < frac.size() ? frac[i] : '0';
      if (c < '0' || c > '9') throw std::invalid_argument("invalid threshold '" + std::string(text) + "'");
      f = f * 10 + (c - '0');
    }
    if (w > 1) throw std::invalid_argument("threshold must lie in [0, 1]");
    return from_milli(w * 1000 + f);
  }

  constexpr int milli() const { return milli_; }

  /// Strict comparison: a score equal to the threshold does not exceed it.
  constexpr bool exceeded_by(Score s) const { return s.tenths() * 100 > milli_; }

  std::string to_string() const {
    std::string frac = std::to_string(1000 + milli_ % 1000).substr(1);
    while (frac.size() > 1 && frac.back() == '0') frac.pop_back();
    return std::to_string(milli_ / 1000) + "." + frac;
  }

  constexpr bool operator==(const Threshold&) const = default;

 private:
  constexpr explicit Threshold(int milli) : milli_(milli) {}
  int milli_ = 800;
};

inline constexpr Threshold kDefaultThreshold = Threshold::from_milli(800);

/// Weights of the similarity score, in tenths.
namespace weight {
inline constexpr Score kEventHead = Score::from_tenths(5);
inline constexpr Score kActionHead = Score::from_tenths(4);
inline constexpr Score kPlace = Score::from_tenths(2);
inline constexpr Score kPerson = Score::from_tenths(2);
inline constexpr Score kDuration = Score::from_tenths(1);
inline constexpr Score kConjunction = Score::from_tenths(1);
}  // namespace weight

struct ScoringOptions {
  /// Count place/person/duration even when no head concept matches.
  bool loose_features = false;
};

}  // namespace ctxev
