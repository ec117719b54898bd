#include "semeval/prompt.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "semeval/error.hpp"

namespace semeval {
namespace {

constexpr std::string_view kHead =
    "System: Based on the following EEG signals, reconstruct the text. The length of the sentence is ";
constexpr std::string_view kAfterLength = " words. The average surprisal value is ";
constexpr std::string_view kAfterSurprisal = ". Sentiment: ";
constexpr std::string_view kAfterSentiment = ". Topic: ";
constexpr std::string_view kTail = ".";

[[noreturn]] void bad(const std::string& why) { throw ParseError("<prompt>", 0, why); }

}  // namespace

std::string render_prompt(const PredictedAttributes& h) {
  if (h.length < 1) throw InvalidArgument("predicted length must be >= 1");
  if (!std::isfinite(h.surprisal)) throw InvalidArgument("predicted surprisal must be finite");
  char spr[64];
  std::snprintf(spr, sizeof spr, "%.2f", h.surprisal);
  std::string out;
  out += kHead;
  out += std::to_string(h.length);
  out += kAfterLength;
  out += spr;
  out += kAfterSurprisal;
  out += h.sentiment;
  out += kAfterSentiment;
  out += h.topic;
  out += kTail;
  return out;
}

PredictedAttributes parse_prompt(std::string_view s) {
  if (!s.starts_with(kHead)) bad("missing template head");
  s.remove_prefix(kHead.size());
  PredictedAttributes h;

  auto cut = [&](std::string_view sep, const char* field) {
    const auto pos = s.find(sep);
    if (pos == std::string_view::npos) bad(std::string("cannot locate end of ") + field);
    auto value = s.substr(0, pos);
    s.remove_prefix(pos + sep.size());
    return value;
  };

  const auto len = cut(kAfterLength, "length");
  auto [p1, e1] = std::from_chars(len.data(), len.data() + len.size(), h.length);
  if (e1 != std::errc() || p1 != len.data() + len.size()) bad("length slot is not an integer");

  const auto spr = cut(kAfterSurprisal, "surprisal");
  auto [p2, e2] = std::from_chars(spr.data(), spr.data() + spr.size(), h.surprisal);
  if (e2 != std::errc() || p2 != spr.data() + spr.size()) bad("surprisal slot is not a number");

  h.sentiment = std::string(cut(kAfterSentiment, "sentiment"));
  if (!s.ends_with(kTail)) bad("missing final period");
  s.remove_suffix(kTail.size());
  h.topic = std::string(s);
  return h;
}

}  // namespace semeval
