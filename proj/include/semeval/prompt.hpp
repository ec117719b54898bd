#pragma once

#include <string>
#include <string_view>

namespace semeval {

/// Stage-1 attribute predictions used to fill the guidance prompt.
struct PredictedAttributes {
  long long length = 1;
  double surprisal = 0.0;
  std::string sentiment;
  std::string topic;

  friend bool operator==(const PredictedAttributes&, const PredictedAttributes&) = default;
};

/// Fills the fixed system prompt; surprisal is printed with two decimals and
/// the length slot is substituted literally ("1 words").
std::string render_prompt(const PredictedAttributes& h);

/// Inverse of render_prompt. Surprisal comes back rounded to two decimals.
/// Throws ParseError when the text does not follow the template.
PredictedAttributes parse_prompt(std::string_view prompt);

}  // namespace semeval
