#include "semeval/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "semeval/error.hpp"
#include "unicode.hpp"

namespace semeval {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << bytes;
  if (!out) throw IoError("write failed: " + path.string());
}

bool is_blank(std::string_view s) {
  for (const auto& cp : unicode::decode(s))
    if (!unicode::is_whitespace(cp.value)) return false;
  return true;
}

// Calls fn(line_number, parsed_object) for every non-blank line.
template <typename Fn>
void for_each_record(std::string_view text, const std::string& origin, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    pos = nl + 1;
    if (is_blank(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(origin, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(origin, line_no, "record is not a JSON object");
    fn(line_no, record);
  }
}

std::string required_string(const json& rec, const char* key, const std::string& origin,
                            std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end()) throw ParseError(origin, line, std::string("missing required field \"") + key + "\"");
  if (!it->is_string()) throw ParseError(origin, line, std::string("field \"") + key + "\" must be a string");
  return it->get<std::string>();
}

template <typename T, typename Check>
std::optional<T> optional_field(const json& rec, const char* key, const std::string& origin,
                                std::size_t line, Check&& check, const char* expected) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (!check(*it)) throw ParseError(origin, line, std::string("field \"") + key + "\" must be " + expected);
  return it->get<T>();
}

}  // namespace

std::string TokenSequence::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string_view to_string(Condition c) noexcept { return c == Condition::real ? "real" : "noise"; }

Condition parse_condition(std::string_view s) {
  if (s == "real") return Condition::real;
  if (s == "noise") return Condition::noise;
  throw InvalidArgument("unknown condition \"" + std::string(s) + "\" (expected real|noise)");
}

const std::string& HypothesisSet::at(const std::string& id) const {
  auto it = hypotheses.find(id);
  if (it == hypotheses.end())
    throw InvalidArgument("system \"" + system_name + "\" has no hypothesis for id \"" + id + "\"");
  return it->second;
}

TokenSequence tokenize(std::string_view sentence) {
  TokenSequence out;
  const auto cps = unicode::decode(sentence);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && unicode::is_whitespace(cps[i].value)) ++i;
    std::size_t j = i;
    while (j < cps.size() && !unicode::is_whitespace(cps[j].value)) ++j;
    std::size_t first = i, last = j;
    while (first < last && unicode::is_punctuation(cps[first].value)) ++first;
    while (last > first && unicode::is_punctuation(cps[last - 1].value)) --last;
    if (first < last) {
      const auto begin = cps[first].offset;
      const auto end = cps[last - 1].offset + cps[last - 1].length;
      out.tokens.emplace_back(sentence.substr(begin, end - begin));
    }
    i = j;
  }
  return out;
}

NgramCounts ngrams(const TokenSequence& seq, std::size_t n) {
  if (n == 0) throw InvalidArgument("n-gram order must be >= 1");
  NgramCounts counts;
  if (seq.size() < n) return counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i)
    ++counts[Ngram(seq.tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   seq.tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return counts;
}

std::string lowercase(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const auto& cp : unicode::decode(s)) {
    const auto lower = unicode::to_lower(cp.value);
    if (lower == cp.value)
      out.append(s.substr(cp.offset, cp.length));
    else
      unicode::append_utf8(out, lower);
  }
  return out;
}

std::vector<Sample> parse_corpus(std::string_view jsonl, const std::string& origin) {
  std::vector<Sample> samples;
  std::set<std::string> seen;
  for_each_record(jsonl, origin, [&](std::size_t line, const json& rec) {
    Sample s;
    s.id = required_string(rec, "id", origin, line);
    if (s.id.empty()) throw ParseError(origin, line, "empty id");
    s.ground_truth = required_string(rec, "text", origin, line);
    if (is_blank(s.ground_truth)) throw ParseError(origin, line, "empty text for id \"" + s.id + "\"");
    if (auto it = rec.find("mtv"); it != rec.end() && !it->is_null()) {
      if (!it->is_array()) throw ParseError(origin, line, "field \"mtv\" must be an array of strings");
      for (const auto& v : *it) {
        if (!v.is_string()) throw ParseError(origin, line, "field \"mtv\" must be an array of strings");
        s.mtv_variants.push_back(v.get<std::string>());
      }
    }
    auto& a = s.attributes;
    a.sentiment = optional_field<std::string>(rec, "sentiment", origin, line,
                                              [](const json& j) { return j.is_string(); }, "a string");
    a.topic = optional_field<std::string>(rec, "topic", origin, line,
                                          [](const json& j) { return j.is_string(); }, "a string");
    a.length = optional_field<long long>(rec, "length", origin, line,
                                         [](const json& j) { return j.is_number_integer(); }, "an integer");
    if (a.length && *a.length < 1) throw ParseError(origin, line, "field \"length\" must be >= 1");
    a.surprisal = optional_field<double>(rec, "surprisal", origin, line,
                                         [](const json& j) { return j.is_number(); }, "a number");
    if (a.surprisal && *a.surprisal < 0) throw ParseError(origin, line, "field \"surprisal\" must be >= 0");
    if (!seen.insert(s.id).second) throw InvalidArgument(origin + ":" + std::to_string(line) + ": duplicate id \"" + s.id + "\"");
    samples.push_back(std::move(s));
  });
  return samples;
}

std::vector<Sample> load_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_file(path), path.string());
}

std::string serialize_corpus(const std::vector<Sample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    json rec = json::object();
    rec["id"] = s.id;
    rec["text"] = s.ground_truth;
    if (!s.mtv_variants.empty()) rec["mtv"] = s.mtv_variants;
    const auto& a = s.attributes;
    if (a.sentiment) rec["sentiment"] = *a.sentiment;
    if (a.topic) rec["topic"] = *a.topic;
    if (a.length) rec["length"] = *a.length;
    if (a.surprisal) rec["surprisal"] = *a.surprisal;
    out += rec.dump();
    out.push_back('\n');
  }
  return out;
}

void write_corpus(const std::filesystem::path& path, const std::vector<Sample>& samples) {
  write_file(path, serialize_corpus(samples));
}

HypothesisSet parse_hypotheses(std::string_view jsonl, const std::string& origin) {
  HypothesisSet set;
  bool first = true;
  for_each_record(jsonl, origin, [&](std::size_t line, const json& rec) {
    if (first && !rec.contains("id") && rec.contains("system_name")) {
      first = false;
      set.system_name = required_string(rec, "system_name", origin, line);
      if (rec.contains("condition")) {
        try {
          set.condition = parse_condition(required_string(rec, "condition", origin, line));
        } catch (const InvalidArgument& e) {
          throw ParseError(origin, line, e.what());
        }
      }
      return;
    }
    first = false;
    auto id = required_string(rec, "id", origin, line);
    auto hyp = required_string(rec, "hyp", origin, line);
    if (id.empty()) throw ParseError(origin, line, "empty id");
    if (!set.hypotheses.emplace(id, std::move(hyp)).second)
      throw InvalidArgument(origin + ":" + std::to_string(line) + ": duplicate id \"" + id + "\"");
    set.order.push_back(std::move(id));
  });
  return set;
}

HypothesisSet load_hypotheses(const std::filesystem::path& path, std::optional<std::string> system_name,
                              std::optional<Condition> condition) {
  auto set = parse_hypotheses(read_file(path), path.string());
  if (system_name) set.system_name = *system_name;
  if (condition) set.condition = *condition;
  if (set.system_name.empty()) set.system_name = path.stem().string();
  return set;
}

void write_hypotheses(const std::filesystem::path& path, const HypothesisSet& hyps) {
  std::string out = json{{"system_name", hyps.system_name}, {"condition", to_string(hyps.condition)}}.dump();
  out.push_back('\n');
  for (const auto& id : hyps.order) {
    out += json{{"id", id}, {"hyp", hyps.at(id)}}.dump();
    out.push_back('\n');
  }
  write_file(path, out);
}

void check_hypotheses_against(const HypothesisSet& hyps, const std::vector<Sample>& corpus) {
  std::set<std::string_view> ids;
  for (const auto& s : corpus) ids.insert(s.id);
  for (const auto& id : hyps.order)
    if (!ids.count(id))
      throw InvalidArgument("hypothesis id \"" + id + "\" of system \"" + hyps.system_name +
                            "\" is not in the corpus");
}

}  // namespace semeval
