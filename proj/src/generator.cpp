#include "right/generator.hpp"

#include <algorithm>
#include <fstream>

#include "right/errors.hpp"
#include "right/text.hpp"

namespace right::generator {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kMock:
      return "mock";
    case BackendKind::kCopy:
      return "copy";
    case BackendKind::kChatApi:
      return "chat-api";
  }
  return "unknown";
}

BackendKind backend_kind_from_string(std::string_view s) {
  if (s == "mock") return BackendKind::kMock;
  if (s == "copy") return BackendKind::kCopy;
  if (s == "chat-api" || s == "chat") return BackendKind::kChatApi;
  throw ConfigError("unknown generator backend '" + std::string(s) + "' (expected mock|copy|chat-api)");
}

std::string_view to_string(PromptVariant variant) {
  return variant == PromptVariant::kPlain ? "plain" : "retrieval-augmented";
}

PromptVariant prompt_variant_from_string(std::string_view s) {
  if (s == "plain") return PromptVariant::kPlain;
  if (s == "retrieval-augmented" || s == "augmented") return PromptVariant::kRetrievalAugmented;
  throw ConfigError("unknown prompt variant '" + std::string(s) + "' (expected plain|retrieval-augmented)");
}

void GeneratorConfig::validate() const {
  if (sep1.empty() || sep2.empty()) throw ConfigError("generator separators must be non-empty");
  if (sep1 == sep2) throw ConfigError("generator.sep1 and generator.sep2 must differ");
  if (max_hashtags_in < 1) throw ConfigError("generator.max_hashtags_in must be >= 1");
  if (chat_max_in_flight < 1) throw ConfigError("generator.chat_max_in_flight must be >= 1");
}

std::string render_input(std::string_view tweet, const std::vector<std::string>& selected,
                         const GeneratorConfig& config) {
  if (selected.size() > config.max_hashtags_in) {
    throw ConfigError("render_input: " + std::to_string(selected.size()) + " hashtags exceed max_hashtags_in " +
                      std::to_string(config.max_hashtags_in));
  }
  std::string out(tweet);
  for (const auto& tag : selected) {
    if (tag.find(config.sep1) != std::string::npos) {
      throw DataError("hashtag '" + tag + "' contains the separator " + config.sep1);
    }
    out += ' ';
    out += config.sep1;
    out += ' ';
    out += tag;
  }
  return out;
}

std::vector<std::string> parse_output(std::string_view raw, const GeneratorConfig& config, corpus::LanguageMode mode) {
  std::vector<std::string> out;
  for (const auto& piece : text::split(raw, config.sep2)) {
    if (text::trim(piece).empty()) continue;
    std::string tag;
    try {
      tag = corpus::normalize_hashtag(piece, mode);
    } catch (const DataError&) {
      continue;  // a bare "#" and the like
    }
    if (std::find(out.begin(), out.end(), tag) == out.end()) out.push_back(std::move(tag));
  }
  return out;
}

namespace {

constexpr std::string_view kPlainPromptHead =
    "I want you to act as a hashtag annotator. I will provide you a tweet and your role is to annotate the "
    "relevant hashtag. You should use the related knowledge and find the topic. I want you only reply the "
    "hashtags segmented by \"#\" and nothing else, do not write explanations. I want you segment the word in a "
    "hashtag by space. My first tweet is ";

constexpr std::string_view kAugmentedPromptHead =
    "I want you to act as a hashtag annotator. I will provide you with a tweet, and your role is to annotate the "
    "relevant hashtag. Using your related knowledge, you should identify the topic and reply with only the hashtags "
    "segmented by \"#\", without any explanations. Make sure to capitalize the first letter of the word. Make sure "
    "to split every word in a hashtag by a space. There are some potential hashtags:[";

constexpr std::string_view kAugmentedPromptMiddle =
    "]. You can decide whether use the part of them or not. My first tweet is ";

}  // namespace

std::string render_chat_prompt(std::string_view tweet, const std::optional<std::vector<std::string>>& retrieved,
                               const GeneratorConfig& config) {
  // Built by concatenation, never by placeholder search-and-replace, so the
  // tweet is inserted verbatim whatever it contains.
  std::string out;
  if (config.prompt_variant == PromptVariant::kPlain) {
    if (retrieved) throw ConfigError("plain chat prompt does not take retrieved hashtags");
    out.append(kPlainPromptHead);
  } else {
    if (!retrieved) throw ConfigError("retrieval-augmented chat prompt needs a retrieved hashtag list");
    out.append(kAugmentedPromptHead);
    out.append(text::join(*retrieved, ", "));
    out.append(kAugmentedPromptMiddle);
  }
  out.append(tweet);
  out.push_back('.');
  return out;
}

std::string hash_marks_to_sequence(std::string_view completion, std::string_view sep2) {
  std::vector<std::string> pieces;
  for (const auto& piece : text::split(completion, "#")) {
    const auto t = text::trim(piece);
    if (!t.empty()) pieces.push_back(text::collapse_whitespace(t));
  }
  return text::join(pieces, " " + std::string(sep2) + " ");
}

std::string input_key(std::string_view input) { return text::digest(input); }

std::vector<std::string> GeneratorBackend::generate_batch(std::span<const std::string> inputs) const {
  std::vector<std::string> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) out.push_back(generate(in));
  return out;
}

CopyBackend::CopyBackend(GeneratorConfig config) : config_(std::move(config)) { config_.validate(); }

std::string CopyBackend::generate(const std::string& input) const {
  const auto parts = text::split(input, config_.sep1);
  std::vector<std::string> tags;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto t = text::trim(parts[i]);
    if (!t.empty()) tags.emplace_back(t);
  }
  return text::join(tags, " " + config_.sep2 + " ");
}

MockBackend::MockBackend(std::map<std::string, std::string> by_key) : by_key_(std::move(by_key)) {}

MockBackend MockBackend::from_inputs(const std::map<std::string, std::string>& by_input) {
  std::map<std::string, std::string> keyed;
  for (const auto& [in, out] : by_input) keyed[input_key(in)] = out;
  return MockBackend(std::move(keyed));
}

MockBackend MockBackend::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open mock response file " + path.string());
  std::map<std::string, std::string> keyed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected key<TAB>output");
    }
    keyed[std::string(text::trim(std::string_view(line).substr(0, tab)))] = line.substr(tab + 1);
  }
  return MockBackend(std::move(keyed));
}

std::string MockBackend::generate(const std::string& input) const {
  const auto key = input_key(input);
  auto it = by_key_.find(key);
  if (it == by_key_.end()) throw BackendError("mock backend: no canned response for input key " + key);
  return it->second;
}

std::unique_ptr<GeneratorBackend> make_backend(const GeneratorConfig& config) {
  config.validate();
  switch (config.backend) {
    case BackendKind::kCopy:
      return std::make_unique<CopyBackend>(config);
    case BackendKind::kMock:
      if (config.mock_responses.empty()) throw ConfigError("mock backend needs generator.mock_responses");
      return std::make_unique<MockBackend>(MockBackend::load(config.mock_responses));
    case BackendKind::kChatApi:
      return std::make_unique<ChatBackend>(ChatBackend::from_config(config));
  }
  throw ConfigError("unknown generator backend");
}

std::string generate(const std::string& input, const GeneratorConfig& config) {
  return make_backend(config)->generate(input);
}

}  // namespace right::generator
