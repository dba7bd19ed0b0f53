#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "right/corpus.hpp"
#include "right/errors.hpp"

namespace right::generator {

enum class BackendKind { kMock, kCopy, kChatApi };
enum class PromptVariant { kPlain, kRetrievalAugmented };

std::string_view to_string(BackendKind kind);
BackendKind backend_kind_from_string(std::string_view s);
std::string_view to_string(PromptVariant variant);
PromptVariant prompt_variant_from_string(std::string_view s);

inline constexpr const char* kChatKeyEnv = "RIGHT_CHAT_KEY";

struct GeneratorConfig {
  std::string sep1 = "<extra_id_0>";
  std::string sep2 = "<extra_id_1>";
  BackendKind backend = BackendKind::kCopy;
  std::size_t max_hashtags_in = 9;
  std::string chat_model_name = "gpt-3.5-turbo";
  std::string chat_endpoint;  // e.g. https://api.openai.com/v1/chat/completions
  PromptVariant prompt_variant = PromptVariant::kRetrievalAugmented;
  double chat_temperature = 0.0;
  std::size_t chat_max_retries = 4;
  std::size_t chat_backoff_initial_ms = 500;
  std::size_t chat_max_in_flight = 4;
  std::string mock_responses;  // canned-response file for the mock backend

  void validate() const;

  bool operator==(const GeneratorConfig&) const = default;
};

struct GeneratorExchange {
  std::string input_sequence;
  std::string output_sequence;
  std::vector<std::string> parsed_hashtags;
};

// `tweet SEP1 h1 SEP1 h2 ...`; the bare tweet when nothing is selected.
std::string render_input(std::string_view tweet, const std::vector<std::string>& selected,
                         const GeneratorConfig& config);

// Split on SEP2, trim, drop empties, canonicalize, deduplicate keeping the
// first occurrence. Never throws on content.
std::vector<std::string> parse_output(std::string_view raw, const GeneratorConfig& config,
                                      corpus::LanguageMode mode = corpus::LanguageMode::kSpaceDelimited);

// Instantiates the annotator instruction. The plain variant takes no
// retrieved list; the retrieval-augmented variant requires one.
std::string render_chat_prompt(std::string_view tweet, const std::optional<std::vector<std::string>>& retrieved,
                               const GeneratorConfig& config);

// "#world cup #final" -> "world cup SEP2 final"
std::string hash_marks_to_sequence(std::string_view completion, std::string_view sep2);

// Hex FNV-1a of the exact input bytes; the mock backend's lookup key.
std::string input_key(std::string_view input);

class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::string name() const = 0;
  // Returns the output sequence O for input I (a rendered sequence, or a
  // chat prompt for the chat backend).
  virtual std::string generate(const std::string& input) const = 0;
  // Outputs in input order. The default runs sequentially.
  virtual std::vector<std::string> generate_batch(std::span<const std::string> inputs) const;
};

// Extractive: echoes the hashtags of a rendered input, joined by SEP2.
class CopyBackend final : public GeneratorBackend {
 public:
  explicit CopyBackend(GeneratorConfig config);
  std::string name() const override { return "copy"; }
  std::string generate(const std::string& input) const override;

 private:
  GeneratorConfig config_;
};

// Canned responses keyed by input_key(input). File form: `key<TAB>output`.
class MockBackend final : public GeneratorBackend {
 public:
  explicit MockBackend(std::map<std::string, std::string> by_key);
  static MockBackend from_inputs(const std::map<std::string, std::string>& by_input);
  static MockBackend load(const std::filesystem::path& path);

  std::string name() const override { return "mock"; }
  std::string generate(const std::string& input) const override;

 private:
  std::map<std::string, std::string> by_key_;
};

struct ChatBackendOptions {
  std::string endpoint;
  std::string model;
  std::string api_key;
  double temperature = 0.0;
  std::size_t max_retries = 4;
  std::chrono::milliseconds backoff_initial{500};
  std::size_t max_in_flight = 4;
  std::string sep2 = "<extra_id_1>";
};

// Chat-completions client. Transient failures (transport errors, HTTP 429,
// HTTP 5xx) are retried with doubling backoff; anything else fails at once.
class ChatBackend final : public GeneratorBackend {
 public:
  explicit ChatBackend(ChatBackendOptions options);
  // Key taken from RIGHT_CHAT_KEY; throws ConfigError when unset.
  static ChatBackend from_config(const GeneratorConfig& config);

  std::string name() const override { return "chat-api:" + options_.model; }
  std::string generate(const std::string& prompt) const override;
  std::vector<std::string> generate_batch(std::span<const std::string> prompts) const override;

  // Raw first-choice content, before '#' splitting.
  std::string complete(const std::string& prompt) const;

 private:
  ChatBackendOptions options_;
};

class ChatTransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

class ChatStatusError : public BackendError {
 public:
  ChatStatusError(int status, const std::string& what) : BackendError(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class EmptyCompletionError : public BackendError {
 public:
  using BackendError::BackendError;
};

std::unique_ptr<GeneratorBackend> make_backend(const GeneratorConfig& config);

// The one-shot convenience form: builds the configured backend and runs it.
std::string generate(const std::string& input, const GeneratorConfig& config);

}  // namespace right::generator
