#include <cstdlib>
#include <thread>

#include "http_endpoint.hpp"
#include "json.hpp"
#include "right/generator.hpp"
#include "right/parallel.hpp"
#include "right/text.hpp"

namespace right::generator {

using nlohmann::json;

ChatBackend::ChatBackend(ChatBackendOptions options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw ConfigError("chat backend needs generator.chat_endpoint");
  if (options_.model.empty()) throw ConfigError("chat backend needs generator.chat_model_name");
  parse_http_endpoint(options_.endpoint);
}

ChatBackend ChatBackend::from_config(const GeneratorConfig& config) {
  const char* key = std::getenv(kChatKeyEnv);
  if (key == nullptr || *key == '\0') {
    throw ConfigError(std::string("chat backend needs an API key in the ") + kChatKeyEnv + " environment variable");
  }
  ChatBackendOptions opts;
  opts.endpoint = config.chat_endpoint;
  opts.model = config.chat_model_name;
  opts.api_key = key;
  opts.temperature = config.chat_temperature;
  opts.max_retries = config.chat_max_retries;
  opts.backoff_initial = std::chrono::milliseconds(config.chat_backoff_initial_ms);
  opts.max_in_flight = config.chat_max_in_flight;
  opts.sep2 = config.sep2;
  return ChatBackend(std::move(opts));
}

std::string ChatBackend::complete(const std::string& prompt) const {
  const HttpEndpoint ep = parse_http_endpoint(options_.endpoint);
  const json body = {{"model", options_.model},
                     {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
                     {"temperature", options_.temperature}};
  const std::string payload = body.dump();
  const httplib::Headers headers = {{"Authorization", "Bearer " + options_.api_key}};

  auto delay = options_.backoff_initial;
  for (std::size_t attempt = 0;; ++attempt) {
    const bool last = attempt >= options_.max_retries;
    auto client = make_http_client(ep);
    auto res = client->Post(ep.path, headers, payload, "application/json");
    if (!res) {
      if (last) {
        throw ChatTransportError("chat endpoint " + options_.endpoint + " unreachable after " +
                                 std::to_string(attempt + 1) + " attempts: " + httplib::to_string(res.error()));
      }
    } else if (res->status >= 200 && res->status < 300) {
      std::string content;
      try {
        const auto reply = json::parse(res->body);
        const auto& choices = reply.at("choices");
        if (choices.empty()) throw EmptyCompletionError("chat endpoint returned no choices");
        const auto& c = choices.at(0).at("message").at("content");
        if (!c.is_null()) content = c.get<std::string>();
      } catch (const json::exception& e) {
        throw ChatStatusError(res->status, std::string("chat endpoint sent a malformed response: ") + e.what());
      }
      if (text::trim(content).empty()) throw EmptyCompletionError("chat endpoint returned an empty completion");
      return content;
    } else {
      const bool transient = res->status == 429 || res->status >= 500;
      if (!transient || last) {
        throw ChatStatusError(res->status, "chat endpoint " + options_.endpoint + " returned HTTP " +
                                               std::to_string(res->status));
      }
    }
    std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

std::string ChatBackend::generate(const std::string& prompt) const {
  return hash_marks_to_sequence(complete(prompt), options_.sep2);
}

std::vector<std::string> ChatBackend::generate_batch(std::span<const std::string> prompts) const {
  // Slot i is the correlation id: responses land at their request's index.
  std::vector<std::string> out(prompts.size());
  parallel_for(prompts.size(), options_.max_in_flight, [&](std::size_t i) { out[i] = generate(prompts[i]); });
  return out;
}

}  // namespace right::generator
