#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "llm/http_client.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "support/error.hpp"

namespace deckhand::llm {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kRateLimitRetries = 3;

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    raise(Errc::config_error, "endpoint url '" + url + "' has no scheme");
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string base64_encode(const std::string& data) {
  static const char table[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 2 < data.size()) {
    unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                 (static_cast<unsigned char>(data[i + 1]) << 8) |
                 static_cast<unsigned char>(data[i + 2]);
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out.push_back(table[(v >> 6) & 63]);
    out.push_back(table[v & 63]);
    i += 3;
  }
  if (i + 1 == data.size()) {
    unsigned v = static_cast<unsigned char>(data[i]) << 16;
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out += "==";
  } else if (i + 2 == data.size()) {
    unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                 (static_cast<unsigned char>(data[i + 1]) << 8);
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out.push_back(table[(v >> 6) & 63]);
    out += "=";
  }
  return out;
}

Json build_body(const ChatRequest& request, const EndpointCfg& endpoint) {
  Json body;
  body["model"] = endpoint.remote_model.empty() ? request.model_id
                                                : endpoint.remote_model;
  Json messages = Json::array();
  if (request.system_text) {
    Json system;
    system["role"] = "system";
    system["content"] = *request.system_text;
    messages.push_back(std::move(system));
  }
  Json user;
  user["role"] = "user";
  if (request.image_paths.empty()) {
    user["content"] = request.user_text;
  } else {
    Json parts = Json::array();
    Json text_part;
    text_part["type"] = "text";
    text_part["text"] = request.user_text;
    parts.push_back(std::move(text_part));
    for (const std::string& path : request.image_paths) {
      std::ifstream in(path, std::ios::binary);
      if (!in) raise(Errc::io, "cannot read image " + path);
      std::string bytes((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
      Json image;
      image["type"] = "image_url";
      image["image_url"] = Json::object(
          {{"url", "data:image/png;base64," + base64_encode(bytes)}});
      parts.push_back(std::move(image));
    }
    user["content"] = std::move(parts);
  }
  messages.push_back(std::move(user));
  body["messages"] = std::move(messages);
  body["temperature"] = request.temperature;
  body["top_p"] = request.top_p;
  body["max_tokens"] = request.max_tokens;
  return body;
}

ChatResponse parse_body(const std::string& body) {
  Json doc = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded())
    raise(Errc::bad_response, "endpoint returned non-JSON body");
  ChatResponse response;
  try {
    response.text =
        doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (...) {
    raise(Errc::bad_response, "no choices[0].message.content in reply");
  }
  if (doc.contains("usage")) {
    const Json& usage = doc.at("usage");
    response.usage.input_tokens = usage.value("prompt_tokens", 0);
    response.usage.output_tokens = usage.value("completion_tokens", 0);
  }
  return response;
}

}  // namespace

ChatResponse HttpChatClient::complete(const ChatRequest& request, Stage stage) {
  (void)stage;
  auto it = endpoints_.find(request.model_id);
  if (it == endpoints_.end())
    raise(Errc::config_error,
          "no endpoint configured for model '" + request.model_id + "'");
  const EndpointCfg& endpoint = it->second;

  httplib::Headers headers;
  if (!endpoint.env_credential.empty()) {
    const char* key = std::getenv(endpoint.env_credential.c_str());
    if (!key || !*key)
      raise(Errc::auth, "credential environment variable '" +
                            endpoint.env_credential + "' is not set");
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  ParsedUrl url = split_url(endpoint.url);
  std::string payload = build_body(request, endpoint).dump();

  int backoff_ms = 200;
  for (int attempt = 0;; ++attempt) {
    httplib::Client client(url.base);
    client.set_connection_timeout(30);
    client.set_read_timeout(600);
    auto result = client.Post(url.path, headers, payload, "application/json");
    if (!result)
      raise(Errc::transport, "request to " + endpoint.url + " failed: " +
                                 httplib::to_string(result.error()));
    if (result->status == 200) return parse_body(result->body);
    if (result->status == 401 || result->status == 403)
      raise(Errc::auth, "endpoint rejected the credential (HTTP " +
                            std::to_string(result->status) + ")");
    if (result->status == 429) {
      if (attempt + 1 >= kRateLimitRetries)
        raise(Errc::rate_limited, "still rate-limited after " +
                                      std::to_string(kRateLimitRetries) +
                                      " attempts");
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
      continue;
    }
    raise(Errc::bad_response, "HTTP " + std::to_string(result->status) +
                                  " from " + endpoint.url);
  }
}

}  // namespace deckhand::llm
