#pragma once

#include <map>
#include <string>

#include "llm/provider.hpp"

namespace deckhand::llm {

struct EndpointCfg {
  std::string url;             // full chat-completions URL
  std::string env_credential;  // environment variable holding the API key
  std::string remote_model;    // model name sent on the wire, if different
};

// OpenAI-style chat-completions transport. The endpoint (URL + credential
// environment variable) is selected by the request's model id. 429 responses
// are retried with bounded backoff; 401/403 raise AuthError; anything else
// unexpected raises BadResponse; connection failures raise TransportError.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(std::map<std::string, EndpointCfg> endpoints)
      : endpoints_(std::move(endpoints)) {}

  ChatResponse complete(const ChatRequest& request, Stage stage) override;

 private:
  std::map<std::string, EndpointCfg> endpoints_;
};

}  // namespace deckhand::llm
