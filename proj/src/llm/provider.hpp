#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "support/money.hpp"

namespace deckhand::llm {

struct Usage {
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;

  Usage& operator+=(const Usage& other) {
    input_tokens += other.input_tokens;
    output_tokens += other.output_tokens;
    return *this;
  }
  bool operator==(const Usage&) const = default;
};

struct ChatRequest {
  std::string model_id;
  std::optional<std::string> system_text;
  std::string user_text;
  double temperature = 0.05;
  double top_p = 1.0;
  int max_tokens = 4096;
  // Rendered slide images for multimodal judging; ignored by text backends.
  std::vector<std::string> image_paths;
};

struct ChatResponse {
  std::string text;
  Usage usage;
};

enum class Stage { planner, editor, codegen, judge };
const char* stage_name(Stage stage);

// USD per million tokens, held exactly.
struct ModelPricing {
  Money input_per_million;
  Money output_per_million;
  Money output_thinking_per_million;  // used when thinking output is billed
};

// tokens/1e6 * price, exact for prices with <= 6 decimal places.
Money compute_cost(const Usage& usage, const ModelPricing& pricing,
                   bool thinking_output = false);

class PricingTable {
 public:
  void set(const std::string& model_id, ModelPricing pricing) {
    table_[model_id] = pricing;
  }
  // Unpriced models cost zero (the mock, ad-hoc local endpoints).
  ModelPricing lookup(const std::string& model_id) const {
    auto it = table_.find(model_id);
    return it == table_.end() ? ModelPricing{} : it->second;
  }
  const std::map<std::string, ModelPricing>& entries() const { return table_; }

 private:
  std::map<std::string, ModelPricing> table_;
};

struct LedgerEntry {
  Stage stage;
  std::string model_id;
  Usage usage;
  Money cost_usd;
};

class UsageLedger {
 public:
  void append(LedgerEntry entry) { entries_.push_back(std::move(entry)); }
  const std::vector<LedgerEntry>& entries() const { return entries_; }

  Usage total_usage(bool include_judge = false) const;
  Money total_cost(bool include_judge = false) const;

 private:
  std::vector<LedgerEntry> entries_;
};

// Transport interface; complete() must be callable concurrently.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResponse complete(const ChatRequest& request, Stage stage) = 0;
};

struct MockReply {
  std::string text;
  Usage usage;
  std::optional<Stage> stage;  // reply only serves this stage when set
  std::string match;           // reply only serves prompts containing this
};

// Deterministic scripted endpoint. Each call consumes the first unused reply
// whose stage and match constraints fit the request; exhaustion raises
// BadResponse("script exhausted").
class MockChatClient : public ChatClient {
 public:
  explicit MockChatClient(std::vector<MockReply> replies)
      : replies_(std::move(replies)), used_(replies_.size(), false) {}

  ChatResponse complete(const ChatRequest& request, Stage stage) override;

  int calls() const;

 private:
  mutable std::mutex mutex_;
  std::vector<MockReply> replies_;
  std::vector<bool> used_;
  int calls_ = 0;
};

std::unique_ptr<MockChatClient> mock_provider(std::vector<MockReply> replies);

// Accounting session: forwards to the transport and records one ledger entry
// per call, tagged with the calling stage. One session per pipeline run or
// benchmark case; appends are atomic.
class Provider {
 public:
  Provider(ChatClient& client, const PricingTable& pricing,
           bool thinking_output = false)
      : client_(client), pricing_(pricing), thinking_output_(thinking_output) {}

  ChatResponse complete(const ChatRequest& request, Stage stage);

  UsageLedger ledger_snapshot() const;

 private:
  ChatClient& client_;
  const PricingTable& pricing_;
  bool thinking_output_;
  mutable std::mutex mutex_;
  UsageLedger ledger_;
};

}  // namespace deckhand::llm
