#include "llm/provider.hpp"

#include "support/error.hpp"

namespace deckhand::llm {

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::planner: return "planner";
    case Stage::editor: return "editor";
    case Stage::codegen: return "codegen";
    case Stage::judge: return "judge";
  }
  return "unknown";
}

Money compute_cost(const Usage& usage, const ModelPricing& pricing,
                   bool thinking_output) {
  Money output_price = thinking_output &&
                               pricing.output_thinking_per_million.picodollars() > 0
                           ? pricing.output_thinking_per_million
                           : pricing.output_per_million;
  auto scale = [](std::int64_t tokens, Money per_million) {
    __int128 pd = static_cast<__int128>(tokens) * per_million.picodollars();
    return Money::from_picodollars(static_cast<std::int64_t>(pd / 1'000'000));
  };
  return scale(usage.input_tokens, pricing.input_per_million) +
         scale(usage.output_tokens, output_price);
}

Usage UsageLedger::total_usage(bool include_judge) const {
  Usage total;
  for (const LedgerEntry& e : entries_) {
    if (!include_judge && e.stage == Stage::judge) continue;
    total += e.usage;
  }
  return total;
}

Money UsageLedger::total_cost(bool include_judge) const {
  Money total;
  for (const LedgerEntry& e : entries_) {
    if (!include_judge && e.stage == Stage::judge) continue;
    total += e.cost_usd;
  }
  return total;
}

ChatResponse MockChatClient::complete(const ChatRequest& request, Stage stage) {
  std::lock_guard lock(mutex_);
  ++calls_;
  for (std::size_t i = 0; i < replies_.size(); ++i) {
    if (used_[i]) continue;
    const MockReply& r = replies_[i];
    if (r.stage && *r.stage != stage) continue;
    if (!r.match.empty() &&
        request.user_text.find(r.match) == std::string::npos)
      continue;
    used_[i] = true;
    return ChatResponse{r.text, r.usage};
  }
  raise(Errc::bad_response, "script exhausted (call " + std::to_string(calls_) +
                                ", stage " + stage_name(stage) + ")");
}

int MockChatClient::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::unique_ptr<MockChatClient> mock_provider(std::vector<MockReply> replies) {
  return std::make_unique<MockChatClient>(std::move(replies));
}

ChatResponse Provider::complete(const ChatRequest& request, Stage stage) {
  ChatResponse response = client_.complete(request, stage);
  if (response.usage.input_tokens < 0 || response.usage.output_tokens < 0)
    raise(Errc::bad_response, "negative token counts in usage report");
  LedgerEntry entry{stage, request.model_id, response.usage,
                    compute_cost(response.usage, pricing_.lookup(request.model_id),
                                 thinking_output_)};
  {
    std::lock_guard lock(mutex_);
    ledger_.append(std::move(entry));
  }
  return response;
}

UsageLedger Provider::ledger_snapshot() const {
  std::lock_guard lock(mutex_);
  return ledger_;
}

}  // namespace deckhand::llm
