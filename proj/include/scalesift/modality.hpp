#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scalesift/json_io.hpp"
#include "scalesift/tables.hpp"

namespace scalesift {

enum class Modality { LR, HR };

const char* to_string(Modality m);  // "lr" / "hr"
Modality modality_from_string(const std::string& s);

struct ModalityDecision {
  std::string concept_id;
  Modality choice = Modality::LR;
  std::string source;
  // No validation positives: the oracle could not compare, LR was chosen.
  bool undecidable = false;

  bool operator==(const ModalityDecision&) const = default;
};

using DecisionMap = std::map<std::string, ModalityDecision>;

enum class ModalityStrategy { Oracle, LLM, AreaHeuristic, AlwaysHR, AlwaysLR };

const char* to_string(ModalityStrategy s);
ModalityStrategy modality_strategy_from_string(const std::string& name);

struct LLMClientConfig {
  enum class Mode { Http, Scripted };
  Mode mode = Mode::Http;
  std::string endpoint;
  std::string token_env = "SCALESIFT_LLM_TOKEN";
  double timeout_seconds = 30.0;
  std::filesystem::path scripted_path;
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{1000};
  int max_in_flight = 4;

  void validate() const;
};

// Single-turn text completion. HTTP mode POSTs {"prompt", "max_tokens": 4}
// and reads the "text" field; scripted mode answers from a `concept,answer`
// CSV, keyed by the last line of the prompt.
class LLMClient {
 public:
  explicit LLMClient(LLMClientConfig config);
  ~LLMClient();
  LLMClient(const LLMClient&) = delete;
  LLMClient& operator=(const LLMClient&) = delete;

  const LLMClientConfig& config() const noexcept { return config_; }
  // Raw completion text. Throws TransportError after max_retries failed retries.
  std::string complete(const std::string& prompt) const;

 private:
  std::string complete_http(const std::string& prompt) const;
  LLMClientConfig config_;
  std::map<std::string, std::string> script_;
};

// Seen-concept decisions from validation data: HR iff AP@k(HR) > AP@k(LR).
// All three tables must cover `concepts` over the same locations.
DecisionMap validation_modality_oracle(const ScoreTable& hr, const ScoreTable& lr,
                                       const LabelTable& labels,
                                       const std::vector<std::string>& concepts, int k);

extern const char* const kPromptInstruction;

// Instruction paragraph, one `concept:lr|hr` line per seen decision (sorted by
// id), then the query concept as the last line.
std::string build_incontext_prompt(const DecisionMap& seen, const std::string& query);
std::vector<std::string> build_incontext_prompts(const DecisionMap& seen,
                                                 const std::vector<std::string>& queries);

// Trim + lowercase; exactly "lr" or "hr", otherwise ProtocolError.
Modality parse_llm_answer(const std::string& raw);

struct ModalityContext {
  const LLMClient* llm = nullptr;
  DecisionMap seen_decisions;           // in-context examples for llm
  std::map<std::string, double> mean_area_m2;  // area-heuristic
  double area_threshold_m2 = 1.0e6;
};

ModalityDecision decide_modality(ModalityStrategy strategy, const std::string& concept_id,
                                 const ModalityContext& context);

// Decides every concept; LLM queries run concurrently up to the client's
// max_in_flight. The result does not depend on completion order.
DecisionMap decide_modalities(ModalityStrategy strategy, const std::vector<std::string>& concepts,
                              const ModalityContext& context);

// Fraction of concepts with matching choice; concept sets must be equal.
double evaluate_selector(const DecisionMap& predictions, const DecisionMap& truth);

std::string decisions_csv(const DecisionMap& decisions);
Json to_json(const ModalityDecision& d);
ModalityDecision decision_from_json(const Json& doc, const std::string& path);

}  // namespace scalesift
