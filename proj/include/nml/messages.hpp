#ifndef NML_MESSAGES_HPP
#define NML_MESSAGES_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nml/dates.hpp"

namespace nml {

/// One social-media message from the corpus.
struct RawMessage {
    std::string id;
    std::string created_at; // ISO-8601 timestamp as ingested
    Date date;              // calendar date of created_at
    std::string body;
    std::int64_t likes = 0;
    std::int64_t reshares = 0;
};

/// Five-point policy stance scale: VeryHawkish=-2 .. VeryDovish=+2.
struct StanceScore {
    int value = 0;
    static bool valid(int v) { return v >= -2 && v <= 2; }
};

const char* stance_label(int value);
/// Case-insensitive, whitespace-tolerant label -> score. Empty optional for
/// anything outside the five categories.
std::optional<int> parse_stance_label(const std::string& label);

enum class ClassifierSource { Remote, Lexicon };

struct ClassifiedMessage {
    RawMessage message;
    int stance = 0;
    ClassifierSource source = ClassifierSource::Lexicon;
};

/// Classification backend interface. Implementations return a raw category
/// string (possibly malformed for remote models) or throw on transport errors.
class StanceClassifier {
public:
    virtual ~StanceClassifier() = default;
    virtual std::string classify(const std::string& body) = 0;
    virtual const char* name() const = 0;
};

/// Deterministic keyword classifier. Multi-word phrases are matched first and
/// consume their tokens; the score is clamp(dovish_hits - hawkish_hits, -2, +2).
/// Exists for reproducible tests and offline runs, not classification fidelity.
class LexiconClassifier : public StanceClassifier {
public:
    std::string classify(const std::string& body) override;
    const char* name() const override { return "lexicon"; }

    /// Direct score without the label round-trip.
    static int score(const std::string& body);
};

/// Remote LLM backend: POST {"system":..., "user":...} to a base URL,
/// expecting {"category": "<label>"}.
class RemoteClassifier : public StanceClassifier {
public:
    RemoteClassifier(std::string base_url, int timeout_ms = 10000);
    std::string classify(const std::string& body) override;
    const char* name() const override { return "remote"; }

    static std::string system_prompt();
    static std::string user_prompt(const std::string& body);

private:
    std::string host_;
    std::string path_;
    int timeout_ms_;
};

struct ClassifyOptions {
    int max_retries = 2;  // re-asks per message on malformed labels
    int concurrency = 4;  // parallel remote requests
};

struct ClassifyOutcome {
    std::vector<ClassifiedMessage> messages;
    int fallback_count = 0; // messages defaulted to Neutral after retries
};

/// Classify every message, preserving order. Malformed responses are retried
/// up to the configured limit, then defaulted to Neutral with the fallback
/// counter incremented. Transport failures abort with the count of messages
/// left unclassified.
ClassifyOutcome classify_batch(const std::vector<RawMessage>& messages,
                               StanceClassifier& backend,
                               const ClassifyOptions& options = {});

/// JSON Lines corpus I/O.
std::vector<RawMessage> read_messages_jsonl(const std::string& path);
void write_messages_jsonl(const std::string& path, const std::vector<RawMessage>& messages);
std::vector<ClassifiedMessage> read_classified_jsonl(const std::string& path);
void write_classified_jsonl(const std::string& path,
                            const std::vector<ClassifiedMessage>& messages);

} // namespace nml

#endif
