#include "nml/messages.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "nml/errors.hpp"

namespace nml {

using json = nlohmann::json;

const char* stance_label(int value) {
    switch (value) {
        case -2: return "Very Hawkish";
        case -1: return "Hawkish";
        case 0: return "Neutral";
        case 1: return "Dovish";
        case 2: return "Very Dovish";
    }
    return "?";
}

namespace {

std::string normalize_label(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (std::isalpha(static_cast<unsigned char>(c)))
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else if (std::isspace(static_cast<unsigned char>(c)) && !out.empty() && out.back() != ' ')
            out += ' ';
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

} // namespace

std::optional<int> parse_stance_label(const std::string& label) {
    std::string n = normalize_label(label);
    if (n == "very hawkish") return -2;
    if (n == "hawkish") return -1;
    if (n == "neutral") return 0;
    if (n == "dovish") return 1;
    if (n == "very dovish") return 2;
    return std::nullopt;
}

namespace {

std::vector<std::string> tokenize(const std::string& body) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : body) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            cur += static_cast<char>(std::tolower(u));
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

struct LexiconEntry {
    std::vector<std::string> tokens;
    int direction; // -1 hawkish, +1 dovish
};

// Versioned keyword table (v1). Phrases consume their tokens so "rate hike"
// counts once, not once per word.
const std::vector<LexiconEntry>& lexicon_table() {
    static const std::vector<LexiconEntry> table = [] {
        std::vector<LexiconEntry> t;
        auto add = [&](const char* phrase, int dir) {
            t.push_back({tokenize(phrase), dir});
        };
        // hawkish
        add("rate hike", -1);
        add("rate hikes", -1);
        add("raise rate", -1);
        add("raise rates", -1);
        add("inflation fight", -1);
        add("fight inflation", -1);
        add("higher for longer", -1);
        add("hike", -1);
        add("hikes", -1);
        add("hiking", -1);
        add("tighten", -1);
        add("tightens", -1);
        add("tightening", -1);
        add("hawkish", -1);
        add("restrictive", -1);
        add("taper", -1);
        add("tapering", -1);
        add("aggressive", -1);
        add("aggressively", -1);
        add("100bps", -1);
        add("75bps", -1);
        add("50bps", -1);
        // dovish
        add("rate cut", +1);
        add("rate cuts", +1);
        add("cut rates", +1);
        add("lower rates", +1);
        add("quantitative easing", +1);
        add("cut", +1);
        add("cuts", +1);
        add("cutting", +1);
        add("ease", +1);
        add("easing", +1);
        add("eased", +1);
        add("stimulus", +1);
        add("qe", +1);
        add("pause", +1);
        add("paused", +1);
        add("pausing", +1);
        add("dovish", +1);
        add("pivot", +1);
        add("accommodative", +1);
        // longest phrases first so they win over their own words
        std::stable_sort(t.begin(), t.end(), [](const LexiconEntry& a, const LexiconEntry& b) {
            return a.tokens.size() > b.tokens.size();
        });
        return t;
    }();
    return table;
}

} // namespace

int LexiconClassifier::score(const std::string& body) {
    std::vector<std::string> tokens = tokenize(body);
    int hawkish = 0, dovish = 0;
    std::size_t i = 0;
    while (i < tokens.size()) {
        bool matched = false;
        for (const auto& entry : lexicon_table()) {
            if (entry.tokens.size() > tokens.size() - i) continue;
            bool hit = true;
            for (std::size_t j = 0; j < entry.tokens.size(); ++j) {
                if (tokens[i + j] != entry.tokens[j]) {
                    hit = false;
                    break;
                }
            }
            if (hit) {
                (entry.direction < 0 ? hawkish : dovish) += 1;
                i += entry.tokens.size();
                matched = true;
                break;
            }
        }
        if (!matched) ++i;
    }
    return std::clamp(dovish - hawkish, -2, 2);
}

std::string LexiconClassifier::classify(const std::string& body) {
    return stance_label(score(body));
}

RemoteClassifier::RemoteClassifier(std::string base_url, int timeout_ms)
    : timeout_ms_(timeout_ms) {
    std::string url = std::move(base_url);
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto slash = url.find('/', host_start);
    if (slash == std::string::npos) {
        host_ = url;
        path_ = "/";
    } else {
        host_ = url.substr(0, slash);
        path_ = url.substr(slash);
    }
    if (host_.empty()) throw ConfigError("RemoteClassifier: empty base URL");
}

std::string RemoteClassifier::system_prompt() {
    return "Analyze the tweet provided below to determine the stance on monetary policy "
           "expressed by the user. Tweets often feature concise language, hashtags, and "
           "abbreviations typical of social media communication. Consider the context and the "
           "specific wording to classify the stance into one of the following categories: "
           "\"Very Hawkish\", \"Hawkish\", \"Neutral\", \"Dovish\", and \"Very Dovish\".\n"
           "- \"Very Hawkish\": This category should be selected if the tweet indicates an "
           "aggressive stance towards fighting inflation, likely advocating for significant "
           "interest rate hikes or other contractionary measures. Look for strong language "
           "supporting drastic monetary tightening.\n"
           "- \"Hawkish\": Choose this if the tweet suggests a tendency towards tightening "
           "monetary policy to control inflation. It may not indicate extreme measures but "
           "shows a clear preference for policy tightening.\n"
           "- \"Neutral\": This applies if the tweet implies a balanced approach, without "
           "clear leanings towards tightening or easing monetary policy. It might suggest "
           "contentment with maintaining current policy levels or express views that neither "
           "strongly support nor oppose policy changes.\n"
           "- \"Dovish\": Select this category if the tweet points towards a preference for "
           "easing monetary policy, likely aiming to stimulate economic growth by advocating "
           "for lower interest rates or through quantitative easing.\n"
           "- \"Very Dovish\": This should be chosen if the tweet reflects a strong "
           "inclination towards stimulating the economy, suggesting substantial measures for "
           "easing monetary policy beyond standard adjustments, like a significant push for "
           "quantitative easing or deep cuts in interest rates.\n"
           "Consider not only the explicit content but also the tone, hashtags, and any "
           "economic indicators or events mentioned to understand the user's stance fully.\n"
           "Remember, your response should only be a category, nothing more. This task is "
           "about classification accuracy, not explanation or detail.";
}

std::string RemoteClassifier::user_prompt(const std::string& body) {
    return "Instructions:\n- Analyze the tweet: \"" + body +
           "\"\n- Classify into categories: \"Very hawkish,\" \"Hawkish,\" \"Neutral,\" "
           "\"Dovish,\" or \"Very dovish.\".\n- Do not include any explanations, "
           "elaborations, or additional information in your response. Your role is solely to "
           "classify, not to explain or discuss, return only the category.";
}

std::string RemoteClassifier::classify(const std::string& body) {
    httplib::Client client(host_);
    client.set_connection_timeout(0, timeout_ms_ * 1000);
    client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);

    json payload = {{"system", system_prompt()}, {"user", user_prompt(body)}};
    auto res = client.Post(path_, payload.dump(), "application/json");
    if (!res)
        throw DataError("remote classifier unreachable at " + host_ + path_);
    if (res->status != 200)
        throw DataError("remote classifier HTTP " + std::to_string(res->status));
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("category") || !reply["category"].is_string())
        return ""; // malformed payload -> treated like an out-of-scale label
    return reply["category"].get<std::string>();
}

namespace {

int classify_one(StanceClassifier& backend, const std::string& body,
                 const ClassifyOptions& options, std::atomic<int>& fallback_count) {
    const int attempts = options.max_retries + 1;
    int transport_failures = 0;
    for (int a = 0; a < attempts;) {
        std::string raw;
        try {
            raw = backend.classify(body);
        } catch (const Error&) {
            if (++transport_failures >= attempts) throw;
            std::this_thread::sleep_for(std::chrono::milliseconds(50 << transport_failures));
            continue; // transport retries do not consume label attempts
        }
        if (auto parsed = parse_stance_label(raw)) return *parsed;
        ++a;
    }
    fallback_count.fetch_add(1);
    return 0;
}

} // namespace

ClassifyOutcome classify_batch(const std::vector<RawMessage>& messages,
                               StanceClassifier& backend, const ClassifyOptions& options) {
    const std::size_t n = messages.size();
    ClassifyOutcome outcome;
    outcome.messages.resize(n);

    std::atomic<std::size_t> next{0};
    std::atomic<int> fallbacks{0};
    std::atomic<std::size_t> done{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::string first_error;

    const bool remote = std::string(backend.name()) == "remote";
    const ClassifierSource source = remote ? ClassifierSource::Remote : ClassifierSource::Lexicon;
    const int nthreads = remote ? std::max(1, options.concurrency) : 1;

    auto worker = [&] {
        while (!failed.load()) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                int stance = classify_one(backend, messages[i].body, options, fallbacks);
                outcome.messages[i] = {messages[i], stance, source};
                done.fetch_add(1);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) first_error = e.what();
            }
        }
    };

    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (failed.load())
        throw DataError("classify_batch: backend failed (" + first_error + "); " +
                        std::to_string(n - done.load()) + " of " + std::to_string(n) +
                        " messages unclassified");
    outcome.fallback_count = fallbacks.load();
    return outcome;
}

namespace {

RawMessage message_from_json(const json& j, const std::string& context) {
    if (!j.contains("id") || !j.contains("created_at") || !j.contains("body") ||
        !j.contains("likes") || !j.contains("reshares"))
        throw DataError(context + ": message object missing required fields");
    RawMessage m;
    m.id = j.at("id").get<std::string>();
    m.created_at = j.at("created_at").get<std::string>();
    m.date = parse_date(m.created_at);
    m.body = j.at("body").get<std::string>();
    m.likes = j.at("likes").get<std::int64_t>();
    m.reshares = j.at("reshares").get<std::int64_t>();
    if (m.likes < 0 || m.reshares < 0)
        throw DataError(context + ": negative engagement counts for id " + m.id);
    return m;
}

json message_to_json(const RawMessage& m) {
    return json{{"id", m.id},
                {"created_at", m.created_at},
                {"body", m.body},
                {"likes", m.likes},
                {"reshares", m.reshares}};
}

} // namespace

std::vector<RawMessage> read_messages_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open messages file: " + path);
    std::vector<RawMessage> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError(path + ":" + std::to_string(lineno) + ": invalid JSON");
        out.push_back(message_from_json(j, path + ":" + std::to_string(lineno)));
    }
    return out;
}

void write_messages_jsonl(const std::string& path, const std::vector<RawMessage>& messages) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    for (const auto& m : messages) out << message_to_json(m).dump() << '\n';
}

std::vector<ClassifiedMessage> read_classified_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open classified file: " + path);
    std::vector<ClassifiedMessage> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError(path + ":" + std::to_string(lineno) + ": invalid JSON");
        ClassifiedMessage c;
        c.message = message_from_json(j, path + ":" + std::to_string(lineno));
        c.stance = j.at("stance").get<int>();
        if (!StanceScore::valid(c.stance))
            throw DataError(path + ": stance outside the five-point scale");
        c.source = j.at("source").get<std::string>() == "remote" ? ClassifierSource::Remote
                                                                 : ClassifierSource::Lexicon;
        out.push_back(std::move(c));
    }
    return out;
}

void write_classified_jsonl(const std::string& path,
                            const std::vector<ClassifiedMessage>& messages) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    for (const auto& c : messages) {
        json j = message_to_json(c.message);
        j["stance"] = c.stance;
        j["label"] = stance_label(c.stance);
        j["source"] = c.source == ClassifierSource::Remote ? "remote" : "lexicon";
        out << j.dump() << '\n';
    }
}

} // namespace nml
