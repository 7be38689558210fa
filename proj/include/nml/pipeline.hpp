#ifndef NML_PIPELINE_HPP
#define NML_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nml/tpe.hpp"
#include "nml/vmd.hpp"

namespace nml {

enum class Stage { Ingest, Classify, Index, Stats, Granger, Vmd, Forecast, Explain, Report };

const char* to_string(Stage s);
Stage stage_from_string(const std::string& name);
const std::vector<Stage>& all_stages();

struct PipelineConfig {
    std::uint64_t seed = 42;
    std::string out_dir = "out";

    struct Data {
        std::string messages;
        std::string macro_dir;
        std::string fomc_dates;
    } data;

    struct Classifier {
        std::string backend = "lexicon"; // lexicon | remote
        std::string url;                 // NML_CLASSIFIER_URL overrides
        int timeout_ms = 10000;
        int max_retries = 2;
        int concurrency = 4;
    } classifier;

    VmdConfig vmd;

    struct Granger {
        int max_lag = 6;
    } granger;

    struct Folds {
        bool scaled = false;
    } folds;

    struct Forecast {
        int trials = 75;
        int runs = 5;
        int max_epochs = 50;
        int patience = 10;
        HpSpace space;
    } forecast;

    struct Explain {
        int nsamples = 512;
        int background = 50;
        int samples_per_fold = 20;
        bool per_run = true;
    } explain;
};

/// Strict loader: unknown keys anywhere in the file are rejected; referenced
/// data paths must exist. NML_CLASSIFIER_URL overrides classifier.url.
PipelineConfig load_config(const std::string& path);
PipelineConfig config_from_json_text(const std::string& text, const std::string& origin);

struct StageResult {
    Stage stage;
    bool skipped = false; // inputs unchanged, artifacts reused
    std::vector<std::string> artifacts;
};

struct PipelineRun {
    std::vector<StageResult> stages;
    std::string out_dir;
};

/// Run the requested stages in canonical order. Each stage writes its
/// artifacts plus a manifest (input hashes, config hash, seed, timestamp)
/// under <out>/manifests/. A stage whose inputs, config and seed all match the
/// recorded manifest is skipped. Missing prerequisites raise DependencyError
/// naming the stage that must run first; internal failures surface as
/// StageError.
PipelineRun run_pipeline(const PipelineConfig& config, const std::vector<Stage>& stages);

/// Content hash used in manifests (FNV-1a 64, hex).
std::string file_hash(const std::string& path);

} // namespace nml

#endif
