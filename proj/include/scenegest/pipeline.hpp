#pragma once

#include <stdexcept>
#include <string>

namespace scenegest {

/// Failure classes, doubling as process exit codes.
enum class ErrorCategory { Usage = 1, Input = 2, Runtime = 3, Output = 4 };

class PipelineError : public std::runtime_error {
public:
    PipelineError(ErrorCategory c, const std::string &msg)
        : std::runtime_error(msg), category(c) {}
    ErrorCategory category;
};

struct PipelineOptions {
    std::string scene_path;
    std::string transcript_path;
    std::string beat_path;
    std::string speech_path;  // empty: speech treated as active for the whole clip
    std::string config_path;  // empty: SCENEGEST_CONFIG env var, then built-in defaults
    std::string out_path;
    std::string report_path;  // empty: derived from the clip (or scene) path
    bool analyze_only = false;
    bool verbose = false;
};

/// Runs the full synthesis: scene analysis, phrase scoring, gesture planning,
/// solving and compositing. Outputs (animation clip, augmented scene, report)
/// are staged and renamed together, so a failure never leaves a partial set.
/// With analyze_only only the scene analysis runs and only the augmented
/// scene and report are written. Throws PipelineError on any failure.
void run_pipeline(const PipelineOptions &options);

}  // namespace scenegest
