#include <iostream>

#include "CLI11.hpp"
#include "scenegest/pipeline.hpp"

int main(int argc, char **argv) {
    CLI::App app{"Synthesizes a co-speech gesture animation from scene artifacts and a "
                 "word-timed transcript"};
    scenegest::PipelineOptions opt;
    app.add_option("--scene", opt.scene_path,
                   "Scene JSON with object boxes, labels and mask files")
        ->required();
    app.add_option("--transcript", opt.transcript_path, "Word-timed transcript JSON");
    app.add_option("--beat", opt.beat_path, "Beat animation clip");
    app.add_option("--speech", opt.speech_path, "Speech activity intervals JSON");
    app.add_option("--config", opt.config_path,
                   "Pipeline configuration JSON (default: the SCENEGEST_CONFIG "
                   "environment variable, then built-in defaults)");
    app.add_option("--out", opt.out_path, "Output animation clip path");
    app.add_option("--report", opt.report_path,
                   "Report JSON path (default: next to the output clip)");
    app.add_flag("--analyze-only", opt.analyze_only,
                 "Stop after scene analysis; write only the augmented scene and report");
    app.add_flag("--verbose", opt.verbose, "Trace progress to stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return static_cast<int>(scenegest::ErrorCategory::Usage);
    }

    try {
        scenegest::run_pipeline(opt);
    } catch (const scenegest::PipelineError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.category);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(scenegest::ErrorCategory::Runtime);
    }
    return 0;
}
