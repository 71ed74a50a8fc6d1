#include "scenegest/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>

#include "json.hpp"
#include "scenegest/config.hpp"
#include "scenegest/io.hpp"
#include "scenegest/realize.hpp"

namespace scenegest {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Collects output files under temporary names and renames them all at the
/// end, so an error partway through leaves every destination untouched.
class OutputStager {
public:
    std::string stage(const std::string &final_path) {
        entries_.push_back({final_path + ".stage", final_path});
        return entries_.back().tmp;
    }
    void commit() {
        for (const auto &e : entries_) {
            std::error_code ec;
            fs::rename(e.tmp, e.final_path, ec);
            if (ec)
                throw PipelineError(ErrorCategory::Output,
                                    "cannot move output into place: " + e.final_path + ": " +
                                        ec.message());
        }
        entries_.clear();
    }
    ~OutputStager() {
        for (const auto &e : entries_) {
            std::error_code ec;
            fs::remove(e.tmp, ec);
        }
    }

private:
    struct Entry {
        std::string tmp, final_path;
    };
    std::vector<Entry> entries_;
};

json phase_json(const PhaseCounts &ph) {
    return {{"prep", ph.prep}, {"stroke", ph.stroke}, {"hold", ph.hold},
            {"retract", ph.retract}};
}

json scene_report(const Scene &scene) {
    json objects = json::array();
    for (size_t i = 0; i < scene.objects.size(); ++i) {
        const ObjectRecord &o = scene.objects[i];
        json jo{{"id", o.id}, {"label", o.label}, {"group", o.group}};
        if (i < scene.analyses.size() && scene.analyses[i]) {
            const ObjectAnalysis &a = *scene.analyses[i];
            jo["symmetry"] = {{"angle_deg", a.symmetry.angle_deg}, {"score", a.symmetry.score}};
            jo["primitive"] = {{"kind", primitive_kind_name(a.primitive.kind)},
                               {"overlap", a.primitive.overlap}};
            jo["elongation"] = {{"ratio", a.elongation.ratio},
                                {"abnormal", a.elongation.abnormal}};
        }
        objects.push_back(std::move(jo));
    }
    json groups = json::array();
    for (const AlignmentGroup &g : scene.groups)
        groups.push_back(
            {{"id", g.id}, {"kind", group_kind_name(g.kind)}, {"members", g.members}});
    return {{"width", scene.width},
            {"height", scene.height},
            {"scale", scene.scale},
            {"objects", std::move(objects)},
            {"groups", std::move(groups)}};
}

json phrase_report(const std::vector<PhraseAnnotation> &annotations) {
    json out = json::array();
    for (const PhraseAnnotation &a : annotations) {
        out.push_back({{"text", a.text},
                       {"first_word", a.span.first},
                       {"last_word", a.span.last},
                       {"focus_word", a.span.focus},
                       {"focus_lemma", a.span.focus_lemma},
                       {"size_class", a.size_class},
                       {"position_class", a.position_class},
                       {"bonus", a.bonus},
                       {"relevance", a.relevance},
                       {"position", a.position},
                       {"importance", a.importance},
                       {"gated", a.gated},
                       {"object_id", a.object_id},
                       {"group_id", a.group_id}});
    }
    return out;
}

json plan_report(const std::vector<GesturePlan> &plans, const Overlay &overlay) {
    std::map<int, const PlanDiagnostics *> diag;
    for (const PlanDiagnostics &d : overlay.plans) diag[d.plan_index] = &d;
    json out = json::array();
    for (size_t i = 0; i < plans.size(); ++i) {
        const GesturePlan &p = plans[i];
        json jp{{"index", static_cast<int>(i)},
                {"category", plan_category_name(p.category)},
                {"source", plan_source_name(p.source)},
                {"hands", hand_set_name(p.hands)},
                {"shape", hand_shape_name(p.shape)},
                {"text", p.text},
                {"priority", p.priority},
                {"importance", p.importance},
                {"object_id", p.object_id},
                {"group_id", p.group_id},
                {"scheduled", p.scheduled},
                {"warnings", p.warnings}};
        if (p.scheduled) {
            jp["start_frame"] = p.start_frame;
            jp["phases"] = phase_json(p.phases);
        }
        auto it = diag.find(static_cast<int>(i));
        if (it != diag.end()) {
            const PlanDiagnostics &d = *it->second;
            jp["solved"] = d.solved;
            jp["skipped"] = d.skipped;
            if (!d.skip_reason.empty()) jp["skip_reason"] = d.skip_reason;
            jp["final_start_frame"] = d.start_frame;
            jp["final_frames"] = d.frames;
            jp["ik"] = {{"iterations", d.iterations},
                        {"converged", d.converged},
                        {"cost", d.cost_total},
                        {"mean_residual", d.mean_residual},
                        {"max_residual", d.max_residual},
                        {"hold_max_residual", d.hold_max_residual}};
            jp["timing"] = {{"original_frames", d.timing.original_frames},
                            {"chosen_frames", d.timing.chosen_frames},
                            {"score", d.timing.fell_back ? json() : json(d.timing.score)},
                            {"candidates", d.timing.candidates},
                            {"fell_back", d.timing.fell_back}};
        }
        out.push_back(std::move(jp));
    }
    return out;
}

}  // namespace

void run_pipeline(const PipelineOptions &options) {
    std::ostream &log = std::cerr;
    auto note = [&](const std::string &msg) {
        if (options.verbose) log << "[scenegest] " << msg << "\n";
    };

    if (options.scene_path.empty())
        throw PipelineError(ErrorCategory::Usage, "a scene file is required");
    if (!options.analyze_only) {
        if (options.transcript_path.empty())
            throw PipelineError(ErrorCategory::Usage, "a transcript file is required");
        if (options.beat_path.empty())
            throw PipelineError(ErrorCategory::Usage, "a beat clip is required");
        if (options.out_path.empty())
            throw PipelineError(ErrorCategory::Usage, "an output clip path is required");
    }

    // Configuration: flag, then environment, then defaults.
    PipelineConfig config;
    std::string config_path = options.config_path;
    if (config_path.empty())
        if (const char *env = std::getenv("SCENEGEST_CONFIG")) config_path = env;
    if (!config_path.empty()) {
        note("config: " + config_path);
        try {
            config = load_config(config_path);
        } catch (const std::exception &e) {
            throw PipelineError(ErrorCategory::Input, e.what());
        }
    } else {
        note("config: built-in defaults");
        config = default_config();
    }

    Scene scene;
    try {
        scene = load_scene(options.scene_path);
        note("scene: " + std::to_string(scene.objects.size()) + " objects");
        analyze_scene(scene, config.analysis);
    } catch (const std::exception &e) {
        throw PipelineError(ErrorCategory::Input, e.what());
    }
    note("scene analysis done, " + std::to_string(scene.groups.size()) + " groups");

    json report;
    report["scene"] = scene_report(scene);

    std::string report_path = options.report_path;
    if (report_path.empty())
        report_path =
            (options.out_path.empty() ? options.scene_path : options.out_path) + ".report.json";

    if (options.analyze_only) {
        OutputStager stager;
        try {
            save_scene(scene, stager.stage(options.scene_path));
            write_file_atomic(stager.stage(report_path), report.dump(2) + "\n");
        } catch (const PipelineError &) {
            throw;
        } catch (const std::exception &e) {
            throw PipelineError(ErrorCategory::Output, e.what());
        }
        stager.commit();
        note("analysis written");
        return;
    }

    KinematicChain chain;
    TimedTranscript transcript;
    MotionClip beat;
    SpeechActivity speech;
    try {
        if (config.chain_path.empty())
            throw std::runtime_error("config does not name a chain file");
        chain = load_chain(config.chain_path);
        transcript = load_transcript(options.transcript_path);
        beat = load_clip(options.beat_path);
        if (beat.chain_id != chain.id)
            throw std::runtime_error("beat clip was recorded for chain \"" + beat.chain_id +
                                     "\", configured chain is \"" + chain.id + "\"");
        if (beat.fps != config.fps)
            throw std::runtime_error("beat clip runs at " + format_double(beat.fps) +
                                     " fps, config expects " + format_double(config.fps));
        for (const Pose &q : beat.frames)
            if (q.size() != chain.dof_count())
                throw std::runtime_error("beat clip pose size does not match the chain");
        if (beat.frame_count() == 0) throw std::runtime_error("beat clip has no frames");
        if (!options.speech_path.empty()) {
            speech = load_speech(options.speech_path);
        } else {
            speech.intervals.emplace_back(0.0, beat.duration());
            note("no speech file, assuming continuous speech");
        }
    } catch (const std::exception &e) {
        throw PipelineError(ErrorCategory::Input, e.what());
    }
    note("chain: " + chain.id + ", " + std::to_string(chain.dof_count()) + " joints");
    note("beat: " + std::to_string(beat.frame_count()) + " frames at " +
         format_double(beat.fps) + " fps");

    MotionClip final_clip;
    std::vector<PhraseAnnotation> annotations;
    std::vector<GesturePlan> plans;
    Overlay overlay;
    try {
        // Strip the beat down to the retained joints.
        std::vector<std::string> retained;
        for (const Bone &b : chain.bones) {
            bool zeroed = false;
            for (const std::string &z : config.zeroed_bones)
                if (b.name == z) zeroed = true;
            if (!zeroed) retained.push_back(b.name);
        }
        MotionClip beat_retained = beat;
        for (Pose &q : beat_retained.frames)
            q = zero_lower_body(chain, q, retained).pose;

        Pose idle = build_idle_pose(config, chain);

        std::unique_ptr<EmbeddingProvider> provider;
        if (!config.embedding_path.empty())
            provider = std::make_unique<TableEmbedding>(config.embedding_path);
        else
            provider = std::make_unique<HashEmbedding>(config.embedding_dim);

        std::vector<std::string> labels;
        for (const ObjectRecord &o : scene.objects) labels.push_back(o.label);
        annotations = annotate_transcript(transcript, *provider, default_dictionaries(), labels);
        bind_annotations(annotations, scene);
        note(std::to_string(annotations.size()) + " phrases scored");

        for (const PhraseAnnotation &a : annotations) {
            std::vector<GesturePlan> expanded =
                plan_from_annotation(a, scene, chain, config.realize);
            for (GesturePlan &p : expanded) plans.push_back(std::move(p));
        }
        schedule(plans, beat.fps, beat.frame_count(), config.realize);
        int scheduled = 0;
        for (const GesturePlan &p : plans)
            if (p.scheduled) ++scheduled;
        note(std::to_string(plans.size()) + " plans, " + std::to_string(scheduled) +
             " scheduled");

        std::vector<double> weights =
            blend_schedule(speech, beat.frame_count(), beat.fps, config.realize.grace_seconds,
                           config.realize.fade_seconds);
        MotionClip base =
            composite_base(beat_retained, idle, weights, config.realize.beat_share);

        overlay = solve_plans(plans, base, beat_retained, chain, config.realize);
        for (const PlanDiagnostics &d : overlay.plans)
            if (d.skipped)
                log << "[scenegest] warning: plan " << d.plan_index << " skipped: "
                    << d.skip_reason << "\n";
        final_clip = apply_overlay(base, overlay);
    } catch (const std::exception &e) {
        throw PipelineError(ErrorCategory::Runtime, e.what());
    }

    report["phrases"] = phrase_report(annotations);
    report["plans"] = plan_report(plans, overlay);
    report["clip"] = {{"frames", final_clip.frame_count()},
                      {"fps", final_clip.fps},
                      {"chain", final_clip.chain_id}};

    OutputStager stager;
    try {
        save_clip(final_clip, stager.stage(options.out_path));
        save_scene(scene, stager.stage(options.scene_path));
        write_file_atomic(stager.stage(report_path), report.dump(2) + "\n");
    } catch (const std::exception &e) {
        throw PipelineError(ErrorCategory::Output, e.what());
    }
    stager.commit();
    note("wrote " + options.out_path);
}

}  // namespace scenegest
