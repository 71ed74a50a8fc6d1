#include "scenegest/scene.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "scenegest/io.hpp"

namespace scenegest {

using nlohmann::json;
namespace fs = std::filesystem;

std::string group_kind_name(AlignmentGroup::Kind k) {
    switch (k) {
        case AlignmentGroup::Kind::Linear: return "linear";
        case AlignmentGroup::Kind::Circular: return "circular";
        default: return "scattered";
    }
}

const ObjectRecord *Scene::find(int id) const {
    for (const ObjectRecord &o : objects)
        if (o.id == id) return &o;
    return nullptr;
}

const AlignmentGroup *Scene::find_group(int id) const {
    for (const AlignmentGroup &g : groups)
        if (g.id == id) return &g;
    return nullptr;
}

Scene load_scene(const std::string &path) {
    json j = json::parse(read_file(path));
    Scene s;
    s.dir = fs::path(path).parent_path().string();
    const json &img = j.at("image");
    s.pre_width = img.at("width").get<int>();
    s.pre_height = img.at("height").get<int>();
    ResizeDims rd = resize_policy(s.pre_width, s.pre_height);
    s.width = img.at("resized_width").get<int>();
    s.height = img.at("resized_height").get<int>();
    s.scale = rd.scale;
    if (s.width != rd.width || s.height != rd.height)
        throw std::runtime_error(path + ": resized dimensions disagree with the resize policy");
    std::set<int> ids;
    for (const json &jo : j.at("objects")) {
        ObjectRecord o;
        o.id = jo.at("id").get<int>();
        if (!ids.insert(o.id).second)
            throw std::runtime_error(path + ": duplicate object id " + std::to_string(o.id));
        o.label = jo.at("label").get<std::string>();
        const json &b = jo.at("box");
        o.box_x = b.at(0).get<int>();
        o.box_y = b.at(1).get<int>();
        o.box_w = b.at(2).get<int>();
        o.box_h = b.at(3).get<int>();
        if (o.box_w <= 0 || o.box_h <= 0 || o.box_x < 0 || o.box_y < 0 ||
            o.box_x + o.box_w > s.width || o.box_y + o.box_h > s.height)
            throw std::runtime_error(path + ": object " + std::to_string(o.id) +
                                     " box out of frame");
        o.mask_path = jo.at("mask").get<std::string>();
        if (jo.contains("confidence")) o.confidence = jo.at("confidence").get<double>();
        if (o.confidence < 0.0 || o.confidence > 1.0)
            throw std::runtime_error(path + ": object " + std::to_string(o.id) +
                                     " confidence outside [0,1]");
        s.objects.push_back(std::move(o));
    }
    s.analyses.resize(s.objects.size());
    return s;
}

static json analysis_json(const ObjectAnalysis &a) {
    json j;
    j["symmetry"] = {{"angle_deg", a.symmetry.angle_deg}, {"score", a.symmetry.score}};
    json prim;
    prim["kind"] = primitive_kind_name(a.primitive.kind);
    prim["overlap"] = a.primitive.overlap;
    prim["scores"] = {{"rectangle", a.primitive.overlap_rect},
                      {"triangle", a.primitive.overlap_triangle},
                      {"circle", a.primitive.overlap_circle},
                      {"ellipse", a.primitive.overlap_ellipse}};
    j["primitive"] = prim;
    json el;
    if (std::isfinite(a.elongation.ratio))
        el["ratio"] = a.elongation.ratio;
    else
        el["ratio"] = nullptr;  // collinear pixels
    el["abnormal"] = a.elongation.abnormal;
    el["axis"] = {a.elongation.axis.x, a.elongation.axis.y};
    j["elongation"] = el;
    return j;
}

void save_scene(const Scene &scene, const std::string &path) {
    json j;
    j["image"] = {{"width", scene.pre_width},
                  {"height", scene.pre_height},
                  {"resized_width", scene.width},
                  {"resized_height", scene.height}};
    json jobjs = json::array();
    for (size_t i = 0; i < scene.objects.size(); ++i) {
        const ObjectRecord &o = scene.objects[i];
        json jo;
        jo["id"] = o.id;
        jo["label"] = o.label;
        jo["box"] = {o.box_x, o.box_y, o.box_w, o.box_h};
        jo["mask"] = o.mask_path;
        jo["confidence"] = o.confidence;
        if (o.group >= 0) jo["group"] = o.group;
        if (scene.analyses[i]) jo["analysis"] = analysis_json(*scene.analyses[i]);
        jobjs.push_back(jo);
    }
    j["objects"] = jobjs;
    json jgroups = json::array();
    for (const AlignmentGroup &g : scene.groups) {
        json jg;
        jg["id"] = g.id;
        jg["kind"] = group_kind_name(g.kind);
        jg["members"] = g.members;
        if (g.kind == AlignmentGroup::Kind::Linear) {
            jg["anchor"] = {g.anchor.x, g.anchor.y};
            jg["dir"] = {g.dir.x, g.dir.y};
        } else if (g.kind == AlignmentGroup::Kind::Circular) {
            jg["center"] = {g.center.x, g.center.y};
            jg["radius"] = g.radius;
        }
        jgroups.push_back(jg);
    }
    j["groups"] = jgroups;
    write_file_atomic(path, j.dump(2) + "\n");
}

BinaryMask load_object_mask(const Scene &scene, const ObjectRecord &obj) {
    fs::path p = fs::path(scene.dir) / obj.mask_path;
    BinaryMask m = load_pgm(p.string());
    if (m.width != obj.box_w || m.height != obj.box_h)
        throw std::runtime_error(p.string() + ": mask crop does not match the object box");
    m.box_x = static_cast<double>(obj.box_x) / scene.width;
    m.box_y = static_cast<double>(obj.box_y) / scene.height;
    m.box_w = static_cast<double>(obj.box_w) / scene.width;
    m.box_h = static_cast<double>(obj.box_h) / scene.height;
    return m;
}

ObjectAnalysis analyze_object(const BinaryMask &mask, const AnalysisParams &params) {
    ObjectAnalysis a;
    a.symmetry = symmetry_sweep(mask);
    a.primitive = fit_primitives(mask, params.primitive_threshold);
    a.elongation = elongation_ratio(mask, params.elongation_threshold);
    Contour c = extract_contour(mask);
    c = simplify_rdp(c, params.rdp_epsilon, true);
    if (static_cast<int>(c.size()) > params.ccma_window)
        c = smooth_ccma(c, params.ccma_window, true);
    a.contour = std::move(c);
    return a;
}

std::vector<LinearGroup> detect_linear_groups(const std::vector<Vec2> &centers,
                                              double tol_deg) {
    const double tol = deg2rad(tol_deg);
    std::vector<int> pool(centers.size());
    for (size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i);
    std::vector<LinearGroup> out;
    while (pool.size() >= 3) {
        LinearGroup best;
        bool have = false;
        for (int i : pool) {
            for (int jj : pool) {
                if (jj == i) continue;
                Vec2 d = centers[jj] - centers[i];
                if (norm(d) < 1e-9) continue;
                LinearGroup g;
                double dev_sum = 0.0;
                for (int k : pool) {
                    if (k == i) {
                        g.members.push_back(k);
                        continue;
                    }
                    Vec2 v = centers[k] - centers[i];
                    if (norm(v) < 1e-9) {
                        g.members.push_back(k);  // coincident center is on the line
                        continue;
                    }
                    double dev = line_angle(d, v);
                    if (dev <= tol + 1e-12) {
                        g.members.push_back(k);
                        dev_sum += dev;
                    }
                }
                if (g.members.size() < 3) continue;
                g.anchor = centers[i];
                g.dir = d * (1.0 / norm(d));
                g.mean_dev_deg = rad2deg(dev_sum / g.members.size());
                std::sort(g.members.begin(), g.members.end(), [&](int a, int b) {
                    double pa = dot(centers[a] - g.anchor, g.dir);
                    double pb = dot(centers[b] - g.anchor, g.dir);
                    return pa != pb ? pa < pb : a < b;
                });
                if (!have || g.members.size() > best.members.size() ||
                    (g.members.size() == best.members.size() &&
                     (g.mean_dev_deg < best.mean_dev_deg ||
                      (g.mean_dev_deg == best.mean_dev_deg && g.members < best.members)))) {
                    best = std::move(g);
                    have = true;
                }
            }
        }
        if (!have) break;
        for (int m : best.members)
            pool.erase(std::find(pool.begin(), pool.end(), m));
        out.push_back(std::move(best));
    }
    return out;
}

std::optional<CircleGroup> detect_circular_group(const std::vector<Vec2> &centers,
                                                 double tol) {
    if (centers.size() < 5) return std::nullopt;
    // least-squares circle: x^2 + y^2 + D x + E y + F = 0
    double a[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double b[3] = {0, 0, 0};
    for (const Vec2 &p : centers) {
        double z = p.x * p.x + p.y * p.y;
        double row[3] = {p.x, p.y, 1.0};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) a[r][c] += row[r] * row[c];
            b[r] -= z * row[r];
        }
    }
    // gaussian elimination with partial pivoting
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[idx[r]][col]) > std::abs(a[idx[piv]][col])) piv = r;
        std::swap(idx[col], idx[piv]);
        if (std::abs(a[idx[col]][col]) < 1e-9) return std::nullopt;
        for (int r = col + 1; r < 3; ++r) {
            double f = a[idx[r]][col] / a[idx[col]][col];
            for (int c = col; c < 3; ++c) a[idx[r]][c] -= f * a[idx[col]][c];
            b[idx[r]] -= f * b[idx[col]];
        }
    }
    double sol[3];
    for (int col = 2; col >= 0; --col) {
        double v = b[idx[col]];
        for (int c = col + 1; c < 3; ++c) v -= a[idx[col]][c] * sol[c];
        sol[col] = v / a[idx[col]][col];
    }
    CircleGroup g;
    g.center = {-sol[0] / 2.0, -sol[1] / 2.0};
    double r2 = dot(g.center, g.center) - sol[2];
    if (r2 <= 0.0) return std::nullopt;
    g.radius = std::sqrt(r2);
    for (const Vec2 &p : centers)
        if (std::abs(dist(p, g.center) - g.radius) > tol * g.radius) return std::nullopt;
    return g;
}

bool classify_scattered(int remaining, int threshold) { return remaining > threshold; }

void analyze_scene(Scene &scene, const AnalysisParams &params) {
    scene.groups.clear();
    scene.analyses.assign(scene.objects.size(), std::nullopt);
    for (size_t i = 0; i < scene.objects.size(); ++i) {
        scene.objects[i].group = -1;
        BinaryMask m = load_object_mask(scene, scene.objects[i]);
        scene.analyses[i] = analyze_object(m, params);
    }

    std::map<std::string, std::vector<int>> by_label;  // label -> object indices
    for (size_t i = 0; i < scene.objects.size(); ++i)
        by_label[scene.objects[i].label].push_back(static_cast<int>(i));

    int next_group = 0;
    std::set<int> grouped;  // object indices already claimed
    for (auto &[label, idxs] : by_label) {
        std::vector<Vec2> centers;
        for (int i : idxs) centers.push_back(scene.objects[i].center());
        std::vector<LinearGroup> lines = detect_linear_groups(centers, params.linear_tol_deg);
        std::vector<int> leftover = idxs;
        for (const LinearGroup &lg : lines) {
            AlignmentGroup g;
            g.id = next_group++;
            g.kind = AlignmentGroup::Kind::Linear;
            g.anchor = lg.anchor;
            g.dir = lg.dir;
            for (int local : lg.members) {
                int oi = idxs[local];
                g.members.push_back(scene.objects[oi].id);
                scene.objects[oi].group = g.id;
                grouped.insert(oi);
                leftover.erase(std::find(leftover.begin(), leftover.end(), oi));
            }
            scene.groups.push_back(std::move(g));
        }
        while (leftover.size() >= 5) {
            std::vector<Vec2> rem;
            for (int i : leftover) rem.push_back(scene.objects[i].center());
            std::optional<CircleGroup> cg = detect_circular_group(rem, params.circular_tol);
            if (!cg) break;
            AlignmentGroup g;
            g.id = next_group++;
            g.kind = AlignmentGroup::Kind::Circular;
            g.center = cg->center;
            g.radius = cg->radius;
            for (int oi : leftover) {
                g.members.push_back(scene.objects[oi].id);
                scene.objects[oi].group = g.id;
                grouped.insert(oi);
            }
            leftover.clear();
            scene.groups.push_back(std::move(g));
        }
    }

    std::vector<int> ungrouped;
    for (size_t i = 0; i < scene.objects.size(); ++i)
        if (!grouped.count(static_cast<int>(i))) ungrouped.push_back(static_cast<int>(i));
    if (classify_scattered(static_cast<int>(ungrouped.size()), params.scattered_threshold)) {
        AlignmentGroup g;
        g.id = next_group++;
        g.kind = AlignmentGroup::Kind::Scattered;
        for (int oi : ungrouped) {
            g.members.push_back(scene.objects[oi].id);
            scene.objects[oi].group = g.id;
        }
        scene.groups.push_back(std::move(g));
    }
}

}  // namespace scenegest
