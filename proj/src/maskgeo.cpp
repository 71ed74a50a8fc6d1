#include "scenegest/maskgeo.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "scenegest/io.hpp"

namespace scenegest {

long BinaryMask::count() const {
    long n = 0;
    for (uint8_t v : data) n += v != 0;
    return n;
}

/*---- PGM I/O ----*/

static int pgm_token(std::istringstream &in) {
    // skips whitespace and '#' comments between header fields
    while (true) {
        int ch = in.peek();
        if (ch == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(ch)) {
            in.get();
        } else {
            break;
        }
    }
    int v = -1;
    in >> v;
    return v;
}

BinaryMask load_pgm(const std::string &path) {
    std::string raw = read_file(path);
    std::istringstream in(raw);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error(path + ": not a binary PGM (P5) file");
    BinaryMask m;
    m.width = pgm_token(in);
    m.height = pgm_token(in);
    int maxval = pgm_token(in);
    if (m.width <= 0 || m.height <= 0 || maxval <= 0 || maxval > 255)
        throw std::runtime_error(path + ": malformed PGM header");
    in.get();  // single whitespace before raster
    size_t need = static_cast<size_t>(m.width) * m.height;
    size_t offset = static_cast<size_t>(in.tellg());
    if (raw.size() - offset < need) throw std::runtime_error(path + ": truncated PGM raster");
    m.data.assign(raw.begin() + offset, raw.begin() + offset + need);
    if (m.count() == 0) throw std::runtime_error(path + ": mask has no foreground pixels");
    return m;
}

void save_pgm(const BinaryMask &mask, const std::string &path) {
    std::string out = "P5\n" + std::to_string(mask.width) + " " +
                      std::to_string(mask.height) + "\n255\n";
    out.append(mask.data.begin(), mask.data.end());
    write_file_atomic(path, out);
}

ResizeDims resize_policy(int width, int height, int longest) {
    if (width <= 0 || height <= 0 || longest <= 0)
        throw std::invalid_argument("resize_policy: non-positive dimensions");
    ResizeDims r;
    r.scale = static_cast<double>(longest) / std::max(width, height);
    if (width >= height) {
        r.width = longest;
        r.height = std::max(1, static_cast<int>(std::lround(height * r.scale)));
    } else {
        r.height = longest;
        r.width = std::max(1, static_cast<int>(std::lround(width * r.scale)));
    }
    return r;
}

/*---- contour extraction ----*/

double signed_area(const Contour &c) {
    double s = 0.0;
    for (size_t i = 0; i < c.size(); ++i) {
        const Vec2 &a = c[i];
        const Vec2 &b = c[(i + 1) % c.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

Vec2 centroid(const std::vector<Vec2> &pts) {
    Vec2 c;
    for (const Vec2 &p : pts) c += p;
    return pts.empty() ? c : c / static_cast<double>(pts.size());
}

Contour extract_contour(const BinaryMask &mask) {
    const int w = mask.width, h = mask.height;
    // label 4-connected components, keep the largest (first found wins ties)
    std::vector<int> label(static_cast<size_t>(w) * h, 0);
    int best_label = 0;
    long best_count = 0;
    int next = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y) || label[static_cast<size_t>(y) * w + x]) continue;
            ++next;
            long cnt = 0;
            std::deque<std::pair<int, int>> q{{x, y}};
            label[static_cast<size_t>(y) * w + x] = next;
            while (!q.empty()) {
                auto [cx, cy] = q.front();
                q.pop_front();
                ++cnt;
                const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    int nx = cx + dx[k], ny = cy + dy[k];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    size_t idx = static_cast<size_t>(ny) * w + nx;
                    if (mask.at(nx, ny) && !label[idx]) {
                        label[idx] = next;
                        q.emplace_back(nx, ny);
                    }
                }
            }
            if (cnt > best_count) {
                best_count = cnt;
                best_label = next;
            }
        }
    }
    if (best_label == 0) throw std::runtime_error("extract_contour: empty mask");

    auto fg = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < w && y < h &&
               label[static_cast<size_t>(y) * w + x] == best_label;
    };
    int sx = -1, sy = -1;
    for (int y = 0; y < h && sx < 0; ++y)
        for (int x = 0; x < w; ++x)
            if (fg(x, y)) {
                sx = x;
                sy = y;
                break;
            }

    // Moore-neighbor tracing, clockwise scan in image coordinates, with
    // Jacob's stopping criterion (re-entering the start from the same
    // backtrack cell).
    static const int ddx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
    static const int ddy[8] = {0, -1, -1, -1, 0, 1, 1, 1};
    auto dir_index = [&](int dx, int dy) {
        for (int i = 0; i < 8; ++i)
            if (ddx[i] == dx && ddy[i] == dy) return i;
        throw std::logic_error("bad backtrack offset");
    };
    std::vector<std::pair<int, int>> walk{{sx, sy}};
    int cx = sx, cy = sy;
    int bx = sx - 1, by = sy;
    const long cap = 4 * best_count + 8;
    for (long iter = 0; iter < cap; ++iter) {
        int i0 = dir_index(bx - cx, by - cy);
        bool moved = false;
        for (int k = 1; k <= 8; ++k) {
            int i = (i0 + k) & 7;
            int nx = cx + ddx[i], ny = cy + ddy[i];
            if (fg(nx, ny)) {
                int pb = (i0 + k - 1) & 7;
                bx = cx + ddx[pb];
                by = cy + ddy[pb];
                cx = nx;
                cy = ny;
                moved = true;
                break;
            }
        }
        if (!moved) break;  // isolated pixel
        if (cx == sx && cy == sy && bx == sx - 1 && by == sy) break;
        walk.emplace_back(cx, cy);
    }

    Contour c;
    c.reserve(walk.size());
    for (auto [x, y] : walk) {
        Vec2 p{static_cast<double>(x), static_cast<double>(h - 1 - y)};
        if (!c.empty() && c.back() == p) continue;
        c.push_back(p);
    }
    while (c.size() > 1 && c.front() == c.back()) c.pop_back();
    if (c.size() < 3)
        throw std::runtime_error("extract_contour: boundary has fewer than 3 points");
    if (signed_area(c) < 0.0) std::reverse(c.begin() + 1, c.end());
    return c;
}

/*---- simplification ----*/

static double line_point_dist(const Vec2 &a, const Vec2 &b, const Vec2 &p) {
    Vec2 ab = b - a;
    double len = norm(ab);
    if (len < 1e-12) return dist(a, p);
    return std::abs(cross(ab, p - a)) / len;
}

// Marks kept indices along one open run. Recurses while the farthest point is
// at least epsilon away; with epsilon 0 every point survives.
static void rdp_run(const std::vector<Vec2> &pts, const std::vector<int> &run, int lo,
                    int hi, double epsilon, std::vector<char> &keep) {
    if (hi - lo < 2) return;
    double dmax = -1.0;
    int imax = -1;
    for (int i = lo + 1; i < hi; ++i) {
        double d = line_point_dist(pts[run[lo]], pts[run[hi]], pts[run[i]]);
        if (d > dmax) {
            dmax = d;
            imax = i;
        }
    }
    if (dmax >= epsilon && dmax > 0.0) {
        keep[run[imax]] = 1;
        rdp_run(pts, run, lo, imax, epsilon, keep);
        rdp_run(pts, run, imax, hi, epsilon, keep);
    } else if (epsilon <= 0.0) {
        for (int i = lo + 1; i < hi; ++i) keep[run[i]] = 1;
    }
}

static std::vector<Vec2> rdp_once(const std::vector<Vec2> &pts, double epsilon, bool closed) {
    const int n = static_cast<int>(pts.size());
    std::vector<char> keep(n, 0);
    if (closed) {
        // anchor at the point farthest from the centroid, then the point
        // farthest from that anchor; both sit on salient features
        Vec2 c = centroid(pts);
        int a1 = 0;
        double dbest = -1.0;
        for (int i = 0; i < n; ++i) {
            double d = dist(pts[i], c);
            if (d > dbest) {
                dbest = d;
                a1 = i;
            }
        }
        int a2 = a1;
        dbest = -1.0;
        for (int i = 0; i < n; ++i) {
            double d = dist(pts[i], pts[a1]);
            if (d > dbest) {
                dbest = d;
                a2 = i;
            }
        }
        keep[a1] = keep[a2] = 1;
        if (a1 != a2) {
            std::vector<int> run1, run2;
            for (int i = a1;; i = (i + 1) % n) {
                run1.push_back(i);
                if (i == a2) break;
            }
            for (int i = a2;; i = (i + 1) % n) {
                run2.push_back(i);
                if (i == a1) break;
            }
            rdp_run(pts, run1, 0, static_cast<int>(run1.size()) - 1, epsilon, keep);
            rdp_run(pts, run2, 0, static_cast<int>(run2.size()) - 1, epsilon, keep);
        }
    } else {
        keep[0] = keep[n - 1] = 1;
        std::vector<int> run(n);
        for (int i = 0; i < n; ++i) run[i] = i;
        rdp_run(pts, run, 0, n - 1, epsilon, keep);
    }
    std::vector<Vec2> out;
    for (int i = 0; i < n; ++i)
        if (keep[i]) out.push_back(pts[i]);
    return out;
}

std::vector<Vec2> simplify_rdp(const std::vector<Vec2> &points, double epsilon, bool closed) {
    if (epsilon < 0.0) throw std::invalid_argument("simplify_rdp: negative epsilon");
    if (points.size() < (closed ? 4u : 3u) || epsilon == 0.0) return points;
    std::vector<Vec2> cur = points;
    // iterate to a fixpoint so simplifying a second time changes nothing
    while (true) {
        std::vector<Vec2> next = rdp_once(cur, epsilon, closed);
        if (closed && next.size() < 3) {
            // never drop a closed contour below a triangle
            double dmax = -1.0;
            Vec2 extra;
            for (const Vec2 &p : cur) {
                bool used = false;
                for (const Vec2 &q : next) used = used || (q == p);
                if (used) continue;
                double d = next.size() == 2 ? line_point_dist(next[0], next[1], p) : 0.0;
                if (d > dmax) {
                    dmax = d;
                    extra = p;
                }
            }
            for (size_t i = 0; i < cur.size(); ++i)
                if (cur[i] == extra) {
                    std::vector<Vec2> fixed;
                    for (const Vec2 &p : cur) {
                        bool take = p == extra;
                        for (const Vec2 &q : next) take = take || (q == p);
                        if (take) fixed.push_back(p);
                    }
                    return fixed;
                }
            return cur;
        }
        if (next.size() == cur.size()) return next;
        cur = std::move(next);
    }
}

/*---- smoothing ----*/

std::vector<Vec2> smooth_ccma(const std::vector<Vec2> &points, int window, bool closed) {
    const int n = static_cast<int>(points.size());
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("smooth_ccma: window must be odd and >= 3");
    if (n <= window)
        throw std::invalid_argument("smooth_ccma: need more points than the window");
    const int m = window / 2;

    std::vector<Vec2> avg(n);
    std::vector<int> width(n, window);
    for (int i = 0; i < n; ++i) {
        int k = closed ? m : std::min({m, i, n - 1 - i});
        Vec2 s;
        for (int j = -k; j <= k; ++j) s += points[(i + j + n) % n];
        avg[i] = s / static_cast<double>(2 * k + 1);
        width[i] = 2 * k + 1;
    }

    std::vector<Vec2> out = avg;
    for (int i = 0; i < n; ++i) {
        if (!closed && (i == 0 || i == n - 1)) {
            out[i] = points[i];  // endpoints pinned in open mode
            continue;
        }
        const Vec2 &a = avg[(i - 1 + n) % n];
        const Vec2 &b = avg[i];
        const Vec2 &c = avg[(i + 1) % n];
        double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
        double scale = std::max({norm(b - a), norm(c - b), 1e-9});
        if (std::abs(d) < 1e-12 * scale * scale) continue;  // locally straight
        double a2 = dot(a, a), b2 = dot(b, b), c2 = dot(c, c);
        Vec2 center{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
                    (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
        Vec2 ra = a - center, rc = c - center;
        double step = 0.5 * std::abs(std::atan2(cross(ra, rc), dot(ra, rc)));
        if (step < 1e-9) continue;
        int w = width[i];
        // mean of w points spaced `step` apart on a circle shrinks its radius
        // by this factor; dividing restores the original radius
        double shrink = std::sin(w * step / 2.0) / (w * std::sin(step / 2.0));
        shrink = clamp(shrink, 0.25, 1.0);
        out[i] = center + (b - center) / shrink;
    }
    return out;
}

/*---- symmetry sweep ----*/

SymmetryResult symmetry_sweep(const BinaryMask &mask) {
    int x0 = mask.width, x1 = -1, y0 = mask.height, y1 = -1;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
    if (x1 < 0) throw std::runtime_error("symmetry_sweep: empty mask");
    const int cw = x1 - x0 + 1, ch = y1 - y0 + 1;
    std::vector<uint8_t> crop(static_cast<size_t>(cw) * ch, 0);
    for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x)
            crop[static_cast<size_t>(y) * cw + x] = mask.at(x0 + x, y0 + y);

    int D = static_cast<int>(std::ceil(std::hypot(cw, ch))) | 1;
    const double co = (D - 1) / 2.0;
    const double cix = (cw - 1) / 2.0, ciy = (ch - 1) / 2.0;
    const int mid = (D - 1) / 2;

    SymmetryResult best{0.0, -1.0};
    std::vector<uint8_t> rot(static_cast<size_t>(D) * D);
    for (int ang = -90; ang <= 90; ++ang) {
        double rad = deg2rad(ang);
        double cs = std::cos(-rad), sn = std::sin(-rad);
        std::fill(rot.begin(), rot.end(), 0);
        for (int y = 0; y < D; ++y) {
            double dy = y - co;
            for (int x = 0; x < D; ++x) {
                double dx = x - co;
                double sx2 = cs * dx - sn * dy + cix;
                double sy2 = sn * dx + cs * dy + ciy;
                int xi = static_cast<int>(std::lround(sx2));
                int yi = static_cast<int>(std::lround(sy2));
                if (xi >= 0 && yi >= 0 && xi < cw && yi < ch &&
                    crop[static_cast<size_t>(yi) * cw + xi])
                    rot[static_cast<size_t>(y) * D + x] = 1;
            }
        }
        long left = 0, right = 0, inter = 0;
        for (int y = 0; y < D; ++y) {
            const uint8_t *row = &rot[static_cast<size_t>(y) * D];
            for (int k = 1; k <= mid; ++k) {
                uint8_t l = row[mid - k], r = row[mid + k];
                left += l;
                right += r;
                inter += l & r;
            }
        }
        long denom = std::max(left, right);
        double score = denom == 0 ? 1.0 : static_cast<double>(inter) / denom;
        if (score > best.score ||
            (score == best.score && std::abs(ang) < std::abs(best.angle_deg))) {
            best.score = score;
            best.angle_deg = ang;
        }
    }
    return best;
}

/*---- primitive fitting ----*/

std::string primitive_kind_name(PrimitiveKind k) {
    switch (k) {
        case PrimitiveKind::Rectangle: return "rectangle";
        case PrimitiveKind::Triangle: return "triangle";
        case PrimitiveKind::Circle: return "circle";
        case PrimitiveKind::Ellipse: return "ellipse";
        default: return "none";
    }
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2 &a, const Vec2 &b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const int n = static_cast<int>(pts.size());
    if (n < 3) return pts;
    std::vector<Vec2> h(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    int lower = k + 1;
    for (int i = n - 2; i >= 0; --i) {
        while (k >= lower && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

std::vector<Vec2> min_area_rect(const std::vector<Vec2> &hull) {
    if (hull.empty()) return {};
    if (hull.size() < 3) {
        Vec2 a = hull.front(), b = hull.back();
        return {a, b, b, a};
    }
    double best_area = std::numeric_limits<double>::infinity();
    std::vector<Vec2> best;
    for (size_t i = 0; i < hull.size(); ++i) {
        Vec2 e = hull[(i + 1) % hull.size()] - hull[i];
        double len = norm(e);
        if (len < 1e-12) continue;
        Vec2 u = e / len, v{-u.y, u.x};
        double lo_u = 1e300, hi_u = -1e300, lo_v = 1e300, hi_v = -1e300;
        for (const Vec2 &p : hull) {
            double pu = dot(u, p), pv = dot(v, p);
            lo_u = std::min(lo_u, pu);
            hi_u = std::max(hi_u, pu);
            lo_v = std::min(lo_v, pv);
            hi_v = std::max(hi_v, pv);
        }
        double area = (hi_u - lo_u) * (hi_v - lo_v);
        if (area < best_area) {
            best_area = area;
            best = {u * lo_u + v * lo_v, u * hi_u + v * lo_v, u * hi_u + v * hi_v,
                    u * lo_u + v * hi_v};
        }
    }
    return best;
}

static Circle circle_two(const Vec2 &a, const Vec2 &b) {
    return {(a + b) / 2.0, dist(a, b) / 2.0};
}

static Circle circle_three(const Vec2 &a, const Vec2 &b, const Vec2 &c) {
    double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if (std::abs(d) < 1e-12) {
        // collinear: widest pair wins
        Circle r = circle_two(a, b);
        Circle s = circle_two(a, c);
        Circle t = circle_two(b, c);
        if (s.radius > r.radius) r = s;
        if (t.radius > r.radius) r = t;
        return r;
    }
    double a2 = dot(a, a), b2 = dot(b, b), c2 = dot(c, c);
    Vec2 ctr{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
             (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
    return {ctr, dist(ctr, a)};
}

static bool circle_has(const Circle &c, const Vec2 &p) {
    return dist(c.center, p) <= c.radius + 1e-9 * (1.0 + c.radius);
}

Circle min_enclosing_circle(const std::vector<Vec2> &pts) {
    if (pts.empty()) return {};
    if (pts.size() == 1) return {pts[0], 0.0};
    Circle c = circle_two(pts[0], pts[1]);
    for (size_t i = 2; i < pts.size(); ++i) {
        if (circle_has(c, pts[i])) continue;
        c = circle_two(pts[0], pts[i]);
        for (size_t j = 1; j < i; ++j) {
            if (circle_has(c, pts[j])) continue;
            c = circle_two(pts[j], pts[i]);
            for (size_t k = 0; k < j; ++k) {
                if (!circle_has(c, pts[k])) c = circle_three(pts[k], pts[j], pts[i]);
            }
        }
    }
    return c;
}

std::vector<Vec2> enclosing_triangle(const std::vector<Vec2> &hull) {
    if (hull.size() < 3) return {};
    // search the largest inscribed triangle over (a subsample of) the hull,
    // then push each side out to the hull's support line
    std::vector<Vec2> cand;
    const size_t cap = 100;
    if (hull.size() <= cap) {
        cand = hull;
    } else {
        for (size_t i = 0; i < cap; ++i) cand.push_back(hull[i * hull.size() / cap]);
    }
    double best = -1.0;
    Vec2 A, B, C;
    for (size_t i = 0; i < cand.size(); ++i)
        for (size_t j = i + 1; j < cand.size(); ++j)
            for (size_t k = j + 1; k < cand.size(); ++k) {
                double ar = cross(cand[j] - cand[i], cand[k] - cand[i]);
                if (std::abs(ar) > best) {
                    best = std::abs(ar);
                    A = cand[i];
                    B = cand[j];
                    C = cand[k];
                }
            }
    if (best < 1e-12) return {};
    if (cross(B - A, C - A) < 0) std::swap(B, C);  // make it CCW

    struct Line {
        Vec2 p, dir;
    };
    Vec2 corners[3] = {A, B, C};
    Line lines[3];
    for (int s = 0; s < 3; ++s) {
        Vec2 p = corners[s], q = corners[(s + 1) % 3];
        Vec2 dir = q - p;
        Vec2 n{dir.y, -dir.x};  // outward normal of a CCW side
        n = n / norm(n);
        double off = 0.0;
        for (const Vec2 &x : hull) off = std::max(off, dot(n, x - p));
        lines[s] = {p + n * off, dir};
    }
    std::vector<Vec2> tri(3);
    for (int s = 0; s < 3; ++s) {
        // intersection of side s-1 and side s meets at corner s
        const Line &l1 = lines[(s + 2) % 3];
        const Line &l2 = lines[s];
        double den = cross(l1.dir, l2.dir);
        if (std::abs(den) < 1e-12) return {};
        double t = cross(l2.p - l1.p, l2.dir) / den;
        tri[s] = l1.p + l1.dir * t;
    }
    return tri;
}

static EllipseFit moment_ellipse(const std::vector<Vec2> &pts) {
    EllipseFit e;
    if (pts.empty()) return e;
    Vec2 mu = centroid(pts);
    double sxx = 0, syy = 0, sxy = 0;
    for (const Vec2 &p : pts) {
        double dx = p.x - mu.x, dy = p.y - mu.y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    double n = static_cast<double>(pts.size());
    sxx /= n;
    syy /= n;
    sxy /= n;
    double tr = (sxx + syy) / 2.0;
    double det = std::sqrt(std::max(0.0, (sxx - syy) * (sxx - syy) / 4.0 + sxy * sxy));
    double l1 = tr + det, l2 = std::max(0.0, tr - det);
    Vec2 v{sxy, l1 - sxx};
    if (norm(v) < 1e-12) v = {l1 - syy, sxy};
    if (norm(v) < 1e-12) v = {1.0, 0.0};
    e.center = mu;
    e.a = 2.0 * std::sqrt(l1);  // a uniform ellipse has variance (semi-axis/2)^2
    e.b = 2.0 * std::sqrt(l2);
    e.angle = std::atan2(v.y, v.x);
    return e;
}

// Counts lattice points inside the primitive and inside both primitive and
// mask, over the union of the mask grid and the primitive's bounds. Points
// use the same y-up frame as contours.
template <typename Inside>
static double overlap_score(const BinaryMask &mask, long mask_count, double bx0, double by0,
                            double bx1, double by1, Inside inside) {
    int gx0 = std::min(0, static_cast<int>(std::floor(bx0)));
    int gy0 = std::min(0, static_cast<int>(std::floor(by0)));
    int gx1 = std::max(mask.width - 1, static_cast<int>(std::ceil(bx1)));
    int gy1 = std::max(mask.height - 1, static_cast<int>(std::ceil(by1)));
    long prim = 0, inter = 0;
    for (int yu = gy0; yu <= gy1; ++yu) {
        for (int x = gx0; x <= gx1; ++x) {
            if (!inside(Vec2{static_cast<double>(x), static_cast<double>(yu)})) continue;
            ++prim;
            int row = mask.height - 1 - yu;
            if (x >= 0 && x < mask.width && row >= 0 && row < mask.height && mask.at(x, row))
                ++inter;
        }
    }
    long denom = std::max(mask_count, prim);
    return denom == 0 ? 0.0 : static_cast<double>(inter) / denom;
}

static bool in_convex(const std::vector<Vec2> &poly, const Vec2 &p) {
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2 &a = poly[i];
        const Vec2 &b = poly[(i + 1) % poly.size()];
        if (cross(b - a, p - a) < -1e-9) return false;
    }
    return true;
}

static void poly_bounds(const std::vector<Vec2> &poly, double &x0, double &y0, double &x1,
                        double &y1) {
    x0 = y0 = 1e300;
    x1 = y1 = -1e300;
    for (const Vec2 &p : poly) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
}

PrimitiveFit fit_primitives(const BinaryMask &mask, double threshold) {
    PrimitiveFit fit;
    std::vector<Vec2> pts;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y))
                pts.push_back({static_cast<double>(x), static_cast<double>(mask.height - 1 - y)});
    if (pts.empty()) return fit;
    long mc = static_cast<long>(pts.size());
    std::vector<Vec2> hull = convex_hull(pts);

    fit.rect = min_area_rect(hull);
    if (fit.rect.size() == 4) {
        if (cross(fit.rect[1] - fit.rect[0], fit.rect[2] - fit.rect[0]) < 0)
            std::reverse(fit.rect.begin(), fit.rect.end());
        double x0, y0, x1, y1;
        poly_bounds(fit.rect, x0, y0, x1, y1);
        fit.overlap_rect = overlap_score(mask, mc, x0, y0, x1, y1,
                                         [&](const Vec2 &p) { return in_convex(fit.rect, p); });
    }

    fit.triangle = enclosing_triangle(hull);
    if (fit.triangle.size() == 3) {
        if (cross(fit.triangle[1] - fit.triangle[0], fit.triangle[2] - fit.triangle[0]) < 0)
            std::reverse(fit.triangle.begin(), fit.triangle.end());
        double x0, y0, x1, y1;
        poly_bounds(fit.triangle, x0, y0, x1, y1);
        fit.overlap_triangle = overlap_score(
            mask, mc, x0, y0, x1, y1, [&](const Vec2 &p) { return in_convex(fit.triangle, p); });
    }

    fit.circle = min_enclosing_circle(hull.empty() ? pts : hull);
    {
        const Circle &c = fit.circle;
        fit.overlap_circle = overlap_score(
            mask, mc, c.center.x - c.radius, c.center.y - c.radius, c.center.x + c.radius,
            c.center.y + c.radius,
            [&](const Vec2 &p) { return dist(p, c.center) <= c.radius + 1e-9; });
    }

    fit.ellipse = moment_ellipse(pts);
    if (fit.ellipse.a > 1e-9 && fit.ellipse.b > 1e-9) {
        const EllipseFit &e = fit.ellipse;
        double ext = std::max(e.a, e.b);
        fit.overlap_ellipse = overlap_score(
            mask, mc, e.center.x - ext, e.center.y - ext, e.center.x + ext, e.center.y + ext,
            [&](const Vec2 &p) {
                Vec2 d = rotate(p - e.center, -e.angle);
                double u = d.x / e.a, v = d.y / e.b;
                return u * u + v * v <= 1.0 + 1e-9;
            });
    }

    const PrimitiveKind kinds[4] = {PrimitiveKind::Rectangle, PrimitiveKind::Triangle,
                                    PrimitiveKind::Circle, PrimitiveKind::Ellipse};
    const double scores[4] = {fit.overlap_rect, fit.overlap_triangle, fit.overlap_circle,
                              fit.overlap_ellipse};
    int best = 0;
    for (int i = 1; i < 4; ++i)
        if (scores[i] > scores[best]) best = i;
    if (scores[best] > threshold) {
        fit.kind = kinds[best];
        fit.overlap = scores[best];
    }
    return fit;
}

/*---- elongation ----*/

static Elongation elongation_from_cov(double sxx, double syy, double sxy, double threshold) {
    Elongation e;
    double tr = (sxx + syy) / 2.0;
    double det = std::sqrt(std::max(0.0, (sxx - syy) * (sxx - syy) / 4.0 + sxy * sxy));
    double l1 = tr + det, l2 = tr - det;
    Vec2 v{sxy, l1 - sxx};
    if (norm(v) < 1e-12) v = {l1 - syy, sxy};
    if (norm(v) < 1e-12) v = {1.0, 0.0};
    v = v * (1.0 / norm(v));
    if (v.x < 0 || (v.x == 0 && v.y < 0)) v = v * -1.0;
    e.axis = v;
    if (l2 <= 1e-12 * std::max(l1, 1.0)) {
        e.ratio = std::numeric_limits<double>::infinity();
    } else {
        e.ratio = std::sqrt(l1 / l2);
    }
    e.abnormal = e.ratio > threshold;
    return e;
}

Elongation elongation_ratio(const BinaryMask &mask, double threshold) {
    double sx = 0, sy = 0;
    long n = 0;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) {
                sx += x;
                sy += mask.height - 1 - y;
                ++n;
            }
    if (n == 0) throw std::runtime_error("elongation_ratio: empty mask");
    double mx = sx / n, my = sy / n;
    double sxx = 0, syy = 0, sxy = 0;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) {
                double dx = x - mx, dy = (mask.height - 1 - y) - my;
                sxx += dx * dx;
                syy += dy * dy;
                sxy += dx * dy;
            }
    return elongation_from_cov(sxx / n, syy / n, sxy / n, threshold);
}

Elongation elongation_from_box(double w, double h, double threshold) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("elongation_from_box: empty box");
    // a filled axis-aligned box has variance extent^2/12 along each axis
    return elongation_from_cov(w * w / 12.0, h * h / 12.0, 0.0, threshold);
}

}  // namespace scenegest
