#include "hprox/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hprox {

void Box3::expand(const Vec3& p) {
    for (int k = 0; k < 3; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
    }
}

void Box3::inflate(double margin) {
    for (int k = 0; k < 3; ++k) {
        lo[k] -= margin;
        hi[k] += margin;
    }
}

Box3 Box3::child(unsigned octant) const {
    const Vec3 mid = center();
    Box3 b;
    for (int k = 0; k < 3; ++k) {
        if (octant & (1u << k)) {
            b.lo[k] = mid[k];
            b.hi[k] = hi[k];
        } else {
            b.lo[k] = lo[k];
            b.hi[k] = mid[k];
        }
    }
    return b;
}

namespace {

double quad_form(const Mat3& q, const Vec3& v) {
    const double s = q[0][0] * v.x * v.x + q[1][1] * v.y * v.y + q[2][2] * v.z * v.z +
                     2.0 * (q[0][1] * v.x * v.y + q[0][2] * v.x * v.z + q[1][2] * v.y * v.z);
    return std::max(0.0, s);
}

double ipow(double base, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= base;
    return r;
}

bool cholesky_ok(const Mat3& q) {
    double l[3][3] = {};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = q[i][j];
            for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (!(s > 0.0)) return false;
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    return true;
}

Vec3 clamp_to(const Vec3& p, const Box3& box) {
    return {std::clamp(p.x, box.lo.x, box.hi.x), std::clamp(p.y, box.lo.y, box.hi.y),
            std::clamp(p.z, box.lo.z, box.hi.z)};
}

}  // namespace

ConvexBody ConvexBody::euclidean() { return ConvexBody(Euclidean{}); }

ConvexBody ConvexBody::ellipsoid(const Mat3& q) {
    double scale = 0.0;
    for (const auto& row : q)
        for (double v : row) {
            if (!std::isfinite(v)) throw BodyError("ellipsoid form has non-finite entries");
            scale = std::max(scale, std::abs(v));
        }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(q[i][j] - q[j][i]) > 1e-12 * std::max(1.0, scale))
                throw BodyError("ellipsoid form is not symmetric");
    if (!cholesky_ok(q)) throw BodyError("ellipsoid form is not positive definite");
    Mat3 sym = q;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < i; ++j) sym[i][j] = sym[j][i] = 0.5 * (q[i][j] + q[j][i]);
    ConvexBody b(Ellipsoid{sym});
    double frob = 0.0;
    for (const auto& row : sym)
        for (double v : row) frob += v * v;
    b.stretch_ = std::sqrt(std::sqrt(frob));  // sqrt(lambda_max) <= sqrt(||Q||_F)
    return b;
}

ConvexBody ConvexBody::ellipsoid_axes(double a, double b, double c) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw BodyError("ellipsoid semi-axes must be positive");
    Mat3 q{};
    q[0][0] = 1.0 / (a * a);
    q[1][1] = 1.0 / (b * b);
    q[2][2] = 1.0 / (c * c);
    return ellipsoid(q);
}

ConvexBody ConvexBody::superball(int p, std::array<double, 3> scale) {
    if (p < 2 || p % 2 != 0) throw BodyError("superball exponent must be an even integer >= 2");
    for (double s : scale)
        if (!(s > 0.0) || !std::isfinite(s)) throw BodyError("superball scales must be positive");
    ConvexBody b(Superball{p, scale});
    b.stretch_ = 1.0 / std::min({scale[0], scale[1], scale[2]});
    return b;
}

double ConvexBody::norm(const Vec3& v) const {
    if (v_.index() == 0) return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (const auto* e = std::get_if<Ellipsoid>(&v_)) return std::sqrt(quad_form(e->q, v));
    if (const auto* s = std::get_if<Superball>(&v_)) {
        const double a[3] = {std::abs(v.x) / s->scale[0], std::abs(v.y) / s->scale[1],
                             std::abs(v.z) / s->scale[2]};
        const double m = std::max({a[0], a[1], a[2]});
        if (m == 0.0) return 0.0;
        double sum = 0.0;
        for (double ak : a) sum += ipow(ak / m, s->p);
        return m * std::pow(sum, 1.0 / s->p);
    }
    return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
}

double ConvexBody::ellipsoid_box_lower(const Mat3& q, const Vec3& p, const Box3& box) const {
    // Coordinate descent on g(x) = (x-p)^T Q (x-p) over the box, then a
    // Frank-Wolfe gap turns the iterate into a certified lower bound.
    Vec3 x = clamp_to(p, box);
    for (int iter = 0; iter < 200; ++iter) {
        double moved = 0.0;
        for (int k = 0; k < 3; ++k) {
            double off = 0.0;
            for (int l = 0; l < 3; ++l)
                if (l != k) off += q[k][l] * (x[l] - p[l]);
            const double next = std::clamp(p[k] - off / q[k][k], box.lo[k], box.hi[k]);
            moved = std::max(moved, std::abs(next - x[k]));
            x[k] = next;
        }
        if (moved <= 1e-15 * (1.0 + std::abs(x.x) + std::abs(x.y) + std::abs(x.z))) break;
    }
    const Vec3 d = x - p;
    const double g = quad_form(q, d);
    double gap = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double grad = 2.0 * (q[k][0] * d.x + q[k][1] * d.y + q[k][2] * d.z);
        const double y = grad > 0.0 ? box.lo[k] : box.hi[k];
        gap += grad * (x[k] - y);
    }
    return std::sqrt(std::max(0.0, g - std::max(0.0, gap)));
}

double ConvexBody::distance_to_box(const Vec3& p, const Box3& box) const {
    if (box.contains(p)) return 0.0;
    if (const auto* e = std::get_if<Ellipsoid>(&v_)) return ellipsoid_box_lower(e->q, p, box);
    // Euclidean and axis-aligned superballs are separable and monotone in
    // each |coordinate|, so the clamped point is the exact minimizer.
    return norm(clamp_to(p, box) - p);
}

double ConvexBody::farthest_in_box(const Vec3& p, const Box3& box) const {
    double best = 0.0;
    for (unsigned c = 0; c < 8; ++c) {
        const Vec3 corner{(c & 1u) ? box.hi.x : box.lo.x, (c & 2u) ? box.hi.y : box.lo.y,
                          (c & 4u) ? box.hi.z : box.lo.z};
        best = std::max(best, norm(corner - p));
    }
    return best;
}

double ConvexBody::max_stretch() const { return stretch_; }

std::string ConvexBody::type_name() const {
    if (std::holds_alternative<Ellipsoid>(v_)) return "ellipsoid";
    if (std::holds_alternative<Superball>(v_)) return "lp";
    return "euclidean";
}

double point_distance(const ConvexBody& body, const Homothet& k0, const Vec3& x) {
    return body.norm(x - k0.center) - k0.size;
}

double homothet_distance(const ConvexBody& body, const Homothet& a, const Homothet& b) {
    return body.norm(a.center - b.center) - (a.size + b.size);
}

bool intersects(const ConvexBody& body, const Homothet& a, const Homothet& b) {
    return homothet_distance(body, a, b) <= 0.0;
}

bool contains(const ConvexBody& body, const Homothet& outer, const Homothet& inner) {
    return body.norm(outer.center - inner.center) <= outer.size - inner.size;
}

std::optional<double> ray_bisector_parameter(const ConvexBody& body, const Homothet& ki,
                                             const Homothet& kj, const Vec3& u,
                                             const BisectorOptions& opts) {
    if (contains(body, kj, ki)) throw UndefinedBisector("bisector undefined: K_i lies inside K_j");
    const double len = body.norm(u);
    if (!(len > 0.0)) throw std::invalid_argument("ray direction must be nonzero");
    const Vec3 dir = (1.0 / len) * u;
    auto h = [&](double t) {
        const Vec3 x = ki.center + t * dir;
        return point_distance(body, kj, x) - point_distance(body, ki, x);
    };
    double lo = 0.0, hi = opts.max_length;
    if (h(hi) >= 0.0) return std::nullopt;
    if (h(lo) < 0.0) return 0.0;
    while (hi - lo > opts.tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (h(mid) >= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::optional<Vec3> ray_bisector_crossing(const ConvexBody& body, const Homothet& ki,
                                          const Homothet& kj, const Vec3& u,
                                          const BisectorOptions& opts) {
    const auto t = ray_bisector_parameter(body, ki, kj, u, opts);
    if (!t) return std::nullopt;
    return ki.center + (*t / body.norm(u)) * u;
}

Interval box_bounds(const ConvexBody& body, const Homothet& k, const Box3& box) {
    return {body.distance_to_box(k.center, box) - k.size,
            body.farthest_in_box(k.center, box) - k.size};
}

Box3 bounding_domain(const std::vector<Homothet>& members, double margin) {
    Box3 box{{0, 0, 0}, {0, 0, 0}};
    double max_size = 0.0;
    if (!members.empty()) box = {members.front().center, members.front().center};
    for (const auto& m : members) {
        box.expand(m.center);
        max_size = std::max(max_size, m.size);
    }
    box.inflate(max_size + margin);
    return box;
}

Scene::Scene(ConvexBody body, std::vector<Homothet> members, double margin)
    : body_(std::move(body)), members_(std::move(members)), margin_(margin) {
    for (const auto& m : members_) {
        if (!(m.size >= 0.0) || !std::isfinite(m.size))
            throw SceneError("homothet size must be a finite nonnegative number");
        if (!std::isfinite(m.center.x) || !std::isfinite(m.center.y) || !std::isfinite(m.center.z))
            throw SceneError("homothet center must be finite");
    }
    domain_ = bounding_domain(members_, margin_);
}

double Scene::diameter() const {
    const Vec3 e = domain_.extent();
    double best = 0.0;
    for (double sx : {-1.0, 1.0})
        for (double sy : {-1.0, 1.0}) best = std::max(best, body_.norm({sx * e.x, sy * e.y, e.z}));
    return best;
}

Scene Scene::expanded(double r) const {
    std::vector<Homothet> grown = members_;
    for (auto& m : grown) m.size += r;
    return Scene(body_, std::move(grown), margin_);
}

}  // namespace hprox
