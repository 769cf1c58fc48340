#pragma once

// Convex bodies, K-norms and the homothet predicates everything else is
// built on. A homothet K(c, rho) = rho*K + c is identified with the point
// (c, rho) in R^4; its distance function is f(x) = dist_K(c, x) - rho.

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hprox {

using Id = std::size_t;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double operator[](int k) const { return k == 0 ? x : (k == 1 ? y : z); }
    double& operator[](int k) { return k == 0 ? x : (k == 1 ? y : z); }

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// Closed axis-aligned box [lo, hi].
struct Box3 {
    Vec3 lo, hi;

    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z &&
               p.z <= hi.z;
    }
    Vec3 center() const { return 0.5 * (lo + hi); }
    Vec3 extent() const { return hi - lo; }
    bool empty() const { return lo.x > hi.x || lo.y > hi.y || lo.z > hi.z; }
    void expand(const Vec3& p);
    void inflate(double margin);
    /// Octant child: bit k of `octant` selects the upper half along axis k.
    Box3 child(unsigned octant) const;
    friend bool operator==(const Box3&, const Box3&) = default;
};

class BodyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a bisector is queried for a nested pair.
class UndefinedBisector : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Unit ball of the norm. Only strictly convex, centrally symmetric bodies
/// with closed-form norms can be constructed.
class ConvexBody {
public:
    struct Euclidean {};
    struct Ellipsoid {
        Mat3 q;  // symmetric positive definite
    };
    struct Superball {
        int p;                      // even, >= 2
        std::array<double, 3> scale;  // positive axis scales
    };
    using Variant = std::variant<Euclidean, Ellipsoid, Superball>;

    ConvexBody() = default;

    static ConvexBody euclidean();
    static ConvexBody ellipsoid(const Mat3& q);
    /// Axis-aligned ellipsoid with the given semi-axes.
    static ConvexBody ellipsoid_axes(double a, double b, double c);
    static ConvexBody superball(int p, std::array<double, 3> scale = {1.0, 1.0, 1.0});

    double norm(const Vec3& v) const;
    /// Norm of the shortest vector from p to the box (0 if p is inside).
    /// Exact for euclidean and superball; for ellipsoids a certified lower
    /// bound within 1e-9 of the true value.
    double distance_to_box(const Vec3& p, const Box3& box) const;
    /// Largest norm from p to any point of the box (attained at a corner).
    double farthest_in_box(const Vec3& p, const Box3& box) const;
    /// Upper bound on norm(v) / |v|_2, used to size search brackets.
    double max_stretch() const;

    const Variant& variant() const { return v_; }
    std::string type_name() const;

private:
    explicit ConvexBody(Variant v) : v_(std::move(v)) {}
    double ellipsoid_box_lower(const Mat3& q, const Vec3& p, const Box3& box) const;

    Variant v_ = Euclidean{};
    double stretch_ = 1.0;
};

struct Homothet {
    Vec3 center;
    double size = 0.0;
    friend bool operator==(const Homothet&, const Homothet&) = default;
};

/// dist_K(c, x) - rho.
double point_distance(const ConvexBody& body, const Homothet& k0, const Vec3& x);

/// dist_K(c1, c2) - (rho1 + rho2). Bitwise symmetric in its arguments; every
/// intersection decision in the library goes through this one formula.
double homothet_distance(const ConvexBody& body, const Homothet& a, const Homothet& b);

/// Tangency counts as intersecting.
bool intersects(const ConvexBody& body, const Homothet& a, const Homothet& b);

/// True iff `inner` lies inside `outer`: dist_K(c_outer, c_inner) <= rho_outer - rho_inner.
bool contains(const ConvexBody& body, const Homothet& outer, const Homothet& inner);

struct BisectorOptions {
    double max_length = 1e6;  // maximum K-length of the ray
    double tolerance = 1e-10;  // absolute tolerance on the ray parameter
};

/// The point on the ray from c_i in direction u where f_i = f_j, if any.
/// f_j - f_i is nonincreasing along the ray, so bracketing plus bisection
/// finds the unique crossing. Throws UndefinedBisector if K_i is inside K_j.
std::optional<Vec3> ray_bisector_crossing(const ConvexBody& body, const Homothet& ki,
                                          const Homothet& kj, const Vec3& u,
                                          const BisectorOptions& opts = {});

/// Parameter form of the above: K-distance from c_i to the crossing.
std::optional<double> ray_bisector_parameter(const ConvexBody& body, const Homothet& ki,
                                             const Homothet& kj, const Vec3& u,
                                             const BisectorOptions& opts = {});

struct Interval {
    double lo = 0.0, hi = 0.0;
};

/// Enclosure of f_i over the box: lo <= min f_i, hi >= max f_i.
Interval box_bounds(const ConvexBody& body, const Homothet& k, const Box3& box);

class SceneError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A body and an id-indexed family of homothets. Ids are positions.
class Scene {
public:
    Scene() = default;
    Scene(ConvexBody body, std::vector<Homothet> members, double margin = 1.0);

    const ConvexBody& body() const { return body_; }
    const std::vector<Homothet>& members() const { return members_; }
    const Homothet& operator[](Id id) const { return members_.at(id); }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    /// Bounding box of centers, inflated by the max size plus the margin.
    const Box3& domain() const { return domain_; }
    double margin() const { return margin_; }
    double diameter() const;

    /// Copy with every size increased by r.
    Scene expanded(double r) const;

private:
    ConvexBody body_;
    std::vector<Homothet> members_;
    Box3 domain_{};
    double margin_ = 1.0;
};

Box3 bounding_domain(const std::vector<Homothet>& members, double margin);

}  // namespace hprox
