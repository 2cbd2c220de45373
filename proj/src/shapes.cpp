#include "geokp/shapes.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace geokp {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Mesh icosphere(int subdivisions, double radius) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    Mesh mesh;
    mesh.vertices = {{-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
                     {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
                     {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
    mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                  {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                  {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                  {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (auto& v : mesh.vertices) v.normalize();

    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<int, int>, int> midpoints;
        auto midpoint = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoints.find(key);
            if (it != midpoints.end()) return it->second;
            Vec3 mid = (mesh.vertices[a] + mesh.vertices[b]).normalized();
            int idx = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back(mid);
            midpoints[key] = idx;
            return idx;
        };
        std::vector<std::array<int, 3>> faces;
        faces.reserve(mesh.faces.size() * 4);
        for (const auto& tri : mesh.faces) {
            int ab = midpoint(tri[0], tri[1]);
            int bc = midpoint(tri[1], tri[2]);
            int ca = midpoint(tri[2], tri[0]);
            faces.push_back({tri[0], ab, ca});
            faces.push_back({tri[1], bc, ab});
            faces.push_back({tri[2], ca, bc});
            faces.push_back({ab, bc, ca});
        }
        mesh.faces = std::move(faces);
    }
    for (auto& v : mesh.vertices) v *= radius;
    return mesh;
}

Mesh capsule(const Vec3& p0, const Vec3& p1, double radius, int segments, int rings) {
    Vec3 axis = p1 - p0;
    double length = axis.norm();
    if (length < 1e-12) throw std::runtime_error("capsule: endpoints coincide");
    Vec3 z = axis / length;
    Vec3 helper = std::abs(z.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    Vec3 x = z.cross(helper).normalized();
    Vec3 y = z.cross(x);

    Mesh mesh;
    // bottom pole, bottom cap rings, cylinder rings, top cap rings, top pole
    mesh.vertices.push_back(p0 - radius * z);
    auto add_ring = [&](double polar, const Vec3& center) {
        for (int s = 0; s < segments; ++s) {
            double azimuth = 2.0 * kPi * s / segments;
            Vec3 dir = std::sin(polar) * (std::cos(azimuth) * x + std::sin(azimuth) * y) -
                       std::cos(polar) * z;
            mesh.vertices.push_back(center + radius * dir);
        }
    };
    for (int r = 1; r <= rings; ++r) add_ring(0.5 * kPi * r / rings, p0);   // bottom hemisphere
    // intermediate rings along the body keep the axial edge length close to
    // the circumferential one; long skinny side triangles ruin geodesics
    double target_edge = 2.0 * kPi * radius / segments;
    int cyl_rings = std::max(0, static_cast<int>(std::round(length / target_edge)) - 1);
    for (int r = 1; r <= cyl_rings; ++r)
        add_ring(0.5 * kPi, p0 + (length * r / (cyl_rings + 1)) * z);
    for (int r = rings - 1; r >= 0; --r) {
        // top hemisphere: mirror the polar angle about the equator
        double polar = kPi - 0.5 * kPi * r / rings;
        add_ring(polar, p1);
    }
    mesh.vertices.push_back(p1 + radius * z);

    int total_rings = 2 * rings + cyl_rings;            // ring count between the poles
    auto ring_vertex = [&](int ring, int s) { return 1 + ring * segments + (s % segments); };
    // bottom fan
    for (int s = 0; s < segments; ++s) mesh.faces.push_back({0, ring_vertex(0, s + 1), ring_vertex(0, s)});
    // quads between consecutive rings
    for (int r = 0; r + 1 < total_rings; ++r) {
        for (int s = 0; s < segments; ++s) {
            int a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
            int c = ring_vertex(r + 1, s), d = ring_vertex(r + 1, s + 1);
            mesh.faces.push_back({a, b, d});
            mesh.faces.push_back({a, d, c});
        }
    }
    // top fan
    int top = static_cast<int>(mesh.vertices.size()) - 1;
    for (int s = 0; s < segments; ++s)
        mesh.faces.push_back({top, ring_vertex(total_rings - 1, s), ring_vertex(total_rings - 1, s + 1)});
    return mesh;
}

Mesh merge_meshes(const Mesh& base, const Mesh& extra) {
    Mesh out = base;
    int offset = static_cast<int>(base.vertices.size());
    out.vertices.insert(out.vertices.end(), extra.vertices.begin(), extra.vertices.end());
    for (const auto& tri : extra.faces)
        out.faces.push_back({tri[0] + offset, tri[1] + offset, tri[2] + offset});
    return out;
}

}  // namespace geokp
