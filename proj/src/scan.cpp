#include "geokp/scan.hpp"

#include <json.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace geokp {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void check_rig(const CameraRig& rig) {
    for (const auto& cam : rig.cameras) {
        if (cam.fov_h_deg <= 0 || cam.fov_h_deg >= 180 || cam.fov_v_deg <= 0 || cam.fov_v_deg >= 180)
            throw std::runtime_error("camera rig: FOV must lie in (0, 180) degrees");
        if (cam.width < 1 || cam.height < 1) throw std::runtime_error("camera rig: resolution must be >= 1x1");
        if (cam.max_range_m <= 0) throw std::runtime_error("camera rig: max range must be positive");
    }
}

CameraRig load_rig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_rig: cannot open " + path);
    nlohmann::json doc;
    in >> doc;
    CameraRig rig;
    for (const auto& c : doc.at("cameras")) {
        Camera cam;
        auto vec = [&](const char* key, Vec3 fallback) {
            if (!c.contains(key)) return fallback;
            auto a = c.at(key);
            return Vec3(a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>());
        };
        cam.position = vec("position", cam.position);
        cam.look_at = vec("look_at", cam.look_at);
        cam.up = vec("up", cam.up);
        cam.fov_h_deg = c.value("fov_h_deg", cam.fov_h_deg);
        cam.fov_v_deg = c.value("fov_v_deg", cam.fov_v_deg);
        cam.width = c.value("width", cam.width);
        cam.height = c.value("height", cam.height);
        cam.max_range_m = c.value("max_range_m", cam.max_range_m);
        rig.cameras.push_back(cam);
    }
    check_rig(rig);
    return rig;
}

void save_rig(const CameraRig& rig, const std::string& path) {
    nlohmann::json doc;
    doc["cameras"] = nlohmann::json::array();
    for (const auto& cam : rig.cameras) {
        doc["cameras"].push_back({{"position", {cam.position.x(), cam.position.y(), cam.position.z()}},
                                  {"look_at", {cam.look_at.x(), cam.look_at.y(), cam.look_at.z()}},
                                  {"up", {cam.up.x(), cam.up.y(), cam.up.z()}},
                                  {"fov_h_deg", cam.fov_h_deg},
                                  {"fov_v_deg", cam.fov_v_deg},
                                  {"width", cam.width},
                                  {"height", cam.height},
                                  {"max_range_m", cam.max_range_m}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_rig: cannot open " + path);
    out << doc.dump(2) << "\n";
}

CameraRig ring_rig(const Vec3& center, double radius, double height, int count, int width, int height_px,
                   double fov_h_deg, double fov_v_deg, double max_range_m) {
    CameraRig rig;
    for (int i = 0; i < count; ++i) {
        double angle = 2.0 * kPi * i / count;
        Camera cam;
        cam.position = center + Vec3(radius * std::cos(angle), radius * std::sin(angle), height);
        cam.look_at = center;
        cam.up = Vec3(0, 0, 1);
        cam.fov_h_deg = fov_h_deg;
        cam.fov_v_deg = fov_v_deg;
        cam.width = width;
        cam.height = height_px;
        cam.max_range_m = max_range_m;
        rig.cameras.push_back(cam);
    }
    return rig;
}

void ScanCloud::append(const ScanCloud& other) {
    points.insert(points.end(), other.points.begin(), other.points.end());
    hit_face.insert(hit_face.end(), other.hit_face.begin(), other.hit_face.end());
    bary.insert(bary.end(), other.bary.begin(), other.bary.end());
    source_camera.insert(source_camera.end(), other.source_camera.begin(), other.source_camera.end());
}

std::pair<Mesh, Skeleton> apply_rigid_scale(const Mesh& mesh, const Skeleton& skeleton, const Vec3& scale) {
    if (scale.x() <= 0 || scale.y() <= 0 || scale.z() <= 0)
        throw std::runtime_error("apply_rigid_scale: scale factors must be positive");
    Mesh m = mesh;
    for (auto& v : m.vertices) v = v.cwiseProduct(scale);
    Skeleton s = skeleton;
    for (auto& j : s.joints) j.position = j.position.cwiseProduct(scale);
    return {std::move(m), std::move(s)};
}

namespace {

std::vector<Vec3> vertex_normals(const Mesh& mesh) {
    std::vector<Vec3> normals(mesh.vertices.size(), Vec3::Zero());
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& tri = mesh.faces[f];
        Vec3 n = (mesh.vertices[tri[1]] - mesh.vertices[tri[0]])
                     .cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
        for (int c = 0; c < 3; ++c) normals[tri[c]] += n;  // area weighting
    }
    for (auto& n : normals) {
        double len = n.norm();
        if (len > 0) n /= len;
    }
    return normals;
}

}  // namespace

Mesh apply_nonrigid_deformation(const Mesh& mesh, const AugmentationSpec& spec, int* flipped_faces) {
    if (spec.deformation_amplitude_m < 0)
        throw std::runtime_error("apply_nonrigid_deformation: amplitude must be >= 0");
    Mesh out = mesh;
    if (flipped_faces) *flipped_faces = 0;
    if (spec.kernel_count == 0 || spec.deformation_amplitude_m == 0.0) return out;

    std::mt19937_64 rng(spec.deformation_seed);
    std::uniform_int_distribution<std::size_t> face_pick(0, mesh.faces.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> sign(-1.0, 1.0);

    struct Kernel {
        Vec3 center;
        double amplitude;
    };
    std::vector<Kernel> kernels;
    for (int k = 0; k < spec.kernel_count; ++k) {
        const auto& tri = mesh.faces[face_pick(rng)];
        // uniform point on the triangle
        double r1 = std::sqrt(unit(rng)), r2 = unit(rng);
        Vec3 center = (1 - r1) * mesh.vertices[tri[0]] + r1 * (1 - r2) * mesh.vertices[tri[1]] +
                      r1 * r2 * mesh.vertices[tri[2]];
        kernels.push_back({center, sign(rng) * spec.deformation_amplitude_m});
    }

    auto normals = vertex_normals(mesh);
    const double inv_two_r2 = 1.0 / (2.0 * spec.kernel_radius_m * spec.kernel_radius_m);
    for (std::size_t v = 0; v < out.vertices.size(); ++v) {
        double displacement = 0;
        for (const auto& k : kernels)
            displacement += k.amplitude * std::exp(-(mesh.vertices[v] - k.center).squaredNorm() * inv_two_r2);
        out.vertices[v] += displacement * normals[v];
    }

    if (flipped_faces) {
        for (std::size_t f = 0; f < mesh.faces.size(); ++f)
            if (mesh.face_normal(static_cast<int>(f)).dot(out.face_normal(static_cast<int>(f))) < 0)
                ++*flipped_faces;
    }
    return out;
}

Mesh skin_pose(const Mesh& mesh, const Skeleton& rest, const Skeleton& posed) {
    if (!mesh.has_skin_weights()) throw std::runtime_error("skin_pose: mesh has no skinning weights");
    // Per-joint rigid transform rest -> posed, derived from the joint's frame.
    // The joint frame is its position plus the rotation aligning the rest bone
    // direction (joint -> first child, else parent -> joint) with the posed one.
    auto joint_transforms = [&]() {
        std::vector<Eigen::Matrix3d> rot(rest.joints.size(), Eigen::Matrix3d::Identity());
        for (std::size_t j = 0; j < rest.joints.size(); ++j) {
            const auto& name = rest.joints[j].name;
            int pj = posed.joint_index(name);
            if (pj < 0) throw std::runtime_error("skin_pose: posed skeleton missing joint '" + name + "'");
            Vec3 rest_dir = Vec3::Zero(), posed_dir = Vec3::Zero();
            for (std::size_t c = 0; c < rest.joints.size(); ++c) {
                if (rest.joints[c].parent && *rest.joints[c].parent == name) {
                    rest_dir = rest.joints[c].position - rest.joints[j].position;
                    posed_dir = posed.joint(rest.joints[c].name).position - posed.joints[pj].position;
                    break;
                }
            }
            if (rest_dir.norm() < 1e-12 && rest.joints[j].parent) {
                rest_dir = rest.joints[j].position - rest.joint(*rest.joints[j].parent).position;
                posed_dir = posed.joints[pj].position - posed.joint(*rest.joints[j].parent).position;
            }
            if (rest_dir.norm() > 1e-12 && posed_dir.norm() > 1e-12)
                rot[j] = Eigen::Quaterniond::FromTwoVectors(rest_dir, posed_dir).toRotationMatrix();
        }
        return rot;
    }();

    Mesh out = mesh;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        if (mesh.skin_weights[v].empty()) continue;
        Vec3 acc = Vec3::Zero();
        for (const auto& [name, w] : mesh.skin_weights[v]) {
            int rj = rest.joint_index(name);
            if (rj < 0) throw std::runtime_error("skin_pose: rest skeleton missing joint '" + name + "'");
            const Vec3& rest_pos = rest.joints[rj].position;
            const Vec3& posed_pos = posed.joint(name).position;
            acc += w * (joint_transforms[rj] * (mesh.vertices[v] - rest_pos) + posed_pos);
        }
        out.vertices[v] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// BVH

TriangleBvh::TriangleBvh(const Mesh& mesh) : mesh_(mesh) {
    if (mesh.faces.empty()) return;
    std::vector<int> ids(mesh.faces.size());
    std::iota(ids.begin(), ids.end(), 0);
    nodes_.reserve(2 * mesh.faces.size());
    build(ids, 0, static_cast<int>(ids.size()));
    order_ = ids;
}

int TriangleBvh::build(std::vector<int>& ids, int first, int count) {
    Node node;
    node.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    node.hi = -node.lo;
    for (int i = first; i < first + count; ++i) {
        const auto& tri = mesh_.faces[ids[i]];
        for (int c = 0; c < 3; ++c) {
            node.lo = node.lo.cwiseMin(mesh_.vertices[tri[c]]);
            node.hi = node.hi.cwiseMax(mesh_.vertices[tri[c]]);
        }
    }
    int index = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (count <= 4) {
        nodes_[index].first = first;
        nodes_[index].count = count;
        // deterministic leaf order
        std::sort(ids.begin() + first, ids.begin() + first + count);
        return index;
    }
    Vec3 extent = node.hi - node.lo;
    int axis = 0;
    if (extent.y() > extent.x()) axis = 1;
    if (extent.z() > extent[axis]) axis = 2;
    auto centroid = [&](int f) {
        const auto& tri = mesh_.faces[f];
        return (mesh_.vertices[tri[0]][axis] + mesh_.vertices[tri[1]][axis] + mesh_.vertices[tri[2]][axis]) / 3.0;
    };
    int mid = first + count / 2;
    std::nth_element(ids.begin() + first, ids.begin() + mid, ids.begin() + first + count,
                     [&](int a, int b) { return std::pair(centroid(a), a) < std::pair(centroid(b), b); });
    int left = build(ids, first, mid - first);
    int right = build(ids, mid, first + count - mid);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

namespace {

bool ray_box(const Vec3& origin, const Vec3& inv_dir, const Vec3& lo, const Vec3& hi, double t_max) {
    double t0 = 0, t1 = t_max;
    for (int a = 0; a < 3; ++a) {
        double near = (lo[a] - origin[a]) * inv_dir[a];
        double far = (hi[a] - origin[a]) * inv_dir[a];
        if (near > far) std::swap(near, far);
        t0 = std::max(t0, near);
        t1 = std::min(t1, far);
        if (t0 > t1) return false;
    }
    return true;
}

// Moller-Trumbore; returns weights on B (alpha) and C (beta).
bool ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b, const Vec3& c,
                  double& t, double& alpha, double& beta) {
    const double eps = 1e-14;
    Vec3 ab = b - a, ac = c - a;
    Vec3 pvec = dir.cross(ac);
    double det = ab.dot(pvec);
    if (std::abs(det) < eps) return false;
    double inv_det = 1.0 / det;
    Vec3 tvec = origin - a;
    double u = tvec.dot(pvec) * inv_det;
    if (u < -1e-12 || u > 1 + 1e-12) return false;
    Vec3 qvec = tvec.cross(ab);
    double v = dir.dot(qvec) * inv_det;
    if (v < -1e-12 || u + v > 1 + 1e-12) return false;
    t = ac.dot(qvec) * inv_det;
    alpha = u;
    beta = v;
    return true;
}

}  // namespace

TriangleBvh::Hit TriangleBvh::raycast(const Vec3& origin, const Vec3& dir, double t_max) const {
    Hit best;
    if (nodes_.empty()) return best;
    Vec3 inv_dir;
    for (int a = 0; a < 3; ++a)
        inv_dir[a] = dir[a] != 0 ? 1.0 / dir[a] : std::numeric_limits<double>::infinity();
    double best_t = t_max;
    std::vector<int> stack = {0};
    while (!stack.empty()) {
        int ni = stack.back();
        stack.pop_back();
        const Node& node = nodes_[ni];
        if (!ray_box(origin, inv_dir, node.lo, node.hi, best_t + 1e-12)) continue;
        if (node.left < 0) {
            for (int i = node.first; i < node.first + node.count; ++i) {
                int f = order_[i];
                const auto& tri = mesh_.faces[f];
                double t, alpha, beta;
                if (!ray_triangle(origin, dir, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]],
                                  mesh_.vertices[tri[2]], t, alpha, beta))
                    continue;
                if (t <= 1e-9 || t > t_max) continue;
                bool take;
                if (!best.valid)
                    take = true;
                else if (t < best_t - 1e-12)
                    take = true;
                else  // tie on a shared edge: lower face index wins
                    take = t <= best_t + 1e-12 && f < best.face;
                if (take) {
                    best.valid = true;
                    best.t = t;
                    best.face = f;
                    best.alpha = alpha;
                    best.beta = beta;
                    best_t = std::min(best_t, t);
                }
            }
        } else {
            stack.push_back(node.right);
            stack.push_back(node.left);
        }
    }
    return best;
}

namespace {

// Closest point on triangle (Ericson, Real-Time Collision Detection).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c, double& u, double& v) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) { u = 0; v = 0; return a; }
    Vec3 bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) { u = 1; v = 0; return b; }
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) {
        u = d1 / (d1 - d3); v = 0;
        return a + u * ab;
    }
    Vec3 cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) { u = 0; v = 1; return c; }
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) {
        u = 0; v = d2 / (d2 - d6);
        return a + v * ac;
    }
    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        u = 1 - w; v = w;
        return b + w * (c - b);
    }
    double denom = 1.0 / (va + vb + vc);
    u = vb * denom;
    v = vc * denom;
    return a + ab * u + ac * v;
}

}  // namespace

TriangleBvh::Closest TriangleBvh::closest_point(const Vec3& query) const {
    Closest best;
    best.distance = std::numeric_limits<double>::infinity();
    if (nodes_.empty()) return best;
    // ordered traversal by box distance
    auto box_dist2 = [&](const Node& n) {
        Vec3 clamped = query.cwiseMax(n.lo).cwiseMin(n.hi);
        return (query - clamped).squaredNorm();
    };
    std::vector<int> stack = {0};
    while (!stack.empty()) {
        int ni = stack.back();
        stack.pop_back();
        const Node& node = nodes_[ni];
        if (box_dist2(node) >= best.distance * best.distance) continue;
        if (node.left < 0) {
            for (int i = node.first; i < node.first + node.count; ++i) {
                int f = order_[i];
                const auto& tri = mesh_.faces[f];
                double u, v;
                Vec3 cp = closest_on_triangle(query, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]],
                                              mesh_.vertices[tri[2]], u, v);
                double d = (query - cp).norm();
                if (d < best.distance - 1e-15 || (d <= best.distance + 1e-15 && f < best.face)) {
                    best.distance = d;
                    best.face = f;
                    best.point = cp;
                    best.bary = Vec3(u, v, 1.0 - u - v);  // (alpha, beta, gamma)
                }
            }
        } else {
            // visit nearer child first
            if (box_dist2(nodes_[node.left]) <= box_dist2(nodes_[node.right])) {
                stack.push_back(node.right);
                stack.push_back(node.left);
            } else {
                stack.push_back(node.left);
                stack.push_back(node.right);
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Scanning

ScanCloud raycast_scan(const Mesh& mesh, const CameraRig& rig) {
    TriangleBvh bvh(mesh);
    return raycast_scan(mesh, bvh, rig);
}

ScanCloud raycast_scan(const Mesh& mesh, const TriangleBvh& bvh, const CameraRig& rig) {
    check_rig(rig);
    ScanCloud cloud;
    for (std::size_t ci = 0; ci < rig.cameras.size(); ++ci) {
        const Camera& cam = rig.cameras[ci];
        Vec3 forward = (cam.look_at - cam.position).normalized();
        Vec3 right = forward.cross(cam.up).normalized();
        Vec3 up = right.cross(forward);
        double tan_h = std::tan(cam.fov_h_deg * kPi / 360.0);
        double tan_v = std::tan(cam.fov_v_deg * kPi / 360.0);
        for (int row = 0; row < cam.height; ++row) {
            for (int col = 0; col < cam.width; ++col) {
                double sx = cam.width > 1 ? (2.0 * col / (cam.width - 1) - 1.0) : 0.0;
                double sy = cam.height > 1 ? (2.0 * row / (cam.height - 1) - 1.0) : 0.0;
                Vec3 dir = (forward + sx * tan_h * right + sy * tan_v * up).normalized();
                auto hit = bvh.raycast(cam.position, dir, cam.max_range_m);
                if (!hit.valid) continue;
                const auto& tri = mesh.faces[hit.face];
                double alpha = hit.alpha, beta = hit.beta, gamma = 1.0 - alpha - beta;
                // store the on-surface point, not origin + t*dir, so the
                // barycentric reconstruction is exact
                Vec3 p = gamma * mesh.vertices[tri[0]] + alpha * mesh.vertices[tri[1]] +
                         beta * mesh.vertices[tri[2]];
                cloud.points.push_back(p);
                cloud.hit_face.push_back(hit.face);
                cloud.bary.push_back(Vec3(alpha, beta, gamma));
                cloud.source_camera.push_back(static_cast<uint16_t>(ci));
            }
        }
    }
    return cloud;
}

ScanCloud merge_clouds(const std::vector<ScanCloud>& clouds) {
    ScanCloud out;
    for (const auto& c : clouds) out.append(c);
    return out;
}

ScanCloud downsample_fps(const ScanCloud& cloud, std::size_t target_n) {
    if (cloud.size() == 0) throw std::runtime_error("downsample_fps: empty input cloud");
    if (target_n < 1) throw std::runtime_error("downsample_fps: target must be >= 1");
    std::size_t n = cloud.size();
    std::size_t keep = std::min(target_n, n);

    std::vector<std::size_t> selected;
    selected.reserve(keep);
    std::vector<double> min_dist2(n, std::numeric_limits<double>::infinity());
    std::size_t current = 0;  // seed
    selected.push_back(current);
    for (std::size_t s = 1; s < keep; ++s) {
        std::size_t best = 0;
        double best_d2 = -1;
        for (std::size_t i = 0; i < n; ++i) {
            double d2 = (cloud.points[i] - cloud.points[current]).squaredNorm();
            if (d2 < min_dist2[i]) min_dist2[i] = d2;
            if (min_dist2[i] > best_d2) {
                best_d2 = min_dist2[i];
                best = i;
            }
        }
        current = best;
        selected.push_back(current);
    }
    if (keep == n) return cloud;

    ScanCloud out;
    out.points.reserve(keep);
    for (std::size_t idx : selected) {
        out.points.push_back(cloud.points[idx]);
        out.hit_face.push_back(cloud.hit_face[idx]);
        out.bary.push_back(cloud.bary[idx]);
        out.source_camera.push_back(cloud.source_camera[idx]);
    }
    return out;
}

void save_cloud_ply(const ScanCloud& cloud, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_cloud_ply: cannot open " + path);
    out << "ply\nformat binary_little_endian 1.0\n";
    out << "element vertex " << cloud.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "property uint face_index\n";
    out << "property double b0\nproperty double b1\nproperty double b2\n";
    out << "property ushort camera_id\n";
    out << "end_header\n";
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        double xyz[3] = {cloud.points[i].x(), cloud.points[i].y(), cloud.points[i].z()};
        out.write(reinterpret_cast<const char*>(xyz), 24);
        uint32_t face = static_cast<uint32_t>(cloud.hit_face[i]);
        out.write(reinterpret_cast<const char*>(&face), 4);
        double b[3] = {cloud.bary[i].x(), cloud.bary[i].y(), cloud.bary[i].z()};
        out.write(reinterpret_cast<const char*>(b), 24);
        uint16_t cam = cloud.source_camera[i];
        out.write(reinterpret_cast<const char*>(&cam), 2);
    }
}

ScanCloud load_cloud_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_cloud_ply: cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (line.rfind("ply", 0) != 0) throw std::runtime_error("load_cloud_ply: not a PLY file: " + path);
    std::size_t count = 0;
    std::vector<std::string> props;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt != "binary_little_endian")
                throw std::runtime_error("load_cloud_ply: expected binary_little_endian");
        } else if (tag == "element") {
            std::string name;
            ls >> name >> count;
            if (name != "vertex") throw std::runtime_error("load_cloud_ply: unexpected element " + name);
        } else if (tag == "property") {
            std::string type, name;
            ls >> type >> name;
            props.push_back(name);
        } else if (tag == "end_header") {
            break;
        }
    }
    const std::vector<std::string> expected = {"x", "y", "z", "face_index", "b0", "b1", "b2", "camera_id"};
    if (props != expected) throw std::runtime_error("load_cloud_ply: unexpected property layout in " + path);
    ScanCloud cloud;
    for (std::size_t i = 0; i < count; ++i) {
        double xyz[3], b[3];
        uint32_t face;
        uint16_t cam;
        in.read(reinterpret_cast<char*>(xyz), 24);
        in.read(reinterpret_cast<char*>(&face), 4);
        in.read(reinterpret_cast<char*>(b), 24);
        in.read(reinterpret_cast<char*>(&cam), 2);
        if (!in) throw std::runtime_error("load_cloud_ply: truncated payload in " + path);
        cloud.points.push_back(Vec3(xyz[0], xyz[1], xyz[2]));
        cloud.hit_face.push_back(static_cast<int>(face));
        cloud.bary.push_back(Vec3(b[0], b[1], b[2]));
        cloud.source_camera.push_back(cam);
    }
    return cloud;
}

}  // namespace geokp
