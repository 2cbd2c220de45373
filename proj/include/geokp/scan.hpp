#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geokp/mesh.hpp"

namespace geokp {

struct Camera {
    Vec3 position = Vec3::Zero();
    Vec3 look_at = Vec3::Zero();
    Vec3 up = Vec3(0, 0, 1);
    double fov_h_deg = 60.0;
    double fov_v_deg = 45.0;
    int width = 128;
    int height = 96;
    double max_range_m = 10.0;
};

struct CameraRig {
    std::vector<Camera> cameras;
};

void check_rig(const CameraRig& rig);
CameraRig load_rig(const std::string& path);
void save_rig(const CameraRig& rig, const std::string& path);

// A ring of `count` cameras around `center` at the given radius and height,
// all pointed at the center.
CameraRig ring_rig(const Vec3& center, double radius, double height, int count, int width, int height_px,
                   double fov_h_deg = 60.0, double fov_v_deg = 50.0, double max_range_m = 10.0);

// Barycentric convention, fixed pipeline-wide: for face (A,B,C) the weights
// are gamma on A, alpha on B, beta on C, so P = gamma*A + alpha*B + beta*C.
struct ScanCloud {
    std::vector<Vec3> points;
    std::vector<int> hit_face;
    std::vector<Vec3> bary;  // (alpha, beta, gamma)
    std::vector<uint16_t> source_camera;

    std::size_t size() const { return points.size(); }
    void append(const ScanCloud& other);
};

struct AugmentationSpec {
    Vec3 scale = Vec3(1, 1, 1);
    uint64_t deformation_seed = 0;
    double deformation_amplitude_m = 0.0;
    int kernel_count = 0;
    double kernel_radius_m = 0.1;
};

std::pair<Mesh, Skeleton> apply_rigid_scale(const Mesh& mesh, const Skeleton& skeleton, const Vec3& scale);

// Seeded Gaussian RBF bumps along vertex normals. Returns the deformed mesh
// and reports (via flipped_faces) how many face normals rotated past 90 degrees.
Mesh apply_nonrigid_deformation(const Mesh& mesh, const AugmentationSpec& spec, int* flipped_faces = nullptr);

Mesh skin_pose(const Mesh& mesh, const Skeleton& rest, const Skeleton& posed);

// Axis-aligned median-split BVH over mesh triangles.
class TriangleBvh {
  public:
    explicit TriangleBvh(const Mesh& mesh);

    struct Hit {
        bool valid = false;
        double t = 0;
        int face = -1;
        double alpha = 0, beta = 0;  // weights on B and C
    };

    // Nearest hit along origin + t*dir, t in (1e-9, t_max]. Ties on shared
    // edges resolve to the lower face index.
    Hit raycast(const Vec3& origin, const Vec3& dir, double t_max) const;

    // Closest surface point to a query; returns face, point, (alpha,beta,gamma).
    struct Closest {
        int face = -1;
        Vec3 point = Vec3::Zero();
        Vec3 bary = Vec3::Zero();
        double distance = 0;
    };
    Closest closest_point(const Vec3& query) const;

  private:
    struct Node {
        Vec3 lo, hi;
        int left = -1, right = -1;  // internal
        int first = 0, count = 0;   // leaf
    };
    const Mesh& mesh_;
    std::vector<Node> nodes_;
    std::vector<int> order_;

    int build(std::vector<int>& ids, int first, int count);
};

ScanCloud raycast_scan(const Mesh& mesh, const CameraRig& rig);
ScanCloud raycast_scan(const Mesh& mesh, const TriangleBvh& bvh, const CameraRig& rig);
ScanCloud merge_clouds(const std::vector<ScanCloud>& clouds);

// Farthest-point sampling seeded at index 0; keeps provenance fields.
ScanCloud downsample_fps(const ScanCloud& cloud, std::size_t target_n);

void save_cloud_ply(const ScanCloud& cloud, const std::string& path);
ScanCloud load_cloud_ply(const std::string& path);

}  // namespace geokp
