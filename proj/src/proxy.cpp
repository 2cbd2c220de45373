#include "geokp/proxy.hpp"

#include <Eigen/Geometry>

#include <cmath>

#include "geokp/shapes.hpp"

namespace geokp {

namespace {
constexpr double kPi = 3.14159265358979323846;

struct LegChain {
    std::string upper, lower;  // named joints: attachment -> upper -> lower -> foot
    double attach_x;
    bool is_front;
};

Vec3 rotate_about(const Vec3& p, const Vec3& pivot, double angle_y) {
    Eigen::AngleAxisd rot(angle_y, Vec3::UnitY());
    return pivot + rot * (p - pivot);
}

}  // namespace

QuadrupedPose walking_pose(double phase, double swing_amplitude, double bend_amplitude) {
    QuadrupedPose pose;
    // trot: FL+HR vs FR+HL in antiphase
    double a = std::sin(phase), b = std::sin(phase + kPi);
    pose.swing[0] = swing_amplitude * a;
    pose.swing[1] = swing_amplitude * b;
    pose.swing[2] = swing_amplitude * b;
    pose.swing[3] = swing_amplitude * a;
    for (int leg = 0; leg < 4; ++leg)
        pose.bend[leg] = bend_amplitude * std::max(0.0, std::sin(phase + (leg % 2 ? kPi : 0)));
    return pose;
}

RiggedModel build_quadruped(const QuadrupedConfig& config, const QuadrupedPose& pose) {
    RiggedModel model;
    const double z0 = config.torso_height;
    const double hx = config.torso_half_length;
    const double y = config.lateral_offset;

    // leg order FL, FR, HL, HR; front legs carry Elbow/Carpal, hind Hip/Stifle/Tarsal
    struct LegSpec {
        double attach_x;
        double side;  // +1 left, -1 right
        bool front;
        std::string suffix;
    };
    const LegSpec legs[4] = {{hx - 0.08, +1, true, "L"},
                             {hx - 0.08, -1, true, "R"},
                             {-(hx - 0.08), +1, false, "L"},
                             {-(hx - 0.08), -1, false, "R"}};

    Skeleton& skel = model.skeleton;
    Mesh mesh = capsule(Vec3(-hx, 0, z0), Vec3(hx, 0, z0), config.torso_radius, config.capsule_segments,
                        config.capsule_rings);

    for (int leg = 0; leg < 4; ++leg) {
        const LegSpec& spec = legs[leg];
        Vec3 attach(spec.attach_x, spec.side * y, z0 - 0.06);
        // rest chain straight down: attach -> upper -> lower -> foot
        Vec3 upper(spec.attach_x, spec.side * y, 0.40);
        Vec3 lower(spec.attach_x, spec.side * y, 0.18);
        Vec3 foot(spec.attach_x, spec.side * y, config.leg_radius);

        upper = rotate_about(upper, attach, pose.swing[leg]);
        lower = rotate_about(lower, attach, pose.swing[leg]);
        foot = rotate_about(foot, attach, pose.swing[leg]);
        lower = rotate_about(lower, upper, pose.bend[leg]);
        foot = rotate_about(foot, upper, pose.bend[leg]);

        std::string upper_name = (spec.front ? "Elbow " : "Stifle ") + spec.suffix;
        std::string lower_name = (spec.front ? "Carpal " : "Tarsal ") + spec.suffix;
        if (!spec.front) {
            // the hip joint sits at the top of the hind leg
            skel.joints.push_back({"Hip " + spec.suffix, attach, std::nullopt});
            skel.joints.push_back({upper_name, upper, "Hip " + spec.suffix});
            skel.joints.push_back({lower_name, lower, upper_name});
            skel.bones.push_back({"Femur " + spec.suffix, "Hip " + spec.suffix, upper_name});
            skel.bones.push_back({"Tibia " + spec.suffix, upper_name, lower_name});
        } else {
            skel.joints.push_back({upper_name, upper, std::nullopt});
            skel.joints.push_back({lower_name, lower, upper_name});
            skel.bones.push_back({"Forearm " + spec.suffix, upper_name, lower_name});
        }

        mesh = merge_meshes(mesh, capsule(attach, upper, config.leg_radius, config.capsule_segments,
                                          config.capsule_rings));
        mesh = merge_meshes(mesh, capsule(upper, lower, config.leg_radius, config.capsule_segments,
                                          config.capsule_rings));
        mesh = merge_meshes(mesh, capsule(lower, foot, config.leg_radius, config.capsule_segments,
                                          config.capsule_rings));
    }

    // spine endpoints on the dorsal skin line; keeping them on the surface
    // keeps surface-distance supervision nearly unbiased there
    Vec3 front_spine(hx, 0, z0 + config.torso_radius);
    Vec3 illium(-hx, 0, z0 + config.torso_radius);
    skel.joints.push_back({"Front spine", front_spine, std::nullopt});
    skel.joints.push_back({"Illium", illium, std::nullopt});
    skel.bones.push_back({"Spine", "Front spine", "Illium"});

    // keep joints in the canonical order so field columns line up across tools
    std::vector<Joint> ordered;
    for (const auto& name : default_joint_names()) ordered.push_back(skel.joint(name));
    skel.joints = std::move(ordered);

    model.mesh = std::move(mesh);
    return model;
}

std::vector<RiggedModel> walking_frames(int count, const QuadrupedConfig& config) {
    std::vector<RiggedModel> frames;
    for (int f = 0; f < count; ++f)
        frames.push_back(build_quadruped(config, walking_pose(2.0 * kPi * f / count)));
    return frames;
}

std::vector<RiggedModel> rigid_motion_frames(int count, const QuadrupedConfig& config) {
    std::vector<RiggedModel> frames;
    RiggedModel rest = build_quadruped(config);
    for (int f = 0; f < count; ++f) {
        double angle = 2.0 * kPi * f / count * 0.25;
        RiggedModel frame = rest;
        frame.world_from_local = Eigen::Translation3d(0.05 * f, 0.02 * f, 0.0) *
                                 Eigen::AngleAxisd(angle, Vec3::UnitZ());
        frames.push_back(std::move(frame));
    }
    return frames;
}

}  // namespace geokp
