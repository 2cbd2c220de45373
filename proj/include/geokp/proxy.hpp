#pragma once

#include "geokp/mesh.hpp"

namespace geokp {

// Capsule-limb quadruped test asset: a torso capsule plus four three-segment
// legs, annotated with the default 12-joint rig. Posed frames rebuild the
// limb capsules from the posed joint chain, so bone lengths are exactly rigid.
struct QuadrupedConfig {
    double torso_radius = 0.14;
    double torso_half_length = 0.45;
    double torso_height = 0.62;   // z of the torso axis
    double leg_radius = 0.035;
    double lateral_offset = 0.11;  // y of each leg plane
    int capsule_segments = 28;
    int capsule_rings = 10;
};

struct QuadrupedPose {
    // swing (about the lateral y axis, radians) applied to the whole leg at
    // its attachment, plus a knee bend applied below the middle joint
    double swing[4] = {0, 0, 0, 0};  // FL, FR, HL, HR
    double bend[4] = {0, 0, 0, 0};
};

struct RiggedModel {
    Mesh mesh;
    Skeleton skeleton;
    // world placement applied after scanning; scanning happens in the local
    // frame so a rigidly moved scene (object plus rig) yields rigidly moved
    // outputs, bit-for-bit consistent annotations included
    Eigen::Isometry3d world_from_local = Eigen::Isometry3d::Identity();
};

RiggedModel build_quadruped(const QuadrupedConfig& config = {}, const QuadrupedPose& pose = {});

// Sinusoidal gait: diagonal leg pairs in antiphase.
QuadrupedPose walking_pose(double phase, double swing_amplitude = 0.35, double bend_amplitude = 0.25);
std::vector<RiggedModel> walking_frames(int count, const QuadrupedConfig& config = {});

// The rest pose under a rigid rotation about z plus translation per frame.
std::vector<RiggedModel> rigid_motion_frames(int count, const QuadrupedConfig& config = {});

}  // namespace geokp
