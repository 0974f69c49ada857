"""Pinhole backprojection, keyframe timelines and listener-frame transforms.

World coordinates are right-handed: +x right, +y up, -z forward (toward the
scene). Image coordinates grow right/down from the top-left corner. All
functions here are pure and safe to call from any thread.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import InvalidFov, NoKeyframes, NonPositiveDepth

if TYPE_CHECKING:
    from .scene import ListenerPoseTrack, SourceTrack, Vec3

DEFAULT_HFOV = math.radians(60.0)  # consumer-video default when metadata is absent


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole camera: zero skew, principal point at the image center."""

    width: int
    height: int
    focal_px: float
    assumed_hfov: float = DEFAULT_HFOV


@dataclass(frozen=True)
class RelativePosition:
    """Listener-relative direction: azimuth 0 dead ahead, positive to the right.

    Azimuth and elevation are degrees, azimuth in (-180, 180]; distance is
    meters. Elevation is carried for display and future filters but does not
    drive panning.
    """

    azimuth: float
    elevation: float
    distance: float


@dataclass(frozen=True)
class Pose:
    position: tuple[float, float, float]
    yaw: float = 0.0
    pitch: float = 0.0
    roll: float = 0.0


IDENTITY_POSE = Pose(position=(0.0, 0.0, 0.0))


def intrinsics_from_fov(width: int, height: int, hfov: float) -> CameraIntrinsics:
    """Build intrinsics from a horizontal field of view in radians."""
    if not math.radians(10.0) < hfov < math.radians(170.0):
        raise InvalidFov(f"horizontal fov must be in (10deg, 170deg), got {math.degrees(hfov):.1f}deg")
    focal = (width / 2.0) / math.tan(hfov / 2.0)
    return CameraIntrinsics(width=width, height=height, focal_px=focal, assumed_hfov=hfov)


def backproject(u: float, v: float, depth: float, k: CameraIntrinsics) -> tuple[float, float, float]:
    """Lift an image point at a known depth into world coordinates.

    Image y grows downward while world y grows upward, hence the sign flip;
    the camera looks down -z, so depth d lands at z = -d.
    """
    if not depth > 0:
        raise NonPositiveDepth(f"depth must be > 0, got {depth}")
    x = (u - k.width / 2.0) * depth / k.focal_px
    y = -(v - k.height / 2.0) * depth / k.focal_px
    return (x, y, -depth)


def project(p: tuple[float, float, float], k: CameraIntrinsics) -> tuple[float, float]:
    """Pinhole projection of a world point in front of the camera (z < 0)."""
    depth = -p[2]
    if not depth > 0:
        raise NonPositiveDepth(f"point must be in front of the camera, got z={p[2]}")
    u = p[0] * k.focal_px / depth + k.width / 2.0
    v = -p[1] * k.focal_px / depth + k.height / 2.0
    return (u, v)


# ---------------------------------------------------------------------------
# keyframe timelines


def _lerp3(a: Vec3, b: Vec3, alpha: float) -> Vec3:
    return (
        a[0] + (b[0] - a[0]) * alpha,
        a[1] + (b[1] - a[1]) * alpha,
        a[2] + (b[2] - a[2]) * alpha,
    )


def _eval_linear(kfs, t: float) -> Vec3:
    # Piecewise-linear with clamp outside the keyframed range.
    if t <= kfs[0].t:
        return kfs[0].p
    if t >= kfs[-1].t:
        return kfs[-1].p
    times = [k.t for k in kfs]
    i = bisect.bisect_right(times, t)
    lo, hi = kfs[i - 1], kfs[i]
    alpha = (t - lo.t) / (hi.t - lo.t)
    return _lerp3(lo.p, hi.p, alpha)


def position_at(track: SourceTrack, t: float, use_model: bool) -> Vec3:
    """Evaluate a track's position, honoring the model/user toggle.

    With ``use_model=True`` user keyframes override the model timeline:
    inside the span covered by user keyframes the value is the linear
    interpolation of the user keyframes; outside that span the model
    keyframes are interpolated (clamping past their ends). With
    ``use_model=False`` only user keyframes count and the value holds
    stepwise: the latest user keyframe at or before ``t`` (the first one
    for earlier times).
    """
    user = track.user_keyframes
    model = track.model_keyframes
    if not use_model:
        if not user:
            raise NoKeyframes(f"track {track.id!r} has no user keyframes")
        times = [k.t for k in user]
        i = bisect.bisect_right(times, t)
        return user[max(i - 1, 0)].p
    if user and user[0].t <= t <= user[-1].t:
        return _eval_linear(user, t)
    if model:
        return _eval_linear(model, t)
    if user:
        return user[0].p if t < user[0].t else user[-1].p
    raise NoKeyframes(f"track {track.id!r} has no keyframes")


def pose_at(listener: ListenerPoseTrack, t: float) -> Pose:
    """Listener pose at time ``t``: linear in position and angles, clamped.

    An empty pose track means the listener sits at the origin facing -z.
    """
    kfs = listener.keyframes
    if not kfs:
        return IDENTITY_POSE
    if t <= kfs[0].t:
        k = kfs[0]
        return Pose(position=k.position, yaw=k.orientation[0], pitch=k.orientation[1], roll=k.orientation[2])
    if t >= kfs[-1].t:
        k = kfs[-1]
        return Pose(position=k.position, yaw=k.orientation[0], pitch=k.orientation[1], roll=k.orientation[2])
    times = [k.t for k in kfs]
    i = bisect.bisect_right(times, t)
    lo, hi = kfs[i - 1], kfs[i]
    alpha = (t - lo.t) / (hi.t - lo.t)
    pos = _lerp3(lo.position, hi.position, alpha)
    ori = _lerp3(lo.orientation, hi.orientation, alpha)
    return Pose(position=pos, yaw=ori[0], pitch=ori[1], roll=ori[2])


# ---------------------------------------------------------------------------
# listener frame


def _rotation_rows(yaw: float, pitch: float, roll: float):
    # R = Ry(yaw) @ Rx(pitch) @ Rz(roll), rows returned for R transposed use.
    cy, sy = math.cos(yaw), math.sin(yaw)
    cx, sx = math.cos(pitch), math.sin(pitch)
    cz, sz = math.cos(roll), math.sin(roll)
    # fmt: off
    return (
        (cy * cz + sy * sx * sz,  -cy * sz + sy * sx * cz,  sy * cx),
        (cx * sz,                  cx * cz,                 -sx),
        (-sy * cz + cy * sx * sz,  sy * sz + cy * sx * cz,  cy * cx),
    )
    # fmt: on


def to_listener_frame(pose: Pose, world: tuple[float, float, float]) -> tuple[float, float, float]:
    """Express a world point in the listener's local frame.

    local = R(pose)^T (world - pose.position), with R built yaw about +y,
    then pitch about +x, then roll about +z.
    """
    d = (world[0] - pose.position[0], world[1] - pose.position[1], world[2] - pose.position[2])
    r = _rotation_rows(pose.yaw, pose.pitch, pose.roll)
    # R^T d: dot each column of R with d.
    return (
        r[0][0] * d[0] + r[1][0] * d[1] + r[2][0] * d[2],
        r[0][1] * d[0] + r[1][1] * d[1] + r[2][1] * d[2],
        r[0][2] * d[0] + r[1][2] * d[1] + r[2][2] * d[2],
    )


def direction_of(local: tuple[float, float, float]) -> RelativePosition:
    """Convert a listener-local point to azimuth/elevation/distance.

    Azimuth is atan2(x, -z): 0 dead ahead, +90 right, 180 directly behind,
    normalized into (-180, 180]. The origin maps to azimuth 0, distance 0.
    """
    x, y, z = local
    dist = math.sqrt(x * x + y * y + z * z)
    if dist == 0.0:
        return RelativePosition(azimuth=0.0, elevation=0.0, distance=0.0)
    az = math.degrees(math.atan2(x, -z))
    if az <= -180.0:
        az += 360.0
    elev = math.degrees(math.asin(max(-1.0, min(1.0, y / dist))))
    return RelativePosition(azimuth=az, elevation=elev, distance=dist)
